#include "eecm/de.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eecm/errors.hpp"
#include "eecm/random.hpp"

namespace eecm {

namespace {

double clamp_box(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

} // namespace

DeResult minimize_de(const ScalarFn& fn, const std::vector<double>& lower,
                     const std::vector<double>& upper, const DeOptions& opts) {
    const std::size_t dim = lower.size();
    if (dim == 0 || upper.size() != dim) throw ArgumentError("bad DE bounds");
    for (std::size_t d = 0; d < dim; ++d)
        if (!(upper[d] > lower[d])) throw ArgumentError("DE bounds must satisfy lo < hi");
    const int np = std::max(opts.population, 8);

    Rng rng(opts.seed);
    std::vector<std::vector<double>> pop(np, std::vector<double>(dim));
    std::vector<double> cost(np);
    DeResult res;
    res.value = std::numeric_limits<double>::infinity();

    for (int i = 0; i < np; ++i) {
        for (std::size_t d = 0; d < dim; ++d) pop[i][d] = rng.uniform(lower[d], upper[d]);
        cost[i] = fn(pop[i]);
        ++res.evaluations;
        if (cost[i] < res.value) {
            res.value = cost[i];
            res.x = pop[i];
        }
    }

    std::vector<double> trial(dim);
    for (int gen = 0; gen < opts.generations; ++gen) {
        for (int i = 0; i < np; ++i) {
            int a, b, c;
            do { a = static_cast<int>(rng.next_u64() % np); } while (a == i);
            do { b = static_cast<int>(rng.next_u64() % np); } while (b == i || b == a);
            do { c = static_cast<int>(rng.next_u64() % np); } while (c == i || c == a || c == b);
            const std::size_t jrand = rng.next_u64() % dim;
            for (std::size_t d = 0; d < dim; ++d) {
                if (d == jrand || rng.uniform() < opts.crossover_rate) {
                    trial[d] = clamp_box(
                        pop[a][d] + opts.differential_weight * (pop[b][d] - pop[c][d]),
                        lower[d], upper[d]);
                } else {
                    trial[d] = pop[i][d];
                }
            }
            const double tc = fn(trial);
            ++res.evaluations;
            if (tc <= cost[i]) {
                pop[i] = trial;
                cost[i] = tc;
                if (tc < res.value) {
                    res.value = tc;
                    res.x = trial;
                }
            }
        }
        ++res.generations;
    }

    if (opts.polish_iterations > 0) {
        DeResult polished =
            minimize_nelder_mead(fn, res.x, lower, upper, opts.polish_iterations);
        res.evaluations += polished.evaluations;
        if (polished.value < res.value) {
            res.value = polished.value;
            res.x = polished.x;
        }
    }
    return res;
}

DeResult minimize_nelder_mead(const ScalarFn& fn, const std::vector<double>& x0,
                              const std::vector<double>& lower,
                              const std::vector<double>& upper, int max_iterations,
                              double initial_scale) {
    const std::size_t dim = x0.size();
    DeResult res;

    const auto boxed = [&](std::vector<double> x) {
        for (std::size_t d = 0; d < dim; ++d) x[d] = clamp_box(x[d], lower[d], upper[d]);
        return x;
    };

    std::vector<std::vector<double>> simplex(dim + 1, x0);
    std::vector<double> value(dim + 1);
    for (std::size_t d = 0; d < dim; ++d) {
        const double span = upper[d] - lower[d];
        simplex[d + 1][d] = clamp_box(x0[d] + initial_scale * span, lower[d], upper[d]);
        if (simplex[d + 1][d] == x0[d])
            simplex[d + 1][d] = clamp_box(x0[d] - initial_scale * span, lower[d], upper[d]);
    }
    for (std::size_t i = 0; i <= dim; ++i) {
        value[i] = fn(simplex[i]);
        ++res.evaluations;
    }

    for (int it = 0; it < max_iterations; ++it) {
        std::vector<std::size_t> order(dim + 1);
        for (std::size_t i = 0; i <= dim; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
        const std::size_t best = order[0], worst = order[dim], second = order[dim - 1];

        if (std::abs(value[worst] - value[best]) <
            1e-15 * (std::abs(value[best]) + 1e-300))
            break;

        std::vector<double> centroid(dim, 0.0);
        for (std::size_t i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (std::size_t d = 0; d < dim; ++d) centroid[d] += simplex[i][d];
        }
        for (double& c : centroid) c /= static_cast<double>(dim);

        const auto blend = [&](double coef) {
            std::vector<double> x(dim);
            for (std::size_t d = 0; d < dim; ++d)
                x[d] = centroid[d] + coef * (simplex[worst][d] - centroid[d]);
            return boxed(std::move(x));
        };

        const std::vector<double> reflected = blend(-1.0);
        const double fr = fn(reflected);
        ++res.evaluations;
        if (fr < value[best]) {
            const std::vector<double> expanded = blend(-2.0);
            const double fe = fn(expanded);
            ++res.evaluations;
            if (fe < fr) {
                simplex[worst] = expanded;
                value[worst] = fe;
            } else {
                simplex[worst] = reflected;
                value[worst] = fr;
            }
        } else if (fr < value[second]) {
            simplex[worst] = reflected;
            value[worst] = fr;
        } else {
            const std::vector<double> contracted = blend(0.5);
            const double fc = fn(contracted);
            ++res.evaluations;
            if (fc < value[worst]) {
                simplex[worst] = contracted;
                value[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (std::size_t d = 0; d < dim; ++d)
                        simplex[i][d] = simplex[best][d] + 0.5 * (simplex[i][d] - simplex[best][d]);
                    value[i] = fn(simplex[i]);
                    ++res.evaluations;
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= dim; ++i)
        if (value[i] < value[best]) best = i;
    res.x = simplex[best];
    res.value = value[best];
    return res;
}

} // namespace eecm
