#include "eecm/awtls.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "eecm/errors.hpp"

namespace eecm {

bool AwtlsAccumulator::push_pair(double dtheta, double dah, double var_x, double var_y) {
    if (!(var_x > 0.0) || !(var_y > 0.0))
        throw ArgumentError("awtls pair variances must be positive");
    if (std::abs(dtheta) < dtheta_floor) {
        ++discarded;
        return false;
    }
    const double a = 1.0 / var_x;
    const double b = 1.0 / var_y;
    sxx_a = gamma * sxx_a + a * dtheta * dtheta;
    sxy_a = gamma * sxy_a + a * dtheta * dah;
    syy_a = gamma * syy_a + a * dah * dah;
    sxx_b = gamma * sxx_b + b * dtheta * dtheta;
    sxy_b = gamma * sxy_b + b * dtheta * dah;
    syy_b = gamma * syy_b + b * dah * dah;
    ++count;
    return true;
}

double AwtlsAccumulator::merit(double q) const {
    // chi(Q) = N(Q)/(1+Q^2)^2 with
    // N = c4 Q^4 + c3 Q^3 + c2 Q^2 + c1 Q + c0.
    const double c4 = sxx_a, c3 = -2.0 * sxy_a, c2 = syy_a + sxx_b;
    const double c1 = -2.0 * sxy_b, c0 = syy_b;
    const double n = (((c4 * q + c3) * q + c2) * q + c1) * q + c0;
    const double d = 1.0 + q * q;
    return n / (d * d);
}

std::optional<AwtlsAccumulator::Estimate> AwtlsAccumulator::estimate() const {
    if (count < 1) return std::nullopt;

    const double c4 = sxx_a, c3 = -2.0 * sxy_a, c2 = syy_a + sxx_b;
    const double c1 = -2.0 * sxy_b, c0 = syy_b;

    // d chi / dQ = 0  reduces to  N'(Q)(1+Q^2) - 4 Q N(Q) = 0:
    //   -c3 Q^4 + (4 c4 - 2 c2) Q^3 + 3 (c3 - c1) Q^2 + (2 c2 - 4 c0) Q + c1 = 0
    const double q4 = -c3;
    const double q3 = 4.0 * c4 - 2.0 * c2;
    const double q2 = 3.0 * (c3 - c1);
    const double q1 = 2.0 * c2 - 4.0 * c0;
    const double q0 = c1;

    // Roots via the companion matrix. Degree may drop when q4 ~ 0.
    std::vector<double> coeffs{q4, q3, q2, q1, q0}; // descending
    std::size_t lead = 0;
    const double scale = std::max({std::abs(q4), std::abs(q3), std::abs(q2), std::abs(q1),
                                   std::abs(q0), 1e-300});
    while (lead < coeffs.size() - 1 && std::abs(coeffs[lead]) < 1e-14 * scale) ++lead;
    const std::size_t degree = coeffs.size() - 1 - lead;
    if (degree == 0) return std::nullopt;

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (std::size_t i = 0; i < degree; ++i)
        companion(0, i) = -coeffs[lead + 1 + i] / coeffs[lead];
    for (std::size_t i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    const Eigen::VectorXcd roots = companion.eigenvalues();

    double best_q = 0.0;
    double best_merit = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        const auto r = roots[i];
        if (std::abs(r.imag()) > 1e-8 * std::max(1.0, std::abs(r.real()))) continue;
        const double q = r.real();
        if (!(q > 0.0)) continue;
        const double m = merit(q);
        if (m < best_merit) {
            best_merit = m;
            best_q = q;
        }
    }
    if (!(best_q > 0.0)) return std::nullopt;

    // sigma_Q from the merit Hessian: chi'' at the minimum.
    const auto npoly = [&](double q) { return (((c4 * q + c3) * q + c2) * q + c1) * q + c0; };
    const auto npoly1 = [&](double q) { return ((4.0 * c4 * q + 3.0 * c3) * q + 2.0 * c2) * q + c1; };
    const auto npoly2 = [&](double q) { return (12.0 * c4 * q + 6.0 * c3) * q + 2.0 * c2; };
    const double q = best_q;
    const double d = 1.0 + q * q;
    const double dd1 = 4.0 * q * d;            // d/dQ (1+Q^2)^2
    const double dd2 = 4.0 * d + 8.0 * q * q;  // d2/dQ2 (1+Q^2)^2
    const double d2 = d * d;
    const double chi2 = npoly2(q) / d2 - 2.0 * npoly1(q) * dd1 / (d2 * d) -
                        npoly(q) * dd2 / (d2 * d) +
                        2.0 * npoly(q) * dd1 * dd1 / (d2 * d2);
    Estimate est;
    est.q_ah = best_q;
    est.sigma_q_ah = chi2 > 0.0 ? std::sqrt(2.0 / chi2) : std::numeric_limits<double>::infinity();
    return est;
}

std::vector<CapacityPair> PairHarvester::on_sample(double t_s, double current_a, double dt_s,
                                                   double thp, double var_thp, double thn,
                                                   double var_thn) {
    std::vector<CapacityPair> pairs;
    if (!open_) {
        open_ = true;
        start_t_ = t_s;
        ah_ = 0.0;
        sum_dt_ = 0.0;
        start_thp_ = thp;
        start_var_p_ = var_thp;
        start_thn_ = thn;
        start_var_n_ = var_thn;
        return pairs;
    }
    ah_ += eta_ * current_a * dt_s / 3600.0;
    sum_dt_ += dt_s;
    if (t_s - start_t_ < window_s_) return pairs;

    // Integrated current-sensor noise over the window.
    const double var_y = std::max(
        1e-18, current_noise_a_ * current_noise_a_ * sum_dt_ * dt_s / (3600.0 * 3600.0));

    CapacityPair p;
    p.electrode = Electrode::positive;
    p.t_s = t_s;
    p.dtheta = thp - start_thp_;
    p.dah = ah_;
    p.var_x = var_thp + start_var_p_;
    p.var_y = var_y;
    pairs.push_back(p);

    CapacityPair n;
    n.electrode = Electrode::negative;
    n.t_s = t_s;
    n.dtheta = thn - start_thn_;
    n.dah = -ah_;
    n.var_x = var_thn + start_var_n_;
    n.var_y = var_y;
    pairs.push_back(n);

    start_t_ = t_s;
    ah_ = 0.0;
    sum_dt_ = 0.0;
    start_thp_ = thp;
    start_var_p_ = var_thp;
    start_thn_ = thn;
    start_var_n_ = var_thn;
    return pairs;
}

} // namespace eecm
