#include "eecm/newton.hpp"

#include <cmath>
#include <limits>

namespace eecm {

NewtonResult damped_newton(const VectorFn& fn, const Eigen::VectorXd& x0,
                           const NewtonOptions& opts) {
    NewtonResult res;
    res.x = x0;
    Eigen::VectorXd f = fn(res.x);
    const auto n = x0.size();
    res.residual_norm = f.lpNorm<Eigen::Infinity>();

    for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
        if (res.residual_norm < opts.residual_tol) {
            res.converged = true;
            return res;
        }
        Eigen::MatrixXd jac(f.size(), n);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = opts.jacobian_step * std::max(1.0, std::abs(res.x[j]));
            Eigen::VectorXd xp = res.x, xm = res.x;
            xp[j] += h;
            xm[j] -= h;
            jac.col(j) = (fn(xp) - fn(xm)) / (2.0 * h);
        }
        Eigen::VectorXd step = jac.fullPivLu().solve(-f);
        if (!step.allFinite()) break;

        double damping = 1.0;
        bool accepted = false;
        while (damping >= opts.min_damping) {
            Eigen::VectorXd x_trial = res.x + damping * step;
            Eigen::VectorXd f_trial = fn(x_trial);
            const double norm_trial = f_trial.lpNorm<Eigen::Infinity>();
            if (std::isfinite(norm_trial) && norm_trial < res.residual_norm) {
                res.x = x_trial;
                f = f_trial;
                res.residual_norm = norm_trial;
                accepted = true;
                break;
            }
            damping *= 0.5;
        }
        if (!accepted) break; // stalled
    }
    res.converged = res.residual_norm < opts.residual_tol;
    return res;
}

double bisect(const std::function<double(double)>& fn, double lo, double hi,
              double xtol, int max_iterations) {
    double flo = fn(lo);
    double fhi = fn(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (!(flo * fhi < 0.0)) return std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < max_iterations && hi - lo > xtol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = fn(mid);
        if (fm == 0.0) return mid;
        if (flo * fm < 0.0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace eecm
