#include "eecm/esoh_solver.hpp"

#include <algorithm>
#include <cmath>

#include "eecm/newton.hpp"

namespace eecm {

namespace {

// Two equations become linearly dependent when the SOL input sits exactly on
// a window endpoint; nudge inward.
double nudge_inward(double th, double lo, double hi, double eps = 1e-6) {
    if (std::abs(th - lo) < eps) return lo + eps;
    if (std::abs(th - hi) < eps) return hi - eps;
    return th;
}

} // namespace

std::array<double, 4> window_residuals(const WindowSolveInput& in, const OcpCurve& ocp_neg,
                                       const OcpCurve& ocp_pos,
                                       const std::array<double, 4>& e) {
    const double thp0 = e[0], thp100 = e[1], thn0 = e[2], thn100 = e[3];
    return {in.qn_ah * (in.thn - thn0) - in.qp_ah * (thp0 - in.thp),
            in.qn_ah * (thn100 - in.thn) - in.qp_ah * (in.thp - thp100),
            ocp(ocp_pos, thp0) - ocp(ocp_neg, thn0) - in.vmin_v,
            ocp(ocp_pos, thp100) - ocp(ocp_neg, thn100) - in.vmax_v};
}

WindowSolution solve_windows(const WindowSolveInput& input, const OcpCurve& ocp_neg,
                             const OcpCurve& ocp_pos) {
    WindowSolution out;
    if (!(input.qp_ah > 0.0) || !(input.qn_ah > 0.0) || !(input.vmax_v > input.vmin_v) ||
        !std::isfinite(input.thp) || !std::isfinite(input.thn))
        return out;

    WindowSolveInput in = input;
    in.thp = nudge_inward(in.thp, in.warm_start[1], in.warm_start[0]);
    in.thn = nudge_inward(in.thn, in.warm_start[2], in.warm_start[3]);

    const auto system = [&](const Eigen::VectorXd& x) {
        const auto r = window_residuals(in, ocp_neg, ocp_pos, {x[0], x[1], x[2], x[3]});
        return Eigen::Vector4d(r[0], r[1], r[2], r[3]);
    };

    const auto accept = [&](const std::array<double, 4>& e) {
        const auto r = window_residuals(in, ocp_neg, ocp_pos, e);
        double norm = 0.0;
        for (double v : r) norm = std::max(norm, std::abs(v));
        const bool in_bounds = std::all_of(e.begin(), e.end(), [](double v) {
            return v >= 0.0 && v <= 1.0;
        });
        if (norm < 1e-9 && in_bounds && e[0] > e[1] && e[3] > e[2]) {
            out.thp0 = e[0];
            out.thp100 = e[1];
            out.thn0 = e[2];
            out.thn100 = e[3];
            out.residual = norm;
            out.ok = true;
        }
        return out.ok;
    };

    Eigen::Vector4d x0(in.warm_start[0], in.warm_start[1], in.warm_start[2], in.warm_start[3]);
    const NewtonResult nr = damped_newton(system, x0);
    out.newton_iterations = nr.iterations;
    if (nr.converged && accept({nr.x[0], nr.x[1], nr.x[2], nr.x[3]})) return out;

    // Fallback: the system decouples into (thp0, thn0) and (thp100, thn100)
    // pairs once the capacity equations are substituted into the voltage
    // equations; each reduces to a monotone scalar root find.
    out.used_bisection_fallback = true;
    const double ratio = in.qn_ah / in.qp_ah;
    const auto g0 = [&](double thn0) {
        const double thp0 = in.thp + ratio * (in.thn - thn0);
        return ocp(ocp_pos, thp0) - ocp(ocp_neg, thn0) - in.vmin_v;
    };
    const auto g100 = [&](double thn100) {
        const double thp100 = in.thp - ratio * (thn100 - in.thn);
        return ocp(ocp_pos, thp100) - ocp(ocp_neg, thn100) - in.vmax_v;
    };
    const double thn0 = bisect(g0, 0.0, 1.0);
    const double thn100 = bisect(g100, 0.0, 1.0);
    if (std::isfinite(thn0) && std::isfinite(thn100)) {
        const double thp0 = in.thp + ratio * (in.thn - thn0);
        const double thp100 = in.thp - ratio * (thn100 - in.thn);
        accept({thp0, thp100, thn0, thn100});
    }
    return out;
}

} // namespace eecm
