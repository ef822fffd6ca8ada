#pragma once

#include <array>

#include "eecm/ocp.hpp"
#include "eecm/params.hpp"

namespace eecm {

// One window solve: given capacities, the current SOL estimates, and the
// operating voltage limits, find the four stoichiometric-window endpoints
// satisfying the two capacity equivalencies and the two voltage equations.
struct WindowSolveInput {
    double qp_ah = 0.0;
    double qn_ah = 0.0;
    double thp = 0.0; // current PE SOL estimate
    double thn = 0.0; // current NE SOL estimate
    double vmin_v = 0.0;
    double vmax_v = 0.0;
    // Warm start, typically the previous solution.
    std::array<double, 4> warm_start{0.9, 0.3, 0.03, 0.9}; // thp0, thp100, thn0, thn100
};

struct WindowSolution {
    double thp0 = 0.0;
    double thp100 = 0.0;
    double thn0 = 0.0;
    double thn100 = 0.0;
    double residual = 0.0; // max-norm over the four equations
    bool ok = false;       // false => caller keeps previous windows
    int newton_iterations = 0;
    bool used_bisection_fallback = false;
};

WindowSolution solve_windows(const WindowSolveInput& input, const OcpCurve& ocp_neg,
                             const OcpCurve& ocp_pos);

// Residuals of the four equations at a candidate solution; used by tests to
// re-verify every reported solve independently of the solver path.
std::array<double, 4> window_residuals(const WindowSolveInput& input,
                                       const OcpCurve& ocp_neg, const OcpCurve& ocp_pos,
                                       const std::array<double, 4>& endpoints);

// Fires once at run start and then every period_s of data time.
class SolveSchedule {
public:
    explicit SolveSchedule(double period_s) : period_s_(period_s) {}

    bool due(double t_s) {
        if (!started_ || t_s >= next_) {
            started_ = true;
            next_ = t_s + period_s_;
            return true;
        }
        return false;
    }

    double period_s() const { return period_s_; }

private:
    double period_s_;
    double next_ = 0.0;
    bool started_ = false;
};

} // namespace eecm
