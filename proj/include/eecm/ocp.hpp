#pragma once

#include <array>

namespace eecm {

enum class Electrode { negative, positive };

inline const char* to_string(Electrode e) {
    return e == Electrode::negative ? "negative" : "positive";
}

struct TanhTerm {
    double amplitude = 0.0; // V
    double slope = 0.0;     // 1/theta
    double center = 0.0;    // theta
};

// Open-circuit potential as a closed-form function of the state of
// lithiation: exponential + linear + three tanh terms. Total on all of R,
// so mild extrapolation outside [0,1] (sigma points) is well defined.
struct OcpCurve {
    Electrode electrode = Electrode::negative;
    double exp_amplitude = 0.0; // V
    double exp_rate = 0.0;      // 1/theta
    double linear_slope = 0.0;  // V/theta
    double offset = 0.0;        // V
    std::array<TanhTerm, 3> tanh_terms{};

    // LG M50 NMC/graphite-SiOx half-cell curves.
    static OcpCurve lgm50(Electrode electrode);
};

double ocp(const OcpCurve& curve, double theta);

// dU/dtheta, analytic.
double ocp_slope(const OcpCurve& curve, double theta);

} // namespace eecm
