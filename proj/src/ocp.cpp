#include "eecm/ocp.hpp"

#include <cmath>

namespace eecm {

OcpCurve OcpCurve::lgm50(Electrode electrode) {
    OcpCurve c;
    c.electrode = electrode;
    if (electrode == Electrode::negative) {
        c.exp_amplitude = 1.9793;
        c.exp_rate = -39.3631;
        c.offset = 0.2482;
        c.tanh_terms = {TanhTerm{-0.0909, 29.8538, 0.1234},
                        TanhTerm{-0.04478, 14.9159, 0.2769},
                        TanhTerm{-0.0205, 30.4444, 0.6103}};
    } else {
        c.linear_slope = -0.809;
        c.offset = 4.4875;
        c.tanh_terms = {TanhTerm{-0.0428, 18.5138, 0.5542},
                        TanhTerm{-17.7326, 15.789, 0.3117},
                        TanhTerm{17.5842, 15.9308, 0.312}};
    }
    return c;
}

double ocp(const OcpCurve& curve, double theta) {
    double u = curve.offset + curve.linear_slope * theta;
    if (curve.exp_amplitude != 0.0) u += curve.exp_amplitude * std::exp(curve.exp_rate * theta);
    for (const auto& t : curve.tanh_terms) {
        if (t.amplitude != 0.0) u += t.amplitude * std::tanh(t.slope * (theta - t.center));
    }
    return u;
}

double ocp_slope(const OcpCurve& curve, double theta) {
    double d = curve.linear_slope;
    if (curve.exp_amplitude != 0.0)
        d += curve.exp_amplitude * curve.exp_rate * std::exp(curve.exp_rate * theta);
    for (const auto& t : curve.tanh_terms) {
        if (t.amplitude != 0.0) {
            const double s = std::tanh(t.slope * (theta - t.center));
            d += t.amplitude * t.slope * (1.0 - s * s);
        }
    }
    return d;
}

} // namespace eecm
