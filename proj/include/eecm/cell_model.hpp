#pragma once

#include <cmath>
#include <string>

#include "eecm/ocp.hpp"
#include "eecm/params.hpp"

namespace eecm {

// Full eECM state: two RC branch voltages per electrode plus both SOLs.
struct EecmState {
    double vc1p = 0.0; // V
    double vc2p = 0.0; // V
    double vc1n = 0.0; // V
    double vc2n = 0.0; // V
    double thp = 0.0;  // PE SOL, fraction
    double thn = 0.0;  // NE SOL, fraction
};

// Everything needed to evaluate the cell model. esoh holds the reference
// (fresh) parameters; estimators carry their own evolving copy.
struct ParameterPack {
    OcpCurve ocp_neg;
    OcpCurve ocp_pos;
    HalfCellParamTable table_neg;
    HalfCellParamTable table_pos;
    EsohParams esoh;
    double vmin_v = 2.5;
    double vmax_v = 4.2;

    void validate() const;

    static ParameterPack lgm50();
};

// Sign convention: current > 0 on discharge.
// PE: U(thp) - vc1p - vc2p - R0p i, NE: U(thn) + vc1n + vc2n + R0n i.
double electrode_potential(Electrode electrode, const EecmState& state,
                           const ParameterPack& pack, double current_a);

// v = v_pos - v_neg.
double cell_voltage(const EecmState& state, const ParameterPack& pack, double current_a);

struct StepDiagnostics {
    long clamp_events = 0;
};

// Exact zero-order-hold propagation over dt: RC branches relax toward R*i,
// SOLs integrate current (PE up, NE down on discharge), then clamp to [0,1].
// Throws ArgumentError when dt <= 0.
EecmState step_state(const EecmState& state, const ParameterPack& pack,
                     const EsohParams& esoh, double current_a, double dt_s,
                     StepDiagnostics* diag = nullptr);

// ZOH discretization of one RC branch: v <- a v + b i.
struct RcDiscrete {
    double a = 0.0;
    double b = 0.0;
};
inline RcDiscrete discretize_rc(double r_ohm, double c_f, double dt_s) {
    const double a = std::exp(-dt_s / (r_ohm * c_f));
    return RcDiscrete{a, r_ohm * (1.0 - a)};
}

} // namespace eecm
