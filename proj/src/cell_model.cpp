#include "eecm/cell_model.hpp"

#include <algorithm>
#include <cmath>

#include "eecm/errors.hpp"

namespace eecm {

void ParameterPack::validate() const {
    table_neg.validate();
    table_pos.validate();
    esoh.validate();
    if (table_neg.electrode != Electrode::negative || table_pos.electrode != Electrode::positive)
        throw ConfigError("parameter pack tables assigned to wrong electrodes");
    if (!(vmax_v > vmin_v)) throw ConfigError("vmax must exceed vmin");
}

ParameterPack ParameterPack::lgm50() {
    ParameterPack p;
    p.ocp_neg = OcpCurve::lgm50(Electrode::negative);
    p.ocp_pos = OcpCurve::lgm50(Electrode::positive);
    p.table_neg = HalfCellParamTable::lgm50(Electrode::negative);
    p.table_pos = HalfCellParamTable::lgm50(Electrode::positive);
    // Capacities from Table B geometry; windows solved from the voltage
    // limits, electrode balance, and a 0.30 mol lithium inventory.
    p.esoh.qp_ah = 8.732288462089919;
    p.esoh.qn_ah = 5.827595008802125;
    p.esoh.thp0 = 0.902217412602787;
    p.esoh.thp100 = 0.263845224892873;
    p.esoh.thn0 = 0.027797738870674;
    p.esoh.thn100 = 0.984358735446211;
    p.esoh.eta = 1.0;
    p.vmin_v = 2.5;
    p.vmax_v = 4.2;
    return p;
}

double electrode_potential(Electrode electrode, const EecmState& state,
                           const ParameterPack& pack, double current_a) {
    if (electrode == Electrode::positive) {
        const RcValues rc = interpolate_rc(pack.table_pos, state.thp);
        return ocp(pack.ocp_pos, state.thp) - state.vc1p - state.vc2p - rc.r0 * current_a;
    }
    const RcValues rc = interpolate_rc(pack.table_neg, state.thn);
    return ocp(pack.ocp_neg, state.thn) + state.vc1n + state.vc2n + rc.r0 * current_a;
}

double cell_voltage(const EecmState& state, const ParameterPack& pack, double current_a) {
    return electrode_potential(Electrode::positive, state, pack, current_a) -
           electrode_potential(Electrode::negative, state, pack, current_a);
}

EecmState step_state(const EecmState& state, const ParameterPack& pack,
                     const EsohParams& esoh, double current_a, double dt_s,
                     StepDiagnostics* diag) {
    if (!(dt_s > 0.0)) throw ArgumentError("step_state requires dt > 0");

    const RcValues rcp = interpolate_rc(pack.table_pos, state.thp);
    const RcValues rcn = interpolate_rc(pack.table_neg, state.thn);

    EecmState next;
    const RcDiscrete p1 = discretize_rc(rcp.r1, rcp.c1, dt_s);
    const RcDiscrete p2 = discretize_rc(rcp.r2, rcp.c2, dt_s);
    const RcDiscrete n1 = discretize_rc(rcn.r1, rcn.c1, dt_s);
    const RcDiscrete n2 = discretize_rc(rcn.r2, rcn.c2, dt_s);
    next.vc1p = p1.a * state.vc1p + p1.b * current_a;
    next.vc2p = p2.a * state.vc2p + p2.b * current_a;
    next.vc1n = n1.a * state.vc1n + n1.b * current_a;
    next.vc2n = n2.a * state.vc2n + n2.b * current_a;

    const double dq = esoh.eta * current_a * dt_s / 3600.0;
    next.thp = state.thp + dq / esoh.qp_ah;
    next.thn = state.thn - dq / esoh.qn_ah;

    const double thp_clamped = std::clamp(next.thp, 0.0, 1.0);
    const double thn_clamped = std::clamp(next.thn, 0.0, 1.0);
    if (diag && (thp_clamped != next.thp || thn_clamped != next.thn)) ++diag->clamp_events;
    next.thp = thp_clamped;
    next.thn = thn_clamped;
    return next;
}

} // namespace eecm
