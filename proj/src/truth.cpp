#include "eecm/truth.hpp"

#include <cmath>

#include "eecm/errors.hpp"
#include "eecm/newton.hpp"

namespace eecm {

namespace {
constexpr double kHardVmin = 2.0;
constexpr double kHardVmax = 4.4;
} // namespace

void DegradationSpec::validate() const {
    for (double v : {lam_p_pct, lam_n_pct, lli_pct}) {
        if (v < 0.0 || v >= 80.0)
            throw ArgumentError("degradation percentages must lie in [0, 80)");
    }
}

double lithium_inventory_mol(const EsohParams& esoh) {
    return 3600.0 / kFaraday * (esoh.thp0 * esoh.qp_ah + esoh.thn0 * esoh.qn_ah);
}

EsohParams apply_degradation(const EsohParams& fresh, const DegradationSpec& spec,
                             double vmin_v, double vmax_v, const OcpCurve& ocp_neg,
                             const OcpCurve& ocp_pos) {
    fresh.validate();
    spec.validate();

    const double qp = (1.0 - spec.lam_p_pct / 100.0) * fresh.qp_ah;
    const double qn = (1.0 - spec.lam_n_pct / 100.0) * fresh.qn_ah;
    const double nli = (1.0 - spec.lli_pct / 100.0) * lithium_inventory_mol(fresh);

    // Four equations in (thp0, thp100, thn0, thn100): both voltage limits,
    // equal useful capacities, and the lithium inventory at 0 % SOC.
    const auto system = [&](const Eigen::VectorXd& x) {
        Eigen::Vector4d f;
        f[0] = ocp(ocp_pos, x[0]) - ocp(ocp_neg, x[2]) - vmin_v;
        f[1] = ocp(ocp_pos, x[1]) - ocp(ocp_neg, x[3]) - vmax_v;
        f[2] = qp * (x[0] - x[1]) - qn * (x[3] - x[2]);
        f[3] = 3600.0 / kFaraday * (x[0] * qp + x[2] * qn) - nli;
        return f;
    };

    Eigen::Vector4d x0(fresh.thp0, fresh.thp100, fresh.thn0, fresh.thn100);
    NewtonResult nr = damped_newton(system, x0);

    if (!nr.converged) {
        // Fallback: the inventory equation gives thp0(thn0) and the balance
        // gives thp100(thn100); both voltage equations become monotone
        // scalar root finds.
        const auto thp0_of = [&](double thn0) {
            return (nli * kFaraday / 3600.0 - thn0 * qn) / qp;
        };
        const double thn0 = bisect(
            [&](double t) { return ocp(ocp_pos, thp0_of(t)) - ocp(ocp_neg, t) - vmin_v; }, 0.0,
            1.0);
        if (std::isfinite(thn0)) {
            const double thp0 = thp0_of(thn0);
            const double thn100 = bisect(
                [&](double t) {
                    const double thp100 = thp0 - qn / qp * (t - thn0);
                    return ocp(ocp_pos, thp100) - ocp(ocp_neg, t) - vmax_v;
                },
                0.0, 1.0);
            if (std::isfinite(thn100)) {
                Eigen::Vector4d xf(thp0, thp0 - qn / qp * (thn100 - thn0), thn0, thn100);
                nr.x = xf;
                nr.residual_norm = system(xf).lpNorm<Eigen::Infinity>();
                nr.converged = nr.residual_norm < 1e-9;
            }
        }
    }

    const bool in_bounds = nr.converged && (nr.x.array() >= 0.0).all() &&
                           (nr.x.array() <= 1.0).all() && nr.x[0] > nr.x[1] &&
                           nr.x[3] > nr.x[2];
    if (!in_bounds)
        throw InfeasibleDegradationError(
            "no stoichiometric window in [0,1]^4 for the requested degradation");

    EsohParams aged = fresh;
    aged.qp_ah = qp;
    aged.qn_ah = qn;
    aged.thp0 = nr.x[0];
    aged.thp100 = nr.x[1];
    aged.thn0 = nr.x[2];
    aged.thn100 = nr.x[3];
    aged.validate();
    return aged;
}

ParameterPack apply_table_mismatch(const ParameterPack& pack, double fraction,
                                   std::uint64_t seed) {
    if (fraction < 0.0 || fraction >= 1.0)
        throw ArgumentError("mismatch fraction must lie in [0, 1)");
    ParameterPack out = pack;
    Rng rng(seed);
    for (auto* table : {&out.table_neg, &out.table_pos}) {
        for (auto* col : {&table->r0_ohm, &table->r1_ohm, &table->c1_f, &table->r2_ohm,
                          &table->c2_f}) {
            for (double& v : *col) v *= rng.uniform(1.0 - fraction, 1.0 + fraction);
        }
    }
    return out;
}

SimulationResult simulate_trajectory(const ParameterPack& truth_pack,
                                     const EsohParams& truth_esoh,
                                     const ProfileSpec& profile, double initial_soc) {
    profile.validate();
    truth_esoh.validate();

    SimulationResult out;
    Rng noise_rng(profile.seed ^ 0x5bf03635f0a0c1c2ULL);

    const SolPair init = sol_from_soc(truth_esoh, initial_soc);
    EecmState st;
    st.thp = init.thp;
    st.thn = init.thn;

    StepDiagnostics diag;
    double t = 0.0;
    for (std::size_t s = 0; s < profile.segments.size(); ++s) {
        const ProfileSegment& seg = profile.segments[s];
        SegmentCurrent gen(seg, profile.dt_s, profile.seed, s);
        while (!gen.exhausted()) {
            const double i = gen.next();
            const double v = cell_voltage(st, truth_pack, i);
            if (v < kHardVmin || v > kHardVmax) {
                ++out.terminated_segments;
                break;
            }
            if (seg.termination_v) {
                // Direction from the segment's net intent, not the sample:
                // a regen spike inside a discharge drive must not trip the
                // upper-crossing check.
                const bool discharging = seg.kind == SegmentKind::drive_cycle
                                             ? seg.regen_fraction < 0.5
                                             : seg.magnitude_a > 0.0;
                if ((discharging && v <= *seg.termination_v) ||
                    (!discharging && v >= *seg.termination_v)) {
                    ++out.terminated_segments;
                    break;
                }
            }
            const double measured =
                v + (profile.noise_std_v > 0.0 ? profile.noise_std_v * noise_rng.normal() : 0.0);
            out.records.push_back({t, i, measured});
            out.truth.push_back({t, st.thn, st.thp, soc_from_sol(truth_esoh, st.thn)});
            st = step_state(st, truth_pack, truth_esoh, i, profile.dt_s, &diag);
            t += profile.dt_s;
        }
    }
    out.clamp_events = diag.clamp_events;
    return out;
}

} // namespace eecm
