#include "eecm/characterization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "eecm/errors.hpp"
#include "eecm/random.hpp"

namespace eecm {

namespace {

// Sign of the RC/ohmic contribution in the electrode potential: PE subtracts,
// NE adds.
double branch_sign(Electrode e) { return e == Electrode::positive ? -1.0 : 1.0; }

// ZOH response of one RC branch normalized by its resistance:
// u[k+1] = a u[k] + (1-a) i[k], vc = r u.
void rc_response(const std::vector<double>& current, const std::vector<double>& dt,
                 double tau_s, std::vector<double>& out) {
    const std::size_t n = current.size();
    out.assign(n, 0.0);
    double u = 0.0;
    double a = std::exp(-dt[0] / tau_s);
    double last_dt = dt[0];
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (dt[k] != last_dt) {
            a = std::exp(-dt[k] / tau_s);
            last_dt = dt[k];
        }
        u = a * u + (1.0 - a) * current[k];
        out[k + 1] = u;
    }
}

struct BlockData {
    std::vector<double> current;
    std::vector<double> potential;
    std::vector<double> ocp_v; // precomputed OCP(sol(t))
    std::vector<double> dt;
    double sign = 1.0;
};

std::vector<double> model_voltage(const BlockData& d, const RcValues& rc,
                                  std::vector<double>& u1, std::vector<double>& u2) {
    rc_response(d.current, d.dt, rc.r1 * rc.c1, u1);
    rc_response(d.current, d.dt, rc.r2 * rc.c2, u2);
    std::vector<double> v(d.current.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        v[k] = d.ocp_v[k] +
               d.sign * (rc.r0 * d.current[k] + rc.r1 * u1[k] + rc.r2 * u2[k]);
    }
    return v;
}

double block_cost(const BlockData& d, const RcValues& rc, double w1, double w2,
                  std::vector<double>& u1, std::vector<double>& u2) {
    const std::vector<double> v = model_voltage(d, rc, u1, u2);
    return w1 * cost_j1(v, d.potential) + w2 * cost_j2(v, d.potential, d.dt);
}

// Variable-projection refinement: for fixed time constants the residual is
// linear in (r0, r1, r2), so solve the quadratic surrogate
// (w1 J1)^2 + (w2 J2)^2 exactly and search only over (log tau1, log tau2).
struct VarproResult {
    RcValues rc;
    double surrogate = 0.0;
};

VarproResult varpro_solve(const BlockData& d, double tau1_s, double tau2_s, double w1,
                          double w2, const FitConfig& cfg) {
    const std::size_t n = d.current.size();
    std::vector<double> u1, u2;
    rc_response(d.current, d.dt, tau1_s, u1);
    rc_response(d.current, d.dt, tau2_s, u2);

    // Rows: J1 part scaled by w1/sqrt(n); J2 part scaled by w2/sqrt(n-1)/dt.
    const std::size_t rows = n + (n - 1);
    Eigen::MatrixXd m(rows, 3);
    Eigen::VectorXd b(rows);
    const double s1 = w1 / std::sqrt(static_cast<double>(n));
    const double s2 = w2 / std::sqrt(static_cast<double>(n - 1));
    for (std::size_t k = 0; k < n; ++k) {
        m(k, 0) = s1 * d.sign * d.current[k];
        m(k, 1) = s1 * d.sign * u1[k];
        m(k, 2) = s1 * d.sign * u2[k];
        b(k) = s1 * (d.potential[k] - d.ocp_v[k]);
    }
    for (std::size_t k = 1; k < n; ++k) {
        const double w = s2 / d.dt[k - 1];
        m(n + k - 1, 0) = w * d.sign * (d.current[k] - d.current[k - 1]);
        m(n + k - 1, 1) = w * d.sign * (u1[k] - u1[k - 1]);
        m(n + k - 1, 2) = w * d.sign * (u2[k] - u2[k - 1]);
        b(n + k - 1) = w * ((d.potential[k] - d.ocp_v[k]) -
                            (d.potential[k - 1] - d.ocp_v[k - 1]));
    }
    Eigen::Vector3d r = m.colPivHouseholderQr().solve(b);
    for (int i = 0; i < 3; ++i) r[i] = std::clamp(r[i], cfg.r_lo_ohm, cfg.r_hi_ohm);

    VarproResult out;
    out.rc.r0 = r[0];
    out.rc.r1 = r[1];
    out.rc.c1 = tau1_s / r[1];
    out.rc.r2 = r[2];
    out.rc.c2 = tau2_s / r[2];
    out.surrogate = (m * r - b).squaredNorm();
    return out;
}

RcValues decode(const std::vector<double>& x) {
    // Search coordinates: log10 of (r0, r1, c1, r2, c2).
    RcValues rc;
    rc.r0 = std::pow(10.0, x[0]);
    rc.r1 = std::pow(10.0, x[1]);
    rc.c1 = std::pow(10.0, x[2]);
    rc.r2 = std::pow(10.0, x[3]);
    rc.c2 = std::pow(10.0, x[4]);
    return rc;
}

RcValues canonicalize(RcValues rc) {
    if (rc.r1 * rc.c1 > rc.r2 * rc.c2) {
        std::swap(rc.r1, rc.r2);
        std::swap(rc.c1, rc.c2);
    }
    return rc;
}

} // namespace

void HppcDataset::segment(const std::vector<double>& breakpoints, double sol_tol) {
    blocks.clear();
    for (double bp : breakpoints) {
        std::size_t best_begin = 0, best_len = 0;
        std::size_t run_begin = 0, run_len = 0;
        for (std::size_t k = 0; k < sol.size(); ++k) {
            if (std::abs(sol[k] - bp) <= sol_tol) {
                if (run_len == 0) run_begin = k;
                ++run_len;
                if (run_len > best_len) {
                    best_len = run_len;
                    best_begin = run_begin;
                }
            } else {
                run_len = 0;
            }
        }
        if (best_len < 2) continue;
        // The SOL tolerance band also catches the tail of the preceding CC
        // step and the head of the next one; trim so the block starts and
        // ends at rest.
        std::size_t b = best_begin, e = best_begin + best_len;
        while (b < e && current_a[b] != 0.0) ++b;
        while (e > b && current_a[e - 1] != 0.0) --e;
        if (e - b >= 2) blocks.push_back({b, e, bp});
    }
}

double cost_j1(const std::vector<double>& model_v, const std::vector<double>& test_v) {
    if (model_v.size() != test_v.size() || model_v.empty())
        throw ArgumentError("cost_j1 requires equal-length non-empty traces");
    double acc = 0.0;
    for (std::size_t i = 0; i < model_v.size(); ++i) {
        const double e = model_v[i] - test_v[i];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(model_v.size()));
}

double cost_j2(const std::vector<double>& model_v, const std::vector<double>& test_v,
               const std::vector<double>& dt_s) {
    if (model_v.size() != test_v.size() || model_v.size() < 2)
        throw ArgumentError("cost_j2 requires two or more samples");
    if (dt_s.size() + 1 < model_v.size())
        throw ArgumentError("cost_j2 needs a dt per difference");
    double acc = 0.0;
    for (std::size_t i = 1; i < model_v.size(); ++i) {
        const double dv_model = model_v[i] - model_v[i - 1];
        const double dv_test = test_v[i] - test_v[i - 1];
        const double e = (dv_model - dv_test) / dt_s[i - 1];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(model_v.size() - 1));
}

HalfCellParamTable FitResult::to_table() const {
    HalfCellParamTable t;
    t.electrode = electrode;
    for (const auto& b : breakpoints) {
        t.sol.push_back(b.sol);
        t.r0_ohm.push_back(b.rc.r0);
        t.r1_ohm.push_back(b.rc.r1);
        t.c1_f.push_back(b.rc.c1);
        t.r2_ohm.push_back(b.rc.r2);
        t.c2_f.push_back(b.rc.c2);
    }
    return t;
}

FitResult fit_half_cell(const HppcDataset& data, const OcpCurve& curve,
                        const FitConfig& config) {
    if (data.t_s.empty()) throw DataError("hppc dataset is empty");
    std::vector<double> targets = config.breakpoints;
    if (targets.empty())
        for (int i = 0; i <= 10; ++i) targets.push_back(i / 10.0);

    HppcDataset segmented = data;
    if (segmented.blocks.empty()) segmented.segment(targets);

    std::vector<double> missing;
    for (double bp : targets) {
        const bool covered = std::any_of(segmented.blocks.begin(), segmented.blocks.end(),
                                         [&](const auto& b) { return std::abs(b.sol - bp) < 1e-9; });
        if (!covered) missing.push_back(bp);
    }
    if (!missing.empty()) {
        std::ostringstream ss;
        ss << "hppc data does not cover breakpoints:";
        for (double bp : missing) ss << ' ' << bp;
        throw DataError(ss.str());
    }

    FitResult result;
    result.electrode = data.electrode;
    result.population = config.de.population;
    result.seed = config.de.seed;

    double j1_acc = 0.0, j2_acc = 0.0;
    long j1_n = 0, j2_n = 0;

    for (double bp : targets) {
        const auto it = std::find_if(segmented.blocks.begin(), segmented.blocks.end(),
                                     [&](const auto& b) { return std::abs(b.sol - bp) < 1e-9; });
        const auto& blk = *it;

        // The block may include the tail of the CC approach. The fit window
        // starts near the end of the longest rest (the settle period), where
        // the RC state has decayed to effectively zero.
        std::size_t rest_begin = blk.begin, rest_len = 0;
        std::size_t run_begin = blk.begin, run_len = 0;
        bool any_pulse = false;
        for (std::size_t k = blk.begin; k < blk.end; ++k) {
            if (data.current_a[k] == 0.0) {
                if (run_len == 0) run_begin = k;
                ++run_len;
                if (run_len > rest_len) {
                    rest_len = run_len;
                    rest_begin = run_begin;
                }
            } else {
                run_len = 0;
                any_pulse = true;
            }
        }
        if (!any_pulse || rest_len == 0)
            throw DataError("hppc block at sol " + std::to_string(bp) +
                            " lacks a pulse or a rest: unidentifiable");
        const std::size_t settle_end = rest_begin + rest_len;
        const std::size_t margin = std::min<std::size_t>(60, rest_len);
        const std::size_t begin = settle_end >= blk.end ? rest_begin : settle_end - margin;

        BlockData d;
        d.sign = branch_sign(data.electrode);
        for (std::size_t k = begin; k < blk.end; ++k) {
            d.current.push_back(data.current_a[k]);
            d.potential.push_back(data.potential_v[k]);
            d.ocp_v.push_back(ocp(curve, data.sol[k]));
        }
        for (std::size_t k = begin + 1; k < blk.end; ++k)
            d.dt.push_back(data.t_s[k] - data.t_s[k - 1]);
        d.dt.push_back(d.dt.empty() ? 1.0 : d.dt.back());

        std::vector<double> u1, u2;
        const ScalarFn cost = [&](const std::vector<double>& x) {
            return block_cost(d, decode(x), config.w1, config.w2, u1, u2);
        };

        const double lr = std::log10(config.r_lo_ohm), hr = std::log10(config.r_hi_ohm);
        const double lc = std::log10(config.c_lo_f), hc = std::log10(config.c_hi_f);
        DeOptions de = config.de;
        de.seed = config.de.seed ^ static_cast<std::uint64_t>(bp * 1e6);
        DeResult best = minimize_de(cost, {lr, lr, lc, lr, lc}, {hr, hr, hc, hr, hc}, de);

        // Variable-projection refinement over the two time constants, then a
        // short polish of all five parameters on the reported cost.
        RcValues rc = decode(best.x);
        const ScalarFn tau_cost = [&](const std::vector<double>& lt) {
            return varpro_solve(d, std::pow(10.0, lt[0]), std::pow(10.0, lt[1]), config.w1,
                                config.w2, config)
                .surrogate;
        };
        const double tau_lo = std::log10(config.r_lo_ohm * config.c_lo_f);
        const double tau_hi = std::log10(config.r_hi_ohm * config.c_hi_f);
        DeResult tau_fit = minimize_nelder_mead(
            tau_cost, {std::log10(rc.r1 * rc.c1), std::log10(rc.r2 * rc.c2)},
            {tau_lo, tau_lo}, {tau_hi, tau_hi}, 800, 0.02);
        const RcValues rc_varpro =
            varpro_solve(d, std::pow(10.0, tau_fit.x[0]), std::pow(10.0, tau_fit.x[1]),
                         config.w1, config.w2, config)
                .rc;
        const std::vector<double> x_varpro = {
            std::log10(rc_varpro.r0), std::log10(rc_varpro.r1), std::log10(rc_varpro.c1),
            std::log10(rc_varpro.r2), std::log10(rc_varpro.c2)};
        DeResult polished = minimize_nelder_mead(cost, x_varpro, {lr, lr, lc, lr, lc},
                                                 {hr, hr, hc, hr, hc}, 600, 0.001);
        if (polished.value < best.value) best = polished;
        rc = canonicalize(decode(best.x));

        const std::vector<double> v = model_voltage(d, rc, u1, u2);
        BreakpointFit bf;
        bf.sol = bp;
        bf.rc = rc;
        bf.j1_v = cost_j1(v, d.potential);
        bf.j2_v_per_s = cost_j2(v, d.potential, d.dt);
        bf.evaluations = best.evaluations + tau_fit.evaluations;
        result.breakpoints.push_back(bf);

        j1_acc += bf.j1_v * bf.j1_v * static_cast<double>(d.potential.size());
        j1_n += static_cast<long>(d.potential.size());
        j2_acc += bf.j2_v_per_s * bf.j2_v_per_s * static_cast<double>(d.potential.size() - 1);
        j2_n += static_cast<long>(d.potential.size()) - 1;
        result.generations = std::max(result.generations, best.generations);
    }

    result.j1_v = std::sqrt(j1_acc / static_cast<double>(j1_n));
    result.j2_v_per_s = std::sqrt(j2_acc / static_cast<double>(j2_n));
    return result;
}

ProfileSpec hppc_schedule(const HppcScheduleConfig& cfg) {
    if (!(cfg.sol_hi >= cfg.sol_lo)) throw ArgumentError("hppc schedule needs sol_hi >= sol_lo");
    if (!(cfg.sol_step > 0.0)) throw ArgumentError("hppc sol step must be positive");
    ProfileSpec spec;
    spec.dt_s = cfg.dt_s;

    // Current sign that RAISES this electrode's SOL: PE lithiates on
    // discharge (i > 0), NE on charge (i < 0).
    const double raise_sign = cfg.electrode == Electrode::positive ? 1.0 : -1.0;
    const double pulse_a = cfg.pulse_crate * cfg.q_ah;

    const auto add_rest = [&](double seconds) {
        ProfileSegment rest;
        rest.kind = SegmentKind::constant_current;
        rest.magnitude_a = 0.0;
        rest.duration_s = seconds;
        spec.segments.push_back(rest);
    };

    const int steps = static_cast<int>(std::round((cfg.sol_hi - cfg.sol_lo) / cfg.sol_step));
    for (int b = 0; b <= steps; ++b) {
        if (b > 0) {
            ProfileSegment step;
            step.kind = SegmentKind::constant_current;
            step.magnitude_a = raise_sign * cfg.step_crate * cfg.q_ah;
            step.duration_s = cfg.sol_step / cfg.step_crate * 3600.0;
            spec.segments.push_back(step);
            add_rest(cfg.settle_s);
        } else {
            add_rest(cfg.settle_s);
        }
        ProfileSegment block;
        block.kind = SegmentKind::hppc;
        block.magnitude_a = pulse_a;
        block.pulse_s = cfg.pulse_s;
        block.rest_s = cfg.rest_s;
        block.duration_s = 2.0 * cfg.pulses_per_block * (cfg.pulse_s + cfg.rest_s);
        spec.segments.push_back(block);
    }
    return spec;
}

HppcDataset synthesize_hppc(const OcpCurve& curve, const HalfCellParamTable& table,
                            const HppcScheduleConfig& cfg, double noise_std_v,
                            std::uint64_t seed) {
    const ProfileSpec spec = hppc_schedule(cfg);
    Rng noise(seed ^ 0x1f83d9abfb41bd6bULL);

    HppcDataset out;
    out.electrode = cfg.electrode;
    const double sign = branch_sign(cfg.electrode);
    const double sol_sign = cfg.electrode == Electrode::positive ? 1.0 : -1.0;

    double sol = cfg.sol_lo;
    double vc1 = 0.0, vc2 = 0.0;
    double t = 0.0;
    for (std::size_t s = 0; s < spec.segments.size(); ++s) {
        SegmentCurrent gen(spec.segments[s], spec.dt_s, spec.seed, s);
        // Within a pulse block the passive elements are held at the block's
        // breakpoint, so the block is exactly the constant-parameter model
        // the fitter identifies; the SOL excursion only moves the OCP.
        const bool freeze = spec.segments[s].kind == SegmentKind::hppc;
        const RcValues rc_frozen = interpolate_rc(table, sol);
        while (!gen.exhausted()) {
            const double i = gen.next();
            const RcValues rc = freeze ? rc_frozen : interpolate_rc(table, sol);
            const double v = ocp(curve, sol) + sign * (rc.r0 * i + vc1 + vc2);
            out.t_s.push_back(t);
            out.current_a.push_back(i);
            out.potential_v.push_back(v + (noise_std_v > 0.0 ? noise_std_v * noise.normal() : 0.0));
            out.sol.push_back(sol);

            const RcDiscrete b1 = discretize_rc(rc.r1, rc.c1, spec.dt_s);
            const RcDiscrete b2 = discretize_rc(rc.r2, rc.c2, spec.dt_s);
            vc1 = b1.a * vc1 + b1.b * i;
            vc2 = b2.a * vc2 + b2.b * i;
            sol += sol_sign * i * spec.dt_s / (3600.0 * cfg.q_ah);
            sol = std::clamp(sol, 0.0, 1.0);
            t += spec.dt_s;
        }
    }

    std::vector<double> breakpoints;
    const int steps = static_cast<int>(std::round((cfg.sol_hi - cfg.sol_lo) / cfg.sol_step));
    for (int b = 0; b <= steps; ++b) breakpoints.push_back(cfg.sol_lo + b * cfg.sol_step);
    out.segment(breakpoints);
    return out;
}

} // namespace eecm
