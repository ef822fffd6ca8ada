#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eecm/cell_model.hpp"
#include "eecm/errors.hpp"
#include "eecm/esoh_solver.hpp"
#include "eecm/random.hpp"
#include "eecm/truth.hpp"

using namespace eecm;

namespace {
const ParameterPack kPack = ParameterPack::lgm50();

WindowSolveInput reference_input(double soc) {
    // Table B stoichiometries; voltage limits are the OCP differences at the
    // endpoints, so the system's exact solution is the endpoints themselves.
    const double thp0 = 0.987, thp100 = 0.27, thn0 = 0.008, thn100 = 0.9214;
    WindowSolveInput in;
    in.qn_ah = 5.827595008802125; // geometric NE capacity
    in.qp_ah = in.qn_ah * (thn100 - thn0) / (thp0 - thp100);
    in.thp = thp0 - soc * (thp0 - thp100);
    in.thn = thn0 + soc * (thn100 - thn0);
    in.vmin_v = ocp(kPack.ocp_pos, thp0) - ocp(kPack.ocp_neg, thn0);
    in.vmax_v = ocp(kPack.ocp_pos, thp100) - ocp(kPack.ocp_neg, thn100);
    in.warm_start = {0.9, 0.3, 0.03, 0.9};
    return in;
}
} // namespace

TEST_CASE("reference stoichiometries recovered from their implied inputs") {
    // The derived voltage limits (frozen from the OCP closed forms).
    const WindowSolveInput probe = reference_input(0.37);
    CHECK(probe.vmin_v == doctest::Approx(1.649042582180362).epsilon(1e-12));
    CHECK(probe.vmax_v == doctest::Approx(4.180937604673058).epsilon(1e-12));

    for (double soc : {0.1, 0.37, 0.5, 0.9}) {
        const WindowSolveInput in = reference_input(soc);
        const WindowSolution sol = solve_windows(in, kPack.ocp_neg, kPack.ocp_pos);
        REQUIRE(sol.ok);
        CHECK(std::abs(sol.thp0 - 0.987) < 1e-6);
        CHECK(std::abs(sol.thp100 - 0.27) < 1e-6);
        CHECK(std::abs(sol.thn0 - 0.008) < 1e-6);
        CHECK(std::abs(sol.thn100 - 0.9214) < 1e-6);
        CHECK(sol.residual < 1e-9);
    }
}

TEST_CASE("reported solutions verified by independent residual evaluation") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        // Feasible inputs from a random aged cell.
        DegradationSpec spec;
        spec.lam_p_pct = rng.uniform(0.0, 30.0);
        spec.lam_n_pct = rng.uniform(0.0, 20.0);
        spec.lli_pct = spec.lam_p_pct * 0.8 + rng.uniform(0.0, 10.0);
        EsohParams aged;
        try {
            aged = apply_degradation(kPack.esoh, spec, kPack.vmin_v, kPack.vmax_v,
                                     kPack.ocp_neg, kPack.ocp_pos);
        } catch (const InfeasibleDegradationError&) {
            continue;
        }
        WindowSolveInput in;
        in.qp_ah = aged.qp_ah;
        in.qn_ah = aged.qn_ah;
        const SolPair sols = sol_from_soc(aged, rng.uniform(0.05, 0.95));
        in.thp = sols.thp;
        in.thn = sols.thn;
        in.vmin_v = kPack.vmin_v;
        in.vmax_v = kPack.vmax_v;
        in.warm_start = {kPack.esoh.thp0, kPack.esoh.thp100, kPack.esoh.thn0,
                         kPack.esoh.thn100};
        const WindowSolution sol = solve_windows(in, kPack.ocp_neg, kPack.ocp_pos);
        REQUIRE(sol.ok);
        const auto res = window_residuals(in, kPack.ocp_neg, kPack.ocp_pos,
                                          {sol.thp0, sol.thp100, sol.thn0, sol.thn100});
        for (double r : res) CHECK(std::abs(r) < 1e-9);
        // Useful-capacity equality at the solution.
        CHECK(std::abs(in.qp_ah * (sol.thp0 - sol.thp100) -
                       in.qn_ah * (sol.thn100 - sol.thn0)) < 1e-9);
        // Warm-start invariance within the basin.
        WindowSolveInput in2 = in;
        in2.warm_start = {std::clamp(sol.thp0 + rng.uniform(-0.05, 0.05), 0.0, 1.0),
                          std::clamp(sol.thp100 + rng.uniform(-0.05, 0.05), 0.0, 1.0),
                          std::clamp(sol.thn0 + rng.uniform(-0.02, 0.02), 0.0, 1.0),
                          std::clamp(sol.thn100 + rng.uniform(-0.05, 0.05), 0.0, 1.0)};
        const WindowSolution sol2 = solve_windows(in2, kPack.ocp_neg, kPack.ocp_pos);
        REQUIRE(sol2.ok);
        CHECK(std::abs(sol2.thp0 - sol.thp0) < 1e-8);
        CHECK(std::abs(sol2.thp100 - sol.thp100) < 1e-8);
        CHECK(std::abs(sol2.thn0 - sol.thn0) < 1e-8);
        CHECK(std::abs(sol2.thn100 - sol.thn100) < 1e-8);
    }
}

TEST_CASE("perturbation of the SOL inputs moves endpoints continuously") {
    WindowSolveInput in;
    in.qp_ah = kPack.esoh.qp_ah;
    in.qn_ah = kPack.esoh.qn_ah;
    in.vmin_v = kPack.vmin_v;
    in.vmax_v = kPack.vmax_v;
    in.warm_start = {kPack.esoh.thp0, kPack.esoh.thp100, kPack.esoh.thn0, kPack.esoh.thn100};

    WindowSolution prev;
    bool have_prev = false;
    for (int k = 0; k <= 40; ++k) {
        const double soc = 0.3 + 0.4 * k / 40.0; // 1 % perturbation steps
        const SolPair s = sol_from_soc(kPack.esoh, soc);
        in.thp = s.thp;
        in.thn = s.thn;
        const WindowSolution sol = solve_windows(in, kPack.ocp_neg, kPack.ocp_pos);
        REQUIRE(sol.ok);
        if (have_prev) {
            CHECK(std::abs(sol.thp0 - prev.thp0) < 0.05);
            CHECK(std::abs(sol.thp100 - prev.thp100) < 0.05);
            CHECK(std::abs(sol.thn0 - prev.thn0) < 0.05);
            CHECK(std::abs(sol.thn100 - prev.thn100) < 0.05);
        }
        prev = sol;
        have_prev = true;
    }
}

TEST_CASE("infeasible inputs are flagged, not fabricated") {
    WindowSolveInput in;
    in.qp_ah = 1.0; // far too small to balance the NE window
    in.qn_ah = 50.0;
    in.thp = 0.5;
    in.thn = 0.5;
    in.vmin_v = kPack.vmin_v;
    in.vmax_v = kPack.vmax_v;
    const WindowSolution sol = solve_windows(in, kPack.ocp_neg, kPack.ocp_pos);
    CHECK_FALSE(sol.ok);
}

TEST_CASE("solver schedule") {
    SUBCASE("fires at start and every period") {
        SolveSchedule sched(10000.0);
        CHECK(sched.due(0.0));       // run start
        CHECK_FALSE(sched.due(9999.0));
        CHECK(sched.due(10000.0));
        CHECK_FALSE(sched.due(19999.0));
        CHECK(sched.due(20000.0));
    }
    SUBCASE("500 s period fires 20 times in 10000 s") {
        SolveSchedule sched(500.0);
        int fired = 0;
        for (double t = 0.0; t < 10000.0; t += 1.0)
            if (sched.due(t)) ++fired;
        CHECK(fired == 20);
    }
}
