#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eecm/characterization.hpp"
#include "eecm/errors.hpp"
#include "eecm/random.hpp"

using namespace eecm;

namespace {
const ParameterPack kPack = ParameterPack::lgm50();

std::vector<double> unit_dt(std::size_t n) { return std::vector<double>(n, 1.0); }
} // namespace

TEST_CASE("cost_j1") {
    const std::vector<double> a{3.7, 3.8, 3.9, 4.0};
    CHECK(cost_j1(a, a) == 0.0);
    std::vector<double> b = a;
    for (double& v : b) v += 1e-3;
    CHECK(cost_j1(b, a) == doctest::Approx(1e-3).epsilon(1e-12));

    // Random pair against direct arithmetic.
    Rng rng(3);
    std::vector<double> m(100), t(100);
    double acc = 0.0;
    for (int i = 0; i < 100; ++i) {
        m[i] = rng.uniform(3.0, 4.2);
        t[i] = rng.uniform(3.0, 4.2);
        acc += (m[i] - t[i]) * (m[i] - t[i]);
    }
    CHECK(cost_j1(m, t) == doctest::Approx(std::sqrt(acc / 100.0)).epsilon(1e-12));

    CHECK_THROWS_AS(cost_j1({}, {}), ArgumentError);
    CHECK_THROWS_AS(cost_j1({1.0}, {1.0, 2.0}), ArgumentError);
}

TEST_CASE("cost_j2 is offset blind and matches closed-form differencing") {
    const std::vector<double> a{3.7, 3.8, 3.9, 4.0, 3.95};
    CHECK(cost_j2(a, a, unit_dt(4)) == 0.0);

    // Exact in exact arithmetic; bit-exact here because the offset and the
    // samples are binary fractions.
    const std::vector<double> exact{3.5, 3.75, 4.0, 3.25, 3.625};
    std::vector<double> shifted = exact;
    for (double& v : shifted) v += 0.25;
    CHECK(cost_j2(shifted, exact, unit_dt(4)) == 0.0);
    // Arbitrary samples: offset invariance up to rounding noise.
    std::vector<double> shifted2 = a;
    for (double& v : shifted2) v += 0.123;
    CHECK(cost_j2(shifted2, a, unit_dt(4)) < 1e-14);

    // Ramp mismatch of 1 mV/s gives exactly 1 mV/s.
    std::vector<double> ramp = a;
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] += 1e-3 * static_cast<double>(i);
    CHECK(cost_j2(ramp, a, unit_dt(4)) == doctest::Approx(1e-3).epsilon(1e-12));

    CHECK_THROWS_AS(cost_j2({1.0}, {1.0}, {}), ArgumentError);
}

TEST_CASE("hppc schedule block counts") {
    HppcScheduleConfig cfg;
    cfg.electrode = Electrode::positive;
    cfg.q_ah = kPack.esoh.qp_ah;

    SUBCASE("[0,1] at 10 % steps gives 11 pulse blocks") {
        const ProfileSpec spec = hppc_schedule(cfg);
        int blocks = 0;
        for (const auto& s : spec.segments)
            if (s.kind == SegmentKind::hppc) ++blocks;
        CHECK(blocks == 11);
    }
    SUBCASE("single-step range gives 2 blocks") {
        cfg.sol_lo = 0.4;
        cfg.sol_hi = 0.5;
        const ProfileSpec spec = hppc_schedule(cfg);
        int blocks = 0;
        for (const auto& s : spec.segments)
            if (s.kind == SegmentKind::hppc) ++blocks;
        CHECK(blocks == 2);
    }
}

TEST_CASE("synthesized schedule dwells at every breakpoint within 0.5 %") {
    HppcScheduleConfig cfg;
    cfg.electrode = Electrode::positive;
    cfg.q_ah = kPack.esoh.qp_ah;
    cfg.sol_lo = 0.2;
    cfg.sol_hi = 0.6;
    const HppcDataset data =
        synthesize_hppc(kPack.ocp_pos, kPack.table_pos, cfg, 0.0, 1);
    REQUIRE(data.blocks.size() == 5);
    for (const auto& b : data.blocks) {
        // SOL at the end of the settle rest (the longest zero-current run);
        // the first samples of a block are still the tail of the CC step.
        std::size_t rest_begin = b.begin, rest_len = 0, run_begin = b.begin, run_len = 0;
        for (std::size_t k = b.begin; k < b.end; ++k) {
            if (data.current_a[k] == 0.0) {
                if (run_len == 0) run_begin = k;
                if (++run_len > rest_len) {
                    rest_len = run_len;
                    rest_begin = run_begin;
                }
            } else {
                run_len = 0;
            }
        }
        REQUIRE(rest_len > 0);
        CHECK(std::abs(data.sol[rest_begin + rest_len - 1] - b.sol) < 0.005);
    }
}

TEST_CASE("flat (zero current) data is rejected as unidentifiable") {
    HppcDataset data;
    data.electrode = Electrode::positive;
    for (int k = 0; k < 1000; ++k) {
        data.t_s.push_back(k);
        data.current_a.push_back(0.0);
        data.potential_v.push_back(4.0);
        data.sol.push_back(0.5);
    }
    FitConfig cfg;
    cfg.breakpoints = {0.5};
    CHECK_THROWS_AS(fit_half_cell(data, kPack.ocp_pos, cfg), DataError);
}

TEST_CASE("uncovered breakpoints are reported") {
    HppcScheduleConfig scfg;
    scfg.electrode = Electrode::positive;
    scfg.q_ah = kPack.esoh.qp_ah;
    scfg.sol_lo = 0.5;
    scfg.sol_hi = 0.5; // only one block
    const HppcDataset data = synthesize_hppc(kPack.ocp_pos, kPack.table_pos, scfg, 0.0, 1);
    FitConfig cfg;
    cfg.breakpoints = {0.5, 0.7};
    CHECK_THROWS_WITH_AS(fit_half_cell(data, kPack.ocp_pos, cfg),
                         doctest::Contains("0.7"), DataError);
}

TEST_CASE("self-fit on one PE block recovers the table entries") {
    HppcScheduleConfig scfg;
    scfg.electrode = Electrode::positive;
    scfg.q_ah = kPack.esoh.qp_ah;
    scfg.sol_lo = 0.5;
    scfg.sol_hi = 0.5;
    const HppcDataset data = synthesize_hppc(kPack.ocp_pos, kPack.table_pos, scfg, 0.0, 1);

    FitConfig cfg;
    cfg.breakpoints = {0.5};
    cfg.de.population = 32;
    cfg.de.generations = 120;
    cfg.de.seed = 5;
    const FitResult fit = fit_half_cell(data, kPack.ocp_pos, cfg);
    REQUIRE(fit.breakpoints.size() == 1);
    const RcValues& rc = fit.breakpoints[0].rc;

    // Truth at SOL 50 % with branches ordered by time constant.
    RcValues truth = interpolate_rc(kPack.table_pos, 0.5);
    if (truth.r1 * truth.c1 > truth.r2 * truth.c2) {
        std::swap(truth.r1, truth.r2);
        std::swap(truth.c1, truth.c2);
    }
    CHECK(std::abs(rc.r0 - truth.r0) / truth.r0 < 0.05);
    CHECK(std::abs(rc.r1 - truth.r1) / truth.r1 < 0.05);
    CHECK(std::abs(rc.c1 - truth.c1) / truth.c1 < 0.05);
    CHECK(std::abs(rc.r2 - truth.r2) / truth.r2 < 0.05);
    CHECK(std::abs(rc.c2 - truth.c2) / truth.c2 < 0.05);
    CHECK(fit.breakpoints[0].j1_v < 1e-4);
}

TEST_CASE("fit is deterministic under a fixed seed") {
    HppcScheduleConfig scfg;
    scfg.electrode = Electrode::negative;
    scfg.q_ah = kPack.esoh.qn_ah;
    scfg.sol_lo = 0.4;
    scfg.sol_hi = 0.4;
    const HppcDataset data = synthesize_hppc(kPack.ocp_neg, kPack.table_neg, scfg, 5e-4, 2);

    FitConfig cfg;
    cfg.breakpoints = {0.4};
    cfg.de.population = 16;
    cfg.de.generations = 40;
    cfg.de.polish_iterations = 200;
    cfg.de.seed = 11;
    const FitResult a = fit_half_cell(data, kPack.ocp_neg, cfg);
    const FitResult b = fit_half_cell(data, kPack.ocp_neg, cfg);
    CHECK(a.breakpoints[0].rc.r0 == b.breakpoints[0].rc.r0);
    CHECK(a.breakpoints[0].rc.c1 == b.breakpoints[0].rc.c1);
    CHECK(a.breakpoints[0].rc.c2 == b.breakpoints[0].rc.c2);
    CHECK(a.j1_v == b.j1_v);
    CHECK(a.j2_v_per_s == b.j2_v_per_s);
}
