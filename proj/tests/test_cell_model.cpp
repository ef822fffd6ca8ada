#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "eecm/cell_model.hpp"
#include "eecm/errors.hpp"
#include "eecm/esoh_solver.hpp"
#include "eecm/pack_io.hpp"
#include "eecm/random.hpp"

using namespace eecm;

namespace {
const ParameterPack kPack = ParameterPack::lgm50();
}

TEST_CASE("ocp closed forms match scalar evaluation") {
    // Frozen from direct evaluation of the closed-form expressions.
    CHECK(ocp(kPack.ocp_neg, 0.0) == doctest::Approx(2.383542174008993).epsilon(1e-12));
    CHECK(ocp(kPack.ocp_neg, 1.0) == doctest::Approx(0.09202000004038269).epsilon(1e-12));
    CHECK(ocp(kPack.ocp_pos, 0.5) == doctest::Approx(3.9719586564036504).epsilon(1e-12));
    CHECK(ocp(kPack.ocp_pos, 0.27) == doctest::Approx(4.272957605316414).epsilon(1e-12));
    CHECK(ocp(kPack.ocp_neg, 0.9214) == doctest::Approx(0.09202000064335537).epsilon(1e-12));
}

TEST_CASE("ocp finite over the extrapolation range and monotone where stated") {
    for (int i = 0; i <= 2000; ++i) {
        const double th = -0.05 + 1.10 * i / 2000.0;
        CHECK(std::isfinite(ocp(kPack.ocp_neg, th)));
        CHECK(std::isfinite(ocp(kPack.ocp_pos, th)));
    }
    double prev = ocp(kPack.ocp_neg, 0.01);
    for (int i = 1; i < 1000; ++i) {
        const double th = 0.01 + (1.0 - 0.01) * i / 999.0;
        const double u = ocp(kPack.ocp_neg, th);
        CHECK(u < prev);
        prev = u;
    }
    prev = ocp(kPack.ocp_pos, 0.2);
    for (int i = 1; i < 1000; ++i) {
        const double th = 0.2 + 0.8 * i / 999.0;
        const double u = ocp(kPack.ocp_pos, th);
        CHECK(u < prev);
        prev = u;
    }
}

TEST_CASE("ocp_slope matches finite differences") {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const double th = rng.uniform(0.02, 0.98);
        for (const auto* curve : {&kPack.ocp_neg, &kPack.ocp_pos}) {
            const double h = 1e-6;
            const double fd = (ocp(*curve, th + h) - ocp(*curve, th - h)) / (2 * h);
            CHECK(ocp_slope(*curve, th) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("rc interpolation hits Table values exactly and is linear between") {
    for (const auto* t : {&kPack.table_neg, &kPack.table_pos}) {
        for (std::size_t i = 0; i < t->size(); ++i) {
            const RcValues rc = interpolate_rc(*t, t->sol[i]);
            CHECK(rc.r0 == t->r0_ohm[i]);
            CHECK(rc.r1 == t->r1_ohm[i]);
            CHECK(rc.c1 == t->c1_f[i]);
            CHECK(rc.r2 == t->r2_ohm[i]);
            CHECK(rc.c2 == t->c2_f[i]);
        }
    }
    CHECK(interpolate_rc(kPack.table_neg, 0.0).r0 == doctest::Approx(0.128));
    // Hand interpolation halfway between 128 and 25.7 mOhm.
    CHECK(interpolate_rc(kPack.table_neg, 0.05).r0 == doctest::Approx(0.07685).epsilon(1e-12));
    CHECK(interpolate_rc(kPack.table_pos, 1.0).r0 == doctest::Approx(0.009));
    // Clamped outside [0,1].
    CHECK(interpolate_rc(kPack.table_neg, -0.2).r0 == doctest::Approx(0.128));
    CHECK(interpolate_rc(kPack.table_neg, 1.3).r0 == doctest::Approx(0.0322));
}

TEST_CASE("malformed table rejected") {
    HalfCellParamTable t = HalfCellParamTable::lgm50(Electrode::negative);
    t.sol[3] = t.sol[2]; // non-monotone
    CHECK_THROWS_AS(t.validate(), ConfigError);
    HalfCellParamTable t2 = HalfCellParamTable::lgm50(Electrode::negative);
    t2.r1_ohm[0] = 0.0;
    CHECK_THROWS_AS(t2.validate(), ConfigError);
}

TEST_CASE("electrode potentials and cell voltage") {
    EecmState st;
    st.thp = 0.5;
    st.thn = 0.5;

    SUBCASE("rest equals OCP and their difference") {
        CHECK(electrode_potential(Electrode::positive, st, kPack, 0.0) ==
              doctest::Approx(ocp(kPack.ocp_pos, 0.5)).epsilon(1e-15));
        CHECK(cell_voltage(st, kPack, 0.0) ==
              doctest::Approx(ocp(kPack.ocp_pos, 0.5) - ocp(kPack.ocp_neg, 0.5)).epsilon(1e-15));
    }
    SUBCASE("1 A discharge drops the PE by R0") {
        const double r0 = interpolate_rc(kPack.table_pos, 0.5).r0;
        CHECK(electrode_potential(Electrode::positive, st, kPack, 1.0) ==
              doctest::Approx(ocp(kPack.ocp_pos, 0.5) - r0).epsilon(1e-12));
    }
    SUBCASE("common-mode branch voltage cancels in the cell voltage") {
        EecmState shifted = st;
        shifted.vc1p += 0.05; // PE potential falls by 0.05
        shifted.vc1n += 0.05; // NE potential rises by 0.05
        const double dv = cell_voltage(shifted, kPack, 0.0) - cell_voltage(st, kPack, 0.0);
        CHECK(dv == doctest::Approx(-0.10).epsilon(1e-12));
    }
    SUBCASE("rest voltage at the Table B window endpoints") {
        EecmState full;
        full.thp = 0.27;
        full.thn = 0.9214;
        CHECK(cell_voltage(full, kPack, 0.0) ==
              doctest::Approx(4.180937604673058).epsilon(1e-12));
        EecmState empty;
        empty.thp = 0.987;
        empty.thn = 0.008;
        CHECK(cell_voltage(empty, kPack, 0.0) ==
              doctest::Approx(1.649042582180362).epsilon(1e-12));
    }
}

TEST_CASE("step_state propagation") {
    SUBCASE("dt must be positive") {
        CHECK_THROWS_AS(step_state(EecmState{}, kPack, kPack.esoh, 0.0, 0.0), ArgumentError);
        CHECK_THROWS_AS(step_state(EecmState{}, kPack, kPack.esoh, 0.0, -1.0), ArgumentError);
    }
    SUBCASE("long rest relaxes the RC branches and leaves SOL unchanged") {
        EecmState st;
        st.vc1p = 0.1;
        st.vc2n = -0.05;
        st.thp = 0.4;
        st.thn = 0.6;
        const EecmState relaxed = step_state(st, kPack, kPack.esoh, 0.0, 1e7);
        CHECK(std::abs(relaxed.vc1p) < 1e-12);
        CHECK(std::abs(relaxed.vc2n) < 1e-12);
        CHECK(relaxed.thp == 0.4);
        CHECK(relaxed.thn == 0.6);
    }
    SUBCASE("one-hour 5 A discharge on a 5 Ah NE clamps at zero") {
        EsohParams esoh = kPack.esoh;
        esoh.qn_ah = 5.0;
        EecmState st;
        st.thp = 0.3;
        st.thn = 0.9;
        StepDiagnostics diag;
        const EecmState next = step_state(st, kPack, esoh, 5.0, 3600.0, &diag);
        // Delta theta_n would be -1: clamps at 0 and counts the event.
        CHECK(next.thn == 0.0);
        CHECK(diag.clamp_events == 1);
    }
    SUBCASE("matches a fine-step Euler oracle") {
        Rng rng(11);
        for (int trial = 0; trial < 100; ++trial) {
            const double r = rng.uniform(1e-3, 50e-3);
            const double c = rng.uniform(1e3, 50e3);
            const double i = rng.uniform(-10.0, 10.0);
            const double v0 = rng.uniform(-0.1, 0.1);
            const double dt = rng.uniform(0.1, 1.0);
            double v = v0;
            const int n = static_cast<int>(dt / 1e-3);
            const double h = dt / n;
            for (int k = 0; k < n; ++k) v += h * (i - v / r) / c;
            const RcDiscrete d = discretize_rc(r, c, dt);
            const double zoh = d.a * v0 + d.b * i;
            CHECK(std::abs(zoh - v) < 1e-6);
        }
    }
    SUBCASE("charge conservation over a zero-net-charge profile") {
        EecmState st;
        st.thp = 0.5;
        st.thn = 0.5;
        const double th0p = st.thp, th0n = st.thn;
        StepDiagnostics diag;
        Rng rng(5);
        std::vector<double> pulses;
        for (int k = 0; k < 200; ++k) pulses.push_back(rng.uniform(-3.0, 3.0));
        for (double i : pulses) st = step_state(st, kPack, kPack.esoh, i, 7.0, &diag);
        for (double i : pulses) st = step_state(st, kPack, kPack.esoh, -i, 7.0, &diag);
        CHECK(diag.clamp_events == 0);
        CHECK(st.thp == doctest::Approx(th0p).epsilon(1e-12));
        CHECK(st.thn == doctest::Approx(th0n).epsilon(1e-12));
    }
}

TEST_CASE("soc/sol mapping") {
    const EsohParams& e = kPack.esoh;
    CHECK(soc_from_sol(e, e.thn0) == doctest::Approx(0.0));
    CHECK(soc_from_sol(e, e.thn100) == doctest::Approx(1.0));
    for (double soc : {0.0, 0.123, 0.5, 0.77, 1.0}) {
        const SolPair s = sol_from_soc(e, soc);
        CHECK(soc_from_sol(e, s.thn) == doctest::Approx(soc).epsilon(1e-12));
    }
    EsohParams degenerate = e;
    degenerate.thn100 = degenerate.thn0;
    CHECK_THROWS_AS(soc_from_sol(degenerate, 0.5), ConfigError);
}

TEST_CASE("capacity from geometry (cell parameter table rows)") {
    CHECK(capacity_from_geometry(0.75, 8.52e-5, 0.1027, 33133) ==
          doctest::Approx(5.827595008802125).epsilon(1e-12));
    CHECK(capacity_from_geometry(0.665, 7.56e-5, 0.1027, 63104) ==
          doctest::Approx(8.732288462089919).epsilon(1e-12));
    CHECK_THROWS_AS(capacity_from_geometry(0.75, 8.52e-5, 0.0, 33133), ArgumentError);
}

TEST_CASE("default pack is self-consistent") {
    kPack.validate();
    CHECK(std::abs(kPack.esoh.useful_capacity_ah() - kPack.esoh.useful_capacity_ne_ah()) <=
          1e-6);
    // The shipped windows solve the window system at the pack voltage limits.
    WindowSolveInput in;
    in.qp_ah = kPack.esoh.qp_ah;
    in.qn_ah = kPack.esoh.qn_ah;
    const SolPair mid = sol_from_soc(kPack.esoh, 0.5);
    in.thp = mid.thp;
    in.thn = mid.thn;
    in.vmin_v = kPack.vmin_v;
    in.vmax_v = kPack.vmax_v;
    const auto res = window_residuals(in, kPack.ocp_neg, kPack.ocp_pos,
                                      {kPack.esoh.thp0, kPack.esoh.thp100, kPack.esoh.thn0,
                                       kPack.esoh.thn100});
    for (double r : res) CHECK(std::abs(r) < 1e-9);
}

TEST_CASE("pack json round trip") {
    const std::string text = pack_to_json_text(kPack);
    const ParameterPack loaded = pack_from_json_text(text);
    CHECK(loaded.esoh.qp_ah == kPack.esoh.qp_ah);
    CHECK(loaded.esoh.thn100 == kPack.esoh.thn100);
    CHECK(loaded.table_neg.r0_ohm == kPack.table_neg.r0_ohm);
    CHECK(loaded.table_pos.c2_f == kPack.table_pos.c2_f);
    CHECK(ocp(loaded.ocp_neg, 0.37) == ocp(kPack.ocp_neg, 0.37));
    CHECK(loaded.vmin_v == kPack.vmin_v);

    CHECK_THROWS_AS(pack_from_json_text("{not json"), ConfigError);
    CHECK_THROWS_AS(pack_from_json_text("{}"), ConfigError);
}
