#include "eecm/params.hpp"

#include <algorithm>
#include <cmath>

#include "eecm/errors.hpp"

namespace eecm {

namespace {

// Table 1 values: R in mOhm, C in kF, SOL 0..100 % in 10 % steps.
constexpr double kNe[11][5] = {
    {128, 0.05, 3259, 0.03, 5596}, {25.7, 0.08, 1915, 0.08, 2329},
    {26.1, 5.1, 6.85, 0.47, 200.2}, {23.7, 5.5, 21.2, 3, 25.65},
    {22, 5.3, 12.61, 6, 12.81},     {22.4, 7.3, 6.7, 1.4, 75.74},
    {22.6, 9.4, 9.22, 2.1, 51.98},  {24.6, 3.5, 15.8, 5.9, 9.89},
    {23.8, 2.9, 7.92, 4.7, 15.52},  {34.2, 5.8, 15.4, 4.2, 18.92},
    {32.2, 5.2, 0.84, 8.3, 11.04}};

constexpr double kPe[11][5] = {
    {2.7, 3.1, 20.3847, 1.8, 75.2961}, {11.8, 9.8, 3.7071, 12.2, 9.311},
    {4.1, 14.3, 1.1344, 14.2, 0.7966}, {7.4, 14.2, 13.9334, 1.9, 1.6941},
    {8.1, 14.2, 12.2308, 4.3, 3.8551}, {7.6, 12.4, 14.4738, 7.5, 5.7076},
    {8, 14.2, 13.9521, 3.5, 5.279},    {5.9, 11.5, 15.1133, 1.7, 4.3032},
    {7.5, 8.7, 20.4305, 3, 3.5433},    {6.6, 10.3, 6.7177, 4.5, 16.2523},
    {9, 5, 32.348, 8.1, 23.688}};

double lerp_column(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return ys.front();
    if (it == xs.end()) return ys.back();
    const std::size_t j = static_cast<std::size_t>(it - xs.begin());
    const double f = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
    return ys[j - 1] + f * (ys[j] - ys[j - 1]);
}

} // namespace

void HalfCellParamTable::validate() const {
    const std::size_t n = sol.size();
    if (n < 2) throw ConfigError("half-cell table needs at least two breakpoints");
    for (const auto* col : {&r0_ohm, &r1_ohm, &c1_f, &r2_ohm, &c2_f}) {
        if (col->size() != n) throw ConfigError("half-cell table column length mismatch");
        for (double v : *col) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw ConfigError("half-cell table elements must be positive and finite");
        }
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(sol[i] > sol[i - 1]))
            throw ConfigError("half-cell table breakpoints must be strictly increasing");
    }
    if (sol.front() != 0.0 || sol.back() != 1.0)
        throw ConfigError("half-cell table breakpoints must span [0,1]");
}

HalfCellParamTable HalfCellParamTable::lgm50(Electrode electrode) {
    HalfCellParamTable t;
    t.electrode = electrode;
    const auto& rows = electrode == Electrode::negative ? kNe : kPe;
    for (int i = 0; i < 11; ++i) {
        t.sol.push_back(i / 10.0);
        t.r0_ohm.push_back(rows[i][0] * 1e-3);
        t.r1_ohm.push_back(rows[i][1] * 1e-3);
        t.c1_f.push_back(rows[i][2] * 1e3);
        t.r2_ohm.push_back(rows[i][3] * 1e-3);
        t.c2_f.push_back(rows[i][4] * 1e3);
    }
    return t;
}

RcValues interpolate_rc(const HalfCellParamTable& table, double theta) {
    const double th = std::clamp(theta, 0.0, 1.0);
    RcValues v;
    v.r0 = lerp_column(table.sol, table.r0_ohm, th);
    v.r1 = lerp_column(table.sol, table.r1_ohm, th);
    v.c1 = lerp_column(table.sol, table.c1_f, th);
    v.r2 = lerp_column(table.sol, table.r2_ohm, th);
    v.c2 = lerp_column(table.sol, table.c2_f, th);
    return v;
}

void EsohParams::validate() const {
    if (!(qp_ah > 0.0) || !(qn_ah > 0.0)) throw ConfigError("electrode capacities must be positive");
    if (!(eta > 0.0) || eta > 1.0) throw ConfigError("coulombic efficiency must be in (0,1]");
    if (!(thp0 > thp100)) throw ConfigError("PE window must satisfy thp0 > thp100");
    if (!(thn100 > thn0)) throw ConfigError("NE window must satisfy thn100 > thn0");
    for (double th : {thp0, thp100, thn0, thn100}) {
        if (th < 0.0 || th > 1.0) throw ConfigError("window endpoints must lie in [0,1]");
    }
}

double soc_from_sol(const EsohParams& esoh, double thn) {
    const double span = esoh.thn100 - esoh.thn0;
    if (span == 0.0) throw ConfigError("degenerate NE stoichiometric window");
    return (thn - esoh.thn0) / span;
}

SolPair sol_from_soc(const EsohParams& esoh, double soc) {
    if (esoh.thn100 == esoh.thn0) throw ConfigError("degenerate NE stoichiometric window");
    return SolPair{esoh.thp0 - soc * (esoh.thp0 - esoh.thp100),
                   esoh.thn0 + soc * (esoh.thn100 - esoh.thn0)};
}

double capacity_from_geometry(double eps_s, double thickness_m, double area_m2,
                              double cs_max_mol_m3) {
    if (!(eps_s > 0.0) || !(thickness_m > 0.0) || !(area_m2 > 0.0) || !(cs_max_mol_m3 > 0.0))
        throw ArgumentError("capacity_from_geometry requires positive inputs");
    return kFaraday * eps_s * thickness_m * area_m2 * cs_max_mol_m3 / 3600.0;
}

} // namespace eecm
