#pragma once

#include <vector>

#include "eecm/ocp.hpp"

namespace eecm {

struct RcValues {
    double r0 = 0.0; // Ohm
    double r1 = 0.0; // Ohm
    double c1 = 0.0; // F
    double r2 = 0.0; // Ohm
    double c2 = 0.0; // F
};

// Passive circuit elements of one half cell, tabulated against SOL.
struct HalfCellParamTable {
    Electrode electrode = Electrode::negative;
    std::vector<double> sol;     // breakpoints, fraction, strictly increasing over [0,1]
    std::vector<double> r0_ohm;
    std::vector<double> r1_ohm;
    std::vector<double> c1_f;
    std::vector<double> r2_ohm;
    std::vector<double> c2_f;

    // Throws ConfigError on non-monotone breakpoints, bad span, or
    // non-positive elements.
    void validate() const;

    std::size_t size() const { return sol.size(); }

    // Reference LG M50 tables (11 breakpoints, 0..100 % SOL).
    static HalfCellParamTable lgm50(Electrode electrode);
};

// Piecewise-linear interpolation of each element independently; theta is
// clamped to [0,1]. Exact at breakpoints.
RcValues interpolate_rc(const HalfCellParamTable& table, double theta);

// Electrode capacities and stoichiometric-window endpoints.
struct EsohParams {
    double qp_ah = 0.0;   // PE total capacity
    double qn_ah = 0.0;   // NE total capacity
    double thp0 = 0.0;    // PE SOL at 0 % SOC
    double thp100 = 0.0;  // PE SOL at 100 % SOC
    double thn0 = 0.0;    // NE SOL at 0 % SOC
    double thn100 = 0.0;  // NE SOL at 100 % SOC
    double eta = 1.0;     // coulombic efficiency

    void validate() const; // throws ConfigError

    // Q = Qp (thp0 - thp100); equals Qn (thn100 - thn0) when consistent.
    double useful_capacity_ah() const { return qp_ah * (thp0 - thp100); }
    double useful_capacity_ne_ah() const { return qn_ah * (thn100 - thn0); }
};

// z = (thn - thn0) / (thn100 - thn0). Throws ConfigError on a degenerate window.
double soc_from_sol(const EsohParams& esoh, double thn);

struct SolPair {
    double thp = 0.0;
    double thn = 0.0;
};
SolPair sol_from_soc(const EsohParams& esoh, double soc);

// Theoretical electrode capacity from physics-model geometry:
// Q = F eps_s L A c_max / 3600. Used to seed truth configurations.
// Throws ArgumentError on non-positive inputs.
double capacity_from_geometry(double eps_s, double thickness_m, double area_m2,
                              double cs_max_mol_m3);

inline constexpr double kFaraday = 96485.0; // C/mol

} // namespace eecm
