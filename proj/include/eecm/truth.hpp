#pragma once

#include <vector>

#include "eecm/cell_model.hpp"
#include "eecm/profile.hpp"

namespace eecm {

// Inserted degradation, in percent. The fresh cell is all zeros.
struct DegradationSpec {
    double lam_p_pct = 0.0;
    double lam_n_pct = 0.0;
    double lli_pct = 0.0;

    void validate() const; // each in [0, 80)
};

// Total intercalated lithium implied by the window endpoints at 0 % SOC.
double lithium_inventory_mol(const EsohParams& esoh);

// Ages the eSOH parameters: capacities shrink by LAM, the lithium inventory
// by LLI, and the four window endpoints are re-solved from the voltage
// limits, the electrode balance, and the aged inventory. Throws
// InfeasibleDegradationError when no solution exists in [0,1]^4.
EsohParams apply_degradation(const EsohParams& fresh, const DegradationSpec& spec,
                             double vmin_v, double vmax_v, const OcpCurve& ocp_neg,
                             const OcpCurve& ocp_pos);

// Per-element multiplicative perturbation of the R/C tables, uniform in
// [1-fraction, 1+fraction], seeded. Models characterization mismatch.
ParameterPack apply_table_mismatch(const ParameterPack& pack, double fraction,
                                   std::uint64_t seed);

struct CyclingRecord {
    double t_s = 0.0;
    double current_a = 0.0;
    double voltage_v = 0.0;
};

struct TruthSample {
    double t_s = 0.0;
    double thn = 0.0;
    double thp = 0.0;
    double soc = 0.0;
};

struct SimulationResult {
    std::vector<CyclingRecord> records;
    std::vector<TruthSample> truth;
    long clamp_events = 0;
    long terminated_segments = 0; // cut by termination voltage or hard cutoff
};

// Simulates the truth trajectory under the profile. Measured voltage gets
// additive Gaussian noise; the recorded voltage at step k is the terminal
// voltage before the step's current has propagated the state (so estimators
// predict with the previous sample's current). Segments end at their
// termination voltage; the hard cutoffs [2.0, 4.4] V always apply.
SimulationResult simulate_trajectory(const ParameterPack& truth_pack,
                                     const EsohParams& truth_esoh,
                                     const ProfileSpec& profile, double initial_soc);

} // namespace eecm
