#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eecm/cell_model.hpp"
#include "eecm/de.hpp"
#include "eecm/profile.hpp"

namespace eecm {

// Half-cell HPPC time series plus pulse-block segmentation. The sol column
// is the known electrode SOL during the test (characterization assumes the
// lithiation trajectory is controlled).
struct HppcDataset {
    Electrode electrode = Electrode::negative;
    std::vector<double> t_s;
    std::vector<double> current_a;
    std::vector<double> potential_v;
    std::vector<double> sol;

    struct Block {
        std::size_t begin = 0; // first sample index
        std::size_t end = 0;   // one past last
        double sol = 0.0;      // breakpoint this block characterizes
    };
    std::vector<Block> blocks;

    // Rebuilds blocks from the sol column: per breakpoint, the longest
    // contiguous run staying within sol_tol of it.
    void segment(const std::vector<double>& breakpoints, double sol_tol = 0.02);
};

// J1: voltage RMS error (V).
double cost_j1(const std::vector<double>& model_v, const std::vector<double>& test_v);

// J2: RMS of ((dV_i - dV_i*) / dt_i) over i >= 2 (V/s). Offset-blind.
double cost_j2(const std::vector<double>& model_v, const std::vector<double>& test_v,
               const std::vector<double>& dt_s);

struct FitConfig {
    std::vector<double> breakpoints;     // SOL values to fit (default: table grid)
    double w1 = 1.0;                     // weight on J1 (V)
    double w2 = 100.0;                   // weight on J2 (s; makes V/s comparable to V)
    double r_lo_ohm = 1e-5, r_hi_ohm = 0.5;
    double c_lo_f = 50.0, c_hi_f = 2e7;
    DeOptions de;                        // population optimizer settings
    bool joint_fit = false;              // fit all blocks against one table at once
};

struct BreakpointFit {
    double sol = 0.0;
    RcValues rc;
    double j1_v = 0.0;
    double j2_v_per_s = 0.0;
    long evaluations = 0;
};

struct FitResult {
    Electrode electrode = Electrode::negative;
    std::vector<BreakpointFit> breakpoints;
    double j1_v = 0.0;        // over all fitted blocks
    double j2_v_per_s = 0.0;
    int generations = 0;
    int population = 0;
    std::uint64_t seed = 0;

    HalfCellParamTable to_table() const;
};

// Fits the passive elements per SOL breakpoint from HPPC data. RC branches
// are reported with ascending time constants. Throws DataError when blocks
// are missing or unidentifiable (zero excitation).
FitResult fit_half_cell(const HppcDataset& data, const OcpCurve& curve, const FitConfig& config);

struct HppcScheduleConfig {
    Electrode electrode = Electrode::negative;
    double q_ah = 1.0;        // electrode capacity used to convert C-rates
    double sol_lo = 0.0;
    double sol_hi = 1.0;
    double sol_step = 0.1;
    double pulse_crate = 1.0;
    double pulse_s = 30.0;
    double rest_s = 900.0;
    double settle_s = 1800.0; // rest after each CC step, before the pulses
    double step_crate = 0.5;  // CC rate used to move between breakpoints
    int pulses_per_block = 2;
    double dt_s = 1.0;
};

// Alternating CC-step / settle / pulse-block profile covering the SOL range;
// one block per breakpoint, starting at sol_lo.
ProfileSpec hppc_schedule(const HppcScheduleConfig& config);

// Synthesizes a half-cell HPPC dataset by simulating the electrode under the
// schedule. The recorded potential gets additive Gaussian noise.
HppcDataset synthesize_hppc(const OcpCurve& curve, const HalfCellParamTable& table,
                            const HppcScheduleConfig& config, double noise_std_v,
                            std::uint64_t seed);

} // namespace eecm
