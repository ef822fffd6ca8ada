#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "eecm/awtls.hpp"
#include "eecm/cell_model.hpp"
#include "eecm/characterization.hpp"
#include "eecm/esoh_solver.hpp"
#include "eecm/health.hpp"
#include "eecm/spkf.hpp"
#include "eecm/truth.hpp"

namespace eecm {

struct EstimatorConfig {
    double h = 1.7320508075688772;
    Eigen::Vector3d process_cov_diag{1e-8, 1e-8, 1e-9};
    double meas_var_v2 = 25e-6; // (5 mV)^2: synthetic noise floor plus model mismatch
    double init_soc = 1.0;
    Eigen::Vector3d init_var_diag{1e-4, 1e-4, 1e-2};
    std::optional<double> init_qp_ah; // default: pack values
    std::optional<double> init_qn_ah;
};

struct AwtlsConfig {
    double gamma = 0.999;
    double dtheta_floor = 0.05;
    double window_s = 7200.0;
    double current_noise_a = 0.01;
    // Pairs ending before burn_in_s are discarded: early windows straddle
    // the filter's initialization transient, where the SOL corrections are
    // not charge-driven and would bias the regression.
    double burn_in_s = 10800.0;
    // Windows whose innovation RMS exceeded gate * sqrt(meas_var) are
    // discarded as model-transient data; 0 disables the gate.
    double innovation_gate = 4.0;
};

struct SolverConfig {
    double period_s = 10000.0;
    std::optional<double> vmin_v; // default: pack voltage limits
    std::optional<double> vmax_v;
};

struct RunConfig {
    std::string pack_path;
    std::string scenario_path; // exactly one of scenario/input
    std::string input_csv;
    std::string truth_csv; // optional, enables error columns in plots
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    bool plots = false;
    EstimatorConfig estimator;
    AwtlsConfig awtls;
    SolverConfig solver;

    // fit command
    std::string fit_input_csv;
    std::string fit_electrode = "positive";
    std::string fit_output_pack;
    FitConfig fit;

    // report command
    std::string report_estimates_csv;

    static RunConfig from_json_file(const std::string& path);
    void validate_for_estimate() const;
};

// Scenario description for synthetic runs.
struct Scenario {
    DegradationSpec degradation;
    double mismatch_fraction = 0.0;
    std::uint64_t mismatch_seed = 0;
    double initial_soc = 1.0;
    ProfileSpec profile;

    static Scenario from_json_file(const std::string& path, const EsohParams& nominal);
};

struct SimulateOutputs {
    std::string measurements_csv;
    std::string truth_csv;
    long samples = 0;
};
SimulateOutputs cmd_simulate(const RunConfig& config);

struct EstimateOutputs {
    std::string estimates_csv;
    std::string endpoints_csv;
    std::string health_csv;
    std::string pairs_csv;
    long samples = 0;
    long skipped_rows = 0;
    long solver_accepted = 0;
    long solver_rejected = 0;
    // Final state, for tests and the summary line.
    EsohParams final_esoh;
    double final_soc = 0.0;
};
EstimateOutputs cmd_estimate(const RunConfig& config);

struct FitOutputs {
    std::string pack_json;
    FitResult result;
};
FitOutputs cmd_fit(const RunConfig& config);

struct ReportOutputs {
    std::string health_csv;
    std::string summary_text;
    std::optional<HealthReport> final_report;
};
ReportOutputs cmd_report(const RunConfig& config);

// Streaming estimation core shared by cmd_estimate and the acceptance suite.
class EstimationPipeline {
public:
    EstimationPipeline(const ParameterPack& pack, const RunConfig& config);

    struct SampleResult {
        StepOutput step;
        bool solver_fired = false;
        bool solver_accepted = false;
    };
    SampleResult on_record(const CyclingRecord& record);

    const SpkfEstimator& estimator() const { return estimator_; }
    const EsohParams& esoh() const { return estimator_.esoh(); }
    const std::vector<CapacityPair>& last_pairs() const { return last_pairs_; }
    const WindowSolution& last_solution() const { return last_solution_; }
    long solver_accepted() const { return solver_accepted_; }
    long solver_rejected() const { return solver_rejected_; }
    std::optional<double> sigma_qp() const { return sigma_qp_; }
    std::optional<double> sigma_qn() const { return sigma_qn_; }

private:
    ParameterPack pack_;
    RunConfig config_;
    SpkfEstimator estimator_;
    PairHarvester harvester_;
    AwtlsAccumulator acc_pos_;
    AwtlsAccumulator acc_neg_;
    SolveSchedule schedule_;
    double vmin_v_;
    double vmax_v_;
    std::array<double, 4> warm_start_;
    std::vector<CapacityPair> last_pairs_;
    WindowSolution last_solution_;
    long solver_accepted_ = 0;
    long solver_rejected_ = 0;
    std::optional<double> sigma_qp_;
    std::optional<double> sigma_qn_;
    double prev_t_s_ = 0.0;
    bool have_prev_t_ = false;
    double window_innovation_sq_ = 0.0;
    long window_samples_ = 0;
};

// Resolves the effective output directory (EECM_OUTPUT_DIR wins over config).
std::string effective_output_dir(const RunConfig& config);

} // namespace eecm
