#pragma once

#include <array>

#include <Eigen/Dense>

#include "eecm/cell_model.hpp"
#include "eecm/truth.hpp"

namespace eecm {

// One electrode's estimate: x = (vC1, vC2, theta) with its error covariance.
struct FilterState {
    Electrode electrode = Electrode::negative;
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    Eigen::Matrix3d cov = Eigen::Matrix3d::Identity();
};

struct NoiseConfig {
    Eigen::Matrix3d process_cov =
        Eigen::Vector3d(1e-8, 1e-8, 1e-10).asDiagonal(); // per electrode
    double meas_var_v2 = 4e-6;                           // (2 mV)^2
    double h = 1.7320508075688772;                       // sqrt(3), central difference
};

// Central-difference sigma-point weights for N = 3:
// alpha_m0 = (h^2-N)/h^2, alpha_mi = 1/(2 h^2); covariance weights equal.
struct SigmaWeights {
    double w0 = 0.0;
    double wi = 0.0;
    explicit SigmaWeights(double h, int n = 3)
        : w0((h * h - n) / (h * h)), wi(1.0 / (2.0 * h * h)) {}
};

// Discrete state-space matrices for one electrode at the linearization SOL.
struct ElectrodeDiscrete {
    Eigen::Matrix3d a = Eigen::Matrix3d::Identity();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
};
ElectrodeDiscrete electrode_discrete(Electrode electrode, const HalfCellParamTable& table,
                                     const EsohParams& esoh, double theta, double dt_s);

// x_hat_minus = A' x_hat_plus + B' u.
Eigen::Vector3d predict_state(const FilterState& fs, const ElectrodeDiscrete& ssm,
                              double current_a);

// Sigma_minus = A' Sigma_plus A'^T + Sigma_w, symmetrized.
Eigen::Matrix3d predict_covariance(const FilterState& fs, const Eigen::Matrix3d& a,
                                   const Eigen::Matrix3d& process_cov);

// {m, m +- h col_j(chol(cov))}; 2N+1 = 7 points. Jitter is added up to three
// times when the Cholesky fails; ok = false afterwards (caller resets).
struct SigmaPoints {
    std::array<Eigen::Vector3d, 7> points;
    bool ok = false;
    int jitter_rounds = 0;
};
SigmaPoints sigma_points(const Eigen::Vector3d& mean, const Eigen::Matrix3d& cov, double h);

struct OutputPrediction {
    std::array<double, 7> y{};  // output sigma points
    double mean = 0.0;
};

// Electrode half-cell potential for an estimator state vector (vC1, vC2, th).
double half_cell_potential(Electrode e, const Eigen::Vector3d& x, double current_a,
                           const ParameterPack& pack);

// Step 1c: this electrode's sigma points against the other electrode's
// time-update prediction, through the cell voltage; mean under the weights.
OutputPrediction output_prediction(Electrode electrode, const SigmaPoints& points,
                                   const Eigen::Vector3d& other_prediction,
                                   const ParameterPack& pack, double current_a,
                                   const SigmaWeights& weights);

// Steps 2a-2c: gain, state measurement update (with SOL clamping), and the
// symmetrized covariance downdate. Returns false when the innovation
// variance is not positive (numerical degeneracy).
bool gain_and_update(FilterState& fs, const SigmaPoints& points, const OutputPrediction& out,
                     double measured_v, double meas_var_v2, const SigmaWeights& weights);

struct StepOutput {
    double soc = 0.0;
    double thp = 0.0;
    double thn = 0.0;
    double vhat_v = 0.0; // mean of the two filters' output predictions
    FilterState pos;
    FilterState neg;
    long degenerate_resets = 0;
};

// Interconnected dual SPKF: each filter's output sigma points are combined
// with the other filter's time-update prediction through the cell voltage.
class SpkfEstimator {
public:
    SpkfEstimator(const ParameterPack& pack, const EsohParams& initial_esoh,
                  const NoiseConfig& noise, const FilterState& init_pos,
                  const FilterState& init_neg);

    // Convenience: rest init at a SOC guess with diagonal covariance.
    SpkfEstimator(const ParameterPack& pack, const EsohParams& initial_esoh,
                  const NoiseConfig& noise, double initial_soc,
                  const Eigen::Vector3d& init_var);

    StepOutput step(const CyclingRecord& record);

    const FilterState& filter(Electrode e) const {
        return e == Electrode::positive ? pos_ : neg_;
    }
    const EsohParams& esoh() const { return esoh_; }

    // The pipeline updates capacities (AWTLS) and windows (solver) in place.
    void set_capacities(double qp_ah, double qn_ah);
    void set_windows(double thp0, double thp100, double thn0, double thn100);

    long degenerate_resets() const { return degenerate_resets_; }

private:
    struct UpdateResult {
        double yhat = 0.0;
        bool degenerate = false;
    };
    UpdateResult update_filter(FilterState& fs, const Eigen::Vector3d& other_prediction,
                               double current_a, double measured_v);

    ParameterPack pack_;
    EsohParams esoh_;
    NoiseConfig noise_;
    SigmaWeights weights_;
    FilterState pos_;
    FilterState neg_;
    FilterState init_pos_;
    FilterState init_neg_;
    double prev_current_a_ = 0.0;
    double prev_t_s_ = 0.0;
    bool first_step_ = true;
    long degenerate_resets_ = 0;
};

} // namespace eecm
