#include "eecm/spkf.hpp"

#include <cmath>

#include "eecm/errors.hpp"

namespace eecm {

ElectrodeDiscrete electrode_discrete(Electrode electrode, const HalfCellParamTable& table,
                                     const EsohParams& esoh, double theta, double dt_s) {
    const RcValues rc = interpolate_rc(table, theta);
    const RcDiscrete b1 = discretize_rc(rc.r1, rc.c1, dt_s);
    const RcDiscrete b2 = discretize_rc(rc.r2, rc.c2, dt_s);
    ElectrodeDiscrete m;
    m.a.setZero();
    m.a(0, 0) = b1.a;
    m.a(1, 1) = b2.a;
    m.a(2, 2) = 1.0;
    const double q_ah = electrode == Electrode::positive ? esoh.qp_ah : esoh.qn_ah;
    const double sign = electrode == Electrode::positive ? 1.0 : -1.0;
    m.b << b1.b, b2.b, sign * esoh.eta * dt_s / (3600.0 * q_ah);
    return m;
}

Eigen::Vector3d predict_state(const FilterState& fs, const ElectrodeDiscrete& ssm,
                              double current_a) {
    return ssm.a * fs.x + ssm.b * current_a;
}

Eigen::Matrix3d predict_covariance(const FilterState& fs, const Eigen::Matrix3d& a,
                                   const Eigen::Matrix3d& process_cov) {
    const Eigen::Matrix3d m = a * fs.cov * a.transpose() + process_cov;
    return 0.5 * (m + m.transpose());
}

SigmaPoints sigma_points(const Eigen::Vector3d& mean, const Eigen::Matrix3d& cov, double h) {
    SigmaPoints sp;
    Eigen::Matrix3d c = cov;
    for (int attempt = 0; attempt <= 3; ++attempt) {
        Eigen::LLT<Eigen::Matrix3d> llt(c);
        if (llt.info() == Eigen::Success) {
            const Eigen::Matrix3d l = llt.matrixL();
            sp.points[0] = mean;
            for (int j = 0; j < 3; ++j) {
                sp.points[1 + j] = mean + h * l.col(j);
                sp.points[4 + j] = mean - h * l.col(j);
            }
            sp.ok = true;
            sp.jitter_rounds = attempt;
            return sp;
        }
        c += Eigen::Matrix3d::Identity() * (1e-12 * c.trace() / 3.0);
    }
    return sp;
}

SpkfEstimator::SpkfEstimator(const ParameterPack& pack, const EsohParams& initial_esoh,
                             const NoiseConfig& noise, const FilterState& init_pos,
                             const FilterState& init_neg)
    : pack_(pack),
      esoh_(initial_esoh),
      noise_(noise),
      weights_(noise.h),
      pos_(init_pos),
      neg_(init_neg),
      init_pos_(init_pos),
      init_neg_(init_neg) {
    if (!(noise.h > 0.0)) throw ConfigError("sigma scaling h must be positive");
    if (!(noise.meas_var_v2 > 0.0)) throw ConfigError("measurement variance must be positive");
    pos_.electrode = init_pos_.electrode = Electrode::positive;
    neg_.electrode = init_neg_.electrode = Electrode::negative;
}

SpkfEstimator::SpkfEstimator(const ParameterPack& pack, const EsohParams& initial_esoh,
                             const NoiseConfig& noise, double initial_soc,
                             const Eigen::Vector3d& init_var)
    : SpkfEstimator(pack, initial_esoh, noise,
                    FilterState{Electrode::positive,
                                Eigen::Vector3d(0, 0, sol_from_soc(initial_esoh, initial_soc).thp),
                                init_var.asDiagonal()},
                    FilterState{Electrode::negative,
                                Eigen::Vector3d(0, 0, sol_from_soc(initial_esoh, initial_soc).thn),
                                init_var.asDiagonal()}) {}

double half_cell_potential(Electrode e, const Eigen::Vector3d& x, double current_a,
                           const ParameterPack& pack) {
    if (e == Electrode::positive) {
        const RcValues rc = interpolate_rc(pack.table_pos, x[2]);
        return ocp(pack.ocp_pos, x[2]) - x[0] - x[1] - rc.r0 * current_a;
    }
    const RcValues rc = interpolate_rc(pack.table_neg, x[2]);
    return ocp(pack.ocp_neg, x[2]) + x[0] + x[1] + rc.r0 * current_a;
}

OutputPrediction output_prediction(Electrode electrode, const SigmaPoints& points,
                                   const Eigen::Vector3d& other_prediction,
                                   const ParameterPack& pack, double current_a,
                                   const SigmaWeights& weights) {
    OutputPrediction out;
    const bool is_pos = electrode == Electrode::positive;
    const double other_v = half_cell_potential(
        is_pos ? Electrode::negative : Electrode::positive, other_prediction, current_a, pack);
    for (int i = 0; i < 7; ++i) {
        const double own_v = half_cell_potential(electrode, points.points[i], current_a, pack);
        out.y[i] = is_pos ? own_v - other_v : other_v - own_v;
    }
    out.mean = weights.w0 * out.y[0];
    for (int i = 1; i < 7; ++i) out.mean += weights.wi * out.y[i];
    return out;
}

bool gain_and_update(FilterState& fs, const SigmaPoints& points, const OutputPrediction& out,
                     double measured_v, double meas_var_v2, const SigmaWeights& weights) {
    double var_y = weights.w0 * (out.y[0] - out.mean) * (out.y[0] - out.mean);
    Eigen::Vector3d cov_xy = weights.w0 * (points.points[0] - fs.x) * (out.y[0] - out.mean);
    for (int i = 1; i < 7; ++i) {
        const double dy = out.y[i] - out.mean;
        var_y += weights.wi * dy * dy;
        cov_xy += weights.wi * (points.points[i] - fs.x) * dy;
    }
    var_y += meas_var_v2;
    if (!(var_y > 0.0)) return false;

    const Eigen::Vector3d gain = cov_xy / var_y;
    fs.x += gain * (measured_v - out.mean);
    fs.x[2] = std::clamp(fs.x[2], 0.0, 1.0);
    const Eigen::Matrix3d updated = fs.cov - gain * var_y * gain.transpose();
    fs.cov = 0.5 * (updated + updated.transpose());
    return true;
}

SpkfEstimator::UpdateResult SpkfEstimator::update_filter(FilterState& fs,
                                                         const Eigen::Vector3d& other_prediction,
                                                         double current_a, double measured_v) {
    UpdateResult res;
    SigmaPoints sp = sigma_points(fs.x, fs.cov, noise_.h);
    if (!sp.ok) {
        // Covariance degenerate beyond repair: reset to the prior and retry.
        fs.cov = fs.electrode == Electrode::positive ? init_pos_.cov : init_neg_.cov;
        sp = sigma_points(fs.x, fs.cov, noise_.h);
        res.degenerate = true;
        if (!sp.ok) return res;
    }

    const OutputPrediction out =
        output_prediction(fs.electrode, sp, other_prediction, pack_, current_a, weights_);
    if (!gain_and_update(fs, sp, out, measured_v, noise_.meas_var_v2, weights_)) {
        res.degenerate = true;
        return res;
    }
    res.yhat = out.mean;
    return res;
}

StepOutput SpkfEstimator::step(const CyclingRecord& record) {
    // First sample: no time update, only the measurement correction.
    const double dt = first_step_ ? 0.0 : record.t_s - prev_t_s_;
    const double u_prev = prev_current_a_;
    first_step_ = false;

    if (dt > 0.0) {
        const ElectrodeDiscrete ssm_p =
            electrode_discrete(Electrode::positive, pack_.table_pos, esoh_, pos_.x[2], dt);
        const ElectrodeDiscrete ssm_n =
            electrode_discrete(Electrode::negative, pack_.table_neg, esoh_, neg_.x[2], dt);
        pos_.x = predict_state(pos_, ssm_p, u_prev);
        neg_.x = predict_state(neg_, ssm_n, u_prev);
        pos_.x[2] = std::clamp(pos_.x[2], 0.0, 1.0);
        neg_.x[2] = std::clamp(neg_.x[2], 0.0, 1.0);
        pos_.cov = predict_covariance(pos_, ssm_p.a, noise_.process_cov);
        neg_.cov = predict_covariance(neg_, ssm_n.a, noise_.process_cov);
    }

    // Both filters see the other's time-update prediction from this sample.
    const Eigen::Vector3d pred_p = pos_.x;
    const Eigen::Vector3d pred_n = neg_.x;
    const UpdateResult up = update_filter(pos_, pred_n, record.current_a, record.voltage_v);
    const UpdateResult un = update_filter(neg_, pred_p, record.current_a, record.voltage_v);
    if (up.degenerate || un.degenerate) ++degenerate_resets_;

    prev_current_a_ = record.current_a;
    prev_t_s_ = record.t_s;

    StepOutput out;
    out.thp = pos_.x[2];
    out.thn = neg_.x[2];
    out.soc = soc_from_sol(esoh_, neg_.x[2]);
    out.vhat_v = 0.5 * (up.yhat + un.yhat);
    out.pos = pos_;
    out.neg = neg_;
    out.degenerate_resets = degenerate_resets_;
    return out;
}

void SpkfEstimator::set_capacities(double qp_ah, double qn_ah) {
    if (!(qp_ah > 0.0) || !(qn_ah > 0.0)) throw ArgumentError("capacities must be positive");
    esoh_.qp_ah = qp_ah;
    esoh_.qn_ah = qn_ah;
}

void SpkfEstimator::set_windows(double thp0, double thp100, double thn0, double thn100) {
    esoh_.thp0 = thp0;
    esoh_.thp100 = thp100;
    esoh_.thn0 = thn0;
    esoh_.thn100 = thn100;
    esoh_.validate();
}

} // namespace eecm
