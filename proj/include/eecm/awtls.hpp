#pragma once

#include <optional>
#include <vector>

#include "eecm/ocp.hpp"

namespace eecm {

// Recursive approximate weighted total least squares for y = Q x with
// per-pair variances on both coordinates. Six weighted moments are enough to
// evaluate the quartic stationarity polynomial of the merit function
//   chi(Q) = sum (y_i - Q x_i)^2 / (1+Q^2)^2 (Q^2/var_x_i + 1/var_y_i).
struct AwtlsAccumulator {
    Electrode electrode = Electrode::negative;
    double gamma = 0.999;       // forgetting factor per accepted pair
    double dtheta_floor = 0.05; // pairs with |x| below are discarded

    // moments: a-weighted (1/var_x) and b-weighted (1/var_y)
    double sxx_a = 0.0, sxy_a = 0.0, syy_a = 0.0;
    double sxx_b = 0.0, sxy_b = 0.0, syy_b = 0.0;
    long count = 0;
    long discarded = 0;

    // Returns true when the pair was accepted. Throws ArgumentError for
    // non-positive variances.
    bool push_pair(double dtheta, double dah, double var_x, double var_y);

    struct Estimate {
        double q_ah = 0.0;
        double sigma_q_ah = 0.0; // from the merit Hessian at the minimum
    };
    // Empty when no pair has been accepted or no positive real root exists.
    std::optional<Estimate> estimate() const;

    // Merit as a function of Q, evaluated from the moments (used by the
    // estimator and by the brute-force test oracle).
    double merit(double q) const;
};

// One harvested regression pair.
struct CapacityPair {
    Electrode electrode = Electrode::negative;
    double t_s = 0.0;
    double dtheta = 0.0;
    double dah = 0.0;
    double var_x = 0.0;
    double var_y = 0.0;
    bool accepted = false;
};

// Partitions the stream into non-overlapping windows of fixed duration.
// Per window and electrode it emits (theta_k2 - theta_k1, +-sum eta i dt/3600)
// with the SOL variance taken from the filter covariances at both ends.
class PairHarvester {
public:
    PairHarvester(double window_s, double current_noise_a, double eta = 1.0)
        : window_s_(window_s), current_noise_a_(current_noise_a), eta_(eta) {}

    // Feed one sample (after the filter update at time t). Returns the two
    // electrode pairs when a window closed at this sample.
    std::vector<CapacityPair> on_sample(double t_s, double current_a, double dt_s,
                                        double thp, double var_thp, double thn,
                                        double var_thn);

private:
    double window_s_;
    double current_noise_a_;
    double eta_;
    bool open_ = false;
    double start_t_ = 0.0;
    double ah_ = 0.0;
    double sum_dt_ = 0.0;
    double start_thp_ = 0.0, start_var_p_ = 0.0;
    double start_thn_ = 0.0, start_var_n_ = 0.0;
};

} // namespace eecm
