#include "eecm/profile.hpp"

#include <cmath>

#include "eecm/errors.hpp"
#include "eecm/random.hpp"

namespace eecm {

void ProfileSpec::validate() const {
    if (segments.empty()) throw ArgumentError("profile spec has no segments");
    if (!(dt_s > 0.0)) throw ArgumentError("profile dt must be positive");
    if (noise_std_v < 0.0) throw ArgumentError("noise std must be non-negative");
    for (const auto& s : segments) {
        if (s.duration_s < 0.0) throw ArgumentError("segment duration must be non-negative");
        if (s.kind == SegmentKind::drive_cycle) {
            if (!(s.regen_fraction > 0.0) || !(s.regen_fraction < 1.0))
                throw ArgumentError("regen fraction must be in (0,1)");
            if (!(s.correlation_time_s > 0.0))
                throw ArgumentError("drive correlation time must be positive");
        }
        if (s.kind == SegmentKind::hppc && (!(s.pulse_s > 0.0) || !(s.rest_s > 0.0)))
            throw ArgumentError("hppc pulse and rest durations must be positive");
    }
}

SegmentCurrent::SegmentCurrent(const ProfileSegment& seg, double dt_s, std::uint64_t seed,
                               std::size_t segment_index)
    : seg_(seg),
      dt_s_(dt_s),
      rng_(seed ^ (0x6a09e667f3bcc909ULL + 0x9e3779b97f4a7c15ULL * (segment_index + 1))),
      samples_(static_cast<std::size_t>(std::ceil(seg.duration_s / dt_s))) {
    if (seg_.kind == SegmentKind::drive_cycle) {
        ar_coeff_ = std::exp(-dt_s_ / seg_.correlation_time_s);
        const double q = inverse_normal_cdf(1.0 - seg_.regen_fraction);
        scale_ = seg_.magnitude_a / std::sqrt(1.0 + q * q);
        mean_ = q * scale_;
    }
}

bool SegmentCurrent::exhausted() const { return index_ >= samples_; }

double SegmentCurrent::next() {
    const std::size_t k = index_++;
    switch (seg_.kind) {
        case SegmentKind::constant_current:
            return seg_.magnitude_a;
        case SegmentKind::drive_cycle: {
            ar_state_ = ar_coeff_ * ar_state_ +
                        std::sqrt(1.0 - ar_coeff_ * ar_coeff_) * rng_.normal();
            return mean_ + scale_ * ar_state_;
        }
        case SegmentKind::hppc: {
            const auto pulse_n = static_cast<std::size_t>(std::round(seg_.pulse_s / dt_s_));
            const auto rest_n = static_cast<std::size_t>(std::round(seg_.rest_s / dt_s_));
            const std::size_t block = 2 * (pulse_n + rest_n);
            const std::size_t pos = k % block;
            if (pos < pulse_n) return seg_.magnitude_a;
            if (pos < pulse_n + rest_n) return 0.0;
            if (pos < 2 * pulse_n + rest_n) return -seg_.magnitude_a;
            return 0.0;
        }
    }
    return 0.0;
}

std::vector<double> generate_profile(const ProfileSpec& spec) {
    spec.validate();
    std::vector<double> series;
    for (std::size_t s = 0; s < spec.segments.size(); ++s) {
        SegmentCurrent gen(spec.segments[s], spec.dt_s, spec.seed, s);
        while (!gen.exhausted()) series.push_back(gen.next());
    }
    return series;
}

} // namespace eecm
