#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eecm/random.hpp"

namespace eecm {

enum class SegmentKind { constant_current, drive_cycle, hppc };

struct ProfileSegment {
    SegmentKind kind = SegmentKind::constant_current;
    // Magnitude: amps, or a C-rate resolved against the pack's useful
    // capacity at load time (exactly one of the two).
    double magnitude_a = 0.0;
    double duration_s = 0.0;
    std::optional<double> termination_v; // segment ends when crossed (sign from current direction)

    // drive_cycle: band-limited pseudo-random current.
    double regen_fraction = 0.3;   // fraction of time the current is negative
    double correlation_time_s = 30.0;

    // hppc: alternating discharge/charge pulses with rests, centered on the
    // entry SOL. magnitude_a is the pulse amplitude.
    double pulse_s = 30.0;
    double rest_s = 600.0;
};

struct ProfileSpec {
    std::vector<ProfileSegment> segments;
    double dt_s = 1.0;
    double noise_std_v = 0.0;
    std::uint64_t seed = 0;

    void validate() const; // throws ArgumentError
};

// Nominal current series for the spec (terminations ignored; the simulator
// applies them against the modeled voltage). Deterministic given the seed.
std::vector<double> generate_profile(const ProfileSpec& spec);

// Sample-by-sample replay of one segment. Each segment draws from its own
// seed substream, so truncating a segment at a termination voltage leaves
// later segments' waveforms unchanged.
class SegmentCurrent {
public:
    SegmentCurrent(const ProfileSegment& seg, double dt_s, std::uint64_t seed,
                   std::size_t segment_index);

    bool exhausted() const;
    double next();
    const ProfileSegment& segment() const { return seg_; }

private:
    ProfileSegment seg_;
    double dt_s_;
    Rng rng_;
    std::size_t samples_;
    std::size_t index_ = 0;
    double ar_state_ = 0.0;
    double ar_coeff_ = 0.0;
    double mean_ = 0.0;
    double scale_ = 0.0;
};

} // namespace eecm
