#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace eecm {

// DE/rand/1/bin with a Nelder-Mead polish, seeded and deterministic.
struct DeOptions {
    int population = 64;
    int generations = 500;
    double differential_weight = 0.7;  // F
    double crossover_rate = 0.9;       // CR
    std::uint64_t seed = 0;
    int polish_iterations = 2000;      // Nelder-Mead refinement after DE
};

struct DeResult {
    std::vector<double> x;
    double value = 0.0;
    long evaluations = 0;
    int generations = 0;
};

using ScalarFn = std::function<double(const std::vector<double>&)>;

DeResult minimize_de(const ScalarFn& fn, const std::vector<double>& lower,
                     const std::vector<double>& upper, const DeOptions& opts = {});

// Bounded Nelder-Mead (reflects into the box), used as the polish stage.
DeResult minimize_nelder_mead(const ScalarFn& fn, const std::vector<double>& x0,
                              const std::vector<double>& lower,
                              const std::vector<double>& upper, int max_iterations,
                              double initial_scale = 0.05);

} // namespace eecm
