#pragma once

#include "rmshift/bandwidth.hpp"
#include "rmshift/kernels.hpp"
#include "rmshift/simulation.hpp"
#include "rmshift/transforms.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace rmshift {

enum class BandwidthPolicy { automatic, fixed, sweep };
BandwidthPolicy parse_bandwidth_policy(std::string_view name);
std::string_view to_string(BandwidthPolicy policy) noexcept;

/// Replicate r of a run with base seed s simulates with derive_seed(s, r).
struct ModeCountParams {
    SimulationSpec simulation;
    std::size_t reps = 200;
    std::uint64_t seed = 1;
    ResponseTransform transform;
    KernelProfile kernel{KernelType::biweight};
    BandwidthPolicy policy = BandwidthPolicy::automatic;
    double h = 1.6;                      // fixed policy
    std::vector<double> sweep_values;    // sweep policy
    std::optional<GridSpec> grid;        // automatic policy
    std::optional<GridSpec> pilot_grid;
    unsigned threads = 1;
};

struct ReplicateOutcome {
    std::uint64_t seed = 0;
    double h = 0.0;
    std::size_t modes = 0;
    std::size_t stalled = 0;
};

struct ModeCountReport {
    ModeCountParams params;
    std::vector<ReplicateOutcome> replicates;  // automatic / fixed
    double frequency_two = 0.0;                // (replicates with exactly 2 modes) / reps
    std::map<std::size_t, std::size_t> distribution;
    // sweep: mode count per (h, replicate), and the exactly-two frequency per h
    std::vector<double> sweep_h;
    std::vector<std::vector<std::size_t>> sweep_counts;
    std::vector<double> sweep_frequency_two;
    double runtime_seconds = 0.0;
};

/// Mode count of the partition of one dataset at bandwidth h.
std::size_t count_modes(const Dataset& data, const ResponseTransform& transform, KernelProfile kernel, double h,
                        std::size_t* stalled = nullptr);

ModeCountReport run_modecount_experiment(const ModeCountParams& params);

struct RateParams {
    SimulationSpec simulation;
    std::vector<std::size_t> sizes{200, 500, 1000};
    std::size_t reps = 20;
    std::uint64_t seed = 1;
    ResponseTransform transform;
    KernelProfile kernel{KernelType::biweight};
    BandwidthPolicy policy = BandwidthPolicy::automatic;  // automatic or fixed
    double h = 1.6;
    std::optional<GridSpec> grid;
    std::optional<GridSpec> pilot_grid;
    double truth_resolution = 0.005;
    unsigned threads = 1;
};

struct RateRow {
    std::size_t n = 0;
    double median_hausdorff = 0.0;
    std::vector<double> distances;  // per replicate
};

/// For each n: median Hausdorff distance between the estimated mode set and
/// the grid maxima of the true regression function. Replicate r of size
/// index k uses derive_seed(seed, k * reps + r).
std::vector<RateRow> run_rate_experiment(const RateParams& params);

double median(std::vector<double> values);

}  // namespace rmshift
