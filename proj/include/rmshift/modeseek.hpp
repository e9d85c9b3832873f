#pragma once

#include "rmshift/estimators.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rmshift {

struct IterationConfig {
    double step_tol = 1e-6;     // stop once |z_{j+1} - z_j| < step_tol
    int max_iter = 2000;
    double merge_radius = 0.25;  // single-linkage distance for coalescing limits

    /// step_tol = 1e-6 h, merge_radius = h / 4, max_iter = 2000.
    static IterationConfig defaults_for(double h);
    void validate() const;
};

enum class StallReason { none, no_active_weights, max_iter };
std::string_view to_string(StallReason reason) noexcept;

/// Relative slack allowed when auditing r*(z_{j+1}) >= r*(z_j).
inline constexpr double ascent_slack = 1e-12;

struct ModeSeekResult {
    std::vector<Vector> trajectory;  // z_0 .. z_J; empty unless recorded
    std::vector<double> rstar_values;  // r*(z_j) for every visited z_j
    Vector final_point;
    int iterations = 0;
    bool converged = false;
    StallReason stall_reason = StallReason::none;
    std::size_t ascent_violations = 0;
};

/// One update z -> z + m*(z). Empty when no weight is active at z.
std::optional<Vector> ms_step(const FittedModel& model, const ConstVectorRef& z);

/// Runs z_{j+1} = z_j + m*(z_j) from z0 until the step is shorter than
/// config.step_tol or config.max_iter updates were made. The r* value at
/// every visited point is recorded and ascent violations are counted.
ModeSeekResult ms_iterate(const FittedModel& model, const ConstVectorRef& z0, const IterationConfig& config,
                          bool record_trajectory = true);

struct Partition {
    std::vector<int> labels;  // basin per sample, -1 when the start stalled
    std::vector<Vector> modes;
    std::vector<std::size_t> counts;
    std::vector<ModeSeekResult> results;

    std::size_t mode_count() const noexcept { return modes.size(); }
};

struct PartitionOptions {
    unsigned threads = 1;
    bool record_trajectories = false;
};

/// Groups converged limits by single linkage at `merge_radius`. Returns a
/// group label per point (-1 where `valid[i]` is false), the group
/// representatives (mean of members) and member counts. Groups are ordered
/// by decreasing count, ties by lexicographic representative. Groups whose
/// representatives land within merge_radius of each other are fused.
struct MergeResult {
    std::vector<int> labels;
    std::vector<Vector> modes;
    std::vector<std::size_t> counts;
};
MergeResult merge_limits(std::span<const Vector> points, const std::vector<bool>& valid, double merge_radius);

/// Runs ms_iterate from every sample point and partitions the sample by
/// the basin its trajectory ends in. Output is identical for any thread
/// count.
Partition partition_samples(const FittedModel& model, const IterationConfig& config,
                            const PartitionOptions& options = {});

/// Hausdorff distance between two non-empty finite point sets.
double hausdorff(std::span<const Vector> a, std::span<const Vector> b);

}  // namespace rmshift
