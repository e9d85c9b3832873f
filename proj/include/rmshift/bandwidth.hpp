#pragma once

#include "rmshift/dataset.hpp"
#include "rmshift/estimators.hpp"
#include "rmshift/kernels.hpp"
#include "rmshift/transforms.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rmshift {

/// "min:max:count[:log]" bandwidth grid.
struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 0;
    bool log = false;

    /// Throws std::invalid_argument on malformed text or invalid ranges.
    static GridSpec parse(std::string_view text);
    std::vector<double> values() const;
    std::string to_string() const;
};

/// 20 log-spaced values spanning [0.1 * sd, diam / 2], where sd is the mean
/// per-coordinate standard deviation of x and diam its largest pairwise
/// distance.
GridSpec default_bandwidth_grid(const Matrix& x, int count = 20);

/// n^{1 / ((d + 4)(d + 6))}: inflates a regression-optimal bandwidth to one
/// suited to gradient estimation.
double pilot_scaling_factor(std::size_t n, std::size_t d);

struct PilotSelection {
    std::vector<double> grid;
    std::vector<double> scores;  // leave-one-out squared prediction error, +inf if infeasible
    double nw_bandwidth = 0.0;
    double scale = 1.0;
    double pilot_bandwidth = 0.0;  // nw_bandwidth * scale
};

/// Picks the Nadaraya-Watson bandwidth minimising the leave-one-out
/// prediction error over `grid` (ties to the smaller value) and scales it by
/// pilot_scaling_factor. Grid values leaving some point without neighbours
/// score +inf; throws std::runtime_error if every value does.
PilotSelection pilot_nw_bandwidth(const Matrix& x, std::span<const double> y_tilde, KernelProfile kernel,
                                  std::span<const double> grid, unsigned threads = 1);

/// Index of the smallest finite score, preferring the smaller value on ties;
/// values.size() when no score is finite.
std::size_t argmin_smallest(const std::vector<double>& values, const std::vector<double>& scores);

struct CvScore {
    double score = 0.0;
    std::size_t isolated = 0;  // left-out points with no active neighbour (zero gradient used)
};

/// Pilot gradients of the Nadaraya-Watson fit at every sample point.
std::vector<Vector> pilot_gradients(const Matrix& x, std::span<const double> y_tilde, KernelProfile kernel,
                                    double pilot_h);

/// Gradient-based leave-one-out criterion
///   CV(h) = (1/n) sum_j | grad r_pilot(X_j) - grad r*_(-j)(X_j) |^2
/// where r*_(-j) is refitted without (X_j, Y~_j), its density estimate
/// included. +inf when every left-out point is isolated.
CvScore cv_gradient(const Matrix& x, std::span<const double> y_tilde, KernelProfile kernel, double h,
                    std::span<const Vector> pilot, const FitOptions& options = {});
CvScore cv_gradient(const Dataset& data, const ResponseTransform& transform, KernelProfile kernel, double h,
                    double pilot_h, const FitOptions& options = {});

struct BandwidthSelection {
    std::vector<double> values;
    std::vector<double> cv_scores;
    std::vector<std::size_t> isolated;
    double selected = 0.0;
    PilotSelection pilot;
    GridSpec grid_spec;
    GridSpec pilot_grid_spec;
};

struct BandwidthOptions {
    std::optional<GridSpec> grid;        // default_bandwidth_grid when unset
    std::optional<GridSpec> pilot_grid;  // same default
    FitOptions fit;
    unsigned threads = 1;
};

/// Selects h minimising cv_gradient over the grid, ties toward the smaller h.
BandwidthSelection select_bandwidth(const Dataset& data, const ResponseTransform& transform, KernelProfile kernel,
                                    const BandwidthOptions& options = {});

}  // namespace rmshift
