#include "rmshift/experiments.hpp"

#include "rmshift/estimators.hpp"
#include "rmshift/modeseek.hpp"
#include "rmshift/parallel.hpp"
#include "rmshift/random.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <string>

namespace rmshift {

BandwidthPolicy parse_bandwidth_policy(std::string_view name)
{
    if (name == "auto") return BandwidthPolicy::automatic;
    if (name == "fixed") return BandwidthPolicy::fixed;
    if (name == "sweep") return BandwidthPolicy::sweep;
    throw std::invalid_argument("unknown bandwidth policy '" + std::string(name) + "' (expected auto, fixed or sweep)");
}

std::string_view to_string(BandwidthPolicy policy) noexcept
{
    switch (policy) {
    case BandwidthPolicy::automatic: return "auto";
    case BandwidthPolicy::fixed: return "fixed";
    case BandwidthPolicy::sweep: return "sweep";
    }
    return "unknown";
}

std::size_t count_modes(const Dataset& data, const ResponseTransform& transform, KernelProfile kernel, double h,
                        std::size_t* stalled)
{
    const auto model = FittedModel::fit(data, transform, kernel, h);
    const auto part = partition_samples(model, IterationConfig::defaults_for(h));
    if (stalled) *stalled = static_cast<std::size_t>(std::count(part.labels.begin(), part.labels.end(), -1));
    return part.mode_count();
}

namespace {

double select_h(const Dataset& data, const ResponseTransform& transform, KernelProfile kernel,
                const std::optional<GridSpec>& grid, const std::optional<GridSpec>& pilot_grid)
{
    BandwidthOptions options;
    options.grid = grid;
    options.pilot_grid = pilot_grid;
    return select_bandwidth(data, transform, kernel, options).selected;
}

}  // namespace

ModeCountReport run_modecount_experiment(const ModeCountParams& params)
{
    if (params.reps < 1) throw std::invalid_argument("modecount: reps must be >= 1");
    params.transform.validate();
    params.simulation.validate();
    if (params.policy == BandwidthPolicy::fixed && !(params.h > 0.0)) {
        throw std::invalid_argument("modecount: fixed bandwidth must be positive");
    }
    if (params.policy == BandwidthPolicy::sweep && params.sweep_values.empty()) {
        throw std::invalid_argument("modecount: sweep needs at least one bandwidth");
    }
    const auto started = std::chrono::steady_clock::now();

    ModeCountReport report;
    report.params = params;
    auto dataset_for = [&](std::size_t r) {
        SimulationSpec spec = params.simulation;
        spec.seed = derive_seed(params.seed, r);
        return std::pair{simulate_bimodal(spec), spec.seed};
    };

    if (params.policy == BandwidthPolicy::sweep) {
        const std::size_t hs = params.sweep_values.size();
        report.sweep_h = params.sweep_values;
        report.sweep_counts.assign(hs, std::vector<std::size_t>(params.reps, 0));
        parallel_for(params.reps, params.threads, [&](std::size_t r) {
            const auto [data, seed] = dataset_for(r);
            for (std::size_t k = 0; k < hs; ++k) {
                report.sweep_counts[k][r] = count_modes(data, params.transform, params.kernel, params.sweep_values[k]);
            }
        });
        for (const auto& counts : report.sweep_counts) {
            const auto twos = std::count(counts.begin(), counts.end(), std::size_t{2});
            report.sweep_frequency_two.push_back(static_cast<double>(twos) / static_cast<double>(params.reps));
        }
    } else {
        report.replicates.resize(params.reps);
        parallel_for(params.reps, params.threads, [&](std::size_t r) {
            const auto [data, seed] = dataset_for(r);
            ReplicateOutcome out;
            out.seed = seed;
            out.h = params.policy == BandwidthPolicy::fixed
                        ? params.h
                        : select_h(data, params.transform, params.kernel, params.grid, params.pilot_grid);
            out.modes = count_modes(data, params.transform, params.kernel, out.h, &out.stalled);
            report.replicates[r] = out;
        });
        std::size_t twos = 0;
        for (const auto& rep : report.replicates) {
            ++report.distribution[rep.modes];
            if (rep.modes == 2) ++twos;
        }
        report.frequency_two = static_cast<double>(twos) / static_cast<double>(params.reps);
    }
    report.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

double median(std::vector<double> values)
{
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::vector<RateRow> run_rate_experiment(const RateParams& params)
{
    if (params.sizes.empty()) throw std::invalid_argument("rate: need at least one sample size");
    if (params.reps < 1) throw std::invalid_argument("rate: reps must be >= 1");
    if (params.policy == BandwidthPolicy::sweep) throw std::invalid_argument("rate: sweep policy not supported");
    params.transform.validate();
    const auto truth = true_modes(params.simulation, params.truth_resolution);
    if (truth.empty()) throw std::runtime_error("rate: regression function has no interior grid maximum");

    std::vector<RateRow> rows;
    for (std::size_t k = 0; k < params.sizes.size(); ++k) {
        RateRow row;
        row.n = params.sizes[k];
        row.distances.assign(params.reps, 0.0);
        parallel_for(params.reps, params.threads, [&](std::size_t r) {
            SimulationSpec spec = params.simulation;
            spec.n = row.n;
            spec.seed = derive_seed(params.seed, k * params.reps + r);
            const auto data = simulate_bimodal(spec);
            const double h = params.policy == BandwidthPolicy::fixed
                                 ? params.h
                                 : select_h(data, params.transform, params.kernel, params.grid, params.pilot_grid);
            const auto model = FittedModel::fit(data, params.transform, params.kernel, h);
            const auto part = partition_samples(model, IterationConfig::defaults_for(h));
            row.distances[r] = part.modes.empty() ? std::numeric_limits<double>::infinity()
                                                  : hausdorff(part.modes, truth);
        });
        row.median_hausdorff = median(row.distances);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace rmshift
