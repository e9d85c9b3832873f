#pragma once

#include "rmshift/bandwidth.hpp"
#include "rmshift/dataset.hpp"
#include "rmshift/experiments.hpp"
#include "rmshift/modeseek.hpp"
#include "rmshift/scms.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rmshift {

// CSV files are comma separated with a header row, '.' decimals and values
// printed with 17 significant digits so that they read back exactly.

/// Reads "x1,...,xd,y". Throws IoError or ParseError (naming the row) on a
/// missing file, bad header, short row, non-numeric or non-finite cell, or
/// fewer than two rows.
Dataset load_csv(const std::filesystem::path& path);
void write_csv(const Dataset& data, const std::filesystem::path& path);

/// Settings echoed into every output file.
struct RunEcho {
    std::string kernel;
    ResponseTransform transform;
    double h = 0.0;
    std::string h_source = "fixed";  // "fixed" or "auto"
    std::optional<IterationConfig> iteration;
    std::optional<RidgeConfig> ridge;
    std::optional<double> density_floor;
    std::optional<std::uint64_t> seed;
};

nlohmann::json to_json(const RunEcho& echo);
nlohmann::json partition_to_json(const Partition& partition, const RunEcho& echo);
nlohmann::json bandwidth_to_json(const BandwidthSelection& selection, const RunEcho& echo);
/// Runtime is left out unless include_timing, so reruns are byte-identical.
nlohmann::json modecount_to_json(const ModeCountReport& report, bool include_timing = false);

void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

/// mode,x1..xd,count,rstar
void write_modes_csv(const Partition& partition, const FittedModel& model, const std::filesystem::path& path);
/// start_index,step,x1..xd; needs trajectories recorded in the partition.
void write_trajectories_csv(const Partition& partition, const std::filesystem::path& path);
/// start_index,x1..xd,converged,iterations,projected_step_norm,lambda1..lambdad
void write_ridge_csv(std::span<const RidgePoint> points, const std::filesystem::path& path);
/// n,reps,median_hausdorff
void write_rate_csv(std::span<const RateRow> rows, const std::filesystem::path& path);

std::string format_double(double value);

}  // namespace rmshift
