#include "rmshift/io.hpp"

#include "rmshift/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rmshift {

namespace {

std::vector<std::string_view> split_row(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        auto cell = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) cell.remove_suffix(1);
        cells.push_back(cell);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cells;
}

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

nlohmann::json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

std::string format_double(double value)
{
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
    return std::string(buf, static_cast<std::size_t>(len));
}

Dataset load_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file, expected header x1,...,xd,y", 0);
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const auto header = split_row(line);
    if (header.size() < 2) throw ParseError(path.string() + ": header needs at least x1,y", 0);
    const std::size_t d = header.size() - 1;
    for (std::size_t c = 0; c < d; ++c) {
        if (header[c] != "x" + std::to_string(c + 1)) {
            throw ParseError(path.string() + ": header column " + std::to_string(c + 1) + " should be x" +
                                 std::to_string(c + 1) + ", found '" + std::string(header[c]) + "'",
                             0);
        }
    }
    if (header.back() != "y") throw ParseError(path.string() + ": last header column must be y", 0);

    std::vector<double> values;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        ++rows;
        const auto cells = split_row(line);
        if (cells.size() != d + 1) {
            throw ParseError(path.string() + ": row " + std::to_string(rows) + " has " + std::to_string(cells.size()) +
                                 " columns, expected " + std::to_string(d + 1),
                             rows);
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double v = 0.0;
            const auto* end = cells[c].data() + cells[c].size();
            auto [ptr, ec] = std::from_chars(cells[c].data(), end, v);
            if (cells[c].empty() || ec != std::errc() || ptr != end) {
                throw ParseError(path.string() + ": row " + std::to_string(rows) + ", column " +
                                     std::string(header[c]) + ": not a number '" + std::string(cells[c]) + "'",
                                 rows);
            }
            if (!std::isfinite(v)) {
                throw ParseError(path.string() + ": row " + std::to_string(rows) + ", column " +
                                     std::string(header[c]) + ": non-finite value",
                                 rows);
            }
            values.push_back(v);
        }
    }
    if (rows < 2) throw ParseError(path.string() + ": need at least 2 data rows, found " + std::to_string(rows), rows);

    Dataset data;
    data.x.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
    data.y.resize(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < d; ++c) data.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[r * (d + 1) + c];
        data.y[static_cast<Eigen::Index>(r)] = values[r * (d + 1) + d];
    }
    return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path)
{
    auto out = open_output(path);
    for (std::size_t c = 0; c < data.d(); ++c) out << 'x' << c + 1 << ',';
    out << "y\n";
    for (Eigen::Index r = 0; r < data.x.rows(); ++r) {
        for (Eigen::Index c = 0; c < data.x.cols(); ++c) out << format_double(data.x(r, c)) << ',';
        out << format_double(data.y[r]) << '\n';
    }
    finish(out, path);
}

nlohmann::json to_json(const RunEcho& echo)
{
    nlohmann::json j;
    j["kernel"] = echo.kernel;
    j["transform"] = {{"kind", std::string(to_string(echo.transform.kind))},
                      {"t1_scale", echo.transform.t1_scale},
                      {"t1_offset", echo.transform.t1_offset},
                      {"t2_c0", echo.transform.t2_c0}};
    j["h"] = echo.h;
    j["h_source"] = echo.h_source;
    if (echo.iteration) {
        j["step_tol"] = echo.iteration->step_tol;
        j["max_iter"] = echo.iteration->max_iter;
        j["merge_radius"] = echo.iteration->merge_radius;
    }
    if (echo.ridge) {
        j["s"] = echo.ridge->s;
        j["step_tol"] = echo.ridge->step_tol;
        j["max_iter"] = echo.ridge->max_iter;
    }
    if (echo.density_floor) j["density_floor"] = *echo.density_floor;
    if (echo.seed) j["seed"] = *echo.seed;
    return j;
}

nlohmann::json partition_to_json(const Partition& partition, const RunEcho& echo)
{
    nlohmann::json j;
    j["labels"] = partition.labels;
    auto modes = nlohmann::json::array();
    for (const auto& m : partition.modes) modes.push_back(vector_json(m));
    j["modes"] = std::move(modes);
    j["counts"] = partition.counts;
    std::vector<int> iterations;
    std::vector<std::string> stalls;
    std::size_t violations = 0;
    for (const auto& r : partition.results) {
        iterations.push_back(r.iterations);
        stalls.emplace_back(to_string(r.stall_reason));
        violations += r.ascent_violations;
    }
    j["iterations"] = std::move(iterations);
    j["stall_reasons"] = std::move(stalls);
    j["ascent_violations"] = violations;
    j["config"] = to_json(echo);
    return j;
}

nlohmann::json bandwidth_to_json(const BandwidthSelection& selection, const RunEcho& echo)
{
    nlohmann::json j;
    j["selected"] = selection.selected;
    auto curve = nlohmann::json::array();
    for (std::size_t i = 0; i < selection.values.size(); ++i) {
        const double cv = selection.cv_scores[i];
        curve.push_back({{"h", selection.values[i]},
                         {"cv", std::isfinite(cv) ? nlohmann::json(cv) : nlohmann::json(nullptr)},
                         {"isolated", selection.isolated[i]}});
    }
    j["curve"] = std::move(curve);
    auto pilot_curve = nlohmann::json::array();
    for (std::size_t i = 0; i < selection.pilot.grid.size(); ++i) {
        const double s = selection.pilot.scores[i];
        pilot_curve.push_back({{"h", selection.pilot.grid[i]},
                               {"loo_error", std::isfinite(s) ? nlohmann::json(s) : nlohmann::json(nullptr)}});
    }
    j["pilot"] = {{"nw_bandwidth", selection.pilot.nw_bandwidth},
                  {"scale", selection.pilot.scale},
                  {"pilot_bandwidth", selection.pilot.pilot_bandwidth},
                  {"curve", std::move(pilot_curve)}};
    j["grid"] = selection.grid_spec.to_string();
    j["pilot_grid"] = selection.pilot_grid_spec.to_string();
    j["config"] = to_json(echo);
    return j;
}

nlohmann::json modecount_to_json(const ModeCountReport& report, bool include_timing)
{
    const auto& p = report.params;
    nlohmann::json j;
    nlohmann::json config;
    config["n"] = p.simulation.n;
    config["reps"] = p.reps;
    config["seed"] = p.seed;
    config["kernel"] = std::string(p.kernel.name());
    config["transform"] = {{"kind", std::string(to_string(p.transform.kind))},
                           {"t1_scale", p.transform.t1_scale},
                           {"t1_offset", p.transform.t1_offset},
                           {"t2_c0", p.transform.t2_c0}};
    config["policy"] = std::string(to_string(p.policy));
    if (p.policy == BandwidthPolicy::fixed) config["h"] = p.h;
    if (p.policy == BandwidthPolicy::automatic) {
        config["grid"] = p.grid ? p.grid->to_string() : "default";
        config["pilot_grid"] = p.pilot_grid ? p.pilot_grid->to_string() : "default";
    }
    config["noise_var"] = p.simulation.noise_var;
    j["config"] = std::move(config);

    if (p.policy == BandwidthPolicy::sweep) {
        auto sweep = nlohmann::json::array();
        for (std::size_t k = 0; k < report.sweep_h.size(); ++k) {
            sweep.push_back({{"h", report.sweep_h[k]},
                             {"mode_counts", report.sweep_counts[k]},
                             {"frequency_two", report.sweep_frequency_two[k]}});
        }
        j["sweep"] = std::move(sweep);
    } else {
        auto reps = nlohmann::json::array();
        std::vector<double> hs;
        for (const auto& r : report.replicates) {
            reps.push_back({{"seed", r.seed}, {"h", r.h}, {"modes", r.modes}, {"stalled", r.stalled}});
            hs.push_back(r.h);
        }
        j["replicates"] = std::move(reps);
        j["frequency_two"] = report.frequency_two;
        nlohmann::json dist = nlohmann::json::object();
        for (const auto& [modes, count] : report.distribution) dist[std::to_string(modes)] = count;
        j["distribution"] = std::move(dist);
        j["selected_bandwidths"] = std::move(hs);
    }
    if (include_timing) j["runtime_seconds"] = report.runtime_seconds;
    return j;
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path)
{
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    finish(out, path);
}

void write_modes_csv(const Partition& partition, const FittedModel& model, const std::filesystem::path& path)
{
    auto out = open_output(path);
    out << "mode";
    for (std::size_t c = 0; c < model.d(); ++c) out << ",x" << c + 1;
    out << ",count,rstar\n";
    for (std::size_t m = 0; m < partition.modes.size(); ++m) {
        out << m;
        for (Eigen::Index c = 0; c < partition.modes[m].size(); ++c) out << ',' << format_double(partition.modes[m][c]);
        out << ',' << partition.counts[m] << ',' << format_double(model.rstar(partition.modes[m])) << '\n';
    }
    finish(out, path);
}

void write_trajectories_csv(const Partition& partition, const std::filesystem::path& path)
{
    auto out = open_output(path);
    const auto d = partition.results.empty() || partition.results.front().trajectory.empty()
                       ? Eigen::Index{0}
                       : partition.results.front().trajectory.front().size();
    out << "start_index,step";
    for (Eigen::Index c = 0; c < d; ++c) out << ",x" << c + 1;
    out << '\n';
    for (std::size_t i = 0; i < partition.results.size(); ++i) {
        const auto& traj = partition.results[i].trajectory;
        for (std::size_t s = 0; s < traj.size(); ++s) {
            out << i << ',' << s;
            for (Eigen::Index c = 0; c < traj[s].size(); ++c) out << ',' << format_double(traj[s][c]);
            out << '\n';
        }
    }
    finish(out, path);
}

void write_ridge_csv(std::span<const RidgePoint> points, const std::filesystem::path& path)
{
    auto out = open_output(path);
    const Eigen::Index d = points.empty() ? 0 : points.front().point.size();
    out << "start_index";
    for (Eigen::Index c = 0; c < d; ++c) out << ",x" << c + 1;
    out << ",converged,iterations,projected_step_norm";
    for (Eigen::Index c = 0; c < d; ++c) out << ",lambda" << c + 1;
    out << '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        out << i;
        for (Eigen::Index c = 0; c < p.point.size(); ++c) out << ',' << format_double(p.point[c]);
        out << ',' << (p.converged ? 1 : 0) << ',' << p.iterations << ',' << format_double(p.projected_step_norm);
        for (Eigen::Index c = 0; c < d; ++c) {
            out << ',' << (c < p.eigenvalues.size() ? format_double(p.eigenvalues[c]) : std::string("nan"));
        }
        out << '\n';
    }
    finish(out, path);
}

void write_rate_csv(std::span<const RateRow> rows, const std::filesystem::path& path)
{
    auto out = open_output(path);
    out << "n,reps,median_hausdorff\n";
    for (const auto& r : rows) out << r.n << ',' << r.distances.size() << ',' << format_double(r.median_hausdorff) << '\n';
    finish(out, path);
}

}  // namespace rmshift
