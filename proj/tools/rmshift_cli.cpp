#include "rmshift/rmshift.h"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

class CommandError : public std::runtime_error {
public:
    CommandError(rmshift_status status, const std::string& message)
        : std::runtime_error(message), status_(status)
    {
    }
    rmshift_status status() const noexcept { return status_; }

private:
    rmshift_status status_;
};

void check(rmshift_status status, const char* what)
{
    if (status != RMSHIFT_OK) {
        throw CommandError(status, std::string(what) + ": " + rmshift_status_name(status) + ": " + rmshift_last_error());
    }
}

template <typename T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};

using DatasetPtr = std::unique_ptr<rmshift_dataset, Deleter<rmshift_dataset, rmshift_dataset_free>>;
using ModelPtr = std::unique_ptr<rmshift_model, Deleter<rmshift_model, rmshift_model_free>>;
using PartitionPtr = std::unique_ptr<rmshift_partition, Deleter<rmshift_partition, rmshift_partition_free>>;
using BandwidthPtr = std::unique_ptr<rmshift_bandwidth, Deleter<rmshift_bandwidth, rmshift_bandwidth_free>>;
using RidgePtr = std::unique_ptr<rmshift_ridge, Deleter<rmshift_ridge, rmshift_ridge_free>>;
using ReportPtr = std::unique_ptr<rmshift_report, Deleter<rmshift_report, rmshift_report_free>>;

struct ModelFlags {
    std::string input;
    std::optional<std::size_t> simulate;
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    std::string kernel = "biweight";
    std::string transform = "t1";
    double t1_scale = 10.0;
    double t1_offset = 0.01;
    double t2_c0 = 0.1;
    std::optional<double> h;
    bool auto_h = false;
    std::string h_grid;
    std::string pilot_grid;
    double density_floor = 0.0;
    unsigned threads = 0;
};

void add_transform_flags(CLI::App* cmd, ModelFlags& f)
{
    cmd->add_option("--kernel", f.kernel, "Kernel profile")->check(CLI::IsMember({"gaussian", "biweight"}));
    cmd->add_option("--transform", f.transform, "Response transform")->check(CLI::IsMember({"t1", "t2"}));
    cmd->add_option("--t1-scale", f.t1_scale, "Logistic slope of T1");
    cmd->add_option("--t1-offset", f.t1_offset, "Additive offset of T1");
    cmd->add_option("--t2-c0", f.t2_c0, "Shift constant of T2");
    cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

void add_grid_flags(CLI::App* cmd, ModelFlags& f)
{
    cmd->add_option("--h-grid", f.h_grid, "Bandwidth grid min:max:count[:log|lin]");
    cmd->add_option("--pilot-grid", f.pilot_grid, "Pilot grid min:max:count[:log|lin]");
}

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool needs_h)
{
    auto* input = cmd->add_option("--input", f.input, "CSV with header x1,...,xd,y");
    auto* sim = cmd->add_option("--simulate", f.simulate, "Use a simulated bimodal sample of this size");
    input->excludes(sim);
    sim->excludes(input);
    cmd->add_option("--seed", f.seed, "Seed for --simulate");
    cmd->add_option("--output-dir", f.output_dir, "Directory for output files");
    add_transform_flags(cmd, f);
    if (needs_h) {
        auto* h = cmd->add_option("--h", f.h, "Bandwidth")->check(CLI::PositiveNumber);
        auto* a = cmd->add_flag("--auto-h", f.auto_h, "Select the bandwidth by gradient cross-validation");
        h->excludes(a);
        a->excludes(h);
    }
    add_grid_flags(cmd, f);
    cmd->add_option("--density-floor", f.density_floor, "Absolute floor on the design density estimate");
}

rmshift_transform transform_of(const ModelFlags& f)
{
    rmshift_transform t;
    rmshift_transform_defaults(&t);
    check(rmshift_transform_kind_from_name(f.transform.c_str(), &t.kind), "transform");
    t.t1_scale = f.t1_scale;
    t.t1_offset = f.t1_offset;
    t.t2_c0 = f.t2_c0;
    return t;
}

rmshift_kernel kernel_of(const ModelFlags& f)
{
    rmshift_kernel k;
    check(rmshift_kernel_from_name(f.kernel.c_str(), &k), "kernel");
    return k;
}

const char* or_null(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

DatasetPtr load_data(const ModelFlags& f)
{
    rmshift_dataset* data = nullptr;
    if (f.simulate) {
        check(rmshift_dataset_simulate(*f.simulate, f.seed, &data), "simulate");
    } else if (!f.input.empty()) {
        check(rmshift_dataset_load_csv(f.input.c_str(), &data), "load");
    } else {
        throw CommandError(RMSHIFT_ERR_INVALID_ARGUMENT, "one of --input or --simulate is required");
    }
    return DatasetPtr(data);
}

std::string output_path(const ModelFlags& f, const char* name)
{
    fs::create_directories(f.output_dir);
    return (fs::path(f.output_dir) / name).string();
}

BandwidthPtr select(const ModelFlags& f, const rmshift_dataset* data)
{
    const auto t = transform_of(f);
    rmshift_bandwidth* sel = nullptr;
    check(rmshift_bandwidth_select(data, &t, kernel_of(f), or_null(f.h_grid), or_null(f.pilot_grid), f.threads, &sel),
          "bandwidth");
    return BandwidthPtr(sel);
}

ModelPtr fit(const ModelFlags& f, const rmshift_dataset* data)
{
    const auto t = transform_of(f);
    rmshift_model* model = nullptr;
    if (f.auto_h) {
        auto sel = select(f, data);
        check(rmshift_bandwidth_write_json(sel.get(), output_path(f, "bandwidth.json").c_str()), "write");
        check(rmshift_model_fit_selected(data, &t, kernel_of(f), sel.get(), f.density_floor, &model), "fit");
    } else if (f.h) {
        check(rmshift_model_fit(data, &t, kernel_of(f), *f.h, f.density_floor, &model), "fit");
    } else {
        throw CommandError(RMSHIFT_ERR_INVALID_ARGUMENT, "one of --h or --auto-h is required");
    }
    return ModelPtr(model);
}

PartitionPtr run_partition(const ModelFlags& f, const rmshift_model* model, int max_iter, double step_tol,
                           double merge_radius, bool trajectories)
{
    rmshift_iteration_config cfg{step_tol, max_iter, merge_radius};
    rmshift_partition* partition = nullptr;
    check(rmshift_partition_run(model, &cfg, f.threads, trajectories ? 1 : 0, &partition), "partition");
    return PartitionPtr(partition);
}

void report_modes(const rmshift_model* model, const rmshift_partition* partition)
{
    const auto count = rmshift_partition_mode_count(partition);
    const auto d = rmshift_model_d(model);
    std::printf("h = %.6g: %zu mode%s\n", rmshift_model_h(model), count, count == 1 ? "" : "s");
    std::vector<double> mode(d);
    for (std::size_t m = 0; m < count; ++m) {
        std::size_t members = 0;
        check(rmshift_partition_mode(partition, m, mode.data(), &members), "mode");
        std::printf("  %zu points ->", members);
        for (double v : mode) std::printf(" %.6f", v);
        std::printf("\n");
    }
}

rmshift_policy policy_of(const std::string& name)
{
    if (name == "auto") return RMSHIFT_POLICY_AUTO;
    if (name == "fixed") return RMSHIFT_POLICY_FIXED;
    return RMSHIFT_POLICY_SWEEP;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Regression mean shift: modes, basins, bandwidths and ridges of a regression function"};
    app.set_version_flag("--version", std::string(rmshift_version()));
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    ModelFlags part;
    bool trajectories = false;
    double step_tol = 0.0;
    int max_iter = 0;
    double merge_radius = 0.0;
    auto* partition_cmd = app.add_subcommand("partition", "Partition sample points into basins of attraction");
    add_model_flags(partition_cmd, part, true);
    partition_cmd->add_flag("--trajectories", trajectories, "Also write every iterate to trajectories.csv");
    partition_cmd->add_option("--step-tol", step_tol, "Stop when a step is shorter than this (default 1e-6 h)");
    partition_cmd->add_option("--max-iter", max_iter, "Iteration cap per start (default 2000)");
    partition_cmd->add_option("--merge-radius", merge_radius, "Limit merge radius (default h/4)");

    ModelFlags modes;
    auto* modes_cmd = app.add_subcommand("modes", "Estimate the local modes of the regression function");
    add_model_flags(modes_cmd, modes, true);

    ModelFlags ridge;
    int s = 2;
    auto* ridge_cmd = app.add_subcommand("ridge", "Extract ridge points by subspace-constrained mean shift");
    add_model_flags(ridge_cmd, ridge, true);
    ridge_cmd->add_option("-s,--ridge-dim", s, "Ridge dimension index s (2 gives one-dimensional ridges)");
    ridge_cmd->add_option("--step-tol", step_tol, "Stop when the projected step is shorter than this");
    ridge_cmd->add_option("--max-iter", max_iter, "Iteration cap per start (default 2000)");

    ModelFlags bw;
    auto* bandwidth_cmd = app.add_subcommand("bandwidth", "Select a bandwidth by gradient cross-validation");
    add_model_flags(bandwidth_cmd, bw, false);

    std::size_t sim_n = 200;
    std::uint64_t sim_seed = 1;
    std::string sim_output;
    std::string sim_dir = ".";
    auto* simulate_cmd = app.add_subcommand("simulate", "Write a sample from the bimodal simulation model");
    simulate_cmd->add_option("--n", sim_n, "Sample size")->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", sim_seed, "Seed");
    simulate_cmd->add_option("--output", sim_output, "Output CSV path (default <output-dir>/data.csv)");
    simulate_cmd->add_option("--output-dir", sim_dir, "Directory for the output file");

    auto* experiment_cmd = app.add_subcommand("experiment", "Run a simulation experiment");
    experiment_cmd->require_subcommand(1);

    ModelFlags mc;
    std::size_t mc_n = 200;
    std::size_t mc_reps = 200;
    std::string mc_policy = "auto";
    std::vector<double> mc_sweep;
    double mc_h = 1.6;
    bool mc_timing = false;
    auto* modecount_cmd = experiment_cmd->add_subcommand("modecount", "Frequency of finding exactly two modes");
    modecount_cmd->add_option("--n", mc_n, "Sample size per replicate")->check(CLI::PositiveNumber);
    modecount_cmd->add_option("--reps", mc_reps, "Replicates")->check(CLI::PositiveNumber);
    modecount_cmd->add_option("--seed", mc.seed, "Base seed");
    modecount_cmd->add_option("--policy", mc_policy, "Bandwidth policy")
        ->check(CLI::IsMember({"auto", "fixed", "sweep"}));
    modecount_cmd->add_option("--h", mc_h, "Bandwidth for the fixed policy")->check(CLI::PositiveNumber);
    modecount_cmd->add_option("--sweep", mc_sweep, "Comma-separated bandwidths for the sweep policy")
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    modecount_cmd->add_option("--output-dir", mc.output_dir, "Directory for modecount.json");
    modecount_cmd->add_flag("--timing", mc_timing, "Include wall-clock runtime in the report");
    add_transform_flags(modecount_cmd, mc);
    add_grid_flags(modecount_cmd, mc);

    ModelFlags rate;
    std::vector<std::size_t> rate_sizes{200, 500, 1000};
    std::size_t rate_reps = 20;
    std::string rate_policy = "auto";
    double rate_h = 1.6;
    auto* rate_cmd = experiment_cmd->add_subcommand("rate", "Median Hausdorff error of the modes against n");
    rate_cmd->add_option("--sizes", rate_sizes, "Comma-separated sample sizes")
        ->delimiter(',')
        ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()))
        ->capture_default_str();
    rate_cmd->add_option("--reps", rate_reps, "Replicates per size")->check(CLI::PositiveNumber);
    rate_cmd->add_option("--seed", rate.seed, "Base seed");
    rate_cmd->add_option("--policy", rate_policy, "Bandwidth policy")->check(CLI::IsMember({"auto", "fixed"}));
    rate_cmd->add_option("--h", rate_h, "Bandwidth for the fixed policy")->check(CLI::PositiveNumber);
    rate_cmd->add_option("--output-dir", rate.output_dir, "Directory for rate.csv");
    add_transform_flags(rate_cmd, rate);
    add_grid_flags(rate_cmd, rate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*partition_cmd) {
            auto data = load_data(part);
            auto model = fit(part, data.get());
            auto p = run_partition(part, model.get(), max_iter, step_tol, merge_radius, trajectories);
            check(rmshift_partition_write_json(p.get(), output_path(part, "partition.json").c_str()), "write");
            check(rmshift_partition_write_modes_csv(p.get(), output_path(part, "modes.csv").c_str()), "write");
            if (trajectories) {
                check(rmshift_partition_write_trajectories_csv(p.get(), output_path(part, "trajectories.csv").c_str()),
                      "write");
            }
            report_modes(model.get(), p.get());
            if (const auto v = rmshift_partition_ascent_violations(p.get())) {
                std::fprintf(stderr, "warning: %zu ascent violations\n", v);
            }
        } else if (*modes_cmd) {
            auto data = load_data(modes);
            auto model = fit(modes, data.get());
            auto p = run_partition(modes, model.get(), 0, 0.0, 0.0, false);
            check(rmshift_partition_write_modes_csv(p.get(), output_path(modes, "modes.csv").c_str()), "write");
            report_modes(model.get(), p.get());
        } else if (*ridge_cmd) {
            auto data = load_data(ridge);
            auto model = fit(ridge, data.get());
            rmshift_ridge* r = nullptr;
            check(rmshift_ridge_run(model.get(), nullptr, 0, s, step_tol, max_iter, ridge.threads, &r), "ridge");
            RidgePtr result(r);
            check(rmshift_ridge_write_csv(result.get(), output_path(ridge, "ridge.csv").c_str()), "write");
            std::size_t converged = 0;
            for (std::size_t i = 0; i < rmshift_ridge_size(result.get()); ++i) {
                int ok = 0;
                check(rmshift_ridge_point(result.get(), i, nullptr, &ok), "ridge");
                converged += ok != 0;
            }
            std::printf("%zu of %zu starts converged to the ridge\n", converged, rmshift_ridge_size(result.get()));
        } else if (*bandwidth_cmd) {
            auto data = load_data(bw);
            auto sel = select(bw, data.get());
            check(rmshift_bandwidth_write_json(sel.get(), output_path(bw, "bandwidth.json").c_str()), "write");
            std::printf("selected h = %.6g (pilot h = %.6g)\n", rmshift_bandwidth_selected(sel.get()),
                        rmshift_bandwidth_pilot(sel.get()));
        } else if (*simulate_cmd) {
            rmshift_dataset* d = nullptr;
            check(rmshift_dataset_simulate(sim_n, sim_seed, &d), "simulate");
            DatasetPtr data(d);
            std::string path = sim_output;
            if (path.empty()) {
                fs::create_directories(sim_dir);
                path = (fs::path(sim_dir) / "data.csv").string();
            }
            check(rmshift_dataset_save_csv(data.get(), path.c_str()), "write");
        } else if (*modecount_cmd) {
            rmshift_modecount_params params;
            rmshift_modecount_defaults(&params);
            params.n = mc_n;
            params.reps = mc_reps;
            params.seed = mc.seed;
            params.transform = transform_of(mc);
            params.kernel = kernel_of(mc);
            params.policy = policy_of(mc_policy);
            params.h = mc_h;
            if (params.policy == RMSHIFT_POLICY_SWEEP) {
                if (mc_sweep.empty()) throw CommandError(RMSHIFT_ERR_INVALID_ARGUMENT, "--sweep is required");
                params.sweep = mc_sweep.data();
                params.sweep_count = mc_sweep.size();
            }
            params.grid = or_null(mc.h_grid);
            params.pilot_grid = or_null(mc.pilot_grid);
            params.threads = mc.threads;
            rmshift_report* r = nullptr;
            check(rmshift_experiment_modecount(&params, &r), "experiment");
            ReportPtr report(r);
            check(rmshift_report_write_json(report.get(), output_path(mc, "modecount.json").c_str(), mc_timing ? 1 : 0),
                  "write");
            if (params.policy == RMSHIFT_POLICY_SWEEP) {
                std::printf("mode counts for %zu bandwidths x %zu replicates written (%.1f s)\n", mc_sweep.size(),
                            mc_reps, rmshift_report_runtime_seconds(report.get()));
                return 0;
            }
            std::printf("frequency of exactly two modes: %.4f over %zu replicates (%.1f s)\n",
                        rmshift_report_frequency_two(report.get()), rmshift_report_replicates(report.get()),
                        rmshift_report_runtime_seconds(report.get()));
        } else if (*rate_cmd) {
            const auto& sizes = rate_sizes;
            rmshift_rate_params params;
            rmshift_rate_defaults(&params);
            params.sizes = sizes.data();
            params.size_count = sizes.size();
            params.reps = rate_reps;
            params.seed = rate.seed;
            params.transform = transform_of(rate);
            params.kernel = kernel_of(rate);
            params.policy = policy_of(rate_policy);
            params.h = rate_h;
            params.grid = or_null(rate.h_grid);
            params.pilot_grid = or_null(rate.pilot_grid);
            params.threads = rate.threads;
            std::vector<double> medians(sizes.size());
            check(rmshift_experiment_rate(&params, output_path(rate, "rate.csv").c_str(), medians.data()), "experiment");
            for (std::size_t i = 0; i < sizes.size(); ++i) {
                std::printf("n = %zu: median Hausdorff distance %.4f\n", sizes[i], medians[i]);
            }
        }
    } catch (const CommandError& e) {
        std::fprintf(stderr, "rmshift: %s\n", e.what());
        return e.status() == RMSHIFT_ERR_INVALID_ARGUMENT ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "rmshift: %s\n", e.what());
        return 1;
    }
    return 0;
}
