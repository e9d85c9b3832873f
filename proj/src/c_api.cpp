#include "rmshift/rmshift.h"

#include "rmshift/bandwidth.hpp"
#include "rmshift/errors.hpp"
#include "rmshift/estimators.hpp"
#include "rmshift/experiments.hpp"
#include "rmshift/io.hpp"
#include "rmshift/modeseek.hpp"
#include "rmshift/scms.hpp"
#include "rmshift/simulation.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>

using namespace rmshift;

struct rmshift_dataset {
    Dataset data;
    std::optional<std::uint64_t> seed;
};

struct rmshift_model {
    std::shared_ptr<const FittedModel> model;
    RunEcho echo;
};

struct rmshift_partition {
    Partition partition;
    std::shared_ptr<const FittedModel> model;
    RunEcho echo;
};

struct rmshift_bandwidth {
    BandwidthSelection selection;
    RunEcho echo;
};

struct rmshift_ridge {
    std::vector<RidgePoint> points;
};

struct rmshift_report {
    ModeCountReport report;
};

namespace {

thread_local std::string last_error;

class NoActiveWeights : public std::runtime_error {
public:
    NoActiveWeights() : std::runtime_error("no active kernel weights at the evaluation point") {}
};

rmshift_status fail(rmshift_status status, const char* message)
{
    last_error = message;
    return status;
}

template <typename Fn>
rmshift_status guarded(Fn&& fn) noexcept
{
    try {
        fn();
        return RMSHIFT_OK;
    } catch (const ParseError& e) {
        return fail(RMSHIFT_ERR_PARSE, e.what());
    } catch (const IoError& e) {
        return fail(RMSHIFT_ERR_IO, e.what());
    } catch (const NoActiveWeights& e) {
        return fail(RMSHIFT_ERR_NO_ACTIVE_WEIGHTS, e.what());
    } catch (const std::domain_error& e) {
        return fail(RMSHIFT_ERR_DOMAIN, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(RMSHIFT_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RMSHIFT_ERR_INTERNAL, "out of memory");
    } catch (const std::runtime_error& e) {
        return fail(RMSHIFT_ERR_NUMERIC, e.what());
    } catch (const std::exception& e) {
        return fail(RMSHIFT_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(RMSHIFT_ERR_INTERNAL, "unknown error");
    }
}

void require(bool condition, const char* message)
{
    if (!condition) throw std::invalid_argument(message);
}

KernelProfile to_kernel(rmshift_kernel kernel)
{
    switch (kernel) {
    case RMSHIFT_KERNEL_GAUSSIAN: return KernelProfile(KernelType::gaussian);
    case RMSHIFT_KERNEL_BIWEIGHT: return KernelProfile(KernelType::biweight);
    }
    throw std::invalid_argument("unknown kernel enumerator");
}

ResponseTransform to_transform(const rmshift_transform* t)
{
    ResponseTransform out;
    if (!t) return out;
    require(t->kind == RMSHIFT_TRANSFORM_T1 || t->kind == RMSHIFT_TRANSFORM_T2, "unknown transform enumerator");
    out.kind = t->kind == RMSHIFT_TRANSFORM_T1 ? TransformKind::t1 : TransformKind::t2;
    out.t1_scale = t->t1_scale;
    out.t1_offset = t->t1_offset;
    out.t2_c0 = t->t2_c0;
    out.validate();
    return out;
}

BandwidthPolicy to_policy(rmshift_policy policy)
{
    switch (policy) {
    case RMSHIFT_POLICY_AUTO: return BandwidthPolicy::automatic;
    case RMSHIFT_POLICY_FIXED: return BandwidthPolicy::fixed;
    case RMSHIFT_POLICY_SWEEP: return BandwidthPolicy::sweep;
    }
    throw std::invalid_argument("unknown bandwidth policy enumerator");
}

std::optional<GridSpec> to_grid(const char* text)
{
    if (!text || !*text) return std::nullopt;
    return GridSpec::parse(text);
}

Eigen::Map<const Vector> point(const rmshift_model* model, const double* x)
{
    require(model && x, "null argument");
    return {x, static_cast<Eigen::Index>(model->model->d())};
}

void copy_out(const Vector& v, double* out)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v[i];
}

}  // namespace

extern "C" {

const char* rmshift_version(void) { return "0.1.0"; }

const char* rmshift_last_error(void) { return last_error.c_str(); }

const char* rmshift_status_name(rmshift_status status)
{
    switch (status) {
    case RMSHIFT_OK: return "ok";
    case RMSHIFT_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RMSHIFT_ERR_DOMAIN: return "domain_error";
    case RMSHIFT_ERR_IO: return "io_error";
    case RMSHIFT_ERR_PARSE: return "parse_error";
    case RMSHIFT_ERR_NO_ACTIVE_WEIGHTS: return "no_active_weights";
    case RMSHIFT_ERR_NUMERIC: return "numeric_error";
    case RMSHIFT_ERR_INTERNAL: return "internal_error";
    }
    return "unknown";
}

void rmshift_transform_defaults(rmshift_transform* out)
{
    if (!out) return;
    const ResponseTransform defaults;
    out->kind = RMSHIFT_TRANSFORM_T1;
    out->t1_scale = defaults.t1_scale;
    out->t1_offset = defaults.t1_offset;
    out->t2_c0 = defaults.t2_c0;
}

rmshift_status rmshift_kernel_from_name(const char* name, rmshift_kernel* out)
{
    return guarded([&] {
        require(name && out, "null argument");
        *out = KernelProfile::from_name(name).type() == KernelType::gaussian ? RMSHIFT_KERNEL_GAUSSIAN
                                                                              : RMSHIFT_KERNEL_BIWEIGHT;
    });
}

rmshift_status rmshift_transform_kind_from_name(const char* name, rmshift_transform_kind* out)
{
    return guarded([&] {
        require(name && out, "null argument");
        *out = ResponseTransform::parse_kind(name) == TransformKind::t1 ? RMSHIFT_TRANSFORM_T1 : RMSHIFT_TRANSFORM_T2;
    });
}

rmshift_status rmshift_dataset_create(const double* x, const double* y, size_t n, size_t d, rmshift_dataset** out)
{
    return guarded([&] {
        require(x && y && out, "null argument");
        auto handle = std::make_unique<rmshift_dataset>();
        handle->data.x = Eigen::Map<const Matrix>(x, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
        handle->data.y = Eigen::Map<const Vector>(y, static_cast<Eigen::Index>(n));
        handle->data.validate();
        *out = handle.release();
    });
}

rmshift_status rmshift_dataset_load_csv(const char* path, rmshift_dataset** out)
{
    return guarded([&] {
        require(path && out, "null argument");
        auto handle = std::make_unique<rmshift_dataset>();
        handle->data = load_csv(path);
        *out = handle.release();
    });
}

rmshift_status rmshift_dataset_save_csv(const rmshift_dataset* data, const char* path)
{
    return guarded([&] {
        require(data && path, "null argument");
        write_csv(data->data, path);
    });
}

rmshift_status rmshift_dataset_simulate(size_t n, uint64_t seed, rmshift_dataset** out)
{
    return guarded([&] {
        require(out, "null argument");
        SimulationSpec spec;
        spec.n = n;
        spec.seed = seed;
        auto handle = std::make_unique<rmshift_dataset>();
        handle->data = simulate_bimodal(spec);
        handle->seed = seed;
        *out = handle.release();
    });
}

size_t rmshift_dataset_n(const rmshift_dataset* data) { return data ? data->data.n() : 0; }

size_t rmshift_dataset_d(const rmshift_dataset* data) { return data ? data->data.d() : 0; }

rmshift_status rmshift_dataset_copy(const rmshift_dataset* data, double* x, double* y)
{
    return guarded([&] {
        require(data, "null argument");
        if (x) Eigen::Map<Matrix>(x, data->data.x.rows(), data->data.x.cols()) = data->data.x;
        if (y) Eigen::Map<Vector>(y, data->data.y.size()) = data->data.y;
    });
}

void rmshift_dataset_free(rmshift_dataset* data) { delete data; }

namespace {

rmshift_model* fit_model(const rmshift_dataset* data, const rmshift_transform* transform, rmshift_kernel kernel,
                         double h, double density_floor)
{
    require(data, "null argument");
    FitOptions options;
    if (density_floor > 0.0) options.density_floor = density_floor;
    const auto tr = to_transform(transform);
    const auto k = to_kernel(kernel);
    auto handle = std::make_unique<rmshift_model>();
    handle->model = std::make_shared<const FittedModel>(FittedModel::fit(data->data, tr, k, h, options));
    handle->echo.kernel = std::string(k.name());
    handle->echo.transform = tr;
    handle->echo.h = h;
    handle->echo.density_floor = options.density_floor;
    handle->echo.seed = data->seed;
    return handle.release();
}

}  // namespace

rmshift_status rmshift_model_fit(const rmshift_dataset* data, const rmshift_transform* transform,
                                 rmshift_kernel kernel, double h, double density_floor, rmshift_model** out)
{
    return guarded([&] {
        require(out, "null argument");
        *out = fit_model(data, transform, kernel, h, density_floor);
    });
}

rmshift_status rmshift_model_fit_selected(const rmshift_dataset* data, const rmshift_transform* transform,
                                          rmshift_kernel kernel, const rmshift_bandwidth* selection,
                                          double density_floor, rmshift_model** out)
{
    return guarded([&] {
        require(out && selection, "null argument");
        *out = fit_model(data, transform, kernel, selection->selection.selected, density_floor);
        (*out)->echo.h_source = "auto";
    });
}

size_t rmshift_model_d(const rmshift_model* model) { return model ? model->model->d() : 0; }

double rmshift_model_h(const rmshift_model* model)
{
    return model ? model->model->h() : std::numeric_limits<double>::quiet_NaN();
}

rmshift_status rmshift_model_kde(const rmshift_model* model, const double* x, double* out)
{
    return guarded([&] {
        require(out, "null argument");
        *out = model->model->kde_at(point(model, x));
    });
}

rmshift_status rmshift_model_rstar(const rmshift_model* model, const double* x, double* out)
{
    return guarded([&] {
        require(out, "null argument");
        *out = model->model->rstar(point(model, x));
    });
}

rmshift_status rmshift_model_rstar_grad(const rmshift_model* model, const double* x, double* out)
{
    return guarded([&] {
        require(out, "null argument");
        copy_out(model->model->rstar_grad(point(model, x)), out);
    });
}

rmshift_status rmshift_model_rstar_hessian(const rmshift_model* model, const double* x, double* out)
{
    return guarded([&] {
        require(out, "null argument");
        const Matrix hess = model->model->rstar_hessian(point(model, x));
        Eigen::Map<Matrix>(out, hess.rows(), hess.cols()) = hess;
    });
}

rmshift_status rmshift_model_mean_shift(const rmshift_model* model, const double* x, double* out)
{
    return guarded([&] {
        require(out, "null argument");
        auto shift = model->model->mean_shift(point(model, x));
        if (!shift) throw NoActiveWeights();
        copy_out(*shift, out);
    });
}

void rmshift_model_free(rmshift_model* model) { delete model; }

rmshift_status rmshift_partition_run(const rmshift_model* model, const rmshift_iteration_config* config,
                                     unsigned threads, int record_trajectories, rmshift_partition** out)
{
    return guarded([&] {
        require(model && out, "null argument");
        auto cfg = IterationConfig::defaults_for(model->model->h());
        if (config) {
            if (config->step_tol > 0.0) cfg.step_tol = config->step_tol;
            if (config->max_iter > 0) cfg.max_iter = config->max_iter;
            if (config->merge_radius > 0.0) cfg.merge_radius = config->merge_radius;
        }
        PartitionOptions options;
        options.threads = threads;
        options.record_trajectories = record_trajectories != 0;
        auto handle = std::make_unique<rmshift_partition>();
        handle->partition = partition_samples(*model->model, cfg, options);
        handle->model = model->model;
        handle->echo = model->echo;
        handle->echo.iteration = cfg;
        *out = handle.release();
    });
}

size_t rmshift_partition_mode_count(const rmshift_partition* partition)
{
    return partition ? partition->partition.mode_count() : 0;
}

size_t rmshift_partition_size(const rmshift_partition* partition)
{
    return partition ? partition->partition.labels.size() : 0;
}

rmshift_status rmshift_partition_labels(const rmshift_partition* partition, int* out)
{
    return guarded([&] {
        require(partition && out, "null argument");
        std::copy(partition->partition.labels.begin(), partition->partition.labels.end(), out);
    });
}

rmshift_status rmshift_partition_mode(const rmshift_partition* partition, size_t index, double* out, size_t* count)
{
    return guarded([&] {
        require(partition, "null argument");
        require(index < partition->partition.modes.size(), "mode index out of range");
        if (out) copy_out(partition->partition.modes[index], out);
        if (count) *count = partition->partition.counts[index];
    });
}

size_t rmshift_partition_ascent_violations(const rmshift_partition* partition)
{
    size_t total = 0;
    if (partition) {
        for (const auto& r : partition->partition.results) total += r.ascent_violations;
    }
    return total;
}

rmshift_status rmshift_partition_write_json(const rmshift_partition* partition, const char* path)
{
    return guarded([&] {
        require(partition && path, "null argument");
        write_json(partition_to_json(partition->partition, partition->echo), path);
    });
}

rmshift_status rmshift_partition_write_modes_csv(const rmshift_partition* partition, const char* path)
{
    return guarded([&] {
        require(partition && path, "null argument");
        write_modes_csv(partition->partition, *partition->model, path);
    });
}

rmshift_status rmshift_partition_write_trajectories_csv(const rmshift_partition* partition, const char* path)
{
    return guarded([&] {
        require(partition && path, "null argument");
        require(partition->partition.results.empty() || !partition->partition.results.front().trajectory.empty(),
                "trajectories were not recorded for this partition");
        write_trajectories_csv(partition->partition, path);
    });
}

void rmshift_partition_free(rmshift_partition* partition) { delete partition; }

rmshift_status rmshift_bandwidth_select(const rmshift_dataset* data, const rmshift_transform* transform,
                                        rmshift_kernel kernel, const char* grid, const char* pilot_grid,
                                        unsigned threads, rmshift_bandwidth** out)
{
    return guarded([&] {
        require(data && out, "null argument");
        BandwidthOptions options;
        options.grid = to_grid(grid);
        options.pilot_grid = to_grid(pilot_grid);
        options.threads = threads;
        const auto tr = to_transform(transform);
        const auto k = to_kernel(kernel);
        auto handle = std::make_unique<rmshift_bandwidth>();
        handle->selection = select_bandwidth(data->data, tr, k, options);
        handle->echo.kernel = std::string(k.name());
        handle->echo.transform = tr;
        handle->echo.h = handle->selection.selected;
        handle->echo.h_source = "auto";
        handle->echo.seed = data->seed;
        *out = handle.release();
    });
}

double rmshift_bandwidth_selected(const rmshift_bandwidth* selection)
{
    return selection ? selection->selection.selected : std::numeric_limits<double>::quiet_NaN();
}

double rmshift_bandwidth_pilot(const rmshift_bandwidth* selection)
{
    return selection ? selection->selection.pilot.pilot_bandwidth : std::numeric_limits<double>::quiet_NaN();
}

size_t rmshift_bandwidth_grid_size(const rmshift_bandwidth* selection)
{
    return selection ? selection->selection.values.size() : 0;
}

rmshift_status rmshift_bandwidth_curve(const rmshift_bandwidth* selection, size_t index, double* h, double* cv)
{
    return guarded([&] {
        require(selection, "null argument");
        require(index < selection->selection.values.size(), "grid index out of range");
        if (h) *h = selection->selection.values[index];
        if (cv) *cv = selection->selection.cv_scores[index];
    });
}

rmshift_status rmshift_bandwidth_write_json(const rmshift_bandwidth* selection, const char* path)
{
    return guarded([&] {
        require(selection && path, "null argument");
        write_json(bandwidth_to_json(selection->selection, selection->echo), path);
    });
}

void rmshift_bandwidth_free(rmshift_bandwidth* selection) { delete selection; }

double rmshift_pilot_scaling_factor(size_t n, size_t d)
{
    if (n < 1 || d < 1) return std::numeric_limits<double>::quiet_NaN();
    return pilot_scaling_factor(n, d);
}

rmshift_status rmshift_ridge_run(const rmshift_model* model, const double* starts, size_t count, int s,
                                 double step_tol, int max_iter, unsigned threads, rmshift_ridge** out)
{
    return guarded([&] {
        require(model && out, "null argument");
        const auto& m = *model->model;
        auto cfg = RidgeConfig::defaults_for(m.h(), s);
        if (step_tol > 0.0) cfg.step_tol = step_tol;
        if (max_iter > 0) cfg.max_iter = max_iter;
        std::vector<Vector> points;
        const auto d = static_cast<Eigen::Index>(m.d());
        if (starts) {
            for (size_t i = 0; i < count; ++i) points.emplace_back(Eigen::Map<const Vector>(starts + i * m.d(), d));
        } else {
            for (Eigen::Index i = 0; i < m.x().rows(); ++i) points.emplace_back(m.x().row(i).transpose());
        }
        auto handle = std::make_unique<rmshift_ridge>();
        handle->points = scms_run(m, points, cfg, threads);
        *out = handle.release();
    });
}

size_t rmshift_ridge_size(const rmshift_ridge* ridge) { return ridge ? ridge->points.size() : 0; }

rmshift_status rmshift_ridge_point(const rmshift_ridge* ridge, size_t index, double* out, int* converged)
{
    return guarded([&] {
        require(ridge, "null argument");
        require(index < ridge->points.size(), "ridge index out of range");
        if (out) copy_out(ridge->points[index].point, out);
        if (converged) *converged = ridge->points[index].converged ? 1 : 0;
    });
}

rmshift_status rmshift_ridge_write_csv(const rmshift_ridge* ridge, const char* path)
{
    return guarded([&] {
        require(ridge && path, "null argument");
        write_ridge_csv(ridge->points, path);
    });
}

void rmshift_ridge_free(rmshift_ridge* ridge) { delete ridge; }

void rmshift_modecount_defaults(rmshift_modecount_params* out)
{
    if (!out) return;
    const ModeCountParams defaults;
    *out = rmshift_modecount_params{};
    out->n = defaults.simulation.n;
    out->reps = defaults.reps;
    out->seed = defaults.seed;
    rmshift_transform_defaults(&out->transform);
    out->kernel = RMSHIFT_KERNEL_BIWEIGHT;
    out->policy = RMSHIFT_POLICY_AUTO;
    out->h = defaults.h;
    out->threads = 1;
}

rmshift_status rmshift_experiment_modecount(const rmshift_modecount_params* params, rmshift_report** out)
{
    return guarded([&] {
        require(params && out, "null argument");
        ModeCountParams p;
        p.simulation.n = params->n;
        p.reps = params->reps;
        p.seed = params->seed;
        p.transform = to_transform(&params->transform);
        p.kernel = to_kernel(params->kernel);
        p.policy = to_policy(params->policy);
        p.h = params->h;
        if (params->sweep) p.sweep_values.assign(params->sweep, params->sweep + params->sweep_count);
        p.grid = to_grid(params->grid);
        p.pilot_grid = to_grid(params->pilot_grid);
        p.threads = params->threads;
        auto handle = std::make_unique<rmshift_report>();
        handle->report = run_modecount_experiment(p);
        *out = handle.release();
    });
}

double rmshift_report_frequency_two(const rmshift_report* report)
{
    return report ? report->report.frequency_two : std::numeric_limits<double>::quiet_NaN();
}

size_t rmshift_report_replicates(const rmshift_report* report)
{
    return report ? report->report.replicates.size() : 0;
}

rmshift_status rmshift_report_replicate(const rmshift_report* report, size_t index, double* h, size_t* modes)
{
    return guarded([&] {
        require(report, "null argument");
        require(index < report->report.replicates.size(), "replicate index out of range");
        if (h) *h = report->report.replicates[index].h;
        if (modes) *modes = report->report.replicates[index].modes;
    });
}

double rmshift_report_runtime_seconds(const rmshift_report* report)
{
    return report ? report->report.runtime_seconds : std::numeric_limits<double>::quiet_NaN();
}

rmshift_status rmshift_report_write_json(const rmshift_report* report, const char* path, int include_timing)
{
    return guarded([&] {
        require(report && path, "null argument");
        write_json(modecount_to_json(report->report, include_timing != 0), path);
    });
}

void rmshift_report_free(rmshift_report* report) { delete report; }

void rmshift_rate_defaults(rmshift_rate_params* out)
{
    if (!out) return;
    const RateParams defaults;
    *out = rmshift_rate_params{};
    out->reps = defaults.reps;
    out->seed = defaults.seed;
    rmshift_transform_defaults(&out->transform);
    out->kernel = RMSHIFT_KERNEL_BIWEIGHT;
    out->policy = RMSHIFT_POLICY_AUTO;
    out->h = defaults.h;
    out->threads = 1;
}

rmshift_status rmshift_experiment_rate(const rmshift_rate_params* params, const char* csv_path, double* medians)
{
    return guarded([&] {
        require(params && csv_path, "null argument");
        require(params->sizes && params->size_count > 0, "rate experiment needs sample sizes");
        RateParams p;
        p.sizes.assign(params->sizes, params->sizes + params->size_count);
        p.reps = params->reps;
        p.seed = params->seed;
        p.transform = to_transform(&params->transform);
        p.kernel = to_kernel(params->kernel);
        p.policy = to_policy(params->policy);
        p.h = params->h;
        p.grid = to_grid(params->grid);
        p.pilot_grid = to_grid(params->pilot_grid);
        p.threads = params->threads;
        const auto rows = run_rate_experiment(p);
        write_rate_csv(rows, csv_path);
        if (medians) {
            for (std::size_t i = 0; i < rows.size(); ++i) medians[i] = rows[i].median_hausdorff;
        }
    });
}

}  // extern "C"
