/*
 * C interface to the rmshift regression mean-shift library.
 *
 * Objects are opaque handles created by *_create / *_load / *_run calls and
 * released with the matching *_free. Every fallible call returns an
 * rmshift_status; on failure a description is available from
 * rmshift_last_error() on the calling thread until the next failing call.
 * Handles are immutable after creation and may be shared between threads.
 */
#ifndef RMSHIFT_H
#define RMSHIFT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RMSHIFT_BUILDING)
#    define RMSHIFT_API __declspec(dllexport)
#  else
#    define RMSHIFT_API __declspec(dllimport)
#  endif
#else
#  define RMSHIFT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rmshift_status {
    RMSHIFT_OK = 0,
    RMSHIFT_ERR_INVALID_ARGUMENT = 1,
    RMSHIFT_ERR_DOMAIN = 2,
    RMSHIFT_ERR_IO = 3,
    RMSHIFT_ERR_PARSE = 4,
    RMSHIFT_ERR_NO_ACTIVE_WEIGHTS = 5,
    RMSHIFT_ERR_NUMERIC = 6,
    RMSHIFT_ERR_INTERNAL = 7
} rmshift_status;

typedef enum rmshift_kernel {
    RMSHIFT_KERNEL_GAUSSIAN = 0,
    RMSHIFT_KERNEL_BIWEIGHT = 1
} rmshift_kernel;

typedef enum rmshift_transform_kind {
    RMSHIFT_TRANSFORM_T1 = 0,
    RMSHIFT_TRANSFORM_T2 = 1
} rmshift_transform_kind;

typedef enum rmshift_policy {
    RMSHIFT_POLICY_AUTO = 0,
    RMSHIFT_POLICY_FIXED = 1,
    RMSHIFT_POLICY_SWEEP = 2
} rmshift_policy;

typedef struct rmshift_transform {
    rmshift_transform_kind kind;
    double t1_scale;
    double t1_offset;
    double t2_c0;
} rmshift_transform;

/* Non-positive fields take the bandwidth-scaled defaults
 * (step_tol = 1e-6 h, max_iter = 2000, merge_radius = h / 4). */
typedef struct rmshift_iteration_config {
    double step_tol;
    int max_iter;
    double merge_radius;
} rmshift_iteration_config;

typedef struct rmshift_dataset rmshift_dataset;
typedef struct rmshift_model rmshift_model;
typedef struct rmshift_partition rmshift_partition;
typedef struct rmshift_bandwidth rmshift_bandwidth;
typedef struct rmshift_ridge rmshift_ridge;
typedef struct rmshift_report rmshift_report;

RMSHIFT_API const char* rmshift_version(void);
RMSHIFT_API const char* rmshift_last_error(void);
RMSHIFT_API const char* rmshift_status_name(rmshift_status status);

RMSHIFT_API void rmshift_transform_defaults(rmshift_transform* out);
RMSHIFT_API rmshift_status rmshift_kernel_from_name(const char* name, rmshift_kernel* out);
RMSHIFT_API rmshift_status rmshift_transform_kind_from_name(const char* name, rmshift_transform_kind* out);

/* ---- datasets ---------------------------------------------------------- */

/* x is row-major n x d. */
RMSHIFT_API rmshift_status rmshift_dataset_create(const double* x, const double* y, size_t n, size_t d,
                                                  rmshift_dataset** out);
RMSHIFT_API rmshift_status rmshift_dataset_load_csv(const char* path, rmshift_dataset** out);
RMSHIFT_API rmshift_status rmshift_dataset_save_csv(const rmshift_dataset* data, const char* path);
/* Bimodal simulation model with its default constants. */
RMSHIFT_API rmshift_status rmshift_dataset_simulate(size_t n, uint64_t seed, rmshift_dataset** out);
RMSHIFT_API size_t rmshift_dataset_n(const rmshift_dataset* data);
RMSHIFT_API size_t rmshift_dataset_d(const rmshift_dataset* data);
/* Copies into caller buffers of n*d and n doubles; either may be NULL. */
RMSHIFT_API rmshift_status rmshift_dataset_copy(const rmshift_dataset* data, double* x, double* y);
RMSHIFT_API void rmshift_dataset_free(rmshift_dataset* data);

/* ---- fitted models ----------------------------------------------------- */

/* density_floor <= 0 selects the relative default. */
RMSHIFT_API rmshift_status rmshift_model_fit(const rmshift_dataset* data, const rmshift_transform* transform,
                                             rmshift_kernel kernel, double h, double density_floor,
                                             rmshift_model** out);
/* Fits at the bandwidth chosen by a previous selection. */
RMSHIFT_API rmshift_status rmshift_model_fit_selected(const rmshift_dataset* data, const rmshift_transform* transform,
                                                      rmshift_kernel kernel, const rmshift_bandwidth* selection,
                                                      double density_floor, rmshift_model** out);
RMSHIFT_API size_t rmshift_model_d(const rmshift_model* model);
RMSHIFT_API double rmshift_model_h(const rmshift_model* model);
RMSHIFT_API rmshift_status rmshift_model_kde(const rmshift_model* model, const double* x, double* out);
RMSHIFT_API rmshift_status rmshift_model_rstar(const rmshift_model* model, const double* x, double* out);
RMSHIFT_API rmshift_status rmshift_model_rstar_grad(const rmshift_model* model, const double* x, double* out);
/* Row-major d x d. */
RMSHIFT_API rmshift_status rmshift_model_rstar_hessian(const rmshift_model* model, const double* x, double* out);
/* RMSHIFT_ERR_NO_ACTIVE_WEIGHTS when x is outside every weight support. */
RMSHIFT_API rmshift_status rmshift_model_mean_shift(const rmshift_model* model, const double* x, double* out);
RMSHIFT_API void rmshift_model_free(rmshift_model* model);

/* ---- basin partition --------------------------------------------------- */

RMSHIFT_API rmshift_status rmshift_partition_run(const rmshift_model* model, const rmshift_iteration_config* config,
                                                 unsigned threads, int record_trajectories,
                                                 rmshift_partition** out);
RMSHIFT_API size_t rmshift_partition_mode_count(const rmshift_partition* partition);
RMSHIFT_API size_t rmshift_partition_size(const rmshift_partition* partition);
/* n labels, -1 for stalled starts. */
RMSHIFT_API rmshift_status rmshift_partition_labels(const rmshift_partition* partition, int* out);
RMSHIFT_API rmshift_status rmshift_partition_mode(const rmshift_partition* partition, size_t index, double* out,
                                                  size_t* count);
RMSHIFT_API size_t rmshift_partition_ascent_violations(const rmshift_partition* partition);
RMSHIFT_API rmshift_status rmshift_partition_write_json(const rmshift_partition* partition, const char* path);
RMSHIFT_API rmshift_status rmshift_partition_write_modes_csv(const rmshift_partition* partition, const char* path);
RMSHIFT_API rmshift_status rmshift_partition_write_trajectories_csv(const rmshift_partition* partition,
                                                                    const char* path);
RMSHIFT_API void rmshift_partition_free(rmshift_partition* partition);

/* ---- bandwidth selection ----------------------------------------------- */

/* Grids are "min:max:count[:log]" or NULL for the data-driven default. */
RMSHIFT_API rmshift_status rmshift_bandwidth_select(const rmshift_dataset* data, const rmshift_transform* transform,
                                                    rmshift_kernel kernel, const char* grid, const char* pilot_grid,
                                                    unsigned threads, rmshift_bandwidth** out);
RMSHIFT_API double rmshift_bandwidth_selected(const rmshift_bandwidth* selection);
RMSHIFT_API double rmshift_bandwidth_pilot(const rmshift_bandwidth* selection);
RMSHIFT_API size_t rmshift_bandwidth_grid_size(const rmshift_bandwidth* selection);
/* h and CV(h) at grid index; CV is +inf where infeasible. */
RMSHIFT_API rmshift_status rmshift_bandwidth_curve(const rmshift_bandwidth* selection, size_t index, double* h,
                                                   double* cv);
RMSHIFT_API rmshift_status rmshift_bandwidth_write_json(const rmshift_bandwidth* selection, const char* path);
RMSHIFT_API void rmshift_bandwidth_free(rmshift_bandwidth* selection);
/* n^(1/((d+4)(d+6))) */
RMSHIFT_API double rmshift_pilot_scaling_factor(size_t n, size_t d);

/* ---- ridges ------------------------------------------------------------ */

/* starts: row-major count x d; NULL starts from every sample point.
 * step_tol <= 0 selects 1e-6 h; max_iter <= 0 selects 2000. */
RMSHIFT_API rmshift_status rmshift_ridge_run(const rmshift_model* model, const double* starts, size_t count, int s,
                                             double step_tol, int max_iter, unsigned threads, rmshift_ridge** out);
RMSHIFT_API size_t rmshift_ridge_size(const rmshift_ridge* ridge);
RMSHIFT_API rmshift_status rmshift_ridge_point(const rmshift_ridge* ridge, size_t index, double* out, int* converged);
RMSHIFT_API rmshift_status rmshift_ridge_write_csv(const rmshift_ridge* ridge, const char* path);
RMSHIFT_API void rmshift_ridge_free(rmshift_ridge* ridge);

/* ---- experiments ------------------------------------------------------- */

typedef struct rmshift_modecount_params {
    size_t n;
    size_t reps;
    uint64_t seed;
    rmshift_transform transform;
    rmshift_kernel kernel;
    rmshift_policy policy;
    double h;                 /* fixed policy */
    const double* sweep;      /* sweep policy */
    size_t sweep_count;
    const char* grid;         /* auto policy; NULL for default */
    const char* pilot_grid;
    unsigned threads;
} rmshift_modecount_params;

RMSHIFT_API void rmshift_modecount_defaults(rmshift_modecount_params* out);
RMSHIFT_API rmshift_status rmshift_experiment_modecount(const rmshift_modecount_params* params,
                                                        rmshift_report** out);
RMSHIFT_API double rmshift_report_frequency_two(const rmshift_report* report);
RMSHIFT_API size_t rmshift_report_replicates(const rmshift_report* report);
RMSHIFT_API rmshift_status rmshift_report_replicate(const rmshift_report* report, size_t index, double* h,
                                                    size_t* modes);
RMSHIFT_API double rmshift_report_runtime_seconds(const rmshift_report* report);
RMSHIFT_API rmshift_status rmshift_report_write_json(const rmshift_report* report, const char* path,
                                                     int include_timing);
RMSHIFT_API void rmshift_report_free(rmshift_report* report);

typedef struct rmshift_rate_params {
    const size_t* sizes;
    size_t size_count;
    size_t reps;
    uint64_t seed;
    rmshift_transform transform;
    rmshift_kernel kernel;
    rmshift_policy policy;    /* auto or fixed */
    double h;
    const char* grid;
    const char* pilot_grid;
    unsigned threads;
} rmshift_rate_params;

RMSHIFT_API void rmshift_rate_defaults(rmshift_rate_params* out);
/* Writes n,reps,median_hausdorff rows to csv_path; medians also copied to
 * `medians` (size_count entries) when non-NULL. */
RMSHIFT_API rmshift_status rmshift_experiment_rate(const rmshift_rate_params* params, const char* csv_path,
                                                   double* medians);

#ifdef __cplusplus
}
#endif

#endif /* RMSHIFT_H */
