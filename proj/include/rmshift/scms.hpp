#pragma once

#include "rmshift/estimators.hpp"
#include "rmshift/modeseek.hpp"

#include <optional>
#include <span>
#include <vector>

namespace rmshift {

struct RidgeConfig {
    int s = 2;  // ridge index, 2 <= s <= d
    double step_tol = 1e-6;
    int max_iter = 2000;

    static RidgeConfig defaults_for(double h, int s = 2);
    void validate(std::size_t d) const;
};

/// One subspace-constrained step. The Hessian of r* at z is
/// eigendecomposed, eigenvalues sorted descending l_1 >= ... >= l_d, and
/// the mean shift is projected onto span{v_s, ..., v_d}.
struct ScmsStep {
    Vector next;
    Vector projected_shift;
    Vector mean_shift;
    Matrix basis;        // d x (d - s + 1), orthonormal columns v_s .. v_d
    Vector eigenvalues;  // descending
    bool degenerate_gap = false;  // |l_{s-1} - l_s| < 1e-12 |H|
};

std::optional<ScmsStep> scms_step(const FittedModel& model, const ConstVectorRef& z, int s);

struct RidgePoint {
    Vector start;
    Vector point;
    double projected_step_norm = 0.0;
    Vector eigenvalues;  // at `point`, descending
    int iterations = 0;
    bool converged = false;
    StallReason stall_reason = StallReason::none;
    std::size_t degenerate_steps = 0;
};

/// Iterates scms_step until the projected mean shift is shorter than
/// config.step_tol. The Gaussian kernel is preferred here: the biweight
/// k'' jumps at the support boundary, which makes Hessians noisy.
RidgePoint scms_iterate(const FittedModel& model, const ConstVectorRef& z0, const RidgeConfig& config);

std::vector<RidgePoint> scms_run(const FittedModel& model, std::span<const Vector> starts, const RidgeConfig& config,
                                 unsigned threads = 1);

}  // namespace rmshift
