#include "rmshift/scms.hpp"

#include "rmshift/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace rmshift {

RidgeConfig RidgeConfig::defaults_for(double h, int s)
{
    if (!(h > 0.0)) throw std::invalid_argument("RidgeConfig: bandwidth must be positive");
    RidgeConfig c;
    c.s = s;
    c.step_tol = 1e-6 * h;
    return c;
}

void RidgeConfig::validate(std::size_t d) const
{
    if (s < 2 || static_cast<std::size_t>(s) > d) {
        throw std::invalid_argument("RidgeConfig: need 2 <= s <= d, got s = " + std::to_string(s) +
                                    ", d = " + std::to_string(d));
    }
    if (!(step_tol > 0.0)) throw std::invalid_argument("RidgeConfig: step_tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("RidgeConfig: max_iter must be >= 1");
}

std::optional<ScmsStep> scms_step(const FittedModel& model, const ConstVectorRef& z, int s)
{
    const auto d = static_cast<Eigen::Index>(model.d());
    if (s < 2 || s > d) throw std::invalid_argument("scms_step: need 2 <= s <= d");
    auto shift = model.mean_shift(z);
    if (!shift) return std::nullopt;

    const Eigen::MatrixXd hess = model.rstar_hessian(z);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hess);
    if (solver.info() != Eigen::Success) throw std::runtime_error("scms_step: eigendecomposition failed");
    const Eigen::VectorXd& values = solver.eigenvalues();
    const Eigen::MatrixXd& vectors = solver.eigenvectors();

    // Ascending eigenvalue, ties broken lexicographically on the eigenvector.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (values[a] != values[b]) return values[a] < values[b];
        const auto va = vectors.col(a);
        const auto vb = vectors.col(b);
        return std::lexicographical_compare(va.data(), va.data() + d, vb.data(), vb.data() + d);
    });

    ScmsStep step;
    step.eigenvalues.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) step.eigenvalues[i] = values[order[static_cast<std::size_t>(d - 1 - i)]];

    const Eigen::Index cols = d - s + 1;  // the d - s + 1 smallest eigenvalues
    step.basis.resize(d, cols);
    for (Eigen::Index c = 0; c < cols; ++c) step.basis.col(c) = vectors.col(order[static_cast<std::size_t>(c)]);

    const double hess_norm = step.eigenvalues.cwiseAbs().maxCoeff();
    const double gap = std::abs(step.eigenvalues[s - 2] - step.eigenvalues[s - 1]);
    step.degenerate_gap = gap < 1e-12 * hess_norm;

    step.mean_shift = std::move(*shift);
    step.projected_shift = step.basis * (step.basis.transpose() * step.mean_shift);
    step.next = z + step.projected_shift;
    return step;
}

RidgePoint scms_iterate(const FittedModel& model, const ConstVectorRef& z0, const RidgeConfig& config)
{
    config.validate(model.d());
    if (!z0.allFinite()) throw std::invalid_argument("scms_iterate: non-finite start point");
    RidgePoint out;
    out.start = z0;
    Vector z = z0;
    while (out.iterations < config.max_iter) {
        auto step = scms_step(model, z, config.s);
        if (!step) {
            out.stall_reason = StallReason::no_active_weights;
            break;
        }
        if (step->degenerate_gap) ++out.degenerate_steps;
        out.projected_step_norm = step->projected_shift.norm();
        out.eigenvalues = step->eigenvalues;
        if (out.projected_step_norm < config.step_tol) {
            out.converged = true;
            break;
        }
        z = std::move(step->next);
        ++out.iterations;
    }
    if (!out.converged && out.stall_reason == StallReason::none) {
        out.stall_reason = StallReason::max_iter;
        // the last recorded spectrum belongs to the point before the final move
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(model.rstar_hessian(z), Eigen::EigenvaluesOnly);
        out.eigenvalues = solver.eigenvalues().reverse();
    }
    out.point = std::move(z);
    return out;
}

std::vector<RidgePoint> scms_run(const FittedModel& model, std::span<const Vector> starts, const RidgeConfig& config,
                                 unsigned threads)
{
    config.validate(model.d());
    std::vector<RidgePoint> out(starts.size());
    parallel_for(starts.size(), threads, [&](std::size_t i) { out[i] = scms_iterate(model, starts[i], config); });
    return out;
}

}  // namespace rmshift
