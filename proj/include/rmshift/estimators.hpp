#pragma once

#include "rmshift/dataset.hpp"
#include "rmshift/kernels.hpp"
#include "rmshift/transforms.hpp"

#include <optional>
#include <span>
#include <vector>

namespace rmshift {

using ConstVectorRef = Eigen::Ref<const Vector>;

/// Relative density floor used when FitOptions::density_floor is unset:
/// f_hat(X_i) is clamped below at this fraction of max_i f_hat(X_i).
inline constexpr double default_relative_density_floor = 1e-8;

struct FitOptions {
    /// Absolute floor for f_hat at the sample points. Unset means
    /// default_relative_density_floor * max f_hat.
    std::optional<double> density_floor;
};

/// Immutable fitted state for the Mack-Muller type estimator
///
///   r*(x) = c_{k,d} / (n h^d) * sum_i Y~_i k(|x - X_i|^2 / h^2) / f_hat(X_i)
///
/// of E[Y~ | X = x], where Y~ are the transformed responses and f_hat the
/// KDE at the sample points (self term included). Every evaluation is a
/// read-only O(n) pass, so one model can be shared across threads.
class FittedModel {
public:
    /// Applies the transform to dataset.y and fits. Requires n >= 2, h > 0
    /// and finite data; throws std::invalid_argument otherwise.
    static FittedModel fit(const Dataset& data, const ResponseTransform& transform, KernelProfile kernel, double h,
                           const FitOptions& options = {});

    /// Fits on responses that are already positive (Y~).
    static FittedModel fit_transformed(Matrix x, std::vector<double> y_tilde, KernelProfile kernel, double h,
                                       const FitOptions& options = {});

    const Matrix& x() const noexcept { return x_; }
    std::span<const double> y_tilde() const noexcept { return y_tilde_; }
    std::span<const double> fhat_at_samples() const noexcept { return fhat_; }
    double h() const noexcept { return h_; }
    const KernelProfile& kernel() const noexcept { return kernel_; }
    std::size_t n() const noexcept { return static_cast<std::size_t>(x_.rows()); }
    std::size_t d() const noexcept { return static_cast<std::size_t>(x_.cols()); }
    double density_floor() const noexcept { return density_floor_; }
    double shift_applied() const noexcept { return shift_applied_; }
    double c_k() const noexcept { return c_k_; }
    double c_g() const noexcept { return c_g_; }

    /// Kernel density estimate f_hat(x).
    double kde_at(const ConstVectorRef& x) const;
    double rstar(const ConstVectorRef& x) const;
    /// r* with the profile k replaced by g (and c_{k,d} by c_{g,d}).
    double rstar_g(const ConstVectorRef& x) const;
    Vector rstar_grad(const ConstVectorRef& x) const;
    Matrix rstar_hessian(const ConstVectorRef& x) const;
    /// Unity estimator: r* with every Y~_i = 1.
    double t_hat(const ConstVectorRef& x) const;

    /// Regression mean shift
    ///   m*(x) = sum_i w_i Y~_i X_i / sum_i w_i Y~_i - x,  w_i = g(|x-X_i|^2/h^2) / f_hat(X_i).
    /// Empty when no weight is active at x (possible for compact kernels).
    std::optional<Vector> mean_shift(const ConstVectorRef& x) const;

    /// Mean shift and r*(x) from one pass over the sample.
    struct ShiftEval {
        Vector shift;  // m*(x); meaningless unless active
        double rstar = 0.0;
        bool active = false;
    };
    ShiftEval evaluate_shift(const ConstVectorRef& x) const;

private:
    FittedModel() = default;

    double profile_sum(const ConstVectorRef& x, Profile which, bool unit_responses) const;

    Matrix x_;
    std::vector<double> y_tilde_;
    std::vector<double> fhat_;
    std::vector<double> inv_fhat_;
    std::vector<double> coef_;  // Y~_i / f_hat(X_i)
    KernelProfile kernel_;
    double h_ = 1.0;
    double density_floor_ = 0.0;
    double shift_applied_ = 0.0;
    double c_k_ = 1.0;
    double c_g_ = 1.0;
};

/// Nadaraya-Watson regression of Y~ on X with profile k, and its gradient
/// written in the quotient-rule form
///   grad = (2/h^2) sum_i w*_i (X_i - x) / (sum_i k_i)^2,
///   w*_i = Y~_i g_i sum_l k_l - g_i sum_l Y~_l k_l.
/// Used as the pilot gradient for bandwidth selection.
class NadarayaWatson {
public:
    NadarayaWatson(Matrix x, std::vector<double> y, KernelProfile kernel, double h);

    /// Empty when every k-weight vanishes at x.
    std::optional<double> regress(const ConstVectorRef& x) const;
    std::optional<Vector> gradient(const ConstVectorRef& x) const;

    double h() const noexcept { return h_; }

private:
    Matrix x_;
    std::vector<double> y_;
    KernelProfile kernel_;
    double h_;
};

}  // namespace rmshift
