#pragma once

#include <cmath>
#include <limits>
#include <string_view>

namespace rmshift {

enum class KernelType { gaussian, biweight };

/// Which radial profile of a kernel: k itself, or g = -k'.
enum class Profile { k, g };

/// Spherically symmetric kernel K(x) = c_{k,d} k(|x|^2), described by its
/// profile k on t = |x|^2 >= 0.
///
/// gaussian: k(t) = exp(-t/2). Strictly decreasing, infinite support.
/// biweight: k(t) = (1-t)^2 / 2 on [0,1], 0 beyond. Its g = -k' is the
///           Epanechnikov profile (1-t)_+. Compact support, but k' = 0 past
///           the unit ball, so it is only non-increasing.
///
/// The gaussian satisfies the strict-decrease condition used by the ascent
/// guarantees; the biweight gives compactly supported (faster) sums and the
/// Epanechnikov weight profile. Both are convex, which is all that monotone
/// ascent of the regression mean shift needs.
class KernelProfile {
public:
    explicit KernelProfile(KernelType type = KernelType::gaussian) noexcept : type_(type) {}

    /// Parses "gaussian" or "biweight". Throws std::invalid_argument.
    static KernelProfile from_name(std::string_view name);

    KernelType type() const noexcept { return type_; }
    std::string_view name() const noexcept;

    // All profile evaluations throw std::domain_error for t < 0 or NaN.
    double k(double t) const
    {
        check_argument(t);
        if (type_ == KernelType::gaussian) return std::exp(-0.5 * t);
        if (t >= 1.0) return 0.0;
        return 0.5 * (1.0 - t) * (1.0 - t);
    }
    double dk(double t) const
    {
        check_argument(t);
        if (type_ == KernelType::gaussian) return -0.5 * std::exp(-0.5 * t);
        return t >= 1.0 ? 0.0 : -(1.0 - t);
    }
    /// Second derivative. For the biweight the jump at t = 1 is resolved to
    /// the right limit, d2k(1) = 0.
    double d2k(double t) const
    {
        check_argument(t);
        if (type_ == KernelType::gaussian) return 0.25 * std::exp(-0.5 * t);
        return t >= 1.0 ? 0.0 : 1.0;
    }
    double g(double t) const { return -dk(t); }
    double eval(Profile which, double t) const { return which == Profile::k ? k(t) : g(t); }

    /// Radius in |x| outside of which k vanishes; infinity for the gaussian.
    double support_radius() const noexcept
    {
        return type_ == KernelType::biweight ? 1.0 : std::numeric_limits<double>::infinity();
    }
    bool compact() const noexcept { return type_ == KernelType::biweight; }

    /// Constant c with c * integral over R^d of p(|x|^2) dx = 1, for the
    /// requested profile p. Valid for 1 <= d <= 10.
    double normalization(int d, Profile which) const;

    friend bool operator==(const KernelProfile&, const KernelProfile&) = default;

private:
    static void check_argument(double t)
    {
        if (!(t >= 0.0)) [[unlikely]] throw_negative_argument(t);
    }
    [[noreturn]] static void throw_negative_argument(double t);

    KernelType type_;
};

/// Surface area of the unit sphere in R^d.
double unit_sphere_area(int d);

}  // namespace rmshift
