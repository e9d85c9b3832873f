#include "rmshift/kernels.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rmshift {

void KernelProfile::throw_negative_argument(double t)
{
    throw std::domain_error("kernel profile evaluated at negative argument t = " + std::to_string(t));
}

KernelProfile KernelProfile::from_name(std::string_view name)
{
    if (name == "gaussian") return KernelProfile(KernelType::gaussian);
    if (name == "biweight") return KernelProfile(KernelType::biweight);
    throw std::invalid_argument("unknown kernel '" + std::string(name) + "' (expected gaussian or biweight)");
}

std::string_view KernelProfile::name() const noexcept
{
    return type_ == KernelType::gaussian ? "gaussian" : "biweight";
}

double unit_sphere_area(int d)
{
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    const double half = 0.5 * d;
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double KernelProfile::normalization(int d, Profile which) const
{
    if (d < 1 || d > 10) {
        throw std::invalid_argument("normalization defined for 1 <= d <= 10, got d = " + std::to_string(d));
    }
    if (type_ == KernelType::gaussian && which == Profile::k) {
        return std::pow(2.0 * std::numbers::pi, -0.5 * d);
    }

    // c^-1 = S_{d-1} * int_0^R r^{d-1} p(r^2) dr
    auto radial = [&](double r) {
        const double p = eval(which, r * r);
        return p == 0.0 ? 0.0 : std::pow(r, d - 1) * p;
    };
    double integral = 0.0;
    if (compact()) {
        integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(radial, 0.0, support_radius(), 15, 1e-14);
    } else {
        boost::math::quadrature::exp_sinh<double> integrator;
        integral = integrator.integrate(radial, 0.0, std::numeric_limits<double>::infinity());
    }
    const double inverse = unit_sphere_area(d) * integral;
    if (!std::isfinite(inverse) || inverse <= 0.0) {
        throw std::runtime_error("kernel profile is not integrable");
    }
    return 1.0 / inverse;
}

}  // namespace rmshift
