#include "oracles.hpp"

#include "rmshift/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

using namespace rmshift;

namespace {

const KernelProfile gaussian{KernelType::gaussian};
const KernelProfile biweight{KernelType::biweight};

}  // namespace

TEST_CASE("profile values")
{
    CHECK(gaussian.k(0.0) == 1.0);
    CHECK(gaussian.k(2.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(gaussian.g(2.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(biweight.k(0.0) == 0.5);
    CHECK(biweight.k(0.5) == 0.125);
    CHECK(biweight.k(1.0) == 0.0);
    CHECK(biweight.k(7.0) == 0.0);
    CHECK(biweight.g(0.25) == 0.75);
    CHECK(biweight.g(1.0) == 0.0);
    CHECK(biweight.d2k(0.5) == 1.0);
    CHECK(biweight.d2k(1.0) == 0.0);
}

TEST_CASE("negative or NaN arguments are rejected")
{
    for (const auto& kernel : {gaussian, biweight}) {
        CHECK_THROWS_AS(kernel.k(-1e-3), std::domain_error);
        CHECK_THROWS_AS(kernel.dk(-1.0), std::domain_error);
        CHECK_THROWS_AS(kernel.d2k(-1.0), std::domain_error);
        CHECK_THROWS_AS(kernel.g(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    }
}

TEST_CASE("names")
{
    CHECK(KernelProfile::from_name("gaussian") == gaussian);
    CHECK(KernelProfile::from_name("biweight") == biweight);
    CHECK(biweight.name() == "biweight");
    CHECK_THROWS_AS(KernelProfile::from_name("epanechnikov"), std::invalid_argument);
    CHECK(biweight.compact());
    CHECK_FALSE(gaussian.compact());
    CHECK(biweight.support_radius() == 1.0);
    CHECK(std::isinf(gaussian.support_radius()));
}

TEST_CASE("profiles are non-increasing and convex on a grid")
{
    for (const auto& kernel : {gaussian, biweight}) {
        for (int i = 0; i <= 400; ++i) {
            const double t = 0.01 * i;
            CHECK(-kernel.dk(t) >= 0.0);
            CHECK(kernel.d2k(t) >= 0.0);
        }
    }
}

TEST_CASE("derivatives match central differences away from the biweight kink")
{
    const double eps = 1e-5;
    for (const auto& kernel : {gaussian, biweight}) {
        for (double t : {0.1, 0.5, 1.5, 3.0}) {
            const double fd = (kernel.k(t + eps) - kernel.k(t - eps)) / (2 * eps);
            CHECK(std::abs(kernel.dk(t) - fd) < 1e-6);
            const double fd2 = (kernel.dk(t + eps) - kernel.dk(t - eps)) / (2 * eps);
            CHECK(std::abs(kernel.d2k(t) - fd2) < 1e-6);
        }
    }
}

TEST_CASE("normalization constants")
{
    CHECK(gaussian.normalization(2, Profile::k) == doctest::Approx(1.0 / (2 * std::numbers::pi)).epsilon(1e-14));
    CHECK(gaussian.normalization(1, Profile::k) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
    CHECK(biweight.normalization(2, Profile::g) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-12));
    // c = 1 / integral of (1 - x^2)^2 / 2 over [-1, 1] = 15 / 8
    CHECK(biweight.normalization(1, Profile::k) == doctest::Approx(15.0 / 8.0).epsilon(1e-12));
    CHECK(biweight.normalization(2, Profile::k) == doctest::Approx(6.0 / std::numbers::pi).epsilon(1e-12));
    CHECK_THROWS_AS(biweight.normalization(0, Profile::k), std::invalid_argument);
    CHECK_THROWS_AS(biweight.normalization(11, Profile::k), std::invalid_argument);
}

TEST_CASE("normalization agrees with an independent Simpson quadrature")
{
    for (int d = 1; d <= 5; ++d) {
        for (bool use_g : {false, true}) {
            const auto which = use_g ? Profile::g : Profile::k;
            CHECK(std::abs(gaussian.normalization(d, which) - oracle::normalization(oracle::Kern::gaussian, use_g, d)) <
                  1e-8 * gaussian.normalization(d, which));
            CHECK(std::abs(biweight.normalization(d, which) - oracle::normalization(oracle::Kern::biweight, use_g, d)) <
                  1e-8 * biweight.normalization(d, which));
        }
    }
}

TEST_CASE("normalized kernel integrates to one")
{
    for (int d = 1; d <= 3; ++d) {
        for (const auto& kernel : {gaussian, biweight}) {
            for (const auto which : {Profile::k, Profile::g}) {
                const double c = kernel.normalization(d, which);
                const double upper = kernel.compact() ? 1.0 : 40.0;
                auto radial = [&](double r) { return std::pow(r, d - 1) * kernel.eval(which, r * r); };
                const double mass = c * oracle::sphere_area(d) * oracle::simpson(radial, 0.0, upper, 200000);
                CHECK(std::abs(mass - 1.0) < 1e-8);
            }
        }
    }
}
