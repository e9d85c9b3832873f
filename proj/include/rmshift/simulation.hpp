#pragma once

#include "rmshift/dataset.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace rmshift {

/// Bivariate bimodal regression model
///   Y = phi(X; mu1, Sigma1) + phi(X; mu2, Sigma2) + eps,  eps ~ N(0, noise_var),
/// with X ~ N(mu3, Sigma3) conditioned on the box [-box, box]^2. All
/// covariances are diagonal and given as variances.
struct SimulationSpec {
    std::size_t n = 200;
    std::uint64_t seed = 1;
    std::array<double, 2> mu1{1.0, 1.0};
    std::array<double, 2> var1{0.5, 0.5};
    std::array<double, 2> mu2{-1.0, -1.0};
    std::array<double, 2> var2{0.3, 0.9};
    std::array<double, 2> mu3{0.0, 0.0};
    std::array<double, 2> var3{1.5, 1.5};
    double noise_var = 0.01;
    double box = 2.0;

    void validate() const;
};

/// Noise-free regression function r(x).
double true_regression(const SimulationSpec& spec, double x1, double x2);

/// Draws the dataset; X by rejection from the untruncated normal. Equal
/// specs give bitwise equal datasets.
Dataset simulate_bimodal(const SimulationSpec& spec);

/// Strict local maxima of r over the grid of spacing `resolution` covering
/// the box (interior grid nodes only).
std::vector<Vector> true_modes(const SimulationSpec& spec, double resolution = 0.005);

}  // namespace rmshift
