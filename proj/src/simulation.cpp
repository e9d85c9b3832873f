#include "rmshift/simulation.hpp"

#include "rmshift/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rmshift {

double Rng::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = 0.0;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

namespace {

double diagonal_normal_pdf(double x1, double x2, const std::array<double, 2>& mu, const std::array<double, 2>& var)
{
    const double q = (x1 - mu[0]) * (x1 - mu[0]) / var[0] + (x2 - mu[1]) * (x2 - mu[1]) / var[1];
    return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(var[0] * var[1]));
}

}  // namespace

void SimulationSpec::validate() const
{
    if (n < 2) throw std::invalid_argument("simulation: n must be >= 2");
    for (double v : {var1[0], var1[1], var2[0], var2[1], var3[0], var3[1], noise_var}) {
        if (!(v > 0.0)) throw std::invalid_argument("simulation: variances must be positive");
    }
    if (!(box > 0.0)) throw std::invalid_argument("simulation: truncation box must be positive");
}

double true_regression(const SimulationSpec& spec, double x1, double x2)
{
    return diagonal_normal_pdf(x1, x2, spec.mu1, spec.var1) + diagonal_normal_pdf(x1, x2, spec.mu2, spec.var2);
}

Dataset simulate_bimodal(const SimulationSpec& spec)
{
    spec.validate();
    Rng rng(spec.seed);
    Dataset data;
    data.x.resize(static_cast<Eigen::Index>(spec.n), 2);
    data.y.resize(static_cast<Eigen::Index>(spec.n));
    const double sd1 = std::sqrt(spec.var3[0]);
    const double sd2 = std::sqrt(spec.var3[1]);
    const double noise_sd = std::sqrt(spec.noise_var);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(spec.n); ++i) {
        double a = 0.0;
        double b = 0.0;
        do {
            a = rng.normal(spec.mu3[0], sd1);
            b = rng.normal(spec.mu3[1], sd2);
        } while (std::abs(a) > spec.box || std::abs(b) > spec.box);
        data.x(i, 0) = a;
        data.x(i, 1) = b;
        data.y[i] = true_regression(spec, a, b) + rng.normal(0.0, noise_sd);
    }
    return data;
}

std::vector<Vector> true_modes(const SimulationSpec& spec, double resolution)
{
    if (!(resolution > 0.0)) throw std::invalid_argument("true_modes: resolution must be positive");
    const auto steps = static_cast<long>(std::llround(2.0 * spec.box / resolution));
    const long size = steps + 1;
    std::vector<double> values(static_cast<std::size_t>(size * size));
    auto coord = [&](long i) { return -spec.box + static_cast<double>(i) * resolution; };
    for (long i = 0; i < size; ++i) {
        for (long j = 0; j < size; ++j) values[static_cast<std::size_t>(i * size + j)] = true_regression(spec, coord(i), coord(j));
    }
    std::vector<Vector> modes;
    for (long i = 1; i + 1 < size; ++i) {
        for (long j = 1; j + 1 < size; ++j) {
            const double v = values[static_cast<std::size_t>(i * size + j)];
            bool is_max = true;
            for (long di = -1; di <= 1 && is_max; ++di) {
                for (long dj = -1; dj <= 1; ++dj) {
                    if ((di || dj) && values[static_cast<std::size_t>((i + di) * size + j + dj)] >= v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) modes.push_back(Vector{{coord(i), coord(j)}});
        }
    }
    return modes;
}

}  // namespace rmshift
