#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>

namespace rmshift {

/// Row-major so that each sample is a contiguous run of d coordinates.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// n input points in R^d (rows of x) with scalar responses y.
struct Dataset {
    Matrix x;
    Vector y;

    std::size_t n() const noexcept { return static_cast<std::size_t>(x.rows()); }
    std::size_t d() const noexcept { return static_cast<std::size_t>(x.cols()); }

    /// Throws std::invalid_argument on shape mismatch, n < 2, d < 1 or any
    /// non-finite value.
    void validate() const;

    std::span<const double> responses() const noexcept { return {y.data(), static_cast<std::size_t>(y.size())}; }

    friend bool operator==(const Dataset& a, const Dataset& b)
    {
        return a.x.rows() == b.x.rows() && a.x.cols() == b.x.cols() && a.y.size() == b.y.size() && a.x == b.x &&
               a.y == b.y;
    }
};

}  // namespace rmshift
