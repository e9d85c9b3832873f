#include "rmshift/bandwidth.hpp"

#include "rmshift/parallel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rmshift {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

double parse_double(std::string_view text)
{
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end) throw std::invalid_argument("grid: cannot parse number '" + std::string(text) + "'");
    return value;
}

/// Dense n x n table of squared pairwise distances.
class PairDistances {
public:
    explicit PairDistances(const Matrix& x) : n_(static_cast<std::size_t>(x.rows())), sq_(n_ * n_, 0.0)
    {
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double v = (x.row(static_cast<Eigen::Index>(i)) - x.row(static_cast<Eigen::Index>(j))).squaredNorm();
                sq_[i * n_ + j] = v;
                sq_[j * n_ + i] = v;
            }
        }
    }

    double operator()(std::size_t i, std::size_t j) const noexcept { return sq_[i * n_ + j]; }
    std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_;
    std::vector<double> sq_;
};

double loo_prediction_error(const PairDistances& dist, std::span<const double> y, const KernelProfile& kernel, double h)
{
    const std::size_t n = dist.size();
    const double inv_h2 = 1.0 / (h * h);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            const double t = dist(i, j) * inv_h2;
            if (kernel.compact() && t >= 1.0) continue;
            const double kv = kernel.k(t);
            num += y[i] * kv;
            den += kv;
        }
        if (!(den > 0.0)) return infinity;
        const double resid = y[j] - num / den;
        total += resid * resid;
    }
    return total / static_cast<double>(n);
}

CvScore cv_gradient_cached(const Matrix& x, const PairDistances& dist, std::span<const double> y,
                           const KernelProfile& kernel, double h, std::span<const Vector> pilot,
                           const FitOptions& options)
{
    const std::size_t n = dist.size();
    const auto d = x.cols();
    const double inv_h2 = 1.0 / (h * h);
    const double c_k = kernel.normalization(static_cast<int>(d), Profile::k);
    const double m = static_cast<double>(n - 1);
    const double density_scale = c_k / (m * std::pow(h, static_cast<double>(d)));
    const double grad_scale = 2.0 * c_k / (m * std::pow(h, static_cast<double>(d) + 2.0));

    // Full-sample kernel row sums; the leave-one-out density at X_i is
    // density_scale * (sums[i] - k_ij).
    std::vector<double> sums(n, kernel.k(0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = i + 1; l < n; ++l) {
            const double t = dist(i, l) * inv_h2;
            if (kernel.compact() && t >= 1.0) continue;
            const double kv = kernel.k(t);
            sums[i] += kv;
            sums[l] += kv;
        }
    }

    CvScore out;
    std::vector<double> loo_density(n);
    Vector grad(d);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double max_density = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            const double t = dist(i, j) * inv_h2;
            const double kij = (kernel.compact() && t >= 1.0) ? 0.0 : kernel.k(t);
            loo_density[i] = density_scale * (sums[i] - kij);
            max_density = std::max(max_density, loo_density[i]);
        }
        const double floor = options.density_floor ? *options.density_floor : default_relative_density_floor * max_density;

        grad.setZero();
        bool active = false;
        const double* xj = x.row(static_cast<Eigen::Index>(j)).data();
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            const double t = dist(i, j) * inv_h2;
            if (kernel.compact() && t >= 1.0) continue;
            const double gv = kernel.g(t);
            if (gv == 0.0) continue;
            active = true;
            const double w = y[i] * gv / std::max(loo_density[i], floor);
            const double* xi = x.row(static_cast<Eigen::Index>(i)).data();
            for (Eigen::Index c = 0; c < d; ++c) grad[c] += w * (xi[c] - xj[c]);
        }
        if (!active) ++out.isolated;
        grad *= grad_scale;
        total += (pilot[j] - grad).squaredNorm();
    }
    out.score = out.isolated == n ? infinity : total / static_cast<double>(n);
    return out;
}

}  // namespace

std::size_t argmin_smallest(const std::vector<double>& values, const std::vector<double>& scores)
{
    std::size_t best = values.size();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(scores[i])) continue;
        if (best == values.size() || scores[i] < scores[best] ||
            (scores[i] == scores[best] && values[i] < values[best])) {
            best = i;
        }
    }
    return best;
}

GridSpec GridSpec::parse(std::string_view text)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        const auto colon = text.find(':', start);
        parts.push_back(text.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    if (parts.size() < 3 || parts.size() > 4) {
        throw std::invalid_argument("grid: expected min:max:count[:log], got '" + std::string(text) + "'");
    }
    GridSpec spec;
    spec.min = parse_double(parts[0]);
    spec.max = parse_double(parts[1]);
    const double count = parse_double(parts[2]);
    if (count < 1 || count != std::floor(count)) throw std::invalid_argument("grid: count must be a positive integer");
    spec.count = static_cast<int>(count);
    if (parts.size() == 4) {
        if (parts[3] == "log") spec.log = true;
        else if (parts[3] == "lin") spec.log = false;
        else throw std::invalid_argument("grid: spacing must be 'log' or 'lin'");
    }
    spec.values();  // validates
    return spec;
}

std::vector<double> GridSpec::values() const
{
    if (count < 1) throw std::invalid_argument("grid: count must be >= 1");
    if (!(min > 0.0) || !std::isfinite(max)) throw std::invalid_argument("grid: bandwidths must be positive and finite");
    if (count == 1) return {min};
    if (!(max > min)) throw std::invalid_argument("grid: need max > min for more than one value");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double frac = static_cast<double>(i) / (count - 1);
        out[static_cast<std::size_t>(i)] =
            log ? std::exp(std::log(min) + frac * (std::log(max) - std::log(min))) : min + frac * (max - min);
    }
    out.front() = min;
    out.back() = max;
    return out;
}

std::string GridSpec::to_string() const
{
    std::ostringstream os;
    os.precision(17);
    os << min << ':' << max << ':' << count << (log ? ":log" : "");
    return os.str();
}

GridSpec default_bandwidth_grid(const Matrix& x, int count)
{
    if (x.rows() < 2) throw std::invalid_argument("default grid: need at least two samples");
    double sd = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double mean = x.col(c).mean();
        sd += std::sqrt((x.col(c).array() - mean).square().sum() / static_cast<double>(x.rows() - 1));
    }
    sd /= static_cast<double>(x.cols());
    double diam2 = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < x.rows(); ++j) diam2 = std::max(diam2, (x.row(i) - x.row(j)).squaredNorm());
    }
    GridSpec spec;
    spec.min = 0.1 * sd;
    spec.max = 0.5 * std::sqrt(diam2);
    spec.count = count;
    spec.log = true;
    if (!(spec.min > 0.0) || !(spec.max > spec.min)) throw std::invalid_argument("default grid: degenerate inputs");
    return spec;
}

double pilot_scaling_factor(std::size_t n, std::size_t d)
{
    if (n < 1 || d < 1) throw std::invalid_argument("pilot_scaling_factor: n and d must be positive");
    const double dd = static_cast<double>(d);
    return std::pow(static_cast<double>(n), 1.0 / ((dd + 4.0) * (dd + 6.0)));
}

PilotSelection pilot_nw_bandwidth(const Matrix& x, std::span<const double> y_tilde, KernelProfile kernel,
                                  std::span<const double> grid, unsigned threads)
{
    if (grid.empty()) throw std::invalid_argument("pilot_nw_bandwidth: empty grid");
    if (static_cast<std::size_t>(x.rows()) != y_tilde.size() || x.rows() < 2) {
        throw std::invalid_argument("pilot_nw_bandwidth: need n >= 2 matching responses");
    }
    const PairDistances dist(x);
    PilotSelection out;
    out.grid.assign(grid.begin(), grid.end());
    out.scores.assign(grid.size(), infinity);
    parallel_for(grid.size(), threads,
                 [&](std::size_t g) { out.scores[g] = loo_prediction_error(dist, y_tilde, kernel, grid[g]); });
    const auto best = argmin_smallest(out.grid, out.scores);
    if (best == out.grid.size()) throw std::runtime_error("pilot_nw_bandwidth: no feasible bandwidth in grid");
    out.nw_bandwidth = out.grid[best];
    out.scale = pilot_scaling_factor(static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()));
    out.pilot_bandwidth = out.nw_bandwidth * out.scale;
    return out;
}

std::vector<Vector> pilot_gradients(const Matrix& x, std::span<const double> y_tilde, KernelProfile kernel,
                                    double pilot_h)
{
    const NadarayaWatson nw(x, std::vector<double>(y_tilde.begin(), y_tilde.end()), kernel, pilot_h);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
        auto grad = nw.gradient(x.row(j).transpose());
        // every sample point sees at least its own weight
        out.push_back(grad ? std::move(*grad) : Vector::Zero(x.cols()));
    }
    return out;
}

CvScore cv_gradient(const Matrix& x, std::span<const double> y_tilde, KernelProfile kernel, double h,
                    std::span<const Vector> pilot, const FitOptions& options)
{
    if (x.rows() < 3) throw std::invalid_argument("cv_gradient: need n >= 3 for leave-one-out refits");
    if (static_cast<std::size_t>(x.rows()) != y_tilde.size() || pilot.size() != y_tilde.size()) {
        throw std::invalid_argument("cv_gradient: size mismatch");
    }
    if (!(h > 0.0)) throw std::invalid_argument("cv_gradient: bandwidth must be positive");
    const PairDistances dist(x);
    return cv_gradient_cached(x, dist, y_tilde, kernel, h, pilot, options);
}

CvScore cv_gradient(const Dataset& data, const ResponseTransform& transform, KernelProfile kernel, double h,
                    double pilot_h, const FitOptions& options)
{
    data.validate();
    const auto y = apply_transform(data.responses(), transform).y_tilde;
    const auto pilot = pilot_gradients(data.x, y, kernel, pilot_h);
    return cv_gradient(data.x, y, kernel, h, pilot, options);
}

BandwidthSelection select_bandwidth(const Dataset& data, const ResponseTransform& transform, KernelProfile kernel,
                                    const BandwidthOptions& options)
{
    data.validate();
    if (data.n() < 3) throw std::invalid_argument("select_bandwidth: need n >= 3");
    const auto y = apply_transform(data.responses(), transform).y_tilde;

    BandwidthSelection out;
    out.grid_spec = options.grid ? *options.grid : default_bandwidth_grid(data.x);
    out.pilot_grid_spec = options.pilot_grid ? *options.pilot_grid : default_bandwidth_grid(data.x);
    out.values = out.grid_spec.values();
    const auto pilot_grid = out.pilot_grid_spec.values();

    out.pilot = pilot_nw_bandwidth(data.x, y, kernel, pilot_grid, options.threads);
    const auto pilot = pilot_gradients(data.x, y, kernel, out.pilot.pilot_bandwidth);

    const PairDistances dist(data.x);
    out.cv_scores.assign(out.values.size(), infinity);
    out.isolated.assign(out.values.size(), 0);
    parallel_for(out.values.size(), options.threads, [&](std::size_t g) {
        const auto score = cv_gradient_cached(data.x, dist, y, kernel, out.values[g], pilot, options.fit);
        out.cv_scores[g] = score.score;
        out.isolated[g] = score.isolated;
    });
    const auto best = argmin_smallest(out.values, out.cv_scores);
    if (best == out.values.size()) throw std::runtime_error("select_bandwidth: CV is infinite on the whole grid");
    out.selected = out.values[best];
    return out;
}

}  // namespace rmshift
