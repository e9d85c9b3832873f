#include "rmshift/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rmshift {

namespace {

double squared_distance(const double* a, const double* b, Eigen::Index d)
{
    double s = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
        const double diff = a[c] - b[c];
        s += diff * diff;
    }
    return s;
}

void check_point(const ConstVectorRef& x, std::size_t d)
{
    if (static_cast<std::size_t>(x.size()) != d) {
        throw std::invalid_argument("evaluation point has dimension " + std::to_string(x.size()) + ", model has " +
                                    std::to_string(d));
    }
}

}  // namespace

void Dataset::validate() const
{
    if (x.rows() != y.size()) throw std::invalid_argument("dataset: x has " + std::to_string(x.rows()) +
                                                          " rows but y has " + std::to_string(y.size()) + " entries");
    if (x.rows() < 2) throw std::invalid_argument("dataset: need at least 2 samples");
    if (x.cols() < 1) throw std::invalid_argument("dataset: need at least one input dimension");
    if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("dataset: non-finite value");
}

FittedModel FittedModel::fit(const Dataset& data, const ResponseTransform& transform, KernelProfile kernel, double h,
                             const FitOptions& options)
{
    data.validate();
    auto transformed = apply_transform(data.responses(), transform);
    auto model = fit_transformed(data.x, std::move(transformed.y_tilde), kernel, h, options);
    model.shift_applied_ = transformed.shift_applied;
    return model;
}

FittedModel FittedModel::fit_transformed(Matrix x, std::vector<double> y_tilde, KernelProfile kernel, double h,
                                         const FitOptions& options)
{
    if (x.rows() < 2) throw std::invalid_argument("fit: need n >= 2 samples");
    if (x.cols() < 1) throw std::invalid_argument("fit: need d >= 1");
    if (static_cast<std::size_t>(x.rows()) != y_tilde.size()) throw std::invalid_argument("fit: x/y size mismatch");
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("fit: bandwidth must be positive and finite");
    if (!x.allFinite()) throw std::invalid_argument("fit: non-finite input coordinate");
    for (double v : y_tilde) {
        if (!std::isfinite(v)) throw std::invalid_argument("fit: non-finite response");
    }
    if (options.density_floor && !(*options.density_floor > 0.0)) {
        throw std::invalid_argument("fit: density floor must be positive");
    }

    FittedModel m;
    m.x_ = std::move(x);
    m.y_tilde_ = std::move(y_tilde);
    m.kernel_ = kernel;
    m.h_ = h;
    const auto d = static_cast<int>(m.x_.cols());
    m.c_k_ = kernel.normalization(d, Profile::k);
    m.c_g_ = kernel.normalization(d, Profile::g);

    const std::size_t n = m.n();
    const double inv_h2 = 1.0 / (h * h);
    const double scale = m.c_k_ / (static_cast<double>(n) * std::pow(h, d));
    // Symmetric kernel matrix: accumulate each pair once.
    std::vector<double> sums(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = m.x_.row(static_cast<Eigen::Index>(i)).data();
        sums[i] += kernel.k(0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double t = squared_distance(xi, m.x_.row(static_cast<Eigen::Index>(j)).data(), d) * inv_h2;
            if (kernel.compact() && t >= 1.0) continue;
            const double kv = kernel.k(t);
            sums[i] += kv;
            sums[j] += kv;
        }
    }
    m.fhat_.resize(n);
    double max_fhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m.fhat_[i] = scale * sums[i];
        max_fhat = std::max(max_fhat, m.fhat_[i]);
    }
    m.density_floor_ = options.density_floor ? *options.density_floor : default_relative_density_floor * max_fhat;
    m.inv_fhat_.resize(n);
    m.coef_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.fhat_[i] = std::max(m.fhat_[i], m.density_floor_);
        m.inv_fhat_[i] = 1.0 / m.fhat_[i];
        m.coef_[i] = m.y_tilde_[i] * m.inv_fhat_[i];
    }
    return m;
}

double FittedModel::kde_at(const ConstVectorRef& x) const
{
    check_point(x, d());
    const auto dim = x_.cols();
    const double inv_h2 = 1.0 / (h_ * h_);
    double s = 0.0;
    for (Eigen::Index i = 0; i < x_.rows(); ++i) {
        const double t = squared_distance(x.data(), x_.row(i).data(), dim) * inv_h2;
        if (kernel_.compact() && t >= 1.0) continue;
        s += kernel_.k(t);
    }
    return c_k_ * s / (static_cast<double>(n()) * std::pow(h_, static_cast<double>(dim)));
}

double FittedModel::profile_sum(const ConstVectorRef& x, Profile which, bool unit_responses) const
{
    check_point(x, d());
    const auto dim = x_.cols();
    const double inv_h2 = 1.0 / (h_ * h_);
    const auto& weights = unit_responses ? inv_fhat_ : coef_;
    double s = 0.0;
    for (Eigen::Index i = 0; i < x_.rows(); ++i) {
        const double t = squared_distance(x.data(), x_.row(i).data(), dim) * inv_h2;
        if (kernel_.compact() && t >= 1.0) continue;
        s += weights[static_cast<std::size_t>(i)] * kernel_.eval(which, t);
    }
    const double c = which == Profile::k ? c_k_ : c_g_;
    return c * s / (static_cast<double>(n()) * std::pow(h_, static_cast<double>(dim)));
}

double FittedModel::rstar(const ConstVectorRef& x) const { return profile_sum(x, Profile::k, false); }

double FittedModel::rstar_g(const ConstVectorRef& x) const { return profile_sum(x, Profile::g, false); }

double FittedModel::t_hat(const ConstVectorRef& x) const { return profile_sum(x, Profile::k, true); }

Vector FittedModel::rstar_grad(const ConstVectorRef& x) const
{
    check_point(x, d());
    const auto dim = x_.cols();
    const double inv_h2 = 1.0 / (h_ * h_);
    Vector grad = Vector::Zero(dim);
    for (Eigen::Index i = 0; i < x_.rows(); ++i) {
        const double* xi = x_.row(i).data();
        const double t = squared_distance(x.data(), xi, dim) * inv_h2;
        if (kernel_.compact() && t >= 1.0) continue;
        const double w = coef_[static_cast<std::size_t>(i)] * kernel_.g(t);
        for (Eigen::Index c = 0; c < dim; ++c) grad[c] += w * (xi[c] - x[c]);
    }
    const double scale = 2.0 * c_k_ / (static_cast<double>(n()) * std::pow(h_, static_cast<double>(dim) + 2.0));
    return scale * grad;
}

Matrix FittedModel::rstar_hessian(const ConstVectorRef& x) const
{
    check_point(x, d());
    const auto dim = x_.cols();
    const double inv_h2 = 1.0 / (h_ * h_);
    Matrix hess = Matrix::Zero(dim, dim);
    Vector diff(dim);
    for (Eigen::Index i = 0; i < x_.rows(); ++i) {
        const double* xi = x_.row(i).data();
        for (Eigen::Index c = 0; c < dim; ++c) diff[c] = x[c] - xi[c];
        const double t = diff.squaredNorm() * inv_h2;
        if (kernel_.compact() && t > 1.0) continue;
        const double coef = coef_[static_cast<std::size_t>(i)];
        const double outer = coef * 2.0 * inv_h2 * kernel_.d2k(t);
        const double diag = coef * kernel_.dk(t);
        for (Eigen::Index r = 0; r < dim; ++r) {
            hess(r, r) += diag;
            for (Eigen::Index c = 0; c <= r; ++c) hess(r, c) += outer * diff[r] * diff[c];
        }
    }
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = r + 1; c < dim; ++c) hess(r, c) = hess(c, r);
    }
    const double scale = 2.0 * c_k_ / (static_cast<double>(n()) * std::pow(h_, static_cast<double>(dim) + 2.0));
    return scale * hess;
}

FittedModel::ShiftEval FittedModel::evaluate_shift(const ConstVectorRef& x) const
{
    check_point(x, d());
    const auto dim = x_.cols();
    const double inv_h2 = 1.0 / (h_ * h_);
    ShiftEval out;
    out.shift = Vector::Zero(dim);
    double denom = 0.0;
    double ksum = 0.0;
    for (Eigen::Index i = 0; i < x_.rows(); ++i) {
        const double* xi = x_.row(i).data();
        const double t = squared_distance(x.data(), xi, dim) * inv_h2;
        if (kernel_.compact() && t >= 1.0) continue;
        const double coef = coef_[static_cast<std::size_t>(i)];
        const double w = coef * kernel_.g(t);
        ksum += coef * kernel_.k(t);
        denom += w;
        for (Eigen::Index c = 0; c < dim; ++c) out.shift[c] += w * (xi[c] - x[c]);
    }
    out.rstar = c_k_ * ksum / (static_cast<double>(n()) * std::pow(h_, static_cast<double>(dim)));
    out.active = denom > 0.0;
    if (out.active) out.shift /= denom;
    return out;
}

std::optional<Vector> FittedModel::mean_shift(const ConstVectorRef& x) const
{
    auto eval = evaluate_shift(x);
    if (!eval.active) return std::nullopt;
    return std::move(eval.shift);
}

NadarayaWatson::NadarayaWatson(Matrix x, std::vector<double> y, KernelProfile kernel, double h)
    : x_(std::move(x)), y_(std::move(y)), kernel_(kernel), h_(h)
{
    if (static_cast<std::size_t>(x_.rows()) != y_.size()) throw std::invalid_argument("NadarayaWatson: size mismatch");
    if (x_.rows() < 1) throw std::invalid_argument("NadarayaWatson: empty sample");
    if (!(h > 0.0)) throw std::invalid_argument("NadarayaWatson: bandwidth must be positive");
}

std::optional<double> NadarayaWatson::regress(const ConstVectorRef& x) const
{
    check_point(x, static_cast<std::size_t>(x_.cols()));
    const double inv_h2 = 1.0 / (h_ * h_);
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < x_.rows(); ++i) {
        const double t = squared_distance(x.data(), x_.row(i).data(), x_.cols()) * inv_h2;
        if (kernel_.compact() && t >= 1.0) continue;
        const double kv = kernel_.k(t);
        num += y_[static_cast<std::size_t>(i)] * kv;
        den += kv;
    }
    if (!(den > 0.0)) return std::nullopt;
    return num / den;
}

std::optional<Vector> NadarayaWatson::gradient(const ConstVectorRef& x) const
{
    check_point(x, static_cast<std::size_t>(x_.cols()));
    const auto dim = x_.cols();
    const double inv_h2 = 1.0 / (h_ * h_);
    const auto n = static_cast<std::size_t>(x_.rows());
    std::vector<double> kw(n, 0.0);
    std::vector<double> gw(n, 0.0);
    double ksum = 0.0;
    double yksum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = squared_distance(x.data(), x_.row(static_cast<Eigen::Index>(i)).data(), dim) * inv_h2;
        if (kernel_.compact() && t >= 1.0) continue;
        kw[i] = kernel_.k(t);
        gw[i] = kernel_.g(t);
        ksum += kw[i];
        yksum += y_[i] * kw[i];
    }
    if (!(ksum > 0.0)) return std::nullopt;
    Vector grad = Vector::Zero(dim);
    for (std::size_t i = 0; i < n; ++i) {
        if (gw[i] == 0.0) continue;
        const double wstar = y_[i] * gw[i] * ksum - gw[i] * yksum;
        const double* xi = x_.row(static_cast<Eigen::Index>(i)).data();
        for (Eigen::Index c = 0; c < dim; ++c) grad[c] += wstar * (xi[c] - x[c]);
    }
    return (2.0 * inv_h2 / (ksum * ksum)) * grad;
}

}  // namespace rmshift
