#include "rmshift/modeseek.hpp"

#include "rmshift/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rmshift {

IterationConfig IterationConfig::defaults_for(double h)
{
    if (!(h > 0.0)) throw std::invalid_argument("IterationConfig: bandwidth must be positive");
    IterationConfig c;
    c.step_tol = 1e-6 * h;
    c.max_iter = 2000;
    c.merge_radius = 0.25 * h;
    return c;
}

void IterationConfig::validate() const
{
    if (!(step_tol > 0.0)) throw std::invalid_argument("IterationConfig: step_tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("IterationConfig: max_iter must be >= 1");
    if (!(merge_radius > 0.0)) throw std::invalid_argument("IterationConfig: merge_radius must be positive");
}

std::string_view to_string(StallReason reason) noexcept
{
    switch (reason) {
    case StallReason::none: return "none";
    case StallReason::no_active_weights: return "no_active_weights";
    case StallReason::max_iter: return "max_iter";
    }
    return "unknown";
}

std::optional<Vector> ms_step(const FittedModel& model, const ConstVectorRef& z)
{
    auto shift = model.mean_shift(z);
    if (!shift) return std::nullopt;
    return Vector(z + *shift);
}

ModeSeekResult ms_iterate(const FittedModel& model, const ConstVectorRef& z0, const IterationConfig& config,
                          bool record_trajectory)
{
    config.validate();
    if (!z0.allFinite()) throw std::invalid_argument("ms_iterate: non-finite start point");

    ModeSeekResult result;
    Vector z = z0;
    auto eval = model.evaluate_shift(z);
    result.rstar_values.push_back(eval.rstar);
    if (record_trajectory) result.trajectory.push_back(z);
    if (!eval.active) {
        result.final_point = z;
        result.stall_reason = StallReason::no_active_weights;
        return result;
    }

    while (result.iterations < config.max_iter) {
        const double step = eval.shift.norm();
        z += eval.shift;
        ++result.iterations;
        const double previous = result.rstar_values.back();
        eval = model.evaluate_shift(z);
        result.rstar_values.push_back(eval.rstar);
        if (record_trajectory) result.trajectory.push_back(z);
        if (eval.rstar < previous - ascent_slack * std::abs(previous)) ++result.ascent_violations;
        if (step < config.step_tol) {
            result.converged = true;
            break;
        }
        if (!eval.active) {
            result.stall_reason = StallReason::no_active_weights;
            break;
        }
    }
    if (!result.converged && result.stall_reason == StallReason::none) result.stall_reason = StallReason::max_iter;
    result.final_point = std::move(z);
    return result;
}

namespace {

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }

    std::size_t find(std::size_t i)
    {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent[b] = a;
    }

    std::vector<std::size_t> parent;
};

bool lexicographic_less(const Vector& a, const Vector& b)
{
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace

MergeResult merge_limits(std::span<const Vector> points, const std::vector<bool>& valid, double merge_radius)
{
    if (valid.size() != points.size()) throw std::invalid_argument("merge_limits: size mismatch");
    if (!(merge_radius > 0.0)) throw std::invalid_argument("merge_limits: merge_radius must be positive");
    const std::size_t n = points.size();
    const double r2 = merge_radius * merge_radius;

    DisjointSets sets(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!valid[i]) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (valid[j] && (points[i] - points[j]).squaredNorm() <= r2) sets.unite(i, j);
        }
    }

    // Fuse groups whose representatives still fall within the radius.
    std::vector<std::size_t> group_of(n, 0);
    std::vector<std::size_t> roots;
    std::vector<Vector> reps;
    std::vector<std::size_t> counts;
    for (;;) {
        roots.clear();
        reps.clear();
        counts.clear();
        std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
        for (std::size_t i = 0; i < n; ++i) {
            if (!valid[i]) continue;
            const std::size_t root = sets.find(i);
            if (slot[root] == std::numeric_limits<std::size_t>::max()) {
                slot[root] = roots.size();
                roots.push_back(root);
                reps.push_back(Vector::Zero(points[i].size()));
                counts.push_back(0);
            }
            group_of[i] = slot[root];
            reps[slot[root]] += points[i];
            ++counts[slot[root]];
        }
        for (std::size_t g = 0; g < reps.size(); ++g) reps[g] /= static_cast<double>(counts[g]);

        bool fused = false;
        for (std::size_t a = 0; a < reps.size(); ++a) {
            for (std::size_t b = a + 1; b < reps.size(); ++b) {
                if ((reps[a] - reps[b]).squaredNorm() <= r2) {
                    sets.unite(roots[a], roots[b]);
                    fused = true;
                }
            }
        }
        if (!fused) break;
    }

    std::vector<std::size_t> order(reps.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        return lexicographic_less(reps[a], reps[b]);
    });
    std::vector<int> rank(reps.size());
    MergeResult out;
    for (std::size_t r = 0; r < order.size(); ++r) {
        rank[order[r]] = static_cast<int>(r);
        out.modes.push_back(reps[order[r]]);
        out.counts.push_back(counts[order[r]]);
    }
    out.labels.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (valid[i]) out.labels[i] = rank[group_of[i]];
    }
    return out;
}

Partition partition_samples(const FittedModel& model, const IterationConfig& config, const PartitionOptions& options)
{
    config.validate();
    const std::size_t n = model.n();
    Partition part;
    part.results.resize(n);
    parallel_for(n, options.threads, [&](std::size_t i) {
        part.results[i] = ms_iterate(model, model.x().row(static_cast<Eigen::Index>(i)).transpose(), config,
                                     options.record_trajectories);
    });

    std::vector<Vector> limits;
    limits.reserve(n);
    std::vector<bool> valid(n);
    for (std::size_t i = 0; i < n; ++i) {
        limits.push_back(part.results[i].final_point);
        valid[i] = part.results[i].converged;
    }
    auto merged = merge_limits(limits, valid, config.merge_radius);
    part.labels = std::move(merged.labels);
    part.modes = std::move(merged.modes);
    part.counts = std::move(merged.counts);
    return part;
}

double hausdorff(std::span<const Vector> a, std::span<const Vector> b)
{
    if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff: point sets must be non-empty");
    auto directed = [](std::span<const Vector> from, std::span<const Vector> to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) {
                if (p.size() != q.size()) throw std::invalid_argument("hausdorff: dimension mismatch");
                best = std::min(best, (p - q).norm());
            }
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace rmshift
