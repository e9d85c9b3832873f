#include "oracles.hpp"

#include "rmshift/bandwidth.hpp"
#include "rmshift/estimators.hpp"
#include "rmshift/experiments.hpp"
#include "rmshift/modeseek.hpp"
#include "rmshift/scms.hpp"
#include "rmshift/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

using namespace rmshift;

namespace {

unsigned threads()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

oracle::Kern to_oracle(KernelType type)
{
    return type == KernelType::gaussian ? oracle::Kern::gaussian : oracle::Kern::biweight;
}

ResponseTransform transform_of(TransformKind kind)
{
    ResponseTransform t;
    t.kind = kind;
    return t;
}

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string format(const char* fmt, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

Outcome modecount_frequencies()
{
    struct Setting {
        TransformKind kind;
        std::size_t n;
        double target;
        double tol;
    };
    const std::vector<Setting> settings{
        {TransformKind::t1, 200, 0.78, 0.10},  {TransformKind::t2, 200, 0.81, 0.10},
        {TransformKind::t1, 500, 0.91, 0.08},  {TransformKind::t2, 500, 0.935, 0.08},
        {TransformKind::t1, 1000, 0.945, 0.05}, {TransformKind::t2, 1000, 0.975, 0.05},
    };
    Outcome out{true, ""};
    for (const auto& s : settings) {
        ModeCountParams params;
        params.simulation.n = s.n;
        params.reps = 200;
        params.transform = transform_of(s.kind);
        params.policy = BandwidthPolicy::automatic;
        params.threads = threads();
        const double freq = run_modecount_experiment(params).frequency_two;
        const bool ok = std::abs(freq - s.target) <= s.tol;
        out.pass &= ok;
        out.detail += format("%s n=%zu %.3f (%.3f+-%.3f)%s; ", std::string(to_string(s.kind)).c_str(), s.n, freq,
                             s.target, s.tol, ok ? "" : " out");
    }
    return out;
}

Outcome bandwidth_effect()
{
    const std::vector<std::pair<double, std::size_t>> expected{{1.0, 4}, {1.6, 2}, {2.5, 1}};
    const std::size_t seeds = 40;
    Outcome out{true, ""};
    for (const auto& [h, target] : expected) {
        std::map<std::size_t, std::size_t> tally;
        for (std::size_t r = 0; r < seeds; ++r) {
            SimulationSpec spec;
            spec.seed = derive_seed(2, r);
            ++tally[count_modes(simulate_bimodal(spec), {}, KernelProfile(KernelType::biweight), h)];
        }
        const auto modal = std::max_element(tally.begin(), tally.end(),
                                            [](const auto& a, const auto& b) { return a.second < b.second; });
        const std::size_t hits = tally[target];
        const bool ok = modal->first == target && 2 * hits > seeds;
        out.pass &= ok;
        out.detail += format("h=%.1f modal %zu, %zu/%zu seeds with %zu; ", h, modal->first, hits, seeds, target);
    }
    return out;
}

Outcome mode_location()
{
    const SimulationSpec base;
    const auto truth = true_modes(base);
    const std::size_t reps = 100;
    std::size_t hits = 0;
    std::vector<double> distances;
    for (std::size_t r = 0; r < reps; ++r) {
        SimulationSpec spec;
        spec.seed = derive_seed(3, r);
        const auto model = FittedModel::fit(simulate_bimodal(spec), {}, KernelProfile(KernelType::biweight), 1.6);
        const auto part = partition_samples(model, IterationConfig::defaults_for(1.6), {threads(), false});
        const double dist = part.modes.empty() ? INFINITY : hausdorff(part.modes, truth);
        distances.push_back(dist);
        hits += dist <= 0.35;
    }
    const double frac = static_cast<double>(hits) / reps;
    return {frac >= 0.8, format("%zu/%zu replicates within 0.35, median distance %.3f", hits, reps, median(distances))};
}

Outcome rate_trend()
{
    RateParams params;
    params.threads = threads();
    const auto rows = run_rate_experiment(params);
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0) ok &= rows[i].median_hausdorff < rows[i - 1].median_hausdorff;
        detail += format("n=%zu median %.4f; ", rows[i].n, rows[i].median_hausdorff);
    }
    return {ok, detail};
}

Outcome monotone_ascent()
{
    Rng rng(5);
    std::size_t steps = 0;
    std::size_t violations = 0;
    std::size_t datasets = 0;
    while (steps < 100000) {
        const auto n = static_cast<Eigen::Index>(20 + rng.uniform() * 60);
        const auto d = static_cast<Eigen::Index>(1 + datasets % 3);
        const auto type = datasets % 2 ? KernelType::gaussian : KernelType::biweight;
        const Matrix x = oracle::uniform_points(rng, n, d, -1.0, 1.0);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (double& v : y) v = 0.01 + rng.uniform();
        const double h = 0.2 + 0.8 * rng.uniform();
        const auto model = FittedModel::fit_transformed(x, y, KernelProfile(type), h);
        auto cfg = IterationConfig::defaults_for(h);
        cfg.step_tol *= 1e-2;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto result = ms_iterate(model, x.row(i).transpose(), cfg);
            for (std::size_t j = 1; j < result.rstar_values.size(); ++j) {
                const double prev = result.rstar_values[j - 1];
                violations += result.rstar_values[j] < prev - 1e-12 * std::abs(prev);
                ++steps;
            }
        }
        ++datasets;
    }
    return {violations == 0, format("%zu violations in %zu steps over %zu datasets", violations, steps, datasets)};
}

Outcome gradient_identity()
{
    double worst = 0.0;
    std::size_t points = 0;
    for (const auto type : {KernelType::gaussian, KernelType::biweight}) {
        SimulationSpec spec;
        spec.seed = 6;
        const auto data = simulate_bimodal(spec);
        const double h = type == KernelType::gaussian ? 0.6 : 1.6;
        const auto model = FittedModel::fit(data, {}, KernelProfile(type), h);
        const auto kind = to_oracle(type);
        const double ck = oracle::normalization(kind, false, 2);
        const double cg = oracle::normalization(kind, true, 2);
        const std::vector<double> y(model.y_tilde().begin(), model.y_tilde().end());
        const auto f = oracle::fhat(model.x(), kind, h, ck);
        Rng rng(66);
        std::size_t done = 0;
        while (done < 100) {
            Vector at(2);
            at << 3.6 * rng.uniform() - 1.8, 3.6 * rng.uniform() - 1.8;
            const auto m = model.mean_shift(at);
            if (!m) continue;
            const Vector lhs = oracle::weighted_grad(model.x(), y, f, kind, ck, h, at);
            const double rg = oracle::weighted_sum(model.x(), y, f, kind, true, cg, h, at);
            const Vector rhs = 2.0 * ck / (h * h * cg) * rg * *m;
            worst = std::max(worst, (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300));
            ++done;
        }
        points += done;
    }
    return {worst < 1e-10, format("max relative residual %.3e over %zu points", worst, points)};
}

Outcome finite_differences()
{
    SimulationSpec spec;
    spec.seed = 7;
    const auto data = simulate_bimodal(spec);
    const auto model = FittedModel::fit(data, {}, KernelProfile(KernelType::gaussian), 0.6);
    const std::vector<double> y(model.y_tilde().begin(), model.y_tilde().end());
    const NadarayaWatson nw(model.x(), y, KernelProfile(KernelType::gaussian), 0.6);
    Rng rng(77);
    double grad_err = 0.0;
    double hess_err = 0.0;
    double nw_err = 0.0;
    for (int p = 0; p < 20; ++p) {
        Vector at(2);
        at << 3.0 * rng.uniform() - 1.5, 3.0 * rng.uniform() - 1.5;
        const Vector g = model.rstar_grad(at);
        const Vector fd = oracle::central_gradient([&](const Vector& z) { return model.rstar(z); }, at, 1e-5);
        grad_err = std::max(grad_err, (g - fd).norm() / std::max(fd.norm(), 1e-12));
        const Matrix hess = model.rstar_hessian(at);
        const Matrix fdh = oracle::central_jacobian([&](const Vector& z) { return model.rstar_grad(z); }, at, 1e-5);
        hess_err = std::max(hess_err, (hess - fdh).norm() / std::max(fdh.norm(), 1e-12));
        const Vector ng = *nw.gradient(at);
        const Vector nfd = oracle::central_gradient([&](const Vector& z) { return *nw.regress(z); }, at, 1e-5);
        nw_err = std::max(nw_err, (ng - nfd).norm() / std::max(nfd.norm(), 1e-12));
    }
    const bool ok = grad_err < 1e-5 && hess_err < 1e-4 && nw_err < 1e-5;
    return {ok, format("relative errors: grad %.2e, hessian %.2e, nw grad %.2e", grad_err, hess_err, nw_err)};
}

Outcome transform_invariance()
{
    double worst = 0.0;
    std::size_t cases = 0;
    bool ok = true;
    for (const auto type : {KernelType::gaussian, KernelType::biweight}) {
        for (const auto& [cx, cy, sigma] : std::vector<std::tuple<double, double, double>>{{0.0, 0.0, 0.5},
                                                                                          {0.3, -0.2, 0.8}}) {
            Matrix x(441, 2);
            Vector y(441);
            for (int i = 0; i < 21; ++i) {
                for (int j = 0; j < 21; ++j) {
                    const int r = i * 21 + j;
                    x(r, 0) = cx - 1.0 + 0.1 * i;
                    x(r, 1) = cy - 1.0 + 0.1 * j;
                    const double q = std::pow(x(r, 0) - cx, 2) + std::pow(x(r, 1) - cy, 2);
                    y[r] = 0.2 * std::exp(-q / (2.0 * sigma * sigma)) - 0.1;
                }
            }
            const Dataset data{x, y};
            const double h = type == KernelType::gaussian ? 0.4 : 0.9;
            const auto cfg = IterationConfig::defaults_for(h);
            const auto m1 = FittedModel::fit(data, transform_of(TransformKind::t1), KernelProfile(type), h);
            const auto m2 = FittedModel::fit(data, transform_of(TransformKind::t2), KernelProfile(type), h);
            const auto p1 = partition_samples(m1, cfg);
            const auto p2 = partition_samples(m2, cfg);
            ++cases;
            if (p1.modes.empty() || p2.modes.empty()) {
                ok = false;
                continue;
            }
            const double dist = hausdorff(p1.modes, p2.modes);
            worst = std::max(worst, dist / cfg.step_tol);
            ok &= p1.mode_count() == 1 && p2.mode_count() == 1 && dist <= 2.0 * cfg.step_tol;
        }
    }
    return {ok, format("%zu synthetics, max distance %.3f step_tol", cases, worst)};
}

Outcome loo_equivalence()
{
    Rng rng(9);
    double worst = 0.0;
    std::size_t cases = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const auto n = static_cast<Eigen::Index>(3 + trial % 8);
        const auto d = static_cast<Eigen::Index>(1 + trial % 3);
        const Matrix x = oracle::uniform_points(rng, n, d, -1.0, 1.0);
        std::vector<double> y(static_cast<std::size_t>(n));
        for (double& v : y) v = 0.05 + rng.uniform();
        std::vector<Vector> pilot;
        for (Eigen::Index j = 0; j < n; ++j) {
            Vector p(d);
            for (Eigen::Index c = 0; c < d; ++c) p[c] = rng.normal();
            pilot.push_back(p);
        }
        for (const auto type : {KernelType::gaussian, KernelType::biweight}) {
            const KernelProfile kernel(type);
            const double ck = oracle::normalization(to_oracle(type), false, static_cast<int>(d));
            for (double h : {0.3, 0.7, 1.5, 4.0}) {
                const double fast = cv_gradient(x, y, kernel, h, pilot).score;
                const double slow = oracle::cv_brute_force(x, y, to_oracle(type), ck, h, pilot);
                ++cases;
                if (std::isinf(fast) || std::isinf(slow)) {
                    if (std::isinf(fast) != std::isinf(slow)) worst = INFINITY;
                    continue;
                }
                worst = std::max(worst, std::abs(fast - slow) / std::max(1.0, std::abs(slow)));
            }
        }
    }
    return {worst <= 1e-12, format("max relative difference %.3e over %zu cases", worst, cases)};
}

struct RidgeSummary {
    std::size_t within = 0;
    std::size_t total = 0;
    double worst = 0.0;
};

RidgeSummary filament_ridge(const Matrix& x)
{
    const auto n = static_cast<std::size_t>(x.rows());
    std::vector<double> y(n);
    std::vector<Vector> starts;
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        y[i] = std::exp(-x(r, 1) * x(r, 1));
        starts.push_back(x.row(r).transpose());
    }
    const double h = 0.3;
    const auto model = FittedModel::fit_transformed(x, y, KernelProfile(KernelType::gaussian), h);
    auto cfg = RidgeConfig::defaults_for(h);
    cfg.max_iter = 5000;
    RidgeSummary s;
    for (const auto& p : scms_run(model, starts, cfg, threads())) {
        if (!p.converged || p.eigenvalues[1] >= 0.0 || std::abs(p.point[0]) > 1.5 - 2.0 * h) continue;
        ++s.total;
        s.within += std::abs(p.point[1]) < 0.1;
        s.worst = std::max(s.worst, std::abs(p.point[1]));
    }
    return s;
}

Outcome filament()
{
    Rng rng(10);
    Matrix random(1000, 2);
    for (Eigen::Index i = 0; i < 1000; ++i) {
        random(i, 0) = -1.5 + 3.0 * rng.uniform();
        random(i, 1) = -1.0 + 2.0 * rng.uniform();
    }
    Matrix grid(1000, 2);
    for (int i = 0; i < 40; ++i) {
        for (int j = 0; j < 25; ++j) {
            grid(i * 25 + j, 0) = -1.5 + 3.0 * (i + 0.5) / 40.0;
            grid(i * 25 + j, 1) = -1.0 + 2.0 * (j + 0.5) / 25.0;
        }
    }
    const auto r = filament_ridge(random);
    const auto g = filament_ridge(grid);
    return {r.total > 0 && r.within == r.total,
            format("uniform design %zu/%zu within 0.1 (max |x2| %.3f); regular grid design %zu/%zu (max |x2| %.3f)",
                   r.within, r.total, r.worst, g.within, g.total, g.worst)};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"mode-count frequencies with selected bandwidth", modecount_frequencies},
        {"bandwidth effect on the basin count", bandwidth_effect},
        {"mode location accuracy at h=1.6", mode_location},
        {"hausdorff distance decreases with n", rate_trend},
        {"monotone ascent", monotone_ascent},
        {"gradient identity", gradient_identity},
        {"finite-difference derivatives", finite_differences},
        {"argmax invariance between transforms", transform_invariance},
        {"leave-one-out brute-force equivalence", loo_equivalence},
        {"ridge recovery on a straight filament", filament},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failures = 0;
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        const int id = static_cast<int>(c) + 1;
        if (!only.empty() && !only.contains(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        const auto outcome = criteria[c].second();
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
        failures += !outcome.pass;
        std::printf("%s criterion %d: %s | %s [%.1fs]\n", outcome.pass ? "PASS" : "FAIL", id, criteria[c].first,
                    outcome.detail.c_str(), took.count());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
