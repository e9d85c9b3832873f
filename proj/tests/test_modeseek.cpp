#include "oracles.hpp"

#include "rmshift/modeseek.hpp"
#include "rmshift/simulation.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

using namespace rmshift;

namespace {

Vector vec(std::initializer_list<double> values)
{
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

FittedModel bimodal_model(double h, std::uint64_t seed = 7, KernelType type = KernelType::biweight)
{
    SimulationSpec spec;
    spec.seed = seed;
    return FittedModel::fit(simulate_bimodal(spec), ResponseTransform{}, KernelProfile(type), h);
}

}  // namespace

TEST_CASE("iteration config defaults scale with h")
{
    const auto cfg = IterationConfig::defaults_for(2.0);
    CHECK(cfg.step_tol == doctest::Approx(2e-6));
    CHECK(cfg.max_iter == 2000);
    CHECK(cfg.merge_radius == doctest::Approx(0.5));
    auto bad = cfg;
    bad.step_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.max_iter = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.merge_radius = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("each step ascends r*")
{
    Rng rng(101);
    std::size_t steps = 0;
    for (int draw = 0; draw < 1000; ++draw) {
        const auto type = draw % 2 ? KernelType::gaussian : KernelType::biweight;
        const Matrix x = oracle::uniform_points(rng, 25, 2, -1.0, 1.0);
        std::vector<double> y(25);
        for (double& v : y) v = 0.05 + rng.uniform();
        const auto model = FittedModel::fit_transformed(x, y, KernelProfile(type), 0.2 + rng.uniform());
        const Vector z = vec({2.4 * rng.uniform() - 1.2, 2.4 * rng.uniform() - 1.2});
        const auto next = ms_step(model, z);
        if (!next) continue;
        ++steps;
        const double before = model.rstar(z);
        CHECK(model.rstar(*next) >= before - ascent_slack * std::abs(before));
    }
    CHECK(steps > 900);
}

TEST_CASE("fixed points and trivial starts")
{
    Matrix pair(2, 1);
    pair << -0.5, 0.5;
    const auto sym = FittedModel::fit_transformed(pair, {1.0, 1.0}, KernelProfile(KernelType::biweight), 1.0);
    const auto cfg = IterationConfig::defaults_for(1.0);
    const auto still = ms_iterate(sym, vec({0.0}), cfg);
    CHECK(still.converged);
    CHECK(still.iterations <= 1);
    CHECK(still.trajectory.size() <= 2);
    CHECK(still.final_point[0] == 0.0);
    CHECK(ms_step(sym, vec({0.0}))->norm() == 0.0);

    Matrix single(2, 2);
    single << 0.0, 0.0, 10.0, 10.0;
    const auto one = FittedModel::fit_transformed(single, {1.0, 1.0}, KernelProfile(KernelType::biweight), 1.0);
    CHECK(ms_step(one, vec({0.4, 0.1}))->norm() < 1e-15);

    const auto stalled = ms_iterate(one, vec({5.0, 5.0}), cfg);
    CHECK_FALSE(stalled.converged);
    CHECK(stalled.stall_reason == StallReason::no_active_weights);
    CHECK(to_string(StallReason::no_active_weights) == "no_active_weights");

    auto capped = cfg;
    capped.max_iter = 1;
    const auto model = bimodal_model(1.6);
    const auto cut = ms_iterate(model, vec({0.0, 1.5}), capped);
    CHECK_FALSE(cut.converged);
    CHECK(cut.stall_reason == StallReason::max_iter);
}

TEST_CASE("trajectories ascend and end at near-critical points")
{
    const auto model = bimodal_model(1.6);
    const auto cfg = IterationConfig::defaults_for(model.h());
    const double factor = 2.0 * model.c_k() / (model.h() * model.h() * model.c_g());
    for (Eigen::Index i = 0; i < model.x().rows(); ++i) {
        const auto result = ms_iterate(model, model.x().row(i).transpose(), cfg);
        REQUIRE(result.converged);
        CHECK(result.ascent_violations == 0);
        CHECK(result.trajectory.size() == static_cast<std::size_t>(result.iterations) + 1);
        for (std::size_t j = 1; j < result.rstar_values.size(); ++j) {
            CHECK(result.rstar_values[j] >= result.rstar_values[j - 1] * (1.0 - ascent_slack));
        }
        const double bound = 2.0 * cfg.step_tol * model.rstar_g(result.final_point) * factor;
        CHECK(model.rstar_grad(result.final_point).norm() <= bound);
    }
}

TEST_CASE("starts near (1,1) reach the estimated mode there")
{
    const auto model = bimodal_model(1.6);
    Vector best = vec({0.0, 0.0});
    double best_value = -1.0;
    for (int i = 0; i <= 400; ++i) {
        for (int j = 0; j <= 400; ++j) {
            const Vector p = vec({-2.0 + 0.01 * i, -2.0 + 0.01 * j});
            if ((p - vec({1.0, 1.0})).norm() > 0.8) continue;
            const double v = model.rstar(p);
            if (v > best_value) {
                best_value = v;
                best = p;
            }
        }
    }
    const auto result = ms_iterate(model, vec({1.1, 0.9}), IterationConfig::defaults_for(model.h()));
    REQUIRE(result.converged);
    CHECK((result.final_point - best).norm() < 0.02);
}

TEST_CASE("merging limits")
{
    std::vector<Vector> points{vec({0.0, 0.0}), vec({0.05, 0.0}), vec({0.1, 0.0}), vec({3.0, 3.0}), vec({9.0, 9.0})};
    const std::vector<bool> valid{true, true, true, true, false};
    const auto merged = merge_limits(points, valid, 0.06);
    REQUIRE(merged.modes.size() == 2);
    CHECK(merged.counts[0] == 3);
    CHECK(merged.counts[1] == 1);
    CHECK(merged.labels == std::vector<int>{0, 0, 0, 1, -1});
    CHECK((merged.modes[0] - vec({0.05, 0.0})).norm() < 1e-15);
    for (std::size_t a = 0; a < merged.modes.size(); ++a) {
        for (std::size_t b = a + 1; b < merged.modes.size(); ++b) CHECK((merged.modes[a] - merged.modes[b]).norm() > 0.06);
    }

    // A ring of limits around a small central clump: every pair on the ring is linked, and the clump means land within the radius.
    std::vector<Vector> ring{vec({0.0, 0.0}), vec({0.05, 0.0})};
    for (int k = 0; k < 40; ++k) {
        const double a = 2.0 * std::numbers::pi * k / 40.0;
        ring.push_back(vec({0.5 * std::cos(a), 0.5 * std::sin(a)}));
    }
    const auto fused = merge_limits(ring, std::vector<bool>(ring.size(), true), 0.15);
    CHECK(fused.modes.size() == 1);
}

TEST_CASE("partition on a unimodal surface")
{
    Rng rng(55);
    const Matrix x = oracle::uniform_points(rng, 150, 2, -1.0, 1.0);
    std::vector<double> y(150);
    for (Eigen::Index i = 0; i < 150; ++i) y[static_cast<std::size_t>(i)] = std::exp(-x.row(i).squaredNorm());
    const auto model = FittedModel::fit_transformed(x, y, KernelProfile(KernelType::gaussian), 0.5);
    const auto part = partition_samples(model, IterationConfig::defaults_for(0.5));
    REQUIRE(part.mode_count() == 1);
    for (int label : part.labels) CHECK(label == 0);
    CHECK(part.counts[0] == 150);

    Vector best = vec({0.0, 0.0});
    double best_value = -1.0;
    for (int i = 0; i <= 200; ++i) {
        for (int j = 0; j <= 200; ++j) {
            const Vector p = vec({-1.0 + 0.01 * i, -1.0 + 0.01 * j});
            const double v = model.rstar(p);
            if (v > best_value) {
                best_value = v;
                best = p;
            }
        }
    }
    CHECK((part.modes[0] - best).norm() < 0.015);
}

TEST_CASE("partition invariants, determinism and thread independence")
{
    const auto model = bimodal_model(1.0, 9);
    const auto cfg = IterationConfig::defaults_for(model.h());
    const auto a = partition_samples(model, cfg, {1, false});
    const auto b = partition_samples(model, cfg, {1, false});
    const auto c = partition_samples(model, cfg, {4, false});
    CHECK(a.labels == b.labels);
    CHECK(a.labels == c.labels);
    REQUIRE(a.modes.size() == c.modes.size());
    for (std::size_t m = 0; m < a.modes.size(); ++m) CHECK(a.modes[m] == c.modes[m]);

    std::size_t total = 0;
    for (std::size_t m = 0; m < a.modes.size(); ++m) {
        total += a.counts[m];
        for (std::size_t o = m + 1; o < a.modes.size(); ++o) CHECK((a.modes[m] - a.modes[o]).norm() > cfg.merge_radius);
    }
    std::size_t labelled = 0;
    for (std::size_t i = 0; i < a.labels.size(); ++i) {
        const int label = a.labels[i];
        CHECK(label >= -1);
        CHECK(label < static_cast<int>(a.modes.size()));
        if (label < 0) continue;
        ++labelled;
        CHECK((a.results[i].final_point - a.modes[static_cast<std::size_t>(label)]).norm() <= cfg.merge_radius);
    }
    CHECK(total == labelled);
    for (std::size_t m = 1; m < a.counts.size(); ++m) CHECK(a.counts[m - 1] >= a.counts[m]);
}

TEST_CASE("hausdorff distance")
{
    const std::vector<Vector> a{vec({0.0, 0.0}), vec({1.0, 1.0})};
    CHECK(hausdorff(a, a) == 0.0);
    const std::vector<Vector> zero{vec({0.0})};
    const std::vector<Vector> three{vec({3.0})};
    CHECK(hausdorff(zero, three) == 3.0);
    const std::vector<Vector> wide{vec({0.0}), vec({10.0})};
    const std::vector<Vector> one{vec({1.0})};
    CHECK(hausdorff(wide, one) == 9.0);
    CHECK(hausdorff(one, wide) == 9.0);
    const std::vector<Vector> empty;
    CHECK_THROWS_AS(hausdorff(empty, one), std::invalid_argument);

    Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vector> p;
        std::vector<Vector> q;
        for (int i = 0; i < 5; ++i) p.push_back(vec({rng.uniform(), rng.uniform()}));
        for (int i = 0; i < 7; ++i) q.push_back(vec({rng.uniform(), rng.uniform()}));
        double forward = 0.0;
        for (const auto& u : p) {
            double nearest = 1e300;
            for (const auto& v : q) nearest = std::min(nearest, (u - v).norm());
            forward = std::max(forward, nearest);
        }
        double backward = 0.0;
        for (const auto& v : q) {
            double nearest = 1e300;
            for (const auto& u : p) nearest = std::min(nearest, (u - v).norm());
            backward = std::max(backward, nearest);
        }
        CHECK(hausdorff(p, q) == std::max(forward, backward));
        CHECK(hausdorff(p, q) == hausdorff(q, p));
    }
}
