#include "rmshift/transforms.hpp"

#include "rmshift/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

using namespace rmshift;

TEST_CASE("t1 examples")
{
    std::vector<double> y{0.0};
    auto out = apply_t1(y, 10.0, 0.01);
    CHECK(out.y_tilde[0] == doctest::Approx(0.51).epsilon(1e-15));
    CHECK(out.shift_applied == 0.0);

    y = {-1e6};
    CHECK(apply_t1(y, 10.0, 0.01).y_tilde[0] == doctest::Approx(0.01).epsilon(1e-12));

    y = {0.2};
    CHECK(apply_t1(y, 10.0, 0.01).y_tilde[0] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0)) + 0.01).epsilon(1e-15));
    CHECK(std::abs(apply_t1(y, 10.0, 0.01).y_tilde[0] - 0.89085) < 1e-4);
}

TEST_CASE("t2 examples")
{
    std::vector<double> y{1.0, 2.0, 3.0};
    auto out = apply_t2(y, 0.1);
    CHECK(out.shift_applied == 0.0);
    CHECK(out.y_tilde == y);

    y = {-1.0, 0.0, 2.0};
    out = apply_t2(y, 0.1);
    CHECK(out.shift_applied == doctest::Approx(1.1));
    CHECK(out.y_tilde[0] == doctest::Approx(0.1));
    CHECK(out.y_tilde[1] == doctest::Approx(1.1));
    CHECK(out.y_tilde[2] == doctest::Approx(3.1));

    y = {0.1};
    out = apply_t2(y, 0.1);
    CHECK(out.shift_applied == 0.0);
    CHECK(out.y_tilde[0] == 0.1);
}

TEST_CASE("transforms are positive and preserve order")
{
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> y(40);
        for (double& v : y) v = rng.normal(0.0, 0.5);
        for (const auto kind : {TransformKind::t1, TransformKind::t2}) {
            ResponseTransform t;
            t.kind = kind;
            const auto out = apply_transform(y, t);
            for (std::size_t i = 0; i < y.size(); ++i) {
                CHECK(out.y_tilde[i] > 0.0);
                for (std::size_t j = 0; j < y.size(); ++j) {
                    if (y[i] < y[j]) CHECK(out.y_tilde[i] < out.y_tilde[j]);
                }
            }
            if (kind == TransformKind::t2) {
                const double lo = *std::min_element(y.begin(), y.end());
                CHECK(out.shift_applied == std::max(0.1 - lo, 0.0));
                for (std::size_t i = 0; i < y.size(); ++i) CHECK(out.y_tilde[i] == y[i] + out.shift_applied);
                CHECK(*std::min_element(out.y_tilde.begin(), out.y_tilde.end()) >= 0.1 - 1e-15);
            }
        }
    }
}

TEST_CASE("validation and parsing")
{
    ResponseTransform t;
    CHECK_NOTHROW(t.validate());
    t.t1_scale = 0.0;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    t = {};
    t.t2_c0 = -1.0;
    CHECK_THROWS_AS(t.validate(), std::invalid_argument);
    CHECK(ResponseTransform::parse_kind("t1") == TransformKind::t1);
    CHECK(ResponseTransform::parse_kind("t2") == TransformKind::t2);
    CHECK_THROWS_AS(ResponseTransform::parse_kind("log"), std::invalid_argument);
    CHECK(to_string(TransformKind::t2) == "t2");
}
