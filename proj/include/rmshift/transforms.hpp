#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace rmshift {

enum class TransformKind { t1, t2 };

/// Strictly increasing map making the responses positive before fitting.
///
/// t1: bounded logistic, y -> 1 / (1 + exp(-t1_scale * y)) + t1_offset.
/// t2: uniform shift, y -> y + max(t2_c0 - min_i y_i, 0). Depends on the
///     whole sample through its minimum.
struct ResponseTransform {
    TransformKind kind = TransformKind::t1;
    double t1_scale = 10.0;
    double t1_offset = 0.01;
    double t2_c0 = 0.1;

    /// Throws std::invalid_argument unless all parameters are positive.
    void validate() const;

    static TransformKind parse_kind(std::string_view name);
};

std::string_view to_string(TransformKind kind) noexcept;

struct TransformedResponses {
    std::vector<double> y_tilde;
    double shift_applied = 0.0;  // 0 for t1
};

TransformedResponses apply_t1(std::span<const double> y, double scale, double offset);
TransformedResponses apply_t2(std::span<const double> y, double c0);
TransformedResponses apply_transform(std::span<const double> y, const ResponseTransform& transform);

}  // namespace rmshift
