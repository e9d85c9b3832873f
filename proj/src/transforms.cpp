#include "rmshift/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rmshift {

void ResponseTransform::validate() const
{
    if (!(t1_scale > 0.0) || !(t1_offset > 0.0) || !(t2_c0 > 0.0)) {
        throw std::invalid_argument("transform parameters t1_scale, t1_offset and t2_c0 must be positive");
    }
}

TransformKind ResponseTransform::parse_kind(std::string_view name)
{
    if (name == "t1" || name == "T1") return TransformKind::t1;
    if (name == "t2" || name == "T2") return TransformKind::t2;
    throw std::invalid_argument("unknown transform '" + std::string(name) + "' (expected t1 or t2)");
}

std::string_view to_string(TransformKind kind) noexcept
{
    return kind == TransformKind::t1 ? "t1" : "t2";
}

TransformedResponses apply_t1(std::span<const double> y, double scale, double offset)
{
    if (y.empty()) throw std::invalid_argument("apply_t1: empty response vector");
    if (!(scale > 0.0) || !(offset > 0.0)) throw std::invalid_argument("apply_t1: scale and offset must be positive");
    TransformedResponses out;
    out.y_tilde.reserve(y.size());
    for (double v : y) out.y_tilde.push_back(1.0 / (1.0 + std::exp(-scale * v)) + offset);
    return out;
}

TransformedResponses apply_t2(std::span<const double> y, double c0)
{
    if (y.empty()) throw std::invalid_argument("apply_t2: empty response vector");
    if (!(c0 > 0.0)) throw std::invalid_argument("apply_t2: c0 must be positive");
    const double lowest = *std::min_element(y.begin(), y.end());
    TransformedResponses out;
    out.shift_applied = lowest < c0 ? c0 - lowest : 0.0;
    out.y_tilde.reserve(y.size());
    for (double v : y) out.y_tilde.push_back(v + out.shift_applied);
    return out;
}

TransformedResponses apply_transform(std::span<const double> y, const ResponseTransform& transform)
{
    transform.validate();
    if (transform.kind == TransformKind::t1) return apply_t1(y, transform.t1_scale, transform.t1_offset);
    return apply_t2(y, transform.t2_c0);
}

}  // namespace rmshift
