#pragma once

#include <string>

#include "nbcs/geometry.hpp"
#include "nbcs/nested_system.hpp"

namespace nbcs {

inline constexpr int kSvgWidth = 1000;
inline constexpr int kSvgHeight = 900;

/// Planar drawing of one approximation stage: the region shaded, the leaf
/// triangles in red, the target outlined in black. `target` may be empty.
std::string render_stage_svg(const NestedSystem& sys, const WeightVector& w, const Polygon2D& target,
                             const std::string& title);

}  // namespace nbcs
