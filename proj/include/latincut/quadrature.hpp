#pragma once

#include <array>
#include <span>
#include <vector>

#include "latincut/vec2.hpp"

namespace latincut {

struct QuadPoint {
  Vec2 point;
  double weight = 0.0;
};

/// Gauss-Legendre abscissae on [0, 1] with weights summing to one; n in 1..5.
struct LineRule {
  std::vector<double> t;
  std::vector<double> w;
};
const LineRule& gauss_legendre(int n);

/// Maps the n-point Gauss rule onto segment [a, b]; weights sum to |b - a|.
void append_segment_rule(const Vec2& a, const Vec2& b, int n, std::vector<QuadPoint>& out);

/// Degree-2 three-point rule on triangle (a, b, c); weights sum to its area.
void append_triangle_rule(const std::array<Vec2, 3>& tri, std::vector<QuadPoint>& out);

}  // namespace latincut
