#include "latincut/quadrature.hpp"

#include <cmath>
#include <string>

#include "latincut/error.hpp"

namespace latincut {

namespace {

LineRule make_rule(int n) {
  // Reference rules on [-1, 1].
  std::vector<double> x, w;
  switch (n) {
    case 1:
      x = {0.0};
      w = {2.0};
      break;
    case 2: {
      const double a = 1.0 / std::sqrt(3.0);
      x = {-a, a};
      w = {1.0, 1.0};
      break;
    }
    case 3: {
      const double a = std::sqrt(3.0 / 5.0);
      x = {-a, 0.0, a};
      w = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
      break;
    }
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      x = {-b, -a, a, b};
      w = {wb, wa, wa, wb};
      break;
    }
    case 5: {
      const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      x = {-b, -a, 0.0, a, b};
      w = {wb, wa, 128.0 / 225.0, wa, wb};
      break;
    }
    default:
      throw Error(ErrorKind::Validation, "Gauss rule with " + std::to_string(n) + " points not available");
  }
  LineRule rule;
  for (std::size_t i = 0; i < x.size(); ++i) {
    rule.t.push_back(0.5 * (x[i] + 1.0));
    rule.w.push_back(0.5 * w[i]);
  }
  return rule;
}

}  // namespace

const LineRule& gauss_legendre(int n) {
  static const std::array<LineRule, 5> rules = {make_rule(1), make_rule(2), make_rule(3), make_rule(4),
                                                make_rule(5)};
  if (n < 1 || n > 5) {
    throw Error(ErrorKind::Validation, "Gauss rule with " + std::to_string(n) + " points not available");
  }
  return rules[n - 1];
}

void append_segment_rule(const Vec2& a, const Vec2& b, int n, std::vector<QuadPoint>& out) {
  const LineRule& rule = gauss_legendre(n);
  const double len = norm(b - a);
  for (std::size_t i = 0; i < rule.t.size(); ++i) {
    out.push_back({lerp(a, b, rule.t[i]), rule.w[i] * len});
  }
}

void append_triangle_rule(const std::array<Vec2, 3>& tri, std::vector<QuadPoint>& out) {
  const double area = 0.5 * std::abs(signed_area2(tri[0], tri[1], tri[2]));
  constexpr double a = 2.0 / 3.0, b = 1.0 / 6.0;
  const double w = area / 3.0;
  out.push_back({a * tri[0] + b * tri[1] + b * tri[2], w});
  out.push_back({b * tri[0] + a * tri[1] + b * tri[2], w});
  out.push_back({b * tri[0] + b * tri[1] + a * tri[2], w});
}

}  // namespace latincut
