#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "latincut/mesh.hpp"

namespace latincut {

/// Analytic level-set functions used to describe subdomains (negative inside).
class LevelSetFunction {
 public:
  enum class Kind { Ellipse, Circle, HalfPlane, MinUnion };

  /// sqrt(((x-cx)/a)^2 + ((y-cy)/b)^2) - r
  static LevelSetFunction ellipse(double a, double b, double r, Vec2 center = {});
  /// |x - center| - r
  static LevelSetFunction circle(Vec2 center, double r);
  /// c + gx*x + gy*y
  static LevelSetFunction halfplane(double c, double gx, double gy);
  /// min over the children (union of their negative regions)
  static LevelSetFunction min_union(std::vector<LevelSetFunction> children);

  Kind kind() const { return kind_; }
  std::span<const double> parameters() const { return params_; }
  std::span<const LevelSetFunction> children() const { return children_; }

  double operator()(const Vec2& p) const;

  /// Text form, e.g. "ellipse(1, 0.5, 0.654545, 0, 0)"; numbers round-trip exactly.
  std::string to_string() const;
  /// Inverse of to_string; throws Parse on malformed input.
  static LevelSetFunction parse(std::string_view text);

  friend bool operator==(const LevelSetFunction&, const LevelSetFunction&) = default;

 private:
  LevelSetFunction(Kind kind, std::vector<double> params, std::vector<LevelSetFunction> children)
      : kind_(kind), params_(std::move(params)), children_(std::move(children)) {}

  Kind kind_;
  std::vector<double> params_;
  std::vector<LevelSetFunction> children_;
};

/// P1 nodal interpolant of a level-set function on a background mesh.
class DiscreteLevelSet {
 public:
  DiscreteLevelSet(std::shared_ptr<const TriMesh> mesh, std::vector<double> nodal_values);

  const TriMesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const TriMesh>& mesh_ptr() const { return mesh_; }
  /// Interpolated values, exactly the function at each vertex.
  std::span<const double> nodal_values() const { return values_; }
  /// Values used for classification: |phi| < 1e-12 h is moved to +1e-12 h.
  std::span<const double> classification_values() const { return perturbed_; }

  /// Barycentric interpolation of the classification values inside triangle t.
  double value_in(int t, const Vec2& p) const;
  /// Constant gradient of the interpolant on triangle t.
  Vec2 gradient(int t) const;

 private:
  std::shared_ptr<const TriMesh> mesh_;
  std::vector<double> values_;
  std::vector<double> perturbed_;
};

DiscreteLevelSet interpolate_levelset(const LevelSetFunction& fn,
                                      std::shared_ptr<const TriMesh> mesh);

}  // namespace latincut
