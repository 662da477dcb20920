#pragma once

#include <array>
#include <span>
#include <vector>

#include "latincut/geometry.hpp"

namespace latincut {

/// Vector P1 space on the fictitious cells of one cut domain. Local vertex v owns
/// dofs 2v (x) and 2v+1 (y). References mesh and domain; both must outlive it.
class FESpace {
 public:
  FESpace(const TriMesh& mesh, const CutDomain& domain);

  const TriMesh& mesh() const { return *mesh_; }
  const CutDomain& domain() const { return *domain_; }

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_dofs() const { return 2 * num_vertices(); }
  /// Mesh vertex of each local vertex, increasing.
  std::span<const int> vertices() const { return vertices_; }
  /// Local index of a mesh vertex, -1 when it carries no dofs.
  int local(int vertex) const { return local_[vertex]; }
  int dof(int vertex, int component) const { return 2 * local_[vertex] + component; }
  /// Local vertex indices of a fictitious cell.
  std::array<int, 3> cell_vertices(int cell) const;

 private:
  const TriMesh* mesh_;
  const CutDomain* domain_;
  std::vector<int> vertices_;
  std::vector<int> local_;
};

/// P1 shape data of one triangle: gradients are constant.
struct P1Element {
  std::array<Vec2, 3> corners;
  std::array<Vec2, 3> grad;
  double area = 0.0;

  explicit P1Element(const std::array<Vec2, 3>& c);
  std::array<double, 3> shape(const Vec2& p) const;
};

}  // namespace latincut
