#include "latincut/fespace.hpp"

#include "latincut/error.hpp"

namespace latincut {

FESpace::FESpace(const TriMesh& mesh, const CutDomain& domain)
    : mesh_(&mesh), domain_(&domain), local_(mesh.num_vertices(), -1) {
  std::vector<char> used(mesh.num_vertices(), 0);
  for (int c : domain.fictitious_cells)
    for (int v : mesh.triangle(c)) used[v] = 1;
  for (int v = 0; v < static_cast<int>(used.size()); ++v) {
    if (!used[v]) continue;
    local_[v] = static_cast<int>(vertices_.size());
    vertices_.push_back(v);
  }
}

std::array<int, 3> FESpace::cell_vertices(int cell) const {
  const auto& tri = mesh_->triangle(cell);
  const std::array<int, 3> out = {local_[tri[0]], local_[tri[1]], local_[tri[2]]};
  if (out[0] < 0 || out[1] < 0 || out[2] < 0) {
    throw Error(ErrorKind::Dimension, "cell " + std::to_string(cell) + " is not in the fictitious domain");
  }
  return out;
}

P1Element::P1Element(const std::array<Vec2, 3>& c) : corners(c) {
  const double det = signed_area2(c[0], c[1], c[2]);
  area = 0.5 * det;
  for (int k = 0; k < 3; ++k) {
    const Vec2& a = c[(k + 1) % 3];
    const Vec2& b = c[(k + 2) % 3];
    // Gradient of the barycentric coordinate of corner k: rotated opposite edge over 2*area.
    grad[k] = {(a.y - b.y) / det, (b.x - a.x) / det};
  }
}

std::array<double, 3> P1Element::shape(const Vec2& p) const { return barycentric(corners, p); }

}  // namespace latincut
