#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "latincut/vec2.hpp"

namespace latincut {

struct Rect {
  Vec2 lo;
  Vec2 hi;

  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
  double area() const { return width() * height(); }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Orientation of the diagonal splitting each lattice cell of a structured grid.
enum class Diagonal {
  BottomLeftToTopRight,
  TopLeftToBottomRight,
  Alternating,
};

enum class BoundaryTag : std::uint8_t { None, Bottom, Right, Top, Left, Embedded };

std::string_view to_string(BoundaryTag tag);
std::string_view to_string(Diagonal diag);
std::optional<Diagonal> diagonal_from_string(std::string_view text);

inline constexpr int kNoTriangle = -1;

struct Face {
  std::array<int, 2> vertices;
  int left = kNoTriangle;   // triangle traversing the edge counter-clockwise
  int right = kNoTriangle;  // kNoTriangle on the boundary
  BoundaryTag tag = BoundaryTag::None;
  Vec2 normal;  // unit, pointing from left to right (outward on the boundary)
  double length = 0.0;

  bool is_boundary() const { return right == kNoTriangle; }
};

/// Background triangulation with face adjacency. Immutable after construction.
class TriMesh {
 public:
  /// Validates orientation and connectivity, then builds faces.
  /// Boundary faces lying on a side of `rect` are tagged with that side.
  TriMesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles, Rect rect);

  std::span<const Vec2> vertices() const { return vertices_; }
  std::span<const std::array<int, 3>> triangles() const { return triangles_; }
  std::span<const Face> faces() const { return faces_; }
  const Vec2& vertex(int v) const { return vertices_[v]; }
  const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
  const Face& face(int f) const { return faces_[f]; }
  /// Face index of edge (v[k], v[k+1 mod 3]) of triangle t.
  int triangle_face(int t, int k) const { return triangle_faces_[t][k]; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_triangles() const { return triangles_.size(); }
  std::size_t num_faces() const { return faces_.size(); }

  const Rect& rect() const { return rect_; }
  /// Maximum edge length over the mesh.
  double h() const { return h_; }
  double h_min() const { return h_min_; }
  /// Spacing of the generating lattice for structured meshes (halved by refinement).
  double spacing() const { return spacing_; }
  double area(int t) const;
  /// Longest edge of triangle t.
  double diameter(int t) const { return diameters_[t]; }
  Vec2 centroid(int t) const;
  std::array<Vec2, 3> corners(int t) const;

  // Set by the structured constructor / refinement.
  void set_spacing(double s) { spacing_ = s; }
  void set_h(double h) { h_ = h; }

 private:
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Face> faces_;
  std::vector<std::array<int, 3>> triangle_faces_;
  std::vector<double> diameters_;
  Rect rect_;
  double h_ = 0.0;
  double h_min_ = 0.0;
  double spacing_ = 0.0;
};

/// Faces of a triangulation with their adjacent triangles.
/// Throws InvalidMesh if an edge is shared by more than two triangles.
struct FaceTable {
  std::vector<Face> faces;
  std::vector<std::array<int, 3>> triangle_faces;
};
FaceTable face_adjacency(std::span<const Vec2> vertices,
                         std::span<const std::array<int, 3>> triangles);

TriMesh build_structured_mesh(const Rect& rect, int nx, int ny,
                              Diagonal diag = Diagonal::BottomLeftToTopRight);

/// Splits every triangle into four through its edge midpoints. Midpoint vertices are
/// numbered after the parent vertices in parent face order.
TriMesh refine_uniform(const TriMesh& mesh);

/// Uniform bucket grid over the mesh bounding box for point-in-triangle queries.
class PointLocator {
 public:
  explicit PointLocator(const TriMesh& mesh);

  /// Some triangle containing p (within a relative tolerance), or nullopt.
  std::optional<int> locate(const Vec2& p) const;
  /// All triangles containing p within tolerance.
  std::vector<int> locate_all(const Vec2& p) const;

 private:
  bool contains(int t, const Vec2& p) const;
  std::array<int, 2> bucket_of(const Vec2& p) const;

  const TriMesh* mesh_;
  int nbx_ = 1;
  int nby_ = 1;
  double bx_ = 1.0;
  double by_ = 1.0;
  std::vector<int> offsets_;
  std::vector<int> items_;
};

/// Barycentric coordinates of p with respect to the triangle (a, b, c).
std::array<double, 3> barycentric(const std::array<Vec2, 3>& tri, const Vec2& p);

}  // namespace latincut
