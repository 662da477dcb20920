#include "latincut/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "latincut/error.hpp"

namespace latincut {

std::string_view to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::None: return "none";
    case BoundaryTag::Bottom: return "bottom";
    case BoundaryTag::Right: return "right";
    case BoundaryTag::Top: return "top";
    case BoundaryTag::Left: return "left";
    case BoundaryTag::Embedded: return "embedded";
  }
  return "none";
}

std::string_view to_string(Diagonal diag) {
  switch (diag) {
    case Diagonal::BottomLeftToTopRight: return "bl-tr";
    case Diagonal::TopLeftToBottomRight: return "tl-br";
    case Diagonal::Alternating: return "alternating";
  }
  return "bl-tr";
}

std::optional<Diagonal> diagonal_from_string(std::string_view text) {
  if (text == "bl-tr") return Diagonal::BottomLeftToTopRight;
  if (text == "tl-br") return Diagonal::TopLeftToBottomRight;
  if (text == "alternating") return Diagonal::Alternating;
  return std::nullopt;
}

FaceTable face_adjacency(std::span<const Vec2> vertices,
                         std::span<const std::array<int, 3>> triangles) {
  struct HalfEdge {
    std::uint64_t key;
    int tri;
    int local;
  };
  const auto nv = static_cast<std::uint64_t>(vertices.size());
  std::vector<HalfEdge> half;
  half.reserve(3 * triangles.size());
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    for (int k = 0; k < 3; ++k) {
      auto a = static_cast<std::uint64_t>(triangles[t][k]);
      auto b = static_cast<std::uint64_t>(triangles[t][(k + 1) % 3]);
      if (a > b) std::swap(a, b);
      half.push_back({a * nv + b, t, k});
    }
  }
  std::sort(half.begin(), half.end(), [](const HalfEdge& l, const HalfEdge& r) {
    return l.key != r.key ? l.key < r.key : l.tri < r.tri;
  });

  FaceTable table;
  table.triangle_faces.assign(triangles.size(), {-1, -1, -1});
  for (std::size_t i = 0; i < half.size();) {
    std::size_t j = i;
    while (j < half.size() && half[j].key == half[i].key) ++j;
    if (j - i > 2) {
      throw Error(ErrorKind::InvalidMesh,
                  "non-manifold edge shared by " + std::to_string(j - i) + " triangles");
    }
    const HalfEdge& first = half[i];
    Face face;
    face.left = first.tri;
    face.vertices = {triangles[first.tri][first.local], triangles[first.tri][(first.local + 1) % 3]};
    if (j - i == 2) {
      face.right = half[i + 1].tri;
      // Both triangles traversing the edge in the same direction means inconsistent orientation.
      const auto& other = triangles[face.right];
      const int ol = half[i + 1].local;
      if (other[ol] == face.vertices[0]) {
        throw Error(ErrorKind::InvalidMesh, "inconsistently oriented neighbouring triangles");
      }
    }
    const Vec2 d = vertices[face.vertices[1]] - vertices[face.vertices[0]];
    face.length = norm(d);
    face.normal = Vec2{d.y, -d.x} * (1.0 / face.length);
    const int f = static_cast<int>(table.faces.size());
    for (std::size_t m = i; m < j; ++m) table.triangle_faces[half[m].tri][half[m].local] = f;
    table.faces.push_back(face);
    i = j;
  }
  return table;
}

TriMesh::TriMesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles, Rect rect)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), rect_(rect) {
  if (!(rect_.width() > 0.0) || !(rect_.height() > 0.0)) {
    throw Error(ErrorKind::InvalidGeometry, "background rectangle has zero area");
  }
  const int nv = static_cast<int>(vertices_.size());
  diameters_.resize(triangles_.size());
  h_ = 0.0;
  h_min_ = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int v : tri) {
      if (v < 0 || v >= nv) throw Error(ErrorKind::InvalidMesh, "triangle references missing vertex");
    }
    const auto c = corners(static_cast<int>(t));
    if (!(signed_area2(c[0], c[1], c[2]) > 0.0)) {
      throw Error(ErrorKind::InvalidMesh,
                  "triangle " + std::to_string(t) + " is not counter-clockwise with positive area");
    }
    double dmax = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double len = norm(c[(k + 1) % 3] - c[k]);
      dmax = std::max(dmax, len);
      h_min_ = std::min(h_min_, len);
    }
    diameters_[t] = dmax;
    h_ = std::max(h_, dmax);
  }

  auto table = face_adjacency(vertices_, triangles_);
  faces_ = std::move(table.faces);
  triangle_faces_ = std::move(table.triangle_faces);

  const double tol = 1e-12 * std::max(rect_.width(), rect_.height());
  auto on = [tol](double a, double b) { return std::abs(a - b) <= tol; };
  for (auto& f : faces_) {
    if (!f.is_boundary()) continue;
    const Vec2& a = vertices_[f.vertices[0]];
    const Vec2& b = vertices_[f.vertices[1]];
    if (on(a.y, rect_.lo.y) && on(b.y, rect_.lo.y)) f.tag = BoundaryTag::Bottom;
    else if (on(a.x, rect_.hi.x) && on(b.x, rect_.hi.x)) f.tag = BoundaryTag::Right;
    else if (on(a.y, rect_.hi.y) && on(b.y, rect_.hi.y)) f.tag = BoundaryTag::Top;
    else if (on(a.x, rect_.lo.x) && on(b.x, rect_.lo.x)) f.tag = BoundaryTag::Left;
  }
}

double TriMesh::area(int t) const {
  const auto c = corners(t);
  return 0.5 * signed_area2(c[0], c[1], c[2]);
}

Vec2 TriMesh::centroid(int t) const {
  const auto c = corners(t);
  return (1.0 / 3.0) * (c[0] + c[1] + c[2]);
}

std::array<Vec2, 3> TriMesh::corners(int t) const {
  const auto& tri = triangles_[t];
  return {vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]};
}

TriMesh build_structured_mesh(const Rect& rect, int nx, int ny, Diagonal diag) {
  if (nx < 1 || ny < 1) throw Error(ErrorKind::InvalidGeometry, "nx and ny must be at least 1");
  if (!(rect.width() > 0.0) || !(rect.height() > 0.0)) {
    throw Error(ErrorKind::InvalidGeometry, "background rectangle has zero area");
  }
  const double dx = rect.width() / nx;
  const double dy = rect.height() / ny;
  std::vector<Vec2> vertices;
  vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    const double y = (j == ny) ? rect.hi.y : rect.lo.y + j * dy;
    for (int i = 0; i <= nx; ++i) {
      const double x = (i == nx) ? rect.hi.x : rect.lo.x + i * dx;
      vertices.push_back({x, y});
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(2 * static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = id(i, j), v10 = id(i + 1, j), v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
      bool rising = diag == Diagonal::BottomLeftToTopRight ||
                    (diag == Diagonal::Alternating && (i + j) % 2 == 0);
      if (rising) {
        triangles.push_back({v00, v10, v11});
        triangles.push_back({v00, v11, v01});
      } else {
        triangles.push_back({v00, v10, v01});
        triangles.push_back({v10, v11, v01});
      }
    }
  }
  TriMesh mesh(std::move(vertices), std::move(triangles), rect);
  mesh.set_spacing(std::max(dx, dy));
  return mesh;
}

TriMesh refine_uniform(const TriMesh& mesh) {
  const int nv = static_cast<int>(mesh.num_vertices());
  std::vector<Vec2> vertices(mesh.vertices().begin(), mesh.vertices().end());
  vertices.reserve(nv + mesh.num_faces());
  for (const Face& f : mesh.faces()) {
    vertices.push_back(0.5 * (mesh.vertex(f.vertices[0]) + mesh.vertex(f.vertices[1])));
  }
  std::vector<std::array<int, 3>> triangles;
  triangles.reserve(4 * mesh.num_triangles());
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    const auto& tri = mesh.triangle(t);
    // m[k] is the midpoint of edge (tri[k], tri[k+1]).
    const std::array<int, 3> m = {nv + mesh.triangle_face(t, 0), nv + mesh.triangle_face(t, 1),
                                  nv + mesh.triangle_face(t, 2)};
    triangles.push_back({tri[0], m[0], m[2]});
    triangles.push_back({m[0], tri[1], m[1]});
    triangles.push_back({m[2], m[1], tri[2]});
    triangles.push_back({m[0], m[1], m[2]});
  }
  TriMesh fine(std::move(vertices), std::move(triangles), mesh.rect());
  fine.set_h(0.5 * mesh.h());
  fine.set_spacing(0.5 * mesh.spacing());
  return fine;
}

std::array<double, 3> barycentric(const std::array<Vec2, 3>& tri, const Vec2& p) {
  const double det = signed_area2(tri[0], tri[1], tri[2]);
  const double l1 = signed_area2(tri[0], p, tri[2]) / det;
  const double l2 = signed_area2(tri[0], tri[1], p) / det;
  return {1.0 - l1 - l2, l1, l2};
}

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(&mesh) {
  const Rect& r = mesh.rect();
  const auto nt = static_cast<double>(mesh.num_triangles());
  const int n = std::max(1, static_cast<int>(std::sqrt(nt / 2.0)));
  nbx_ = n;
  nby_ = n;
  bx_ = r.width() / nbx_;
  by_ = r.height() / nby_;
  std::vector<int> counts(static_cast<std::size_t>(nbx_) * nby_ + 1, 0);
  auto for_each_bucket = [&](int t, auto&& fn) {
    const auto c = mesh.corners(t);
    double xmin = std::min({c[0].x, c[1].x, c[2].x}), xmax = std::max({c[0].x, c[1].x, c[2].x});
    double ymin = std::min({c[0].y, c[1].y, c[2].y}), ymax = std::max({c[0].y, c[1].y, c[2].y});
    const auto lo = bucket_of({xmin, ymin});
    const auto hi = bucket_of({xmax, ymax});
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) fn(j * nbx_ + i);
  };
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    for_each_bucket(t, [&](int b) { ++counts[b + 1]; });
  }
  for (std::size_t b = 1; b < counts.size(); ++b) counts[b] += counts[b - 1];
  offsets_ = counts;
  items_.resize(offsets_.back());
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (int t = 0; t < static_cast<int>(mesh.num_triangles()); ++t) {
    for_each_bucket(t, [&](int b) { items_[fill[b]++] = t; });
  }
}

std::array<int, 2> PointLocator::bucket_of(const Vec2& p) const {
  const Rect& r = mesh_->rect();
  int i = static_cast<int>(std::floor((p.x - r.lo.x) / bx_));
  int j = static_cast<int>(std::floor((p.y - r.lo.y) / by_));
  return {std::clamp(i, 0, nbx_ - 1), std::clamp(j, 0, nby_ - 1)};
}

bool PointLocator::contains(int t, const Vec2& p) const {
  const auto b = barycentric(mesh_->corners(t), p);
  constexpr double tol = -1e-10;
  return b[0] >= tol && b[1] >= tol && b[2] >= tol;
}

std::optional<int> PointLocator::locate(const Vec2& p) const {
  const auto b = bucket_of(p);
  const int id = b[1] * nbx_ + b[0];
  for (int k = offsets_[id]; k < offsets_[id + 1]; ++k) {
    if (contains(items_[k], p)) return items_[k];
  }
  return std::nullopt;
}

std::vector<int> PointLocator::locate_all(const Vec2& p) const {
  std::vector<int> out;
  const auto b = bucket_of(p);
  const int id = b[1] * nbx_ + b[0];
  for (int k = offsets_[id]; k < offsets_[id + 1]; ++k) {
    if (contains(items_[k], p)) out.push_back(items_[k]);
  }
  return out;
}

}  // namespace latincut
