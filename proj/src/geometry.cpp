#include "latincut/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "latincut/error.hpp"

namespace latincut {

int classify_values(std::span<const double> phi) {
  for (int k = static_cast<int>(phi.size()) - 1; k >= 0; --k) {
    if (phi[k] < 0.0) return k + 1;
  }
  return 0;
}

int classify_point(const Vec2& x, std::span<const DiscreteLevelSet> levelsets) {
  if (levelsets.empty()) return 0;
  const PointLocator locator(levelsets.front().mesh());
  const auto cell = locator.locate(x);
  if (!cell) throw Error(ErrorKind::InvalidGeometry, "point outside the background mesh");
  std::vector<double> phi;
  phi.reserve(levelsets.size());
  for (const auto& ls : levelsets) phi.push_back(ls.value_in(*cell, x));
  return classify_values(phi);
}

SubdomainGrouping SubdomainGrouping::identity(int num_levelsets) {
  SubdomainGrouping g;
  for (int i = 0; i <= num_levelsets; ++i) g.aux_to_phys.push_back(i);
  return g;
}

int SubdomainGrouping::num_physical() const {
  int n = 0;
  for (int p : aux_to_phys) n = std::max(n, p + 1);
  return n;
}

namespace {

using Polygon = std::vector<Vec2>;

double polygon_area(const Polygon& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

// Splits a convex polygon by the sign of f (zero counts as positive).
template <class Field>
void split_polygon(const Polygon& poly, const Field& f, Polygon& neg, Polygon& pos) {
  neg.clear();
  pos.clear();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % n];
    const double fa = f(a), fb = f(b);
    (fa < 0.0 ? neg : pos).push_back(a);
    if ((fa < 0.0) != (fb < 0.0)) {
      const Vec2 p = lerp(a, b, fa / (fa - fb));
      neg.push_back(p);
      pos.push_back(p);
    }
  }
}

void fan_triangulate(const Polygon& poly, double min_area, std::vector<Triangle2>& out) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    const Triangle2 tri = {poly[0], poly[k], poly[k + 1]};
    if (0.5 * signed_area2(tri[0], tri[1], tri[2]) > min_area) out.push_back(tri);
  }
}

struct AffineField {
  Vec2 origin;
  double value = 0.0;
  Vec2 grad;

  double operator()(const Vec2& p) const { return value + dot(grad, p - origin); }
};

AffineField affine_field(const Triangle2& c, const std::array<double, 3>& phi) {
  const double det = signed_area2(c[0], c[1], c[2]);
  const Vec2 e1 = c[1] - c[0];
  const Vec2 e2 = c[2] - c[0];
  const double d1 = phi[1] - phi[0];
  const double d2 = phi[2] - phi[0];
  return {c[0], phi[0], {(d1 * e2.y - d2 * e1.y) / det, (e1.x * d2 - e2.x * d1) / det}};
}

struct CellPiece {
  int phys;
  Triangle2 tri;
};

struct CellSegment {
  Vec2 a, b;
  int levelset;
  int phys_neg;  // physical subdomain on the negative side of the governing level set
  int phys_pos;
  Vec2 into_neg;  // unit normal pointing into the negative side
};

// Per-cell view of all level sets: nodal values, affine fields and which ones change sign.
class CellCut {
 public:
  CellCut(const TriMesh& mesh, std::span<const DiscreteLevelSet> levelsets, int cell)
      : corners_(mesh.corners(cell)) {
    const auto& tri = mesh.triangle(cell);
    const double zero_tol = 1e-12 * mesh.h();
    const std::size_t m = levelsets.size();
    nodal_.resize(m);
    fields_.resize(m);
    for (std::size_t l = 0; l < m; ++l) {
      const auto raw = levelsets[l].nodal_values();
      if (std::abs(raw[tri[0]]) < zero_tol && std::abs(raw[tri[1]]) < zero_tol &&
          std::abs(raw[tri[2]]) < zero_tol) {
        throw Error(ErrorKind::DegenerateCut,
                    "level set " + std::to_string(l + 1) + " vanishes on all vertices of cell " +
                        std::to_string(cell));
      }
      const auto vals = levelsets[l].classification_values();
      nodal_[l] = {vals[tri[0]], vals[tri[1]], vals[tri[2]]};
      const double lo = std::min({nodal_[l][0], nodal_[l][1], nodal_[l][2]});
      const double hi = std::max({nodal_[l][0], nodal_[l][1], nodal_[l][2]});
      if (lo < 0.0 && hi >= 0.0) {
        cut_.push_back(static_cast<int>(l));
        fields_[l] = affine_field(corners_, nodal_[l]);
      } else {
        // Constant sign: a constant field with the right sign is all classification needs.
        fields_[l] = {corners_[0], lo < 0.0 ? -1.0 : 1.0, {0.0, 0.0}};
      }
    }
  }

  bool uncut() const { return cut_.empty(); }
  std::span<const int> cut_levelsets() const { return cut_; }
  const Triangle2& corners() const { return corners_; }
  const AffineField& field(int l) const { return fields_[l]; }
  const std::array<double, 3>& nodal(int l) const { return nodal_[l]; }

  int classify_at(const Vec2& p, std::vector<double>& scratch, int forced = -1, double forced_value = 0.0) const {
    scratch.resize(fields_.size());
    for (std::size_t l = 0; l < fields_.size(); ++l) scratch[l] = fields_[l](p);
    if (forced >= 0) scratch[forced] = forced_value;
    return classify_values(scratch);
  }

  // Splits a segment at the zero crossings of every cut level set except `skip`.
  std::vector<std::array<Vec2, 2>> split_segment(const Vec2& a, const Vec2& b, int skip) const {
    std::vector<double> ts = {0.0, 1.0};
    for (int l : cut_) {
      if (l == skip) continue;
      const double fa = fields_[l](a), fb = fields_[l](b);
      if ((fa < 0.0) != (fb < 0.0)) ts.push_back(fa / (fa - fb));
    }
    std::sort(ts.begin(), ts.end());
    std::vector<std::array<Vec2, 2>> out;
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      if (ts[k + 1] - ts[k] <= 1e-14) continue;
      out.push_back({lerp(a, b, ts[k]), lerp(a, b, ts[k + 1])});
    }
    return out;
  }

 private:
  Triangle2 corners_;
  std::vector<std::array<double, 3>> nodal_;
  std::vector<AffineField> fields_;
  std::vector<int> cut_;
};

int to_phys(const SubdomainGrouping& g, int aux) { return g.aux_to_phys.at(aux); }

// Decomposes one cell into labelled physical pieces and labelled interface segments.
// Returns the physical index when the whole cell belongs to one auxiliary subdomain.
std::optional<int> decompose_cell(const TriMesh& mesh, const CellCut& cut, const SubdomainGrouping& grouping,
                                  int cell, std::vector<CellPiece>& pieces, std::vector<CellSegment>* segments) {
  pieces.clear();
  if (segments) segments->clear();
  std::vector<double> scratch;
  if (cut.uncut()) {
    return to_phys(grouping, cut.classify_at(cut.corners()[0], scratch));
  }
  const double min_area = 1e-26 * mesh.area(cell);
  std::vector<Polygon> polys = {Polygon(cut.corners().begin(), cut.corners().end())};
  std::vector<Polygon> next;
  Polygon neg, pos;
  const auto levels = cut.cut_levelsets();
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    next.clear();
    const AffineField& f = cut.field(*it);
    for (const auto& poly : polys) {
      split_polygon(poly, f, neg, pos);
      if (neg.size() >= 3 && polygon_area(neg) > min_area) next.push_back(neg);
      if (pos.size() >= 3 && polygon_area(pos) > min_area) next.push_back(pos);
    }
    polys.swap(next);
  }
  std::vector<Triangle2> tris;
  for (const auto& poly : polys) {
    Vec2 c{};
    for (const Vec2& p : poly) c += p;
    c *= 1.0 / static_cast<double>(poly.size());
    const int phys = to_phys(grouping, cut.classify_at(c, scratch));
    tris.clear();
    fan_triangulate(poly, min_area, tris);
    for (const auto& t : tris) pieces.push_back({phys, t});
  }

  if (segments) {
    const Triangle2& corners = cut.corners();
    const double min_len = 1e-14 * mesh.diameter(cell);
    for (int l : levels) {
      const auto& phi = cut.nodal(l);
      std::array<Vec2, 2> ends{};
      int found = 0;
      for (int k = 0; k < 3 && found < 2; ++k) {
        const double fa = phi[k], fb = phi[(k + 1) % 3];
        if ((fa < 0.0) != (fb < 0.0)) ends[found++] = lerp(corners[k], corners[(k + 1) % 3], fa / (fa - fb));
      }
      if (found != 2) continue;
      const Vec2 into_neg = -normalized(cut.field(l).grad);
      for (const auto& s : cut.split_segment(ends[0], ends[1], l)) {
        if (norm(s[1] - s[0]) <= min_len) continue;
        const Vec2 mid = 0.5 * (s[0] + s[1]);
        const int pn = to_phys(grouping, cut.classify_at(mid, scratch, l, -1.0));
        const int pp = to_phys(grouping, cut.classify_at(mid, scratch, l, 1.0));
        if (pn == pp) continue;
        segments->push_back({s[0], s[1], l, pn, pp, into_neg});
      }
    }
  }
  return std::nullopt;
}

}  // namespace

SubTriangulation subtriangulate(const Triangle2& tri, const std::array<double, 3>& nodal_phi) {
  if (nodal_phi[0] == 0.0 && nodal_phi[1] == 0.0 && nodal_phi[2] == 0.0) {
    throw Error(ErrorKind::DegenerateCut, "level set vanishes on the whole triangle");
  }
  SubTriangulation out;
  const AffineField f = affine_field(tri, nodal_phi);
  // Use nodal values at the corners so the sign test is exact there.
  auto field = [&](const Vec2& p) {
    for (int k = 0; k < 3; ++k)
      if (p == tri[k]) return nodal_phi[k];
    return f(p);
  };
  Polygon neg, pos;
  split_polygon(Polygon(tri.begin(), tri.end()), field, neg, pos);
  const double area = 0.5 * signed_area2(tri[0], tri[1], tri[2]);
  const double min_area = 1e-26 * area;
  if (neg.size() >= 3) fan_triangulate(neg, min_area, out.negative);
  if (pos.size() >= 3) fan_triangulate(pos, min_area, out.positive);
  if (!out.negative.empty() && !out.positive.empty()) {
    std::array<Vec2, 2> ends{};
    int found = 0;
    for (int k = 0; k < 3 && found < 2; ++k) {
      const double fa = nodal_phi[k], fb = nodal_phi[(k + 1) % 3];
      if ((fa < 0.0) != (fb < 0.0)) ends[found++] = lerp(tri[k], tri[(k + 1) % 3], fa / (fa - fb));
    }
    if (found == 2) out.segment = ends;
  }
  return out;
}

Classification classify_elements(const TriMesh& mesh, std::span<const DiscreteLevelSet> levelsets,
                                 const std::optional<SubdomainGrouping>& grouping) {
  const SubdomainGrouping g =
      grouping.value_or(SubdomainGrouping::identity(static_cast<int>(levelsets.size())));
  Classification out;
  out.num_subdomains = g.num_physical();
  out.num_cells = static_cast<int>(mesh.num_triangles());
  out.status.assign(static_cast<std::size_t>(out.num_subdomains) * out.num_cells, CellStatus::Outside);
  std::vector<CellPiece> pieces;
  std::vector<int> seen;
  for (int t = 0; t < out.num_cells; ++t) {
    const CellCut cut(mesh, levelsets, t);
    const auto whole = decompose_cell(mesh, cut, g, t, pieces, nullptr);
    if (whole) {
      if (*whole >= 0) out.status[static_cast<std::size_t>(*whole) * out.num_cells + t] = CellStatus::Inside;
      continue;
    }
    seen.clear();
    bool has_void = false;
    for (const auto& p : pieces) {
      if (p.phys < 0) has_void = true;
      else if (std::find(seen.begin(), seen.end(), p.phys) == seen.end()) seen.push_back(p.phys);
    }
    const CellStatus s = (seen.size() == 1 && !has_void) ? CellStatus::Inside : CellStatus::Cut;
    for (int p : seen) out.status[static_cast<std::size_t>(p) * out.num_cells + t] = s;
  }
  return out;
}

double CutDomain::area() const {
  double a = 0.0;
  for (const auto& c : cells) a += c.area;
  return a;
}

void CutDomain::physical_triangles(const TriMesh& mesh, const PhysicalCell& pc, std::vector<Triangle2>& out) const {
  if (pc.status == CellStatus::Inside) {
    out.push_back(mesh.corners(pc.cell));
    return;
  }
  for (int k = pc.piece_begin; k < pc.piece_end; ++k) out.push_back(pieces[k]);
}

void CutDomain::quadrature(const TriMesh& mesh, const PhysicalCell& pc, std::vector<QuadPoint>& out) const {
  if (pc.status == CellStatus::Inside) {
    append_triangle_rule(mesh.corners(pc.cell), out);
    return;
  }
  for (int k = pc.piece_begin; k < pc.piece_end; ++k) append_triangle_rule(pieces[k], out);
}

int InterfaceMesh::band_index(int vertex) const {
  const auto it = std::lower_bound(band_vertices.begin(), band_vertices.end(), vertex);
  if (it == band_vertices.end() || *it != vertex) return -1;
  return static_cast<int>(it - band_vertices.begin());
}

double InterfaceMesh::length() const {
  double l = 0.0;
  for (const auto& s : segments) l += s.length();
  return l;
}

Vec2 InterfaceMesh::normal(std::size_t s, int side) const {
  return side == pair[0] ? segments[s].normal : -segments[s].normal;
}

const InterfaceMesh* Geometry::find_interface(int i, int j) const {
  const std::array<int, 2> key = {std::min(i, j), std::max(i, j)};
  for (const auto& iface : interfaces)
    if (iface.pair == key) return &iface;
  return nullptr;
}

std::vector<const InterfaceMesh*> Geometry::interfaces_of(int i) const {
  std::vector<const InterfaceMesh*> out;
  for (const auto& iface : interfaces)
    if (iface.pair[0] == i || iface.pair[1] == i) out.push_back(&iface);
  return out;
}

namespace {

void finalize_interface(const TriMesh& mesh, InterfaceMesh& iface) {
  iface.quadrature.clear();
  for (const auto& s : iface.segments) append_segment_rule(s.a, s.b, iface.points_per_segment, iface.quadrature);

  for (const auto& s : iface.segments) iface.band_cells.push_back(s.cell);
  std::sort(iface.band_cells.begin(), iface.band_cells.end());
  iface.band_cells.erase(std::unique(iface.band_cells.begin(), iface.band_cells.end()), iface.band_cells.end());

  for (int c : iface.band_cells)
    for (int v : mesh.triangle(c)) iface.band_vertices.push_back(v);
  std::sort(iface.band_vertices.begin(), iface.band_vertices.end());
  iface.band_vertices.erase(std::unique(iface.band_vertices.begin(), iface.band_vertices.end()),
                            iface.band_vertices.end());

  for (int c : iface.band_cells) {
    const auto& tri = mesh.triangle(c);
    iface.band_cell_dofs.push_back({iface.band_index(tri[0]), iface.band_index(tri[1]), iface.band_index(tri[2])});
  }
  auto band_pos = [&](int cell) {
    const auto it = std::lower_bound(iface.band_cells.begin(), iface.band_cells.end(), cell);
    return (it != iface.band_cells.end() && *it == cell) ? static_cast<int>(it - iface.band_cells.begin()) : -1;
  };
  for (const auto& s : iface.segments) iface.segment_band_cell.push_back(band_pos(s.cell));

  for (int c : iface.band_cells) {
    for (int k = 0; k < 3; ++k) {
      const int f = mesh.triangle_face(c, k);
      const Face& face = mesh.face(f);
      if (face.is_boundary()) continue;
      const int other = face.left == c ? face.right : face.left;
      if (band_pos(other) >= 0) iface.interior_faces.push_back(f);
    }
  }
  std::sort(iface.interior_faces.begin(), iface.interior_faces.end());
  iface.interior_faces.erase(std::unique(iface.interior_faces.begin(), iface.interior_faces.end()),
                             iface.interior_faces.end());
}

}  // namespace

Geometry build_geometry(std::shared_ptr<const TriMesh> mesh, std::vector<DiscreteLevelSet> levelsets,
                        std::span<const Material> materials, const GeometryOptions& options) {
  for (const auto& ls : levelsets) {
    if (&ls.mesh() != mesh.get()) throw Error(ErrorKind::InvalidGeometry, "level set lives on a different mesh");
  }
  gauss_legendre(options.interface_points);  // validates the order

  Geometry geo;
  geo.mesh = mesh;
  geo.levelsets = std::move(levelsets);
  geo.grouping = options.grouping.value_or(SubdomainGrouping::identity(static_cast<int>(geo.levelsets.size())));
  if (geo.grouping.aux_to_phys.size() != geo.levelsets.size() + 1) {
    throw Error(ErrorKind::Validation, "grouping table needs one entry per auxiliary subdomain");
  }
  const int nphys = geo.grouping.num_physical();
  if (!materials.empty() && static_cast<int>(materials.size()) != nphys) {
    throw Error(ErrorKind::Validation, "need one material per physical subdomain");
  }
  const int ncells = static_cast<int>(mesh->num_triangles());
  geo.domains.resize(nphys);
  for (int p = 0; p < nphys; ++p) {
    geo.domains[p].index = p;
    if (!materials.empty()) geo.domains[p].material = materials[p];
    geo.domains[p].status.assign(ncells, CellStatus::Outside);
  }

  std::map<std::array<int, 2>, InterfaceMesh> ifaces;
  std::vector<CellPiece> pieces;
  std::vector<CellSegment> segments;
  std::vector<double> phys_area(nphys);
  std::vector<char> has_piece(nphys), has_segment(nphys);

  for (int t = 0; t < ncells; ++t) {
    const CellCut cut(*mesh, geo.levelsets, t);
    const auto whole = decompose_cell(*mesh, cut, geo.grouping, t, pieces, &segments);
    if (whole) {
      if (*whole >= 0) {
        CutDomain& d = geo.domains[*whole];
        d.status[t] = CellStatus::Inside;
        d.cells.push_back({t, CellStatus::Inside, mesh->area(t), 0, 0});
      }
      continue;
    }
    std::fill(phys_area.begin(), phys_area.end(), 0.0);
    std::fill(has_piece.begin(), has_piece.end(), 0);
    std::fill(has_segment.begin(), has_segment.end(), 0);
    int distinct = 0;
    bool has_void = false;
    for (const auto& p : pieces) {
      if (p.phys < 0) {
        has_void = true;
        continue;
      }
      if (!has_piece[p.phys]) ++distinct;
      has_piece[p.phys] = 1;
      phys_area[p.phys] += 0.5 * signed_area2(p.tri[0], p.tri[1], p.tri[2]);
    }
    for (const auto& s : segments) {
      if (s.phys_neg >= 0) has_segment[s.phys_neg] = 1;
      if (s.phys_pos >= 0) has_segment[s.phys_pos] = 1;
    }
    const bool single = distinct == 1 && !has_void;
    for (int p = 0; p < nphys; ++p) {
      if (!has_piece[p] && !has_segment[p]) continue;
      CutDomain& d = geo.domains[p];
      if (single && has_piece[p]) {
        d.status[t] = CellStatus::Inside;
        d.cells.push_back({t, CellStatus::Inside, mesh->area(t), 0, 0});
        continue;
      }
      PhysicalCell pc{t, CellStatus::Cut, phys_area[p], static_cast<int>(d.pieces.size()), 0};
      for (const auto& piece : pieces)
        if (piece.phys == p) d.pieces.push_back(piece.tri);
      pc.piece_end = static_cast<int>(d.pieces.size());
      d.status[t] = CellStatus::Cut;
      d.cells.push_back(pc);
    }
    for (const auto& s : segments) {
      if (s.phys_neg < 0 && s.phys_pos < 0) continue;
      if (s.phys_neg < 0 || s.phys_pos < 0) {
        const int p = s.phys_neg >= 0 ? s.phys_neg : s.phys_pos;
        const Vec2 outward = p == s.phys_neg ? -s.into_neg : s.into_neg;
        geo.domains[p].boundary.push_back({s.a, s.b, t, -1, BoundaryTag::Embedded, outward});
        continue;
      }
      const std::array<int, 2> key = {std::min(s.phys_neg, s.phys_pos), std::max(s.phys_neg, s.phys_pos)};
      InterfaceMesh& iface = ifaces[key];
      iface.pair = key;
      iface.points_per_segment = options.interface_points;
      const Vec2 n = key[1] == s.phys_neg ? s.into_neg : -s.into_neg;
      iface.segments.push_back({s.a, s.b, t, s.levelset, n});
    }
  }

  // Fitted outer boundary, split among subdomains.
  std::vector<double> scratch;
  for (int f = 0; f < static_cast<int>(mesh->num_faces()); ++f) {
    const Face& face = mesh->face(f);
    if (!face.is_boundary()) continue;
    const CellCut cut(*mesh, geo.levelsets, face.left);
    const Vec2 a = mesh->vertex(face.vertices[0]);
    const Vec2 b = mesh->vertex(face.vertices[1]);
    for (const auto& s : cut.split_segment(a, b, -1)) {
      const int p = to_phys(geo.grouping, cut.classify_at(0.5 * (s[0] + s[1]), scratch));
      if (p < 0) continue;
      geo.domains[p].boundary.push_back({s[0], s[1], face.left, f, face.tag, face.normal});
    }
  }

  for (auto& d : geo.domains) {
    std::vector<char> in_fict(ncells, 0), in_cut(ncells, 0);
    for (const auto& c : d.cells) {
      d.fictitious_cells.push_back(c.cell);
      in_fict[c.cell] = 1;
      if (c.status == CellStatus::Cut) {
        d.cut_cells.push_back(c.cell);
        in_cut[c.cell] = 1;
      }
    }
    for (int f = 0; f < static_cast<int>(mesh->num_faces()); ++f) {
      const Face& face = mesh->face(f);
      if (face.is_boundary()) continue;
      if (in_fict[face.left] && in_fict[face.right] && (in_cut[face.left] || in_cut[face.right])) {
        d.ghost_faces.push_back(f);
      }
    }
  }

  for (auto& [key, iface] : ifaces) {
    finalize_interface(*mesh, iface);
    geo.interfaces.push_back(std::move(iface));
  }
  return geo;
}

CutDomain build_cut_domain(int i, std::shared_ptr<const TriMesh> mesh, std::vector<DiscreteLevelSet> levelsets,
                           const Material& material) {
  Geometry geo = build_geometry(std::move(mesh), std::move(levelsets));
  if (i < 0 || i >= geo.num_subdomains() || geo.domains[i].empty()) {
    throw Error(ErrorKind::EmptyDomain, "subdomain " + std::to_string(i) + " has no physical part");
  }
  CutDomain d = std::move(geo.domains[i]);
  d.material = material;
  return d;
}

InterfaceMesh build_interface(int i, int j, std::shared_ptr<const TriMesh> mesh,
                              std::vector<DiscreteLevelSet> levelsets, int points_per_segment) {
  if (!(i < j)) throw Error(ErrorKind::Validation, "interface pair must satisfy i < j");
  GeometryOptions opts;
  opts.interface_points = points_per_segment;
  Geometry geo = build_geometry(std::move(mesh), std::move(levelsets), {}, opts);
  for (auto& iface : geo.interfaces) {
    if (iface.pair == std::array<int, 2>{i, j}) return std::move(iface);
  }
  throw Error(ErrorKind::EmptyInterface,
              "no interface between subdomains " + std::to_string(i) + " and " + std::to_string(j));
}

void Material::validate() const {
  if (!(E > 0.0)) throw Error(ErrorKind::Validation, "Young's modulus must be positive");
  if (!(nu > 0.0 && nu < 0.5)) throw Error(ErrorKind::Validation, "Poisson ratio must lie in (0, 0.5)");
}

}  // namespace latincut
