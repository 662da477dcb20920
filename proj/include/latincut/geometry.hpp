#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "latincut/levelset.hpp"
#include "latincut/material.hpp"
#include "latincut/mesh.hpp"
#include "latincut/quadrature.hpp"

namespace latincut {

using Triangle2 = std::array<Vec2, 3>;

// ---------------------------------------------------------------------------
// Primitive operations
// ---------------------------------------------------------------------------

/// Subdomain index of a point from level-set values: 0 when every value is
/// non-negative, otherwise one plus the largest position holding a negative value.
int classify_values(std::span<const double> phi);

/// Same rule as classify_values, evaluated on discrete level sets at x.
int classify_point(const Vec2& x, std::span<const DiscreteLevelSet> levelsets);

struct SubTriangulation {
  std::vector<Triangle2> negative;
  std::vector<Triangle2> positive;
  std::optional<std::array<Vec2, 2>> segment;
};

/// Splits a triangle along the zero line of the linear interpolant of nodal_phi.
/// Zero values count as positive. Throws DegenerateCut when all values vanish.
SubTriangulation subtriangulate(const Triangle2& tri, const std::array<double, 3>& nodal_phi);

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

enum class CellStatus : std::uint8_t { Outside, Inside, Cut };

/// Maps auxiliary subdomains (0..num_levelsets) to physical subdomains; -1 marks void.
struct SubdomainGrouping {
  std::vector<int> aux_to_phys;

  static SubdomainGrouping identity(int num_levelsets);
  int num_physical() const;
};

struct Classification {
  int num_subdomains = 0;
  int num_cells = 0;
  std::vector<CellStatus> status;  // status[sub * num_cells + cell]

  CellStatus at(int sub, int cell) const { return status[static_cast<std::size_t>(sub) * num_cells + cell]; }
};

Classification classify_elements(const TriMesh& mesh, std::span<const DiscreteLevelSet> levelsets,
                                 const std::optional<SubdomainGrouping>& grouping = std::nullopt);

// ---------------------------------------------------------------------------
// Cut domains and interfaces
// ---------------------------------------------------------------------------

struct PhysicalCell {
  int cell = -1;
  CellStatus status = CellStatus::Inside;
  double area = 0.0;     // area of the physical part
  int piece_begin = 0;   // sub-triangles of cut cells in CutDomain::pieces
  int piece_end = 0;
};

/// A piece of the subdomain boundary: part of a fitted outer face or an embedded
/// boundary towards a void region.
struct BoundarySegment {
  Vec2 a;
  Vec2 b;
  int cell = -1;
  int face = -1;  // -1 for embedded segments
  BoundaryTag tag = BoundaryTag::None;
  Vec2 normal;    // unit outward normal

  double length() const { return norm(b - a); }
};

class CutDomain {
 public:
  int index = 0;
  Material material;
  std::vector<CellStatus> status;         // per background cell
  std::vector<PhysicalCell> cells;        // cells with nonempty physical part, increasing cell id
  std::vector<Triangle2> pieces;          // physical sub-triangles of cut cells
  std::vector<int> fictitious_cells;      // sorted
  std::vector<int> cut_cells;             // sorted; cells intersected by the subdomain boundary
  std::vector<int> ghost_faces;           // sorted
  std::vector<BoundarySegment> boundary;  // fitted and embedded boundary pieces

  bool empty() const { return cells.empty(); }
  double area() const;
  /// Degree-2 quadrature of the physical part of one cell.
  void quadrature(const TriMesh& mesh, const PhysicalCell& pc, std::vector<QuadPoint>& out) const;
  /// Physical sub-triangles of one cell (the cell itself when fully inside).
  void physical_triangles(const TriMesh& mesh, const PhysicalCell& pc, std::vector<Triangle2>& out) const;
};

struct InterfaceSegment {
  Vec2 a;
  Vec2 b;
  int cell = -1;
  int levelset = -1;  // position of the governing level set
  Vec2 normal;        // unit, from the first subdomain of the pair into the second

  double length() const { return norm(b - a); }
};

/// One interface between subdomains (first, second), first < second, with its
/// band of intersected cells carrying extended interface fields.
class InterfaceMesh {
 public:
  std::array<int, 2> pair{};
  std::vector<InterfaceSegment> segments;
  int points_per_segment = 2;
  std::vector<QuadPoint> quadrature;  // segment s owns [s*q, (s+1)*q)
  std::vector<int> band_cells;        // sorted
  std::vector<int> band_vertices;     // sorted
  std::vector<std::array<int, 3>> band_cell_dofs;  // band-local vertex indices per band cell
  std::vector<int> segment_band_cell;              // band cell position of each segment
  std::vector<int> interior_faces;                 // sorted

  std::size_t num_band_dofs() const { return band_vertices.size(); }
  /// Band-local index of a mesh vertex, or -1.
  int band_index(int vertex) const;
  double length() const;
  /// Normal of segment s seen from `side` (pair[0] or pair[1]); n^{j,i} = -n^{i,j}.
  Vec2 normal(std::size_t s, int side) const;
  std::span<const QuadPoint> segment_points(std::size_t s) const {
    return std::span<const QuadPoint>(quadrature).subspan(s * points_per_segment, points_per_segment);
  }
};

struct GeometryOptions {
  int interface_points = 2;
  std::optional<SubdomainGrouping> grouping;  // identity when unset
};

/// All geometric products of a set of level sets on one background mesh.
class Geometry {
 public:
  std::shared_ptr<const TriMesh> mesh;
  std::vector<DiscreteLevelSet> levelsets;
  SubdomainGrouping grouping;
  std::vector<CutDomain> domains;          // indexed by physical subdomain
  std::vector<InterfaceMesh> interfaces;   // sorted by pair

  int num_subdomains() const { return static_cast<int>(domains.size()); }
  const InterfaceMesh* find_interface(int i, int j) const;
  /// Interfaces touching subdomain i.
  std::vector<const InterfaceMesh*> interfaces_of(int i) const;
};

/// Runs classification, sub-triangulation, interface extraction and band/ghost
/// construction in one pass. `materials` may be empty (defaults) or hold one
/// entry per physical subdomain.
Geometry build_geometry(std::shared_ptr<const TriMesh> mesh, std::vector<DiscreteLevelSet> levelsets,
                        std::span<const Material> materials = {}, const GeometryOptions& options = {});

/// Throws EmptyDomain when subdomain i has no physical part.
CutDomain build_cut_domain(int i, std::shared_ptr<const TriMesh> mesh, std::vector<DiscreteLevelSet> levelsets,
                           const Material& material);

/// Throws EmptyInterface when the pair does not share an interface.
InterfaceMesh build_interface(int i, int j, std::shared_ptr<const TriMesh> mesh,
                              std::vector<DiscreteLevelSet> levelsets, int points_per_segment = 2);

}  // namespace latincut
