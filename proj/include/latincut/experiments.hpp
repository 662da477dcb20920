#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "latincut/analysis.hpp"
#include "latincut/latin.hpp"
#include "latincut/levelset.hpp"
#include "latincut/mesh.hpp"

namespace latincut {

/// Boundary data of one side of the background rectangle. Components with a
/// prescribed displacement are Dirichlet; the others carry the traction.
struct SideCondition {
  std::optional<double> ux;
  std::optional<double> uy;
  double tx = 0.0;
  double ty = 0.0;

  bool dirichlet() const { return ux.has_value() || uy.has_value(); }
  friend bool operator==(const SideCondition&, const SideCondition&) = default;
};

struct ProblemDef {
  std::string experiment = "ellipse";
  Rect rect{{-1.2, -1.2}, {1.2, 1.2}};
  int nx = 40;
  int ny = 40;
  Diagonal diagonal = Diagonal::BottomLeftToTopRight;
  int levels = 4;           // study levels: base grid refined 0..levels-1 times
  int reference_level = 4;  // refinements of the base grid for the reference solve
  std::vector<LevelSetFunction> levelsets;
  std::vector<int> grouping;  // empty: identity
  std::vector<double> youngs;  // one per physical subdomain
  double nu = 0.3;
  std::array<SideCondition, 4> sides;  // bottom, right, top, left
  SideCondition embedded;              // boundaries towards void regions
  Vec2 body_force;
  DirichletMethod dirichlet_method = DirichletMethod::Strong;
  bool nitsche_data_symmetry = true;
  LatinParams latin;

  /// Throws Validation when materials and subdomains disagree or data is out of range.
  void validate() const;
  int num_subdomains() const;
  friend bool operator==(const ProblemDef&, const ProblemDef&) = default;
};

/// Index into ProblemDef::sides.
int side_index(BoundaryTag tag);

BoundaryConditions boundary_conditions(const ProblemDef& def);
std::vector<Material> materials(const ProblemDef& def);

/// Background mesh of a study level (the base grid refined `level` times).
std::shared_ptr<const TriMesh> level_mesh(const ProblemDef& def, int level);

/// Mesh, geometry and LaTIn solver of one level.
struct Discretization {
  std::shared_ptr<const TriMesh> mesh;
  std::shared_ptr<const Geometry> geometry;
  std::unique_ptr<LatinSolver> solver;

  std::vector<const FESpace*> spaces() const;
};

Discretization discretize(const ProblemDef& def, std::shared_ptr<const TriMesh> mesh);

/// Elliptical inclusion in a square block, pressed from the top.
ProblemDef ellipse_case(int levels = 4);

/// Two overlapping circular inclusions with stiffness ratio `contrast`.
ProblemDef two_inclusions_case(double contrast, int levels = 4);

/// Unit square split by two vertical and one diagonal crack into four subdomains.
/// Cut offsets are eps * spacing of an n x n grid.
ProblemDef crack_case(double eps_x, double eps_y, int n, double gamma_g);

struct ConditionResult {
  double kappa = 0.0;  // +inf when a subdomain operator is not positive definite
  int worst_subdomain = -1;
  bool lower_bound = false;
};

/// Worst spectral condition number over the linear-stage operators of the crack case.
ConditionResult crack_condition_case(double eps_x, double eps_y, int n, double gamma_g);

/// Worst condition number of the linear-stage operators of any problem on a mesh.
ConditionResult worst_condition(const ProblemDef& def, std::shared_ptr<const TriMesh> mesh);

/// Crack level sets for cut offsets eps_x, eps_y on a grid of spacing h.
std::vector<LevelSetFunction> crack_levelsets(double eps_x, double eps_y, double h);

// ---------------------------------------------------------------------------
// Studies
// ---------------------------------------------------------------------------

/// Converged solve at def.reference_level used as the exact solution.
struct ReferenceSolution {
  Discretization disc;
  LatinState state;

  explicit ReferenceSolution(const ProblemDef& def);
  ErrorEvaluator evaluator(const Discretization& coarse) const;
};

struct IterationSample {
  int iteration = 0;
  double energy_error = 0.0;  // against the reference
  double indicator = 0.0;
};

struct LevelResult {
  int level = 0;
  double h = 0.0;
  double h1 = 0.0;
  double energy = 0.0;
  std::vector<IterationSample> history;  // filled when requested
};

/// Solves one study level and measures its errors against the reference.
/// `checkpoint` sees every iterate of the level solve.
LevelResult run_level(const ProblemDef& def, int level, const ReferenceSolution& ref, bool track_history,
                      const std::function<void(const Discretization&, const LatinState&)>& checkpoint = {});

/// Runs `count` independent tasks on `workers` threads; rethrows the first failure.
void parallel_for(int count, int workers, const std::function<void(int)>& task);

struct ConditionSample {
  double eps = 0.0;
  double gamma_g = 0.0;
  double h = 0.0;
  ConditionResult result;
};

/// Cut-offset sweep of the crack case. Case "i" keeps eps_x fixed and varies eps_y;
/// case "ii" varies both together.
std::vector<ConditionSample> crack_sweep(const ProblemDef& base, std::span<const double> eps,
                                         std::span<const double> gamma_g, bool both_offsets, double eps_x,
                                         int workers = 1);

/// Condition number of the crack case on base.levels nested grids (nx * 2^l).
std::vector<ConditionSample> crack_scaling(const ProblemDef& base, double eps, int workers = 1);

}  // namespace latincut
