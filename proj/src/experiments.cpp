#include "latincut/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "latincut/error.hpp"

namespace latincut {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::Validation, message);
}

constexpr std::array<BoundaryTag, 4> kSides = {BoundaryTag::Bottom, BoundaryTag::Right, BoundaryTag::Top,
                                               BoundaryTag::Left};

void add_side(BoundaryConditions& bc, BoundaryTag tag, const SideCondition& side) {
  if (side.dirichlet()) {
    const Vec2 value{side.ux.value_or(0.0), side.uy.value_or(0.0)};
    bc.dirichlet.push_back({tag, {side.ux.has_value(), side.uy.has_value()}, [value](const Vec2&) { return value; }});
  }
  if (side.tx != 0.0 || side.ty != 0.0) {
    const Vec2 t{side.tx, side.ty};
    bc.neumann.push_back({tag, [t](const Vec2&) { return t; }});
  }
}

}  // namespace

int side_index(BoundaryTag tag) {
  for (int k = 0; k < 4; ++k)
    if (kSides[k] == tag) return k;
  throw Error(ErrorKind::InvalidData, "not a side of the background rectangle");
}

int ProblemDef::num_subdomains() const {
  if (grouping.empty()) return static_cast<int>(levelsets.size()) + 1;
  return *std::max_element(grouping.begin(), grouping.end()) + 1;
}

void ProblemDef::validate() const {
  require(rect.width() > 0.0 && rect.height() > 0.0, "mesh.rect must have positive extent");
  require(nx >= 1 && ny >= 1, "mesh.nx and mesh.ny must be positive");
  require(levels >= 1, "mesh.levels must be at least 1");
  require(reference_level >= levels, "mesh.reference_level must exceed every study level");
  require(reference_level <= 8, "mesh.reference_level is limited to 8 refinements");
  if (!grouping.empty()) {
    require(grouping.size() == levelsets.size() + 1, "geometry.grouping needs one entry per auxiliary subdomain");
    for (int g : grouping) require(g >= -1, "geometry.grouping entries must be -1 (void) or a subdomain index");
    const int n = num_subdomains();
    require(n >= 1, "geometry.grouping leaves no physical subdomain");
    for (int p = 0; p < n; ++p) {
      require(std::find(grouping.begin(), grouping.end(), p) != grouping.end(),
              "geometry.grouping skips subdomain " + std::to_string(p));
    }
  }
  require(static_cast<int>(youngs.size()) == num_subdomains(),
          "geometry.youngs needs one value per subdomain (" + std::to_string(num_subdomains()) + ")");
  for (double e : youngs) require(e > 0.0 && std::isfinite(e), "geometry.youngs values must be positive");
  require(nu > 0.0 && nu < 0.5, "geometry.nu must lie in (0, 0.5)");
  for (int k = 0; k < 4; ++k) {
    const SideCondition& s = sides[k];
    const std::string name = "bc." + std::string(to_string(kSides[k]));
    require(!(s.ux && s.tx != 0.0), name + ": tx on a component with prescribed ux");
    require(!(s.uy && s.ty != 0.0), name + ": ty on a component with prescribed uy");
  }
  require(!(embedded.ux && embedded.tx != 0.0), "bc.embedded: tx on a component with prescribed ux");
  require(!(embedded.uy && embedded.ty != 0.0), "bc.embedded: ty on a component with prescribed uy");
  latin.validate();
}

BoundaryConditions boundary_conditions(const ProblemDef& def) {
  BoundaryConditions bc;
  for (int k = 0; k < 4; ++k) add_side(bc, kSides[k], def.sides[k]);
  add_side(bc, BoundaryTag::Embedded, def.embedded);
  bc.body_force = def.body_force;
  bc.method = def.dirichlet_method;
  bc.nitsche_data_symmetry = def.nitsche_data_symmetry;
  return bc;
}

std::vector<Material> materials(const ProblemDef& def) {
  std::vector<Material> out;
  for (double e : def.youngs) out.push_back({e, def.nu});
  return out;
}

std::shared_ptr<const TriMesh> level_mesh(const ProblemDef& def, int level) {
  TriMesh mesh = build_structured_mesh(def.rect, def.nx, def.ny, def.diagonal);
  for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
  return std::make_shared<const TriMesh>(std::move(mesh));
}

std::vector<const FESpace*> Discretization::spaces() const {
  std::vector<const FESpace*> out;
  for (int i = 0; i < solver->num_subdomains(); ++i) out.push_back(&solver->system(i).space());
  return out;
}

namespace {

Geometry make_geometry(const ProblemDef& def, std::shared_ptr<const TriMesh> mesh) {
  std::vector<DiscreteLevelSet> ls;
  for (const auto& fn : def.levelsets) ls.push_back(interpolate_levelset(fn, mesh));
  GeometryOptions opt;
  opt.interface_points = def.latin.quad_points;
  if (!def.grouping.empty()) opt.grouping = SubdomainGrouping{def.grouping};
  const auto mats = materials(def);
  return build_geometry(std::move(mesh), std::move(ls), mats, opt);
}

}  // namespace

Discretization discretize(const ProblemDef& def, std::shared_ptr<const TriMesh> mesh) {
  def.validate();
  Discretization d;
  d.mesh = mesh;
  d.geometry = std::make_shared<const Geometry>(make_geometry(def, std::move(mesh)));
  d.solver = std::make_unique<LatinSolver>(d.geometry, boundary_conditions(def), def.latin);
  return d;
}

ProblemDef ellipse_case(int levels) {
  ProblemDef def;
  def.experiment = "ellipse";
  def.levels = levels;
  def.reference_level = levels;
  def.levelsets = {LevelSetFunction::ellipse(1.0, 0.5, 0.654545)};
  def.youngs = {1.0, 1.0};
  def.sides[side_index(BoundaryTag::Bottom)] = {0.0, 0.0};
  def.sides[side_index(BoundaryTag::Top)] = {0.0, -1.0};
  return def;
}

ProblemDef two_inclusions_case(double contrast, int levels) {
  ProblemDef def = ellipse_case(levels);
  def.experiment = "two-inclusions";
  def.levelsets = {LevelSetFunction::circle({-0.25, 0.0}, 0.5), LevelSetFunction::circle({0.25, 0.0}, 0.5)};
  def.youngs = {1.0, contrast, contrast};
  return def;
}

std::vector<LevelSetFunction> crack_levelsets(double eps_x, double eps_y, double h) {
  return {LevelSetFunction::halfplane(-eps_y * h, -1.0, 1.0),
          LevelSetFunction::halfplane(-1.0 / 3.0 - eps_x * h, 1.0, 0.0),
          LevelSetFunction::halfplane(2.0 / 3.0 + eps_x * h, -1.0, 0.0)};
}

ProblemDef crack_case(double eps_x, double eps_y, int n, double gamma_g) {
  ProblemDef def;
  def.experiment = "crack-condition";
  def.rect = {{0.0, 0.0}, {1.0, 1.0}};
  def.nx = def.ny = n;
  def.levels = 1;
  def.reference_level = 1;
  def.levelsets = crack_levelsets(eps_x, eps_y, 1.0 / n);
  def.youngs = {1.0, 1.0, 1.0, 1.0};
  def.sides[side_index(BoundaryTag::Bottom)] = {0.0, 0.0};
  def.sides[side_index(BoundaryTag::Top)] = {0.0, -1.0};
  def.latin.gamma_g = gamma_g;
  return def;
}

ConditionResult worst_condition(const ProblemDef& def, std::shared_ptr<const TriMesh> mesh) {
  def.validate();
  const Geometry geo = make_geometry(def, mesh);
  const BoundaryConditions bc = boundary_conditions(def);
  ConditionResult out;
  for (const auto& dom : geo.domains) {
    if (dom.empty()) throw Error(ErrorKind::EmptyDomain, "subdomain " + std::to_string(dom.index) + " is empty");
    const SubdomainSystem sys(*mesh, dom, geo.interfaces_of(dom.index), bc, def.latin, false);
    const ConditionEstimate ce = condition_number(sys.reduced_matrix());
    if (out.worst_subdomain < 0 || !(ce.kappa <= out.kappa)) {
      out.kappa = ce.kappa;
      out.worst_subdomain = dom.index;
      out.lower_bound = ce.lower_bound;
    }
  }
  return out;
}

ConditionResult crack_condition_case(double eps_x, double eps_y, int n, double gamma_g) {
  const ProblemDef def = crack_case(eps_x, eps_y, n, gamma_g);
  return worst_condition(def, level_mesh(def, 0));
}

ReferenceSolution::ReferenceSolution(const ProblemDef& def)
    : disc(discretize(def, level_mesh(def, def.reference_level))), state(disc.solver->run()) {}

ErrorEvaluator ReferenceSolution::evaluator(const Discretization& coarse) const {
  return ErrorEvaluator(coarse.spaces(), disc.spaces(), state.u);
}

LevelResult run_level(const ProblemDef& def, int level, const ReferenceSolution& ref, bool track_history,
                      const std::function<void(const Discretization&, const LatinState&)>& checkpoint) {
  const Discretization d = discretize(def, level_mesh(def, level));
  const ErrorEvaluator ev = ref.evaluator(d);
  LevelResult out;
  out.level = level;
  out.h = d.mesh->spacing();
  const LatinState st = d.solver->run([&](const LatinState& s) {
    if (track_history) out.history.push_back({s.iteration, ev.energy(s.u), s.history.back().indicator});
    if (checkpoint) checkpoint(d, s);
  });
  out.h1 = ev.h1(st.u);
  out.energy = ev.energy(st.u);
  return out;
}

void parallel_for(int count, int workers, const std::function<void(int)>& task) {
  if (workers <= 1 || count <= 1) {
    for (int k = 0; k < count; ++k) task(k);
    return;
  }
  std::mutex mutex;
  std::exception_ptr failure;
  int next = 0;
  auto worker = [&] {
    while (true) {
      int k;
      {
        std::lock_guard lock(mutex);
        if (failure || next >= count) return;
        k = next++;
      }
      try {
        task(k);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(workers, count); ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<ConditionSample> crack_sweep(const ProblemDef& base, std::span<const double> eps,
                                         std::span<const double> gamma_g, bool both_offsets, double eps_x,
                                         int workers) {
  std::vector<ConditionSample> out;
  for (double g : gamma_g)
    for (double e : eps) out.push_back({e, g, 1.0 / base.nx, {}});
  const auto mesh = level_mesh(base, 0);
  parallel_for(static_cast<int>(out.size()), workers, [&](int k) {
    ProblemDef def = base;
    def.levelsets = crack_levelsets(both_offsets ? out[k].eps : eps_x, out[k].eps, 1.0 / base.nx);
    def.latin.gamma_g = out[k].gamma_g;
    out[k].result = worst_condition(def, mesh);
  });
  return out;
}

std::vector<ConditionSample> crack_scaling(const ProblemDef& base, double eps, int workers) {
  std::vector<ConditionSample> out(base.levels);
  parallel_for(base.levels, workers, [&](int l) {
    ProblemDef def = base;
    const int n = base.nx << l;
    def.levelsets = crack_levelsets(eps, eps, 1.0 / n);
    const auto mesh = level_mesh(def, l);
    out[l] = {eps, def.latin.gamma_g, mesh->spacing(), worst_condition(def, mesh)};
  });
  return out;
}

}  // namespace latincut
