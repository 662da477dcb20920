#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "latincut/assembly.hpp"
#include "latincut/error.hpp"
#include "latincut/latin.hpp"

using namespace latincut;

namespace {

const Rect kBox{{-1.2, -1.2}, {1.2, 1.2}};
constexpr double kPi = 3.14159265358979323846;

std::shared_ptr<const TriMesh> grid(int n, const Rect& rect = kBox) {
  return std::make_shared<const TriMesh>(build_structured_mesh(rect, n, n));
}

Geometry geometry_of(std::shared_ptr<const TriMesh> mesh, const std::vector<LevelSetFunction>& fns,
                     const GeometryOptions& opt = {}) {
  std::vector<DiscreteLevelSet> ls;
  for (const auto& f : fns) ls.push_back(interpolate_levelset(f, mesh));
  return build_geometry(mesh, std::move(ls), {}, opt);
}

LevelSetFunction ellipse() { return LevelSetFunction::ellipse(1.0, 0.5, 0.654545); }

Eigen::VectorXd nodal(const FESpace& space, const VectorField& field) {
  Eigen::VectorXd u(space.num_dofs());
  for (int v = 0; v < space.num_vertices(); ++v) {
    const Vec2 val = field(space.mesh().vertex(space.vertices()[v]));
    u[2 * v] = val.x;
    u[2 * v + 1] = val.y;
  }
  return u;
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Plane-strain constants written out independently of Material.
struct Lame {
  double lambda, mu;
};
Lame lame(double e, double nu) { return {e * nu / ((1 + nu) * (1 - 2 * nu)), e / (2 * (1 + nu))}; }

// Gradient of the linear interpolant of (u0, u1, u2) on a triangle, rows = components.
Eigen::Matrix2d linear_gradient(const std::array<Vec2, 3>& c, const std::array<Vec2, 3>& u) {
  Eigen::Matrix2d j;
  j << c[1].x - c[0].x, c[1].y - c[0].y, c[2].x - c[0].x, c[2].y - c[0].y;
  Eigen::Matrix2d du;
  du << u[1].x - u[0].x, u[2].x - u[0].x, u[1].y - u[0].y, u[2].y - u[0].y;
  // rows of j are edge vectors: j * grad(u_c) = du column
  Eigen::Matrix2d g;
  g.row(0) = j.partialPivLu().solve(du.row(0).transpose()).transpose();
  g.row(1) = j.partialPivLu().solve(du.row(1).transpose()).transpose();
  return g;
}

Eigen::Matrix2d stress(const Eigen::Matrix2d& grad, Lame l) {
  const Eigen::Matrix2d eps = 0.5 * (grad + grad.transpose());
  return 2 * l.mu * eps + l.lambda * eps.trace() * Eigen::Matrix2d::Identity();
}

double energy_density(const Eigen::Matrix2d& grad, Lame l) {
  const Eigen::Matrix2d eps = 0.5 * (grad + grad.transpose());
  return (stress(grad, l).array() * eps.array()).sum();
}

std::array<Vec2, 3> cell_values(const FESpace& space, const Eigen::VectorXd& u, int cell) {
  std::array<Vec2, 3> out;
  const auto lv = space.cell_vertices(cell);
  for (int k = 0; k < 3; ++k) out[k] = {u[2 * lv[k]], u[2 * lv[k] + 1]};
  return out;
}

double quadratic_form(const SparseSym& a, const Eigen::VectorXd& u) { return u.dot(a * u); }

}  // namespace

TEST(ElementStiffness, MatchesEnergyOracleOnSingleTriangles) {
  const Lame l = lame(1.0, 0.3);
  for (const std::array<Vec2, 3>& c : {std::array<Vec2, 3>{{{0, 0}, {1, 0}, {0, 1}}},
                                       std::array<Vec2, 3>{{{0.3, 0.1}, {1.4, 0.4}, {0.5, 1.2}}}}) {
    const auto mesh = std::make_shared<const TriMesh>(std::vector<Vec2>(c.begin(), c.end()),
                                                      std::vector<std::array<int, 3>>{{0, 1, 2}},
                                                      Rect{{0.0, 0.0}, {1.4, 1.2}});
    const Geometry g = build_geometry(mesh, {});
    const FESpace space(*mesh, g.domains[0]);
    ASSERT_EQ(space.num_dofs(), 6);
    const Eigen::MatrixXd k = Eigen::MatrixXd(assemble_elasticity(space).matrix());
    const double area = 0.5 * std::abs(cross(c[1] - c[0], c[2] - c[0]));
    auto q = [&](const Eigen::VectorXd& u) {
      return area * energy_density(linear_gradient(c, cell_values(space, u, 0)), l);
    };
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) {
        const Eigen::VectorXd ei = Eigen::VectorXd::Unit(6, i), ej = Eigen::VectorXd::Unit(6, j);
        const double oracle = 0.5 * (q(ei + ej) - q(ei) - q(ej));
        EXPECT_NEAR(k(i, j), oracle, 1e-13) << i << "," << j;
      }
    }
  }
}

TEST(ElementStiffness, UniaxialStrainEnergy) {
  // u = (x, 0): eps = diag(1, 0), energy density (lambda + 2 mu)
  const auto mesh = grid(4, {{0, 0}, {1, 1}});
  const Geometry g = build_geometry(mesh, {});
  const FESpace space(*mesh, g.domains[0]);
  const Eigen::VectorXd u = nodal(space, [](const Vec2& p) { return Vec2{p.x, 0.0}; });
  const Lame l = lame(1.0, 0.3);
  EXPECT_NEAR(quadratic_form(assemble_elasticity(space), u), l.lambda + 2 * l.mu, 1e-13);
}

TEST(Elasticity, RigidModesAreInTheKernel) {
  const auto mesh = grid(12);
  const Geometry g = geometry_of(mesh, {ellipse()});
  for (int i = 0; i < 2; ++i) {
    const FESpace space(*mesh, g.domains[i]);
    const SparseSym k = assemble_elasticity(space);
    const SparseSym gp = assemble_ghost_penalty(space, 0.1);
    for (const VectorField& rigid : {VectorField([](const Vec2&) { return Vec2{1.0, 0.0}; }),
                                     VectorField([](const Vec2&) { return Vec2{0.0, 1.0}; }),
                                     VectorField([](const Vec2& p) { return Vec2{-p.y, p.x}; })}) {
      const Eigen::VectorXd u = nodal(space, rigid);
      EXPECT_LE((k * u).norm(), 1e-13);
      EXPECT_LE((gp * u).norm(), 1e-13);
    }
  }
}

TEST(Elasticity, CutDomainAreasAddUp) {
  // the energy of a uniform strain is area-weighted, so the two sides sum to the box
  const auto mesh = grid(10);
  const Geometry g = geometry_of(mesh, {ellipse()});
  double total = 0.0;
  const Lame l = lame(1.0, 0.3);
  for (int i = 0; i < 2; ++i) {
    const FESpace space(*mesh, g.domains[i]);
    const Eigen::VectorXd u = nodal(space, [](const Vec2& p) { return Vec2{p.x, 0.0}; });
    total += quadratic_form(assemble_elasticity(space), u) / (l.lambda + 2 * l.mu);
  }
  EXPECT_NEAR(total, 2.4 * 2.4, 1e-12);
}

TEST(GhostPenalty, VanishesOnLinearFields) {
  const auto mesh = grid(10);
  const Geometry g = geometry_of(mesh, {ellipse()});
  const FESpace space(*mesh, g.domains[1]);
  ASSERT_FALSE(g.domains[1].ghost_faces.empty());
  const SparseSym gp = assemble_ghost_penalty(space, 0.1);
  const Eigen::VectorXd u = nodal(space, [](const Vec2& p) { return Vec2{0.3 * p.x - p.y + 1, 2 * p.x + 0.5 * p.y}; });
  EXPECT_LE((gp * u).norm(), 1e-12);
  EXPECT_EQ(assemble_ghost_penalty(space, 0.0).matrix().nonZeros(), 0);
}

TEST(GhostPenalty, MatchesTractionJumpOracle) {
  const auto mesh = grid(8);
  const Geometry g = geometry_of(mesh, {ellipse()});
  const FESpace space(*mesh, g.domains[0]);
  const double gamma = 0.37;
  const Lame l = lame(1.0, 0.3);
  const Eigen::VectorXd u = random_vector(space.num_dofs(), 3);
  double oracle = 0.0;
  for (int f : g.domains[0].ghost_faces) {
    const Face& face = mesh->face(f);
    const Eigen::Matrix2d gl = linear_gradient(mesh->corners(face.left), cell_values(space, u, face.left));
    const Eigen::Matrix2d gr = linear_gradient(mesh->corners(face.right), cell_values(space, u, face.right));
    const Eigen::Vector2d n(face.normal.x, face.normal.y);
    const Eigen::Vector2d jump = (stress(gl, l) - stress(gr, l)) * n;
    const double h = std::max(mesh->diameter(face.left), mesh->diameter(face.right));
    oracle += gamma * h * face.length * jump.squaredNorm();
  }
  ASSERT_GT(oracle, 0.0);
  EXPECT_NEAR(quadratic_form(assemble_ghost_penalty(space, gamma), u) / oracle, 1.0, 1e-12);
}

TEST(GhostPenalty, FacesLieInTheBand) {
  const auto mesh = grid(10);
  const Geometry g = geometry_of(mesh, {ellipse()});
  for (const CutDomain& d : g.domains) {
    for (int f : d.ghost_faces) {
      const Face& face = mesh->face(f);
      ASSERT_FALSE(face.is_boundary());
      const bool left_cut = std::binary_search(d.cut_cells.begin(), d.cut_cells.end(), face.left);
      const bool right_cut = std::binary_search(d.cut_cells.begin(), d.cut_cells.end(), face.right);
      EXPECT_TRUE(left_cut || right_cut);
    }
  }
}

TEST(Mass, ConstantFieldGivesArea) {
  const auto mesh = grid(10);
  const Geometry g = geometry_of(mesh, {ellipse()});
  for (int i = 0; i < 2; ++i) {
    const FESpace space(*mesh, g.domains[i]);
    const SparseSym m = assemble_mass(space);
    const Eigen::VectorXd ex = nodal(space, [](const Vec2&) { return Vec2{1.0, 0.0}; });
    EXPECT_NEAR(quadratic_form(m, ex), g.domains[i].area(), 1e-13);
    // int x^2 over the box splits exactly between the two sides
  }
  double second = 0.0;
  for (int i = 0; i < 2; ++i) {
    const FESpace space(*mesh, g.domains[i]);
    const Eigen::VectorXd ux = nodal(space, [](const Vec2& p) { return Vec2{p.x, 0.0}; });
    second += quadratic_form(assemble_mass(space), ux);
  }
  EXPECT_NEAR(second, 2.4 * (2 * std::pow(1.2, 3) / 3), 1e-12);
}

TEST(GradientGram, LinearFieldIntegratesGradientNorm) {
  const auto mesh = grid(6);
  const Geometry g = geometry_of(mesh, {ellipse()});
  const FESpace space(*mesh, g.domains[1]);
  const Eigen::VectorXd u = nodal(space, [](const Vec2& p) { return Vec2{2 * p.x + p.y, -p.x}; });
  EXPECT_NEAR(quadratic_form(assemble_gradient_gram(space), u), 6.0 * g.domains[1].area(), 1e-12);
}

TEST(BodyForce, IntegratesOverThePhysicalPart) {
  const auto mesh = grid(20);
  const Geometry g = geometry_of(mesh, {ellipse()});
  const FESpace space(*mesh, g.domains[1]);
  const Eigen::VectorXd f = assemble_rhs_body_neumann(space, {0.0, -1.0}, {});
  double fx = 0.0, fy = 0.0;
  for (int v = 0; v < space.num_vertices(); ++v) {
    fx += f[2 * v];
    fy += f[2 * v + 1];
  }
  EXPECT_NEAR(fx, 0.0, 1e-15);
  EXPECT_NEAR(fy, -g.domains[1].area(), 1e-13);
  EXPECT_NEAR(g.domains[1].area(), kPi * 0.654545 * 0.3272725, 2e-2);
}

TEST(Neumann, TractionIntegratesOverTaggedSide) {
  const auto mesh = grid(5);
  const Geometry g = geometry_of(mesh, {ellipse()});
  const FESpace space(*mesh, g.domains[0]);
  const std::vector<NeumannCondition> top = {{BoundaryTag::Top, [](const Vec2& p) { return Vec2{p.x, 2.0}; }}};
  const Eigen::VectorXd f = assemble_rhs_body_neumann(space, {}, top);
  const Eigen::VectorXd ex = nodal(space, [](const Vec2&) { return Vec2{1.0, 0.0}; });
  const Eigen::VectorXd ey = nodal(space, [](const Vec2&) { return Vec2{0.0, 1.0}; });
  EXPECT_NEAR(f.dot(ex), 0.0, 1e-14);
  EXPECT_NEAR(f.dot(ey), 2.0 * 2.4, 1e-13);
}

namespace {

// Straight interface y = 0.01 across the box.
struct FlatInterface {
  std::shared_ptr<const TriMesh> mesh = grid(12);
  Geometry g = geometry_of(mesh, {LevelSetFunction::halfplane(-0.01, 0.0, 1.0)});
  const InterfaceMesh& iface = g.interfaces.at(0);
};

Eigen::VectorXd band_values(const TriMesh& mesh, const InterfaceMesh& iface, const std::function<double(Vec2)>& f) {
  Eigen::VectorXd v(iface.num_band_dofs());
  for (std::size_t k = 0; k < iface.band_vertices.size(); ++k) v[k] = f(mesh.vertex(iface.band_vertices[k]));
  return v;
}

}  // namespace

TEST(InterfaceForms, AugmentationIntegratesOverTheInterface) {
  FlatInterface s;
  ASSERT_NEAR(s.iface.length(), 2.4, 1e-13);
  const double k = 2.5;
  for (int i = 0; i < 2; ++i) {
    const FESpace space(*s.mesh, s.g.domains[i]);
    const InterfaceMesh* list[] = {&s.iface};
    const SparseSym a = assemble_latin_augmentation(space, list, k);
    const Eigen::VectorXd one = nodal(space, [](const Vec2&) { return Vec2{1.0, 0.0}; });
    EXPECT_NEAR(quadratic_form(a, one), k * 2.4, 1e-12);
    const Eigen::VectorXd ux = nodal(space, [](const Vec2& p) { return Vec2{0.0, p.x}; });
    EXPECT_NEAR(quadratic_form(a, ux), k * 2 * std::pow(1.2, 3) / 3, 1e-12);
  }
}

TEST(InterfaceForms, LatinLoadMatchesAugmentationOfTheTrace) {
  FlatInterface s;
  const double k = 1.7;
  const FESpace space(*s.mesh, s.g.domains[1]);
  const InterfaceMesh* list[] = {&s.iface};
  const Eigen::VectorXd u = nodal(space, [](const Vec2& p) { return Vec2{std::sin(p.x), p.x * p.y}; });
  NodalField w(s.iface.num_band_dofs(), 2);
  for (std::size_t b = 0; b < s.iface.band_vertices.size(); ++b) {
    const int v = space.local(s.iface.band_vertices[b]);
    ASSERT_GE(v, 0);
    w(b, 0) = u[2 * v];
    w(b, 1) = u[2 * v + 1];
  }
  const NodalField zero = NodalField::Zero(w.rows(), 2);
  const InterfaceLoad load{&s.iface, &zero, &w, InterfaceMode::P1P1};
  const Eigen::VectorXd rhs = assemble_rhs_latin(space, std::span(&load, 1), k);
  const Eigen::VectorXd expected = assemble_latin_augmentation(space, list, k) * u;
  EXPECT_LE((rhs - expected).norm(), 1e-13);

  NodalField fy = NodalField::Zero(w.rows(), 2);
  fy.col(1).setOnes();
  const InterfaceLoad traction{&s.iface, &fy, &zero, InterfaceMode::P1P1};
  const Eigen::VectorXd r = assemble_rhs_latin(space, std::span(&traction, 1), k);
  const Eigen::VectorXd ey = nodal(space, [](const Vec2&) { return Vec2{0.0, 1.0}; });
  EXPECT_NEAR(r.dot(ey), 2.4, 1e-13);
}

TEST(InterfaceForms, CouplingAndMassArePartitionsOfUnity) {
  const auto mesh = grid(16);
  const Geometry g = geometry_of(mesh, {ellipse()});
  const InterfaceMesh& iface = g.interfaces.at(0);
  for (InterfaceMode mode : {InterfaceMode::P1P1, InterfaceMode::P1P0}) {
    const InterfaceBasis basis = interface_basis(*mesh, iface, mode);
    EXPECT_NEAR(basis.weights.sum(), iface.length(), 1e-13);
    const SparseSym m = assemble_interface_mass(basis);
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(basis.num_nodes);
    EXPECT_NEAR(quadratic_form(m, one), iface.length(), 1e-13);
    for (int i = 0; i < 2; ++i) {
      const FESpace space(*mesh, g.domains[i]);
      const SparseMatrix c = interface_coupling(space, iface, basis);
      EXPECT_NEAR(Eigen::MatrixXd(c).sum(), iface.length(), 1e-13);
    }
  }
}

TEST(InterfaceForms, NodeTraceReadsBandVertices) {
  const auto mesh = grid(10);
  const Geometry g = geometry_of(mesh, {ellipse()});
  const InterfaceMesh& iface = g.interfaces.at(0);
  const FESpace space(*mesh, g.domains[0]);
  Eigen::VectorXd s(space.num_vertices());
  for (int v = 0; v < space.num_vertices(); ++v) {
    const Vec2 p = mesh->vertex(space.vertices()[v]);
    s[v] = 2 * p.x - p.y;
  }
  const Eigen::VectorXd band = node_trace(space, iface, InterfaceMode::P1P1) * s;
  EXPECT_LE((band - band_values(*mesh, iface, [](Vec2 p) { return 2 * p.x - p.y; })).norm(), 1e-14);
  const Eigen::VectorXd mid = node_trace(space, iface, InterfaceMode::P1P0) * s;
  ASSERT_EQ(mid.size(), static_cast<Eigen::Index>(iface.segments.size()));
  for (std::size_t k = 0; k < iface.segments.size(); ++k) {
    const Vec2 m = 0.5 * (iface.segments[k].a + iface.segments[k].b);
    EXPECT_NEAR(mid[k], 2 * m.x - m.y, 1e-14);
  }
}

TEST(InterfaceForms, JumpAndSlopePenaltiesKillTheirKernels) {
  const auto mesh = grid(16);
  const Geometry g = geometry_of(mesh, {ellipse()});
  const InterfaceMesh& iface = g.interfaces.at(0);
  const SparseSym j = assemble_gradient_jump(*mesh, iface, 0.1);
  const Eigen::VectorXd linear = band_values(*mesh, iface, [](Vec2 p) { return p.x + 2 * p.y - 0.5; });
  EXPECT_LE((j * linear).norm(), 1e-13);
  const Eigen::VectorXd bumpy = band_values(*mesh, iface, [](Vec2 p) { return std::abs(p.x) * p.y; });
  EXPECT_GT(quadratic_form(j, bumpy), 1e-8);
  const SparseSym r = assemble_normal_slope(*mesh, iface, 1.0);
  EXPECT_LE((r * Eigen::VectorXd::Ones(iface.num_band_dofs())).norm(), 1e-14);
  EXPECT_GT(quadratic_form(r, linear), 0.0);
}

TEST(InterfaceForms, ProjectionReproducesConstants) {
  const auto mesh = grid(16);
  const Geometry g = geometry_of(mesh, {ellipse()});
  const InterfaceMesh& iface = g.interfaces.at(0);
  for (InterfaceMode mode : {InterfaceMode::P1P1, InterfaceMode::P1P0}) {
    const InterfaceBasis basis = interface_basis(*mesh, iface, mode);
    const SparseSym p = assemble_interface_projection(*mesh, iface, 0.1, mode, 1e-6);
    const Factorization f(p);
    const Eigen::VectorXd at_points = Eigen::VectorXd::Constant(basis.weights.size(), -0.75);
    const Eigen::VectorXd load = basis.eval.transpose() * basis.weights.cwiseProduct(at_points);
    const Eigen::VectorXd x = f.solve(load);
    EXPECT_LE((x.array() + 0.75).abs().maxCoeff(), 1e-10) << to_string(mode);
  }
}

TEST(InterfaceForms, FlatInterfaceProjectionNeedsAStabilisation) {
  // without jump or slope terms the band extension of a flat interface is free
  FlatInterface s;
  auto spread = [&](double slope) {
    const SparseSym p = assemble_interface_projection(*s.mesh, s.iface, 0.0, InterfaceMode::P1P1, slope);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(p.matrix())};
    return es.eigenvalues().minCoeff() / es.eigenvalues().maxCoeff();
  };
  EXPECT_LT(std::abs(spread(0.0)), 1e-14);
  EXPECT_GT(spread(1e-6), 1e-12);
}

namespace {

BoundaryConditions linear_dirichlet(const VectorField& exact, DirichletMethod method) {
  BoundaryConditions bc;
  for (BoundaryTag t : {BoundaryTag::Bottom, BoundaryTag::Right, BoundaryTag::Top, BoundaryTag::Left,
                        BoundaryTag::Embedded})
    bc.dirichlet.push_back({t, {true, true}, exact});
  bc.method = method;
  return bc;
}

}  // namespace

TEST(PatchTest, LinearFieldIsReproduced) {
  // outer box with an elliptic hole: the embedded boundary is always weak
  const auto mesh = grid(14);
  GeometryOptions opt;
  opt.grouping = SubdomainGrouping{{0, -1}};
  const Geometry g = geometry_of(mesh, {ellipse()}, opt);
  ASSERT_EQ(g.num_subdomains(), 1);
  const VectorField exact = [](const Vec2& p) { return Vec2{0.1 * p.x + 0.2 * p.y - 0.05, -0.05 * p.x + 0.3 * p.y}; };
  for (auto [method, tol] : {std::pair{DirichletMethod::Strong, 1e-10}, std::pair{DirichletMethod::Nitsche, 1e-8}}) {
    const SubdomainSystem sys(*mesh, g.domains[0], {}, linear_dirichlet(exact, method), LatinParams{});
    const Eigen::VectorXd u = sys.solve(Eigen::VectorXd::Zero(sys.space().num_dofs()));
    EXPECT_LE((u - nodal(sys.space(), exact)).cwiseAbs().maxCoeff(), tol) << to_string(method);
  }
}

TEST(PatchTest, NitscheWithoutDataSymmetryIsInconsistent) {
  const auto mesh = grid(8, {{0, 0}, {1, 1}});
  const Geometry g = build_geometry(mesh, {});
  const VectorField exact = [](const Vec2& p) { return Vec2{0.2 * p.x, 0.1 * p.y + 0.3 * p.x}; };
  BoundaryConditions bc = linear_dirichlet(exact, DirichletMethod::Nitsche);
  const SubdomainSystem good(*mesh, g.domains[0], {}, bc, LatinParams{});
  EXPECT_LE((good.solve(Eigen::VectorXd::Zero(good.space().num_dofs())) - nodal(good.space(), exact)).norm(), 1e-10);
  bc.nitsche_data_symmetry = false;
  const SubdomainSystem bad(*mesh, g.domains[0], {}, bc, LatinParams{});
  EXPECT_GT((bad.solve(Eigen::VectorXd::Zero(bad.space().num_dofs())) - nodal(bad.space(), exact)).norm(), 1e-6);
}

TEST(Nitsche, MatrixIsSymmetricAndPenalisesBoundaryValues) {
  const auto mesh = grid(6);
  const Geometry g = geometry_of(mesh, {ellipse()});
  const FESpace space(*mesh, g.domains[0]);
  const DirichletCondition bottom{BoundaryTag::Bottom, {true, true}, [](const Vec2&) { return Vec2{}; }};
  const NitscheTerms n = assemble_nitsche(space, bottom, 10.0);
  EXPECT_LE(n.matrix.asymmetry(), 1e-14);
  EXPECT_LE(n.load.norm(), 1e-15);
  // translation energy: alpha E / h * length * |c|^2 (the consistency terms vanish)
  const Eigen::VectorXd tx = nodal(space, [](const Vec2&) { return Vec2{1.0, 0.0}; });
  EXPECT_NEAR(quadratic_form(n.matrix, tx), 10.0 / mesh->diameter(0) * 2.4, 1e-10);
}

TEST(GrazingCut, GhostPenaltyKeepsTheOperatorDefinite) {
  // the inclusion boundary passes 1e-9 h from a grid line
  const auto mesh = grid(10, {{0, 0}, {1, 1}});
  const double y0 = 0.5 + 1e-10;
  const Geometry g = geometry_of(mesh, {LevelSetFunction::halfplane(-y0, 0.0, 1.0)});
  BoundaryConditions bc;
  bc.dirichlet.push_back({BoundaryTag::Top, {true, true}, [](const Vec2&) { return Vec2{}; }});
  LatinParams p;
  const InterfaceMesh* list[] = {&g.interfaces.at(0)};
  const SubdomainSystem sys(*mesh, g.domains[1], list, bc, p, false);
  const Eigen::MatrixXd dense = Eigen::MatrixXd(sys.reduced_matrix().matrix());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
  const double lmin = es.eigenvalues().minCoeff();
  EXPECT_GT(lmin, 0.0);
  const double oracle = es.eigenvalues().maxCoeff() / lmin;
  const ConditionEstimate c = condition_number(sys.reduced_matrix(), {1e-8, 100000, 1});
  EXPECT_NEAR(c.kappa / oracle, 1.0, 1e-2);
  EXPECT_LT(oracle, 1e6);
}
