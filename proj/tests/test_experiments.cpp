#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "latincut/error.hpp"
#include "latincut/experiments.hpp"

using namespace latincut;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Io;
}

bool equal_matrices(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows() != b.rows() || a.nonZeros() != b.nonZeros()) return false;
  return std::equal(a.valuePtr(), a.valuePtr() + a.nonZeros(), b.valuePtr()) &&
         std::equal(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros(), b.innerIndexPtr()) &&
         std::equal(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1, b.outerIndexPtr());
}

}  // namespace

TEST(Presets, EllipseCase) {
  const ProblemDef def = ellipse_case();
  EXPECT_NO_THROW(def.validate());
  EXPECT_EQ(def.num_subdomains(), 2);
  EXPECT_EQ(def.levels, 4);
  ASSERT_EQ(def.levelsets.size(), 1u);
  // semi-axes r and r / 2
  EXPECT_NEAR(def.levelsets[0]({0.654545, 0.0}), 0.0, 1e-15);
  EXPECT_NEAR(def.levelsets[0]({0.0, 0.3272725}), 0.0, 1e-15);
  EXPECT_EQ(def.youngs, (std::vector<double>{1.0, 1.0}));
  const SideCondition& top = def.sides[side_index(BoundaryTag::Top)];
  EXPECT_EQ(top.ux, 0.0);
  EXPECT_EQ(top.uy, -1.0);
  const SideCondition& bottom = def.sides[side_index(BoundaryTag::Bottom)];
  EXPECT_EQ(bottom.ux, 0.0);
  EXPECT_EQ(bottom.uy, 0.0);
  EXPECT_FALSE(def.sides[side_index(BoundaryTag::Left)].dirichlet());
  EXPECT_FALSE(def.sides[side_index(BoundaryTag::Right)].dirichlet());
  const LatinParams& p = def.latin;
  EXPECT_EQ(p.k_plus, 1.0);
  EXPECT_EQ(p.k_minus, 1.0);
  EXPECT_EQ(p.gamma_g, 0.1);
  EXPECT_EQ(p.gamma_pi, 0.1);
  EXPECT_EQ(p.alpha, 10.0);
  EXPECT_EQ(p.eta, 0.85);
  EXPECT_EQ(p.it_max, 200);
  EXPECT_EQ(p.quad_points, 2);
  EXPECT_DOUBLE_EQ(def.rect.width() / def.nx, 0.06);
}

TEST(Presets, LevelMeshesHalveTheSpacing) {
  const ProblemDef def = ellipse_case();
  for (int l = 0; l < 3; ++l) EXPECT_DOUBLE_EQ(level_mesh(def, l)->spacing(), 0.06 / (1 << l));
}

TEST(Presets, TwoInclusionsHaveTripleJunctions) {
  ProblemDef def = two_inclusions_case(10.0);
  EXPECT_EQ(def.youngs, (std::vector<double>{1.0, 10.0, 10.0}));
  def.nx = def.ny = 12;
  const Discretization d = discretize(def, level_mesh(def, 0));
  EXPECT_EQ(d.geometry->num_subdomains(), 3);
  EXPECT_EQ(d.geometry->interfaces.size(), 3u);
  EXPECT_TRUE(d.geometry->find_interface(1, 2));
  const auto mats = materials(def);
  EXPECT_EQ(mats[2].E, 10.0);
}

TEST(Presets, CrackCaseSplitsIntoFourSubdomains) {
  const ProblemDef def = crack_case(0.5, 0.25, 30, 0.1);
  EXPECT_EQ(def.num_subdomains(), 4);
  const double h = 1.0 / 30;
  const auto ls = crack_levelsets(0.5, 0.25, h);
  EXPECT_EQ(def.levelsets, ls);
  // diagonal line y = x + eps_y h, vertical lines x = 1/3 + eps_x h and 2/3 + eps_x h
  EXPECT_NEAR(ls[0]({0.5, 0.5 + 0.25 * h}), 0.0, 1e-15);
  EXPECT_NEAR(ls[1]({1.0 / 3.0 + 0.5 * h, 0.2}), 0.0, 1e-15);
  EXPECT_NEAR(ls[2]({2.0 / 3.0 + 0.5 * h, 0.7}), 0.0, 1e-15);
  const Discretization d = discretize(def, level_mesh(def, 0));
  EXPECT_EQ(d.geometry->num_subdomains(), 4);
  for (const auto& dom : d.geometry->domains) EXPECT_FALSE(dom.empty());
}

TEST(Presets, CrackConditionGrowsWithoutGhostPenalty) {
  const ConditionResult good = crack_condition_case(0.5, 0.25, 12, 0.0);
  const ConditionResult bad = crack_condition_case(0.5, 1e-6, 12, 0.0);
  const ConditionResult fixed_good = crack_condition_case(0.5, 0.25, 12, 1e-3);
  const ConditionResult fixed_bad = crack_condition_case(0.5, 1e-6, 12, 1e-3);
  EXPECT_TRUE(std::isfinite(good.kappa));
  EXPECT_GT(bad.kappa, 100 * good.kappa);
  EXPECT_LT(fixed_bad.kappa, 100 * fixed_good.kappa);
  EXPECT_GE(good.worst_subdomain, 0);
}

TEST(ProblemDef, ValidationErrors) {
  auto broken = [](const std::function<void(ProblemDef&)>& edit) {
    ProblemDef def = ellipse_case();
    edit(def);
    return kind_of([&] { def.validate(); });
  };
  EXPECT_EQ(broken([](ProblemDef& d) { d.youngs = {1.0}; }), ErrorKind::Validation);
  EXPECT_EQ(broken([](ProblemDef& d) { d.youngs = {1.0, -2.0}; }), ErrorKind::Validation);
  EXPECT_EQ(broken([](ProblemDef& d) { d.nu = 0.5; }), ErrorKind::Validation);
  EXPECT_EQ(broken([](ProblemDef& d) { d.reference_level = 2; }), ErrorKind::Validation);
  EXPECT_EQ(broken([](ProblemDef& d) { d.sides[2].ty = 1.0; }), ErrorKind::Validation);
  EXPECT_EQ(broken([](ProblemDef& d) { d.grouping = {0, 2}; }), ErrorKind::Validation);
  EXPECT_EQ(broken([](ProblemDef& d) { d.latin.eta = -0.1; }), ErrorKind::Validation);
  EXPECT_EQ(broken([](ProblemDef& d) { d.nx = 0; }), ErrorKind::Validation);
}

TEST(ProblemDef, VoidGroupingDropsASubdomain) {
  ProblemDef def = ellipse_case();
  def.grouping = {0, -1};
  def.youngs = {1.0};
  def.embedded.tx = 0.5;
  EXPECT_NO_THROW(def.validate());
  EXPECT_EQ(def.num_subdomains(), 1);
  const BoundaryConditions bc = boundary_conditions(def);
  EXPECT_EQ(bc.dirichlet.size(), 2u);
  ASSERT_EQ(bc.neumann.size(), 1u);
  EXPECT_EQ(bc.neumann[0].tag, BoundaryTag::Embedded);
}

TEST(BoundaryConditions, FreeComponentsAreNotFixed) {
  ProblemDef def = ellipse_case();
  def.sides[side_index(BoundaryTag::Left)].ux = 0.0;
  def.sides[side_index(BoundaryTag::Right)].tx = 2.0;
  const BoundaryConditions bc = boundary_conditions(def);
  ASSERT_EQ(bc.dirichlet.size(), 3u);
  const auto& left = bc.dirichlet.back();
  EXPECT_EQ(left.tag, BoundaryTag::Left);
  EXPECT_TRUE(left.fixed[0]);
  EXPECT_FALSE(left.fixed[1]);
  ASSERT_EQ(bc.neumann.size(), 1u);
  EXPECT_EQ(bc.neumann[0].traction({0.0, 0.0}).x, 2.0);
  EXPECT_EQ(kind_of([] { side_index(BoundaryTag::Embedded); }), ErrorKind::InvalidData);
}

TEST(ParallelFor, RunsEveryTaskOnce) {
  for (int workers : {1, 3, 16}) {
    std::vector<std::atomic<int>> hits(25);
    parallel_for(25, workers, [&](int k) { hits[k]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  parallel_for(0, 4, [](int) { FAIL(); });
}

TEST(ParallelFor, RethrowsAFailure) {
  EXPECT_THROW(parallel_for(8, 3,
                            [](int k) {
                              if (k == 5) throw Error(ErrorKind::Numerical, "boom");
                            }),
               Error);
}

TEST(CrackStudies, WorkerCountDoesNotChangeResults) {
  ProblemDef base = crack_case(0.5, 0.25, 12, 0.1);
  const std::vector<double> eps{0.25, 1e-4};
  const std::vector<double> gamma{0.0, 1e-3};
  const auto one = crack_sweep(base, eps, gamma, false, 0.5, 1);
  const auto two = crack_sweep(base, eps, gamma, false, 0.5, 2);
  ASSERT_EQ(one.size(), 4u);
  ASSERT_EQ(two.size(), 4u);
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].eps, two[k].eps);
    EXPECT_EQ(one[k].gamma_g, two[k].gamma_g);
    EXPECT_EQ(one[k].result.kappa, two[k].result.kappa);
  }
}

TEST(CrackStudies, ScalingUsesNestedGrids) {
  ProblemDef base = crack_case(0.25, 0.25, 6, 0.1);
  base.levels = base.reference_level = 3;
  const auto samples = crack_scaling(base, 0.25, 1);
  ASSERT_EQ(samples.size(), 3u);
  for (std::size_t l = 0; l < 3; ++l) EXPECT_DOUBLE_EQ(samples[l].h, 1.0 / (6 << l));
  EXPECT_GT(samples[2].result.kappa, samples[0].result.kappa);
}

TEST(Studies, FactorizedOperatorsDoNotChangeWithIterations) {
  ProblemDef def = ellipse_case(1);
  def.nx = def.ny = 10;
  def.latin.it_max = 100;
  const Discretization d = discretize(def, level_mesh(def, 0));
  const SparseMatrix before = d.solver->system(0).matrix().matrix();
  const LatinState state = d.solver->run();
  EXPECT_TRUE(equal_matrices(before, d.solver->system(0).matrix().matrix()));
  const Discretization again = discretize(def, level_mesh(def, 0));
  EXPECT_TRUE(equal_matrices(before, again.solver->system(0).matrix().matrix()));
  // indicator(it_max) <= indicator(5)
  EXPECT_LE(state.history.back().indicator, state.history[4].indicator);
}

TEST(Studies, CoarseLevelErrorsAgainstAReference) {
  ProblemDef def = ellipse_case(2);
  def.nx = def.ny = 8;
  def.reference_level = 3;
  def.latin.it_max = 60;
  const ReferenceSolution ref(def);
  const LevelResult l0 = run_level(def, 0, ref, true);
  int seen = 0;
  const LevelResult l1 = run_level(def, 1, ref, false, [&](const Discretization&, const LatinState&) { ++seen; });
  EXPECT_EQ(seen, 60);
  EXPECT_DOUBLE_EQ(l0.h, 0.3);
  EXPECT_DOUBLE_EQ(l1.h, 0.15);
  EXPECT_GT(l0.energy, l1.energy);
  EXPECT_GT(l0.h1, l1.h1);
  EXPECT_GT(l1.energy, 0.0);
  ASSERT_EQ(l0.history.size(), 60u);
  EXPECT_TRUE(l1.history.empty());
  EXPECT_EQ(l0.history.back().iteration, 60);
  EXPECT_NEAR(l0.history.back().energy_error, l0.energy, 1e-14);
}
