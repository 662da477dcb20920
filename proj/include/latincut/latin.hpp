#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "latincut/assembly.hpp"
#include "latincut/fespace.hpp"
#include "latincut/geometry.hpp"
#include "latincut/linalg.hpp"

namespace latincut {

enum class ContactLaw { Unilateral, Bonded };
enum class DirichletMethod { Strong, Nitsche };

std::string_view to_string(ContactLaw law);
std::string_view to_string(InterfaceMode mode);
std::string_view to_string(DirichletMethod method);

struct LatinParams {
  double k_plus = 1.0;
  double k_minus = 1.0;
  double eta = 0.85;
  double gamma_g = 0.1;
  double gamma_pi = 0.1;
  double alpha = 10.0;
  int it_max = 200;
  int quad_points = 2;
  double normal_slope = 1e-6;  // weight of the normal-slope term in the interface projection
  InterfaceMode mode = InterfaceMode::P1P1;
  ContactLaw law = ContactLaw::Unilateral;

  /// Throws Validation on out-of-range values or k_plus != k_minus.
  void validate() const;
  friend bool operator==(const LatinParams&, const LatinParams&) = default;
};

struct BoundaryConditions {
  std::vector<DirichletCondition> dirichlet;  // Embedded tags are always imposed weakly
  std::vector<NeumannCondition> neumann;
  Vec2 body_force;
  DirichletMethod method = DirichletMethod::Strong;
  bool nitsche_data_symmetry = true;
};

/// Linear-stage operator of one subdomain with its Dirichlet elimination and
/// factorization. Built once, reused by every iteration.
class SubdomainSystem {
 public:
  SubdomainSystem(const TriMesh& mesh, const CutDomain& domain, std::span<const InterfaceMesh* const> interfaces,
                  const BoundaryConditions& bc, const LatinParams& params, bool factorize = true);

  const FESpace& space() const { return space_; }
  /// Full operator a_D + a_k + a_N + j_u before elimination.
  const SparseSym& matrix() const { return matrix_; }
  /// Operator restricted to the free dofs (what is factorized).
  const SparseSym& reduced_matrix() const { return reduced_; }
  const Eigen::VectorXd& fixed_rhs() const { return rhs_; }
  std::span<const int> free_dofs() const { return free_; }
  const Eigen::VectorXd& prescribed() const { return prescribed_; }

  /// Solves for the full dof vector given an additional load on all dofs.
  Eigen::VectorXd solve(const Eigen::VectorXd& extra_rhs) const;

 private:
  FESpace space_;
  SparseSym matrix_;
  SparseSym reduced_;
  Eigen::VectorXd rhs_;
  Eigen::VectorXd prescribed_;  // Dirichlet values, zero on free dofs
  std::vector<int> free_;
  Eigen::VectorXd reduced_rhs_;
  std::unique_ptr<Factorization> factor_;
};

/// Interface fields of one side on the interface nodes.
struct InterfaceSide {
  NodalField w;      // W*
  NodalField f;      // F*
  NodalField w_hat;  // W-hat*
  NodalField f_hat;  // F-hat*
};

struct InterfaceState {
  std::array<InterfaceSide, 2> side;  // side 0 belongs to pair[0]
};

struct IterationRecord {
  int iteration = 0;
  double indicator = 0.0;
  int contact_points = 0;  // quadrature points with a kept compressive heart traction
};

struct LatinState {
  int iteration = 0;  // completed iterations
  std::vector<Eigen::VectorXd> u;
  std::vector<InterfaceState> interfaces;
  std::vector<IterationRecord> history;
};

/// Contact quantities at one interface quadrature point.
struct ContactPoint {
  Vec2 point;
  Vec2 normal;
  double heart = 0.0;  // after the contact law
  double gap = 0.0;    // (W^{j,i} - W^{i,j}).n
};

/// Relaxation: field <- eta * fresh + (1 - eta) * field.
void relax(NodalField& field, const NodalField& fresh, double eta);

class LatinSolver {
 public:
  using Checkpoint = std::function<void(const LatinState&)>;

  LatinSolver(std::shared_ptr<const Geometry> geometry, BoundaryConditions bc, LatinParams params);
  ~LatinSolver();

  const Geometry& geometry() const { return *geometry_; }
  const LatinParams& params() const { return params_; }
  int num_subdomains() const { return static_cast<int>(systems_.size()); }
  int num_interfaces() const { return static_cast<int>(geometry_->interfaces.size()); }
  const SubdomainSystem& system(int i) const { return *systems_[i]; }
  const InterfaceBasis& basis(int iface) const;
  const SparseSym& projection_matrix(int iface) const;

  /// All fields zero.
  LatinState initial_state() const;

  /// Bulk solves with the current hat fields.
  void linear_stage(LatinState& state) const;
  /// Fresh W* (nodal trace of u*) and F* from the search direction, per side.
  std::vector<std::array<std::pair<NodalField, NodalField>, 2>> postprocess_interface(const LatinState& state) const;
  /// Heart tractions, projection and hat-field update from the current W*, F*.
  void local_stage(LatinState& state) const;
  /// One full iteration: linear stage, post-processing, relaxation, local stage.
  void iterate(LatinState& state) const;
  /// it_max iterations from the zero state; `checkpoint` runs after every iteration.
  LatinState run(const Checkpoint& checkpoint = {}) const;

  std::vector<ContactPoint> contact_status(const LatinState& state, int iface) const;

 private:
  struct InterfaceOps;
  std::vector<ContactPoint> heart(const LatinState& state, int iface) const;

  std::shared_ptr<const Geometry> geometry_;
  BoundaryConditions bc_;
  LatinParams params_;
  std::vector<std::unique_ptr<SubdomainSystem>> systems_;
  std::vector<std::unique_ptr<InterfaceOps>> ops_;
};

}  // namespace latincut
