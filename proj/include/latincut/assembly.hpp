#pragma once

#include <Eigen/Core>
#include <array>
#include <functional>
#include <span>
#include <vector>

#include "latincut/fespace.hpp"
#include "latincut/geometry.hpp"
#include "latincut/linalg.hpp"

namespace latincut {

using VectorField = std::function<Vec2(const Vec2&)>;
using NodalField = Eigen::MatrixX2d;  // one row per node, columns x and y

struct DirichletCondition {
  BoundaryTag tag = BoundaryTag::Bottom;
  std::array<bool, 2> fixed = {true, true};  // constrained components
  VectorField value;
};

struct NeumannCondition {
  BoundaryTag tag = BoundaryTag::Top;
  VectorField traction;
};

// ---------------------------------------------------------------------------
// Bulk forms
// ---------------------------------------------------------------------------

/// Elastic stiffness over the physical part of the domain.
SparseSym assemble_elasticity(const FESpace& space);

/// Stress-jump penalty over the ghost faces, integrated over full faces with the
/// larger adjacent cell diameter as h.
SparseSym assemble_ghost_penalty(const FESpace& space, double gamma_g);

/// Vector L2 mass matrix over the physical part.
SparseSym assemble_mass(const FESpace& space);

/// Gram matrix of displacement gradients (Frobenius product) over the physical part.
SparseSym assemble_gradient_gram(const FESpace& space);

struct NitscheTerms {
  SparseSym matrix;
  Eigen::VectorXd load;
};

/// Symmetric Nitsche imposition of `bc` on the boundary segments of the domain
/// carrying its tag. `data_symmetry` adds the term -int U.sigma(v)n to the load.
NitscheTerms assemble_nitsche(const FESpace& space, const DirichletCondition& bc, double alpha,
                              bool data_symmetry = true);

/// Body force over the physical part plus tractions on tagged boundary segments.
Eigen::VectorXd assemble_rhs_body_neumann(const FESpace& space, const Vec2& body,
                                          std::span<const NeumannCondition> neumann);

// ---------------------------------------------------------------------------
// Interface forms
// ---------------------------------------------------------------------------

enum class InterfaceMode { P1P1, P1P0 };

/// Interface fields evaluated at the quadrature points of an interface.
struct InterfaceBasis {
  InterfaceMode mode = InterfaceMode::P1P1;
  int num_nodes = 0;            // band vertices (P1P1) or segments (P1P0)
  SparseMatrix eval;            // quadrature points x nodes
  Eigen::VectorXd weights;      // quadrature weights
  std::vector<Vec2> points;
  std::vector<Vec2> normals;    // from pair[0] into pair[1]
  std::vector<int> segment;     // segment of each quadrature point
};

InterfaceBasis interface_basis(const TriMesh& mesh, const InterfaceMesh& iface, InterfaceMode mode);

/// Scalar evaluation of the bulk space at interface quadrature points
/// (quadrature points x space vertices).
SparseMatrix bulk_trace(const FESpace& space, const InterfaceMesh& iface);

/// Interface nodal values from bulk vertex values: band vertices are read directly
/// (P1P1), segment midpoints are interpolated (P1P0). Nodes x space vertices.
SparseMatrix node_trace(const FESpace& space, const InterfaceMesh& iface, InterfaceMode mode);

/// Scalar coupling int_Gamma psi_bulk phi_node (space vertices x nodes).
SparseMatrix interface_coupling(const FESpace& space, const InterfaceMesh& iface, const InterfaceBasis& basis);

/// k * int_Gamma u.v over all listed interfaces touching the domain.
SparseSym assemble_latin_augmentation(const FESpace& space, std::span<const InterfaceMesh* const> interfaces,
                                      double k_minus);

struct InterfaceLoad {
  const InterfaceMesh* iface = nullptr;
  const NodalField* f_hat = nullptr;
  const NodalField* w_hat = nullptr;
  InterfaceMode mode = InterfaceMode::P1P1;
};

/// int_Gamma (F_hat + k W_hat).v summed over interfaces.
Eigen::VectorXd assemble_rhs_latin(const FESpace& space, std::span<const InterfaceLoad> loads, double k_minus);

/// Scalar interface mass matrix on the interface nodes.
SparseSym assemble_interface_mass(const InterfaceBasis& basis);

/// Gradient-jump penalty gamma h^2 int_F [grad p.n_F][grad q.n_F] over the interior
/// faces of the band (full faces).
SparseSym assemble_gradient_jump(const TriMesh& mesh, const InterfaceMesh& iface, double gamma_pi);

/// delta h^2 int_Gamma (grad p.n)(grad q.n): removes the normal-slope freedom that a
/// straight interface leaves in the band extension. Vanishes on constants.
SparseSym assemble_normal_slope(const TriMesh& mesh, const InterfaceMesh& iface, double delta);

/// Stabilised projection matrix: mass + gradient jump + normal slope (P1P1);
/// the diagonal segment mass (P1P0).
SparseSym assemble_interface_projection(const TriMesh& mesh, const InterfaceMesh& iface, double gamma_pi,
                                        InterfaceMode mode = InterfaceMode::P1P1, double normal_slope = 0.0);

}  // namespace latincut
