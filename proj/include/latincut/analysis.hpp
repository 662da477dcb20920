#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "latincut/assembly.hpp"
#include "latincut/fespace.hpp"
#include "latincut/linalg.hpp"

namespace latincut {

/// Scalar P1 transfer from a coarse space to a nested fine space of the same
/// subdomain (fine space vertices x coarse space vertices). Fine vertices whose
/// coarse parent cell lies outside the coarse fictitious domain use the polynomial
/// of the nearest fictitious coarse cell. Throws Unsupported for non-nested meshes.
SparseMatrix transfer_operator(const FESpace& coarse, const FESpace& fine);

/// Per subdomain, the coarse field evaluated at the fine fictitious vertices.
std::vector<Eigen::VectorXd> interpolate_to_fine(std::span<const Eigen::VectorXd> u_coarse,
                                                 std::span<const FESpace* const> coarse,
                                                 std::span<const FESpace* const> fine);

/// sqrt(sum_i int |du|^2 + |grad du|^2) over the fine physical domains.
double h1_error(std::span<const Eigen::VectorXd> a, std::span<const Eigen::VectorXd> b,
                std::span<const FESpace* const> fine);

/// sqrt(sum_i int eps(du):D:eps(du)) over the fine physical domains.
double energy_error(std::span<const Eigen::VectorXd> a, std::span<const Eigen::VectorXd> b,
                    std::span<const FESpace* const> fine);

/// Repeated error evaluation of coarse fields against one fine reference.
class ErrorEvaluator {
 public:
  ErrorEvaluator(std::span<const FESpace* const> coarse, std::span<const FESpace* const> fine,
                 std::vector<Eigen::VectorXd> reference);

  double h1(std::span<const Eigen::VectorXd> u_coarse) const;
  double energy(std::span<const Eigen::VectorXd> u_coarse) const;

 private:
  std::vector<Eigen::VectorXd> difference(std::span<const Eigen::VectorXd> u_coarse) const;

  std::vector<SparseMatrix> transfer_;
  std::vector<SparseSym> stiffness_;
  std::vector<SparseSym> h1_gram_;
  std::vector<Eigen::VectorXd> reference_;
};

struct ConvergenceRecord {
  std::vector<double> h;
  std::vector<double> h1;
  std::vector<double> energy;
  std::vector<int> iterations;
};

/// Least-squares slope of log(error) against log(h); needs at least two points.
double fit_rate(std::span<const double> h, std::span<const double> error);

struct RateFit {
  double h1 = 0.0;
  double energy = 0.0;
};
/// Throws InvalidData with fewer than three points or non-positive values.
RateFit fit_rates(const ConvergenceRecord& record);

struct ProfilePoint {
  double theta = 0.0;
  double traction = 0.0;
  double weight = 0.0;
};

/// Normal traction F.n at every interface quadrature point, sorted by the polar
/// angle atan2(y, x). `side` selects the normal orientation (0: pair[0] into pair[1]).
std::vector<ProfilePoint> traction_profile(const InterfaceBasis& basis, const NodalField& traction, int side);

/// Sum of absolute jumps between consecutive profile values.
double total_variation(std::span<const ProfilePoint> profile);

/// ||a - b|| / ||b|| with the quadrature weights of b; profiles must share their points.
double relative_l2_difference(std::span<const ProfilePoint> a, std::span<const ProfilePoint> b);

}  // namespace latincut
