#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <memory>
#include <vector>

namespace latincut {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplets = std::vector<Eigen::Triplet<double, int>>;

/// Symmetric sparse matrix stored in full (both triangles), compressed, with
/// sorted indices and no explicit zeros. For a symmetric matrix the column-major
/// arrays are also its row-major arrays.
class SparseSym {
 public:
  SparseSym() = default;
  /// Throws Dimension unless `m` is square and symmetric up to round-off.
  explicit SparseSym(SparseMatrix m);
  SparseSym(int n, const Triplets& triplets);

  int size() const { return static_cast<int>(m_.rows()); }
  const SparseMatrix& matrix() const { return m_; }
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const { return m_ * x; }
  /// max |a_ij - a_ji|
  double asymmetry() const;
  double max_abs() const;

 private:
  SparseMatrix m_;
};

/// Sparse Cholesky factorization (CHOLMOD, fill-reducing ordering).
/// Immutable after construction; solve may be called from several threads.
class Factorization {
 public:
  /// Throws NotSpd when a non-positive pivot appears.
  explicit Factorization(const SparseSym& a);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  int size() const;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ConditionEstimate {
  double kappa = 0.0;  // +inf when the matrix is not positive definite
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool spd = true;
  bool lower_bound = false;  // an iteration hit its cap before converging
  int iterations = 0;
};

struct ConditionOptions {
  double tol = 1e-3;
  int max_iterations = 10000;
  unsigned seed = 12345;
};

/// Spectral condition number lambda_max / lambda_min from power iteration on A
/// and inverse iteration through a Cholesky factorization.
ConditionEstimate condition_number(const SparseSym& a, const ConditionOptions& options = {});

}  // namespace latincut
