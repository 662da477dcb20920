#include "latincut/linalg.hpp"

#include <Eigen/CholmodSupport>
#include <cmath>
#include <limits>
#include <mutex>
#include <random>

#include "latincut/error.hpp"

namespace latincut {

SparseSym::SparseSym(SparseMatrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw Error(ErrorKind::Dimension, "symmetric matrix must be square");
  // Union with the transposed pattern, then drop entries that are zero on both sides:
  // summation order can leave an exact zero opposite a round-off sized entry.
  {
    const SparseMatrix t = m_.transpose();
    m_ = m_ + 0.0 * t;
    const SparseMatrix u = m_.transpose();
    m_.prune([&](const Eigen::Index& row, const Eigen::Index& col, const double& value) {
      return value != 0.0 || u.coeff(row, col) != 0.0;
    });
  }
  m_.makeCompressed();
  if (asymmetry() > 1e-10 * max_abs()) throw Error(ErrorKind::Dimension, "matrix is not symmetric");
}

namespace {
SparseMatrix from_triplets(int n, const Triplets& triplets) {
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}
}  // namespace

SparseSym::SparseSym(int n, const Triplets& triplets) : SparseSym(from_triplets(n, triplets)) {}

double SparseSym::asymmetry() const {
  const SparseMatrix d = m_ - SparseMatrix(m_.transpose());
  double out = 0.0;
  for (Eigen::Index k = 0; k < d.nonZeros(); ++k) out = std::max(out, std::abs(d.valuePtr()[k]));
  return out;
}

double SparseSym::max_abs() const {
  double out = 0.0;
  for (Eigen::Index k = 0; k < m_.nonZeros(); ++k) out = std::max(out, std::abs(m_.valuePtr()[k]));
  return out;
}

struct Factorization::Impl {
  // Simplicial mode: the supernodal path depends on the BLAS kernel selection of the host.
  Eigen::CholmodSimplicialLLT<SparseMatrix, Eigen::Lower> llt;
  std::mutex mutex;  // CHOLMOD's common workspace is shared between solves
  int n = 0;
};

Factorization::Factorization(const SparseSym& a) : impl_(std::make_unique<Impl>()) {
  impl_->n = a.size();
  if (a.size() == 0) return;
  impl_->llt.compute(a.matrix());
  if (impl_->llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NotSpd, "Cholesky factorization met a non-positive pivot");
  }
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

int Factorization::size() const { return impl_->n; }

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const {
  if (b.size() != impl_->n) throw Error(ErrorKind::Dimension, "right-hand side has the wrong length");
  if (impl_->n == 0) return {};
  std::lock_guard lock(impl_->mutex);
  return impl_->llt.solve(b);
}

Eigen::MatrixXd Factorization::solve(const Eigen::MatrixXd& b) const {
  if (b.rows() != impl_->n) throw Error(ErrorKind::Dimension, "right-hand side has the wrong length");
  if (impl_->n == 0) return Eigen::MatrixXd(0, b.cols());
  std::lock_guard lock(impl_->mutex);
  return impl_->llt.solve(b);
}

namespace {

// Rayleigh-quotient iteration driver: `apply` maps v to the operator image.
template <class Apply>
double dominant_eigenvalue(Apply apply, int n, const ConditionOptions& opt, int& iterations, bool& capped) {
  std::mt19937 rng(opt.seed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  v.normalize();
  double rho = 0.0;
  capped = true;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Eigen::VectorXd w = apply(v);
    const double rho_new = v.dot(w);
    const double residual = (w - rho_new * v).norm();
    const double wn = w.norm();
    if (!(wn > 0.0)) {
      rho = 0.0;
      capped = false;
      iterations += it;
      break;
    }
    v = w / wn;
    const bool settled = it > 1 && std::abs(rho_new - rho) <= 1e-2 * opt.tol * std::abs(rho_new);
    rho = rho_new;
    if (settled || residual <= opt.tol * std::abs(rho_new)) {
      capped = false;
      iterations += it;
      break;
    }
    if (it == opt.max_iterations) iterations += it;
  }
  return rho;
}

}  // namespace

ConditionEstimate condition_number(const SparseSym& a, const ConditionOptions& options) {
  ConditionEstimate out;
  const int n = a.size();
  if (n == 0) throw Error(ErrorKind::Dimension, "condition number of an empty matrix");
  std::unique_ptr<Factorization> fact;
  try {
    fact = std::make_unique<Factorization>(a);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotSpd) throw;
    out.spd = false;
    out.kappa = std::numeric_limits<double>::infinity();
    return out;
  }
  bool capped_max = false, capped_min = false;
  out.lambda_max = dominant_eigenvalue([&](const Eigen::VectorXd& v) { return a * v; }, n, options,
                                       out.iterations, capped_max);
  const double inv = dominant_eigenvalue([&](const Eigen::VectorXd& v) { return fact->solve(v); }, n, options,
                                         out.iterations, capped_min);
  out.lower_bound = capped_max || capped_min;
  if (!(inv > 0.0)) {
    out.spd = false;
    out.kappa = std::numeric_limits<double>::infinity();
    return out;
  }
  out.lambda_min = 1.0 / inv;
  out.kappa = out.lambda_max / out.lambda_min;
  return out;
}

}  // namespace latincut
