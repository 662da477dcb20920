#include "latincut/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "latincut/error.hpp"

namespace latincut {

namespace {

bool in_space(const FESpace& space, int cell) {
  for (int v : space.mesh().triangle(cell))
    if (space.local(v) < 0) return false;
  return true;
}

// Nearest coarse cell (by face hops) whose vertices all carry dofs.
int nearest_space_cell(const FESpace& space, int start) {
  const TriMesh& mesh = space.mesh();
  std::deque<std::pair<int, int>> queue = {{start, 0}};
  std::vector<int> seen = {start};
  while (!queue.empty()) {
    const auto [cell, depth] = queue.front();
    queue.pop_front();
    if (in_space(space, cell)) return cell;
    if (depth >= 4) continue;
    for (int k = 0; k < 3; ++k) {
      const Face& f = mesh.face(mesh.triangle_face(cell, k));
      if (f.is_boundary()) continue;
      const int other = f.left == cell ? f.right : f.left;
      if (std::find(seen.begin(), seen.end(), other) != seen.end()) continue;
      seen.push_back(other);
      queue.emplace_back(other, depth + 1);
    }
  }
  throw Error(ErrorKind::Unsupported, "fine fictitious domain reaches far outside the coarse one");
}

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>> as_nodal(const Eigen::VectorXd& u) {
  return {u.data(), u.size() / 2, 2};
}

Eigen::VectorXd apply_transfer(const SparseMatrix& t, const Eigen::VectorXd& u) {
  const Eigen::MatrixX2d m = t * as_nodal(u);
  Eigen::VectorXd out(2 * m.rows());
  for (Eigen::Index v = 0; v < m.rows(); ++v) {
    out[2 * v] = m(v, 0);
    out[2 * v + 1] = m(v, 1);
  }
  return out;
}

void check_sizes(std::span<const Eigen::VectorXd> a, std::span<const Eigen::VectorXd> b,
                 std::span<const FESpace* const> fine) {
  if (a.size() != fine.size() || b.size() != fine.size()) {
    throw Error(ErrorKind::Dimension, "one field per subdomain is required");
  }
  for (std::size_t i = 0; i < fine.size(); ++i) {
    if (a[i].size() != fine[i]->num_dofs() || b[i].size() != fine[i]->num_dofs()) {
      throw Error(ErrorKind::Dimension, "field does not match the fine space");
    }
  }
}

double quadratic_sum(std::span<const Eigen::VectorXd> a, std::span<const Eigen::VectorXd> b,
                     const std::vector<SparseSym>& mats) {
  double s = 0.0;
  for (std::size_t i = 0; i < mats.size(); ++i) {
    const Eigen::VectorXd d = a[i] - b[i];
    s += d.dot(mats[i] * d);
  }
  return std::sqrt(std::max(s, 0.0));
}

}  // namespace

SparseMatrix transfer_operator(const FESpace& coarse, const FESpace& fine) {
  const TriMesh& cm = coarse.mesh();
  const TriMesh& fm = fine.mesh();
  const PointLocator locator(cm);
  const double tol = 1e-9;
  std::vector<int> parent(fine.num_vertices(), -1);
  std::vector<char> good(fine.num_vertices(), 0);
  for (int cell : fine.domain().fictitious_cells) {
    const auto loc = locator.locate(fm.centroid(cell));
    if (!loc) throw Error(ErrorKind::Unsupported, "fine cell outside the coarse mesh");
    const auto corners = cm.corners(*loc);
    for (int v : fm.triangle(cell)) {
      const auto b = barycentric(corners, fm.vertex(v));
      if (b[0] < -tol || b[1] < -tol || b[2] < -tol) {
        throw Error(ErrorKind::Unsupported, "meshes are not nested");
      }
    }
    const bool ok = in_space(coarse, *loc);
    for (int v : fm.triangle(cell)) {
      const int lv = fine.local(v);
      if (parent[lv] < 0 || (!good[lv] && ok)) {
        parent[lv] = *loc;
        good[lv] = ok;
      }
    }
  }
  Triplets trip;
  for (int lv = 0; lv < fine.num_vertices(); ++lv) {
    const int cell = good[lv] ? parent[lv] : nearest_space_cell(coarse, parent[lv]);
    const auto& tri = cm.triangle(cell);
    const auto b = barycentric(cm.corners(cell), fm.vertex(fine.vertices()[lv]));
    for (int k = 0; k < 3; ++k)
      if (b[k] != 0.0) trip.emplace_back(lv, coarse.local(tri[k]), b[k]);
  }
  SparseMatrix t(fine.num_vertices(), coarse.num_vertices());
  t.setFromTriplets(trip.begin(), trip.end());
  return t;
}

std::vector<Eigen::VectorXd> interpolate_to_fine(std::span<const Eigen::VectorXd> u_coarse,
                                                 std::span<const FESpace* const> coarse,
                                                 std::span<const FESpace* const> fine) {
  if (u_coarse.size() != coarse.size() || coarse.size() != fine.size()) {
    throw Error(ErrorKind::Dimension, "coarse and fine subdomain counts differ");
  }
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    if (u_coarse[i].size() != coarse[i]->num_dofs()) throw Error(ErrorKind::Dimension, "coarse field size");
    out.push_back(apply_transfer(transfer_operator(*coarse[i], *fine[i]), u_coarse[i]));
  }
  return out;
}

double h1_error(std::span<const Eigen::VectorXd> a, std::span<const Eigen::VectorXd> b,
                std::span<const FESpace* const> fine) {
  check_sizes(a, b, fine);
  std::vector<SparseSym> mats;
  for (const FESpace* s : fine) {
    mats.emplace_back(SparseMatrix(assemble_mass(*s).matrix() + assemble_gradient_gram(*s).matrix()));
  }
  return quadratic_sum(a, b, mats);
}

double energy_error(std::span<const Eigen::VectorXd> a, std::span<const Eigen::VectorXd> b,
                    std::span<const FESpace* const> fine) {
  check_sizes(a, b, fine);
  std::vector<SparseSym> mats;
  for (const FESpace* s : fine) mats.push_back(assemble_elasticity(*s));
  return quadratic_sum(a, b, mats);
}

ErrorEvaluator::ErrorEvaluator(std::span<const FESpace* const> coarse, std::span<const FESpace* const> fine,
                               std::vector<Eigen::VectorXd> reference)
    : reference_(std::move(reference)) {
  if (coarse.size() != fine.size() || reference_.size() != fine.size()) {
    throw Error(ErrorKind::Dimension, "coarse, fine and reference subdomain counts differ");
  }
  for (std::size_t i = 0; i < fine.size(); ++i) {
    if (reference_[i].size() != fine[i]->num_dofs()) throw Error(ErrorKind::Dimension, "reference field size");
    transfer_.push_back(transfer_operator(*coarse[i], *fine[i]));
    stiffness_.push_back(assemble_elasticity(*fine[i]));
    h1_gram_.emplace_back(SparseMatrix(assemble_mass(*fine[i]).matrix() + assemble_gradient_gram(*fine[i]).matrix()));
  }
}

std::vector<Eigen::VectorXd> ErrorEvaluator::difference(std::span<const Eigen::VectorXd> u_coarse) const {
  if (u_coarse.size() != transfer_.size()) throw Error(ErrorKind::Dimension, "one field per subdomain is required");
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < transfer_.size(); ++i) {
    if (u_coarse[i].size() != 2 * transfer_[i].cols()) throw Error(ErrorKind::Dimension, "coarse field size");
    out.push_back(apply_transfer(transfer_[i], u_coarse[i]));
  }
  return out;
}

double ErrorEvaluator::h1(std::span<const Eigen::VectorXd> u_coarse) const {
  return quadratic_sum(difference(u_coarse), reference_, h1_gram_);
}

double ErrorEvaluator::energy(std::span<const Eigen::VectorXd> u_coarse) const {
  return quadratic_sum(difference(u_coarse), reference_, stiffness_);
}

double fit_rate(std::span<const double> h, std::span<const double> error) {
  if (h.size() != error.size() || h.size() < 2) {
    throw Error(ErrorKind::InvalidData, "rate fit needs matching series of at least two points");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (!(h[k] > 0.0) || !(error[k] > 0.0)) throw Error(ErrorKind::InvalidData, "rate fit needs positive values");
    const double x = std::log(h[k]), y = std::log(error[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) throw Error(ErrorKind::InvalidData, "rate fit needs distinct mesh sizes");
  return (n * sxy - sx * sy) / den;
}

RateFit fit_rates(const ConvergenceRecord& record) {
  if (record.h.size() < 3) throw Error(ErrorKind::InvalidData, "rate fit needs at least three levels");
  return {fit_rate(record.h, record.h1), fit_rate(record.h, record.energy)};
}

std::vector<ProfilePoint> traction_profile(const InterfaceBasis& basis, const NodalField& traction, int side) {
  if (traction.rows() != basis.num_nodes) throw Error(ErrorKind::Dimension, "traction does not match the interface");
  const Eigen::MatrixX2d tq = basis.eval * traction;
  const double sign = side == 0 ? 1.0 : -1.0;
  std::vector<ProfilePoint> out(basis.points.size());
  for (std::size_t q = 0; q < out.size(); ++q) {
    const Vec2& p = basis.points[q];
    const Vec2& n = basis.normals[q];
    out[q] = {std::atan2(p.y, p.x), sign * (tq(q, 0) * n.x + tq(q, 1) * n.y), basis.weights[q]};
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.theta < b.theta; });
  return out;
}

double total_variation(std::span<const ProfilePoint> profile) {
  double tv = 0.0;
  for (std::size_t k = 1; k < profile.size(); ++k) tv += std::abs(profile[k].traction - profile[k - 1].traction);
  return tv;
}

double relative_l2_difference(std::span<const ProfilePoint> a, std::span<const ProfilePoint> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::Dimension, "profiles have different lengths");
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k].traction - b[k].traction;
    num += b[k].weight * d * d;
    den += b[k].weight * b[k].traction * b[k].traction;
  }
  if (!(den > 0.0)) throw Error(ErrorKind::InvalidData, "reference profile vanishes");
  return std::sqrt(num / den);
}

}  // namespace latincut
