#include "latincut/latin.hpp"

#include <cmath>
#include <map>

#include "latincut/error.hpp"

namespace latincut {

std::string_view to_string(ContactLaw law) { return law == ContactLaw::Unilateral ? "unilateral" : "bonded"; }
std::string_view to_string(InterfaceMode mode) { return mode == InterfaceMode::P1P1 ? "p1p1" : "p1p0"; }
std::string_view to_string(DirichletMethod method) { return method == DirichletMethod::Strong ? "strong" : "nitsche"; }

void LatinParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorKind::Validation, what);
  };
  require(k_plus > 0.0 && std::isfinite(k_plus), "latin.k_plus must be positive");
  require(k_minus > 0.0 && std::isfinite(k_minus), "latin.k_minus must be positive");
  require(k_plus == k_minus, "latin.k_plus and latin.k_minus must be equal");
  require(eta >= 0.0 && eta <= 1.0, "latin.eta must lie in [0, 1]");
  require(gamma_g >= 0.0 && std::isfinite(gamma_g), "latin.gamma_g must be non-negative");
  require(gamma_pi >= 0.0 && std::isfinite(gamma_pi), "latin.gamma_pi must be non-negative");
  require(alpha > 0.0 && std::isfinite(alpha), "latin.alpha must be positive");
  require(it_max >= 0, "latin.it_max must be non-negative");
  require(quad_points >= 1 && quad_points <= 5, "latin.quad_points must lie in 1..5");
  require(normal_slope >= 0.0 && std::isfinite(normal_slope), "latin.normal_slope must be non-negative");
}

void relax(NodalField& field, const NodalField& fresh, double eta) { field = eta * fresh + (1.0 - eta) * field; }

namespace {

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>> as_nodal(const Eigen::VectorXd& u) {
  return {u.data(), u.size() / 2, 2};
}

Eigen::VectorXd interleave(const Eigen::MatrixX2d& m) {
  Eigen::VectorXd out(2 * m.rows());
  for (Eigen::Index v = 0; v < m.rows(); ++v) {
    out[2 * v] = m(v, 0);
    out[2 * v + 1] = m(v, 1);
  }
  return out;
}

SparseSym sum(std::initializer_list<const SparseSym*> parts, int n) {
  SparseMatrix m(n, n);
  for (const SparseSym* p : parts) m += p->matrix();
  return SparseSym(std::move(m));
}

}  // namespace

SubdomainSystem::SubdomainSystem(const TriMesh& mesh, const CutDomain& domain,
                                 std::span<const InterfaceMesh* const> interfaces, const BoundaryConditions& bc,
                                 const LatinParams& params, bool factorize)
    : space_(mesh, domain) {
  const int n = space_.num_dofs();
  const SparseSym a_d = assemble_elasticity(space_);
  const SparseSym a_k = assemble_latin_augmentation(space_, interfaces, params.k_minus);
  const SparseSym j_u = assemble_ghost_penalty(space_, params.gamma_g);
  SparseMatrix a_n(n, n);
  rhs_ = assemble_rhs_body_neumann(space_, bc.body_force, bc.neumann);

  prescribed_ = Eigen::VectorXd::Zero(n);
  std::vector<char> constrained(n, 0);
  for (const auto& d : bc.dirichlet) {
    const bool weak = d.tag == BoundaryTag::Embedded || bc.method == DirichletMethod::Nitsche;
    if (weak) {
      NitscheTerms nt = assemble_nitsche(space_, d, params.alpha, bc.nitsche_data_symmetry);
      a_n += nt.matrix.matrix();
      rhs_ += nt.load;
      continue;
    }
    for (const auto& seg : domain.boundary) {
      if (seg.tag != d.tag || seg.face < 0) continue;
      for (int v : mesh.face(seg.face).vertices) {
        if (space_.local(v) < 0) continue;
        const Vec2 value = d.value ? d.value(mesh.vertex(v)) : Vec2{};
        for (int c = 0; c < 2; ++c) {
          if (!d.fixed[c]) continue;
          const int dof = space_.dof(v, c);
          constrained[dof] = 1;
          prescribed_[dof] = c == 0 ? value.x : value.y;
        }
      }
    }
  }
  const SparseSym nitsche(std::move(a_n));
  matrix_ = sum({&a_d, &a_k, &j_u, &nitsche}, n);

  std::vector<int> free_index(n, -1);
  for (int d = 0; d < n; ++d) {
    if (constrained[d]) continue;
    free_index[d] = static_cast<int>(free_.size());
    free_.push_back(d);
  }
  const int nf = static_cast<int>(free_.size());
  Triplets trip;
  const SparseMatrix& a = matrix_.matrix();
  for (int col = 0; col < a.outerSize(); ++col) {
    if (free_index[col] < 0) continue;
    for (SparseMatrix::InnerIterator it(a, col); it; ++it) {
      const int row = free_index[it.row()];
      if (row >= 0) trip.emplace_back(row, free_index[col], it.value());
    }
  }
  reduced_ = SparseSym(nf, trip);
  const Eigen::VectorXd lifted = rhs_ - a * prescribed_;
  reduced_rhs_.resize(nf);
  for (int k = 0; k < nf; ++k) reduced_rhs_[k] = lifted[free_[k]];
  if (!factorize) return;
  try {
    factor_ = std::make_unique<Factorization>(reduced_);
  } catch (const Error& e) {
    throw Error(e.kind(), "subdomain " + std::to_string(domain.index) + ": " + e.what());
  }
}

Eigen::VectorXd SubdomainSystem::solve(const Eigen::VectorXd& extra_rhs) const {
  if (extra_rhs.size() != space_.num_dofs()) throw Error(ErrorKind::Dimension, "load vector has the wrong length");
  if (!factor_) throw Error(ErrorKind::Unsupported, "subdomain system was built without factorization");
  Eigen::VectorXd b = reduced_rhs_;
  for (std::size_t k = 0; k < free_.size(); ++k) b[k] += extra_rhs[free_[k]];
  const Eigen::VectorXd x = factor_->solve(b);
  Eigen::VectorXd u = prescribed_;
  for (std::size_t k = 0; k < free_.size(); ++k) u[free_[k]] = x[k];
  return u;
}

struct LatinSolver::InterfaceOps {
  const InterfaceMesh* iface = nullptr;
  InterfaceBasis basis;
  std::array<SparseMatrix, 2> coupling;  // space vertices x nodes
  std::array<SparseMatrix, 2> trace;     // nodes x space vertices
  SparseMatrix weighted_eval_t;          // nodes x quadrature points
  SparseSym projection;
  std::unique_ptr<Factorization> projection_factor;
};

LatinSolver::LatinSolver(std::shared_ptr<const Geometry> geometry, BoundaryConditions bc, LatinParams params)
    : geometry_(std::move(geometry)), bc_(std::move(bc)), params_(params) {
  params_.validate();
  const TriMesh& mesh = *geometry_->mesh;
  for (const auto& iface : geometry_->interfaces) {
    if (iface.points_per_segment != params_.quad_points) {
      throw Error(ErrorKind::Configuration, "geometry interface quadrature differs from latin.quad_points");
    }
  }
  for (const auto& dom : geometry_->domains) {
    if (dom.empty()) throw Error(ErrorKind::EmptyDomain, "subdomain " + std::to_string(dom.index) + " is empty");
    const auto touching = geometry_->interfaces_of(dom.index);
    systems_.push_back(std::make_unique<SubdomainSystem>(mesh, dom, touching, bc_, params_));
  }
  for (const auto& iface : geometry_->interfaces) {
    auto ops = std::make_unique<InterfaceOps>();
    ops->iface = &iface;
    ops->basis = interface_basis(mesh, iface, params_.mode);
    for (int s = 0; s < 2; ++s) {
      const FESpace& space = systems_[iface.pair[s]]->space();
      ops->coupling[s] = interface_coupling(space, iface, ops->basis);
      ops->trace[s] = node_trace(space, iface, params_.mode);
    }
    ops->weighted_eval_t = SparseMatrix(ops->basis.eval.transpose() * ops->basis.weights.asDiagonal());
    ops->projection =
        assemble_interface_projection(mesh, iface, params_.gamma_pi, params_.mode, params_.normal_slope);
    const std::string name = "interface (" + std::to_string(iface.pair[0]) + "," + std::to_string(iface.pair[1]) + ")";
    if (params_.mode == InterfaceMode::P1P1) {
      const ConditionEstimate ce = condition_number(ops->projection);
      if (!ce.spd || ce.kappa > 1e12) {
        throw Error(ErrorKind::Configuration,
                    name + ": stabilised projection is singular; increase latin.gamma_pi or latin.normal_slope");
      }
    }
    try {
      ops->projection_factor = std::make_unique<Factorization>(ops->projection);
    } catch (const Error&) {
      throw Error(ErrorKind::Configuration, name + ": interface projection is not positive definite");
    }
    ops_.push_back(std::move(ops));
  }
}

LatinSolver::~LatinSolver() = default;

const InterfaceBasis& LatinSolver::basis(int iface) const { return ops_[iface]->basis; }
const SparseSym& LatinSolver::projection_matrix(int iface) const { return ops_[iface]->projection; }

LatinState LatinSolver::initial_state() const {
  LatinState state;
  for (const auto& sys : systems_) state.u.push_back(Eigen::VectorXd::Zero(sys->space().num_dofs()));
  for (const auto& ops : ops_) {
    InterfaceState is;
    for (auto& side : is.side) {
      const NodalField zero = NodalField::Zero(ops->basis.num_nodes, 2);
      side = {zero, zero, zero, zero};
    }
    state.interfaces.push_back(std::move(is));
  }
  return state;
}

void LatinSolver::linear_stage(LatinState& state) const {
  const double k = params_.k_minus;
  std::vector<Eigen::MatrixX2d> load(systems_.size());
  for (std::size_t i = 0; i < systems_.size(); ++i)
    load[i] = Eigen::MatrixX2d::Zero(systems_[i]->space().num_vertices(), 2);
  for (std::size_t f = 0; f < ops_.size(); ++f) {
    const InterfaceOps& ops = *ops_[f];
    for (int s = 0; s < 2; ++s) {
      const InterfaceSide& side = state.interfaces[f].side[s];
      load[ops.iface->pair[s]] += ops.coupling[s] * (side.f_hat + k * side.w_hat);
    }
  }
  for (std::size_t i = 0; i < systems_.size(); ++i) {
    try {
      state.u[i] = systems_[i]->solve(interleave(load[i]));
    } catch (const Error& e) {
      throw Error(e.kind(), "subdomain " + std::to_string(i) + ": " + e.what());
    }
  }
}

std::vector<std::array<std::pair<NodalField, NodalField>, 2>> LatinSolver::postprocess_interface(
    const LatinState& state) const {
  const double k = params_.k_minus;
  std::vector<std::array<std::pair<NodalField, NodalField>, 2>> out(ops_.size());
  for (std::size_t f = 0; f < ops_.size(); ++f) {
    const InterfaceOps& ops = *ops_[f];
    for (int s = 0; s < 2; ++s) {
      const InterfaceSide& side = state.interfaces[f].side[s];
      NodalField w = ops.trace[s] * as_nodal(state.u[ops.iface->pair[s]]);
      NodalField fr = side.f_hat + k * (side.w_hat - w);
      out[f][s] = {std::move(w), std::move(fr)};
    }
  }
  return out;
}

std::vector<ContactPoint> LatinSolver::heart(const LatinState& state, int f) const {
  const InterfaceOps& ops = *ops_[f];
  const InterfaceState& is = state.interfaces[f];
  const double k = params_.k_plus;
  const Eigen::MatrixX2d jump_f = ops.basis.eval * (is.side[0].f - is.side[1].f);
  const Eigen::MatrixX2d jump_w = ops.basis.eval * (is.side[1].w - is.side[0].w);
  std::vector<ContactPoint> out(ops.basis.points.size());
  for (std::size_t q = 0; q < out.size(); ++q) {
    const Vec2 n = ops.basis.normals[q];
    const double heart = 0.5 * ((jump_f(q, 0) + k * jump_w(q, 0)) * n.x + (jump_f(q, 1) + k * jump_w(q, 1)) * n.y);
    out[q] = {ops.basis.points[q], n, params_.law == ContactLaw::Unilateral ? std::min(heart, 0.0) : heart,
              jump_w(q, 0) * n.x + jump_w(q, 1) * n.y};
  }
  return out;
}

std::vector<ContactPoint> LatinSolver::contact_status(const LatinState& state, int iface) const {
  return heart(state, iface);
}

void LatinSolver::local_stage(LatinState& state) const {
  const double k = params_.k_plus;
  int contact = 0;
  for (std::size_t f = 0; f < ops_.size(); ++f) {
    const InterfaceOps& ops = *ops_[f];
    InterfaceState& is = state.interfaces[f];
    const int nq = static_cast<int>(ops.basis.points.size());
    Eigen::MatrixX2d h(nq, 2);
    if (params_.law == ContactLaw::Unilateral) {
      const auto pts = heart(state, static_cast<int>(f));
      for (int q = 0; q < nq; ++q) {
        h(q, 0) = pts[q].heart * pts[q].normal.x;
        h(q, 1) = pts[q].heart * pts[q].normal.y;
        if (pts[q].heart < 0.0) ++contact;
      }
    } else {
      // Bonded: the full heart traction is kept.
      h = 0.5 * (ops.basis.eval * (is.side[0].f - is.side[1].f + k * (is.side[1].w - is.side[0].w)));
      contact += nq;
    }
    const Eigen::MatrixXd rhs = ops.weighted_eval_t * h;
    const NodalField f_hat = ops.projection_factor->solve(rhs);
    is.side[0].f_hat = f_hat;
    is.side[1].f_hat = -f_hat;
    for (auto& side : is.side) side.w_hat = side.w + (side.f_hat - side.f) / k;
  }
  if (!state.history.empty() && state.history.back().iteration == state.iteration + 1) {
    state.history.back().contact_points = contact;
  }
}

void LatinSolver::iterate(LatinState& state) const {
  linear_stage(state);
  auto fresh = postprocess_interface(state);
  const double k = params_.k_minus;
  double num = 0.0, den = 0.0;
  for (std::size_t f = 0; f < ops_.size(); ++f) {
    const InterfaceOps& ops = *ops_[f];
    for (int s = 0; s < 2; ++s) {
      InterfaceSide& side = state.interfaces[f].side[s];
      auto& [w_new, f_new] = fresh[f][s];
      const NodalField w_old = side.w;
      const NodalField f_old = side.f;
      if (state.iteration == 0) {
        side.w = std::move(w_new);
        side.f = std::move(f_new);
      } else {
        relax(side.w, w_new, params_.eta);
        relax(side.f, f_new, params_.eta);
      }
      const Eigen::MatrixX2d dq = ops.basis.eval * (side.f - f_old);
      const Eigen::MatrixX2d wq = ops.basis.eval * (side.w - w_old);
      const Eigen::MatrixX2d fq = ops.basis.eval * side.f;
      const Eigen::MatrixX2d vq = ops.basis.eval * side.w;
      for (Eigen::Index q = 0; q < dq.rows(); ++q) {
        const double w = ops.basis.weights[q];
        num += w * (dq.row(q).squaredNorm() + k * k * wq.row(q).squaredNorm());
        den += w * (fq.row(q).squaredNorm() + k * k * vq.row(q).squaredNorm());
      }
    }
  }
  if (!std::isfinite(num) || !std::isfinite(den)) {
    throw Error(ErrorKind::Numerical, "interface fields are no longer finite");
  }
  state.history.push_back({state.iteration + 1, den > 0.0 ? std::sqrt(num / den) : 0.0, 0});
  local_stage(state);
  ++state.iteration;
}

LatinState LatinSolver::run(const Checkpoint& checkpoint) const {
  LatinState state = initial_state();
  for (int it = 0; it < params_.it_max; ++it) {
    try {
      iterate(state);
    } catch (const Error& e) {
      throw Error(e.kind(), "iteration " + std::to_string(it + 1) + ": " + e.what());
    }
    if (checkpoint) checkpoint(state);
  }
  return state;
}

}  // namespace latincut
