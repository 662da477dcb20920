#include "latincut/assembly.hpp"

#include <Eigen/Dense>
#include <algorithm>

#include "latincut/error.hpp"

namespace latincut {

namespace {

using Matrix36 = Eigen::Matrix<double, 3, 6>;
using Matrix26 = Eigen::Matrix<double, 2, 6>;

Matrix36 strain_matrix(const P1Element& el) {
  Matrix36 b = Matrix36::Zero();
  for (int k = 0; k < 3; ++k) {
    b(0, 2 * k) = el.grad[k].x;
    b(1, 2 * k + 1) = el.grad[k].y;
    b(2, 2 * k) = el.grad[k].y;
    b(2, 2 * k + 1) = el.grad[k].x;
  }
  return b;
}

// Maps Voigt stress to the traction on a face with normal n.
Eigen::Matrix<double, 2, 3> traction_operator(const Vec2& n) {
  Eigen::Matrix<double, 2, 3> s;
  s << n.x, 0.0, n.y, 0.0, n.y, n.x;
  return s;
}

Matrix26 shape_matrix(const std::array<double, 3>& N) {
  Matrix26 m = Matrix26::Zero();
  for (int k = 0; k < 3; ++k) {
    m(0, 2 * k) = N[k];
    m(1, 2 * k + 1) = N[k];
  }
  return m;
}

template <class Dofs, class Mat>
void add_symmetric(Triplets& out, const Dofs& dofs, const Mat& ke) {
  const Eigen::MatrixXd sym = 0.5 * (ke + ke.transpose());
  for (int a = 0; a < static_cast<int>(dofs.size()); ++a)
    for (int b = 0; b < static_cast<int>(dofs.size()); ++b)
      if (sym(a, b) != 0.0) out.emplace_back(dofs[a], dofs[b], sym(a, b));
}

std::array<int, 6> vector_dofs(const std::array<int, 3>& v) {
  return {2 * v[0], 2 * v[0] + 1, 2 * v[1], 2 * v[1] + 1, 2 * v[2], 2 * v[2] + 1};
}

double face_h(const TriMesh& mesh, const Face& f) {
  return f.is_boundary() ? mesh.diameter(f.left) : std::max(mesh.diameter(f.left), mesh.diameter(f.right));
}

}  // namespace

SparseSym assemble_elasticity(const FESpace& space) {
  const TriMesh& mesh = space.mesh();
  const CutDomain& dom = space.domain();
  const Eigen::Matrix3d d = dom.material.hooke();
  Triplets trip;
  trip.reserve(dom.cells.size() * 36);
  for (const auto& pc : dom.cells) {
    if (pc.area <= 0.0) continue;
    const P1Element el(mesh.corners(pc.cell));
    const Matrix36 b = strain_matrix(el);
    const Eigen::Matrix<double, 6, 6> ke = pc.area * (b.transpose() * d * b);
    add_symmetric(trip, vector_dofs(space.cell_vertices(pc.cell)), ke);
  }
  return SparseSym(space.num_dofs(), trip);
}

SparseSym assemble_ghost_penalty(const FESpace& space, double gamma_g) {
  const TriMesh& mesh = space.mesh();
  const CutDomain& dom = space.domain();
  const Eigen::Matrix3d d = dom.material.hooke();
  Triplets trip;
  if (gamma_g != 0.0) {
    for (int f : dom.ghost_faces) {
      const Face& face = mesh.face(f);
      const Eigen::Matrix<double, 2, 3> s = traction_operator(face.normal);
      const Matrix26 gl = s * d * strain_matrix(P1Element(mesh.corners(face.left)));
      const Matrix26 gr = s * d * strain_matrix(P1Element(mesh.corners(face.right)));
      Eigen::Matrix<double, 2, 12> g;
      g << gl, -gr;
      const double c = gamma_g * face_h(mesh, face) * face.length / dom.material.E;
      const auto dl = vector_dofs(space.cell_vertices(face.left));
      const auto dr = vector_dofs(space.cell_vertices(face.right));
      std::array<int, 12> dofs{};
      std::copy(dl.begin(), dl.end(), dofs.begin());
      std::copy(dr.begin(), dr.end(), dofs.begin() + 6);
      const Eigen::Matrix<double, 12, 12> ke = c * (g.transpose() * g);
      add_symmetric(trip, dofs, ke);
    }
  }
  return SparseSym(space.num_dofs(), trip);
}

SparseSym assemble_mass(const FESpace& space) {
  const TriMesh& mesh = space.mesh();
  const CutDomain& dom = space.domain();
  Triplets trip;
  std::vector<QuadPoint> qp;
  for (const auto& pc : dom.cells) {
    if (pc.area <= 0.0) continue;
    const P1Element el(mesh.corners(pc.cell));
    qp.clear();
    dom.quadrature(mesh, pc, qp);
    Eigen::Matrix<double, 6, 6> ke = Eigen::Matrix<double, 6, 6>::Zero();
    for (const auto& q : qp) {
      const Matrix26 n = shape_matrix(el.shape(q.point));
      ke += q.weight * (n.transpose() * n);
    }
    add_symmetric(trip, vector_dofs(space.cell_vertices(pc.cell)), ke);
  }
  return SparseSym(space.num_dofs(), trip);
}

SparseSym assemble_gradient_gram(const FESpace& space) {
  const TriMesh& mesh = space.mesh();
  const CutDomain& dom = space.domain();
  Triplets trip;
  for (const auto& pc : dom.cells) {
    if (pc.area <= 0.0) continue;
    const P1Element el(mesh.corners(pc.cell));
    Eigen::Matrix<double, 6, 6> ke = Eigen::Matrix<double, 6, 6>::Zero();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const double g = pc.area * dot(el.grad[a], el.grad[b]);
        ke(2 * a, 2 * b) = g;
        ke(2 * a + 1, 2 * b + 1) = g;
      }
    add_symmetric(trip, vector_dofs(space.cell_vertices(pc.cell)), ke);
  }
  return SparseSym(space.num_dofs(), trip);
}

NitscheTerms assemble_nitsche(const FESpace& space, const DirichletCondition& bc, double alpha, bool data_symmetry) {
  const TriMesh& mesh = space.mesh();
  const CutDomain& dom = space.domain();
  const Eigen::Matrix3d d = dom.material.hooke();
  Eigen::Matrix2d p = Eigen::Matrix2d::Zero();
  p(0, 0) = bc.fixed[0] ? 1.0 : 0.0;
  p(1, 1) = bc.fixed[1] ? 1.0 : 0.0;
  Triplets trip;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.num_dofs());
  std::vector<QuadPoint> qp;
  for (const auto& seg : dom.boundary) {
    if (seg.tag != bc.tag) continue;
    const P1Element el(mesh.corners(seg.cell));
    const Matrix26 sig = traction_operator(seg.normal) * d * strain_matrix(el);
    const double pen = alpha * dom.material.E / mesh.diameter(seg.cell);
    qp.clear();
    append_segment_rule(seg.a, seg.b, 2, qp);
    Eigen::Matrix<double, 6, 6> ke = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> fe = Eigen::Matrix<double, 6, 1>::Zero();
    for (const auto& q : qp) {
      const Matrix26 pn = p * shape_matrix(el.shape(q.point));
      ke += q.weight * (-pn.transpose() * sig - sig.transpose() * pn + pen * pn.transpose() * pn);
      if (bc.value) {
        const Vec2 u = bc.value(q.point);
        const Eigen::Vector2d pu = p * Eigen::Vector2d(u.x, u.y);
        fe += q.weight * (pen * pn.transpose() * pu);
        if (data_symmetry) fe -= q.weight * (sig.transpose() * pu);
      }
    }
    const auto dofs = vector_dofs(space.cell_vertices(seg.cell));
    add_symmetric(trip, dofs, ke);
    for (int a = 0; a < 6; ++a) load[dofs[a]] += fe[a];
  }
  return {SparseSym(space.num_dofs(), trip), std::move(load)};
}

Eigen::VectorXd assemble_rhs_body_neumann(const FESpace& space, const Vec2& body,
                                          std::span<const NeumannCondition> neumann) {
  const TriMesh& mesh = space.mesh();
  const CutDomain& dom = space.domain();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(space.num_dofs());
  std::vector<QuadPoint> qp;
  if (body.x != 0.0 || body.y != 0.0) {
    for (const auto& pc : dom.cells) {
      if (pc.area <= 0.0) continue;
      const P1Element el(mesh.corners(pc.cell));
      const auto v = space.cell_vertices(pc.cell);
      qp.clear();
      dom.quadrature(mesh, pc, qp);
      for (const auto& q : qp) {
        const auto n = el.shape(q.point);
        for (int a = 0; a < 3; ++a) {
          rhs[2 * v[a]] += q.weight * n[a] * body.x;
          rhs[2 * v[a] + 1] += q.weight * n[a] * body.y;
        }
      }
    }
  }
  for (const auto& nc : neumann) {
    for (const auto& seg : dom.boundary) {
      if (seg.tag != nc.tag) continue;
      const P1Element el(mesh.corners(seg.cell));
      const auto v = space.cell_vertices(seg.cell);
      qp.clear();
      append_segment_rule(seg.a, seg.b, 2, qp);
      for (const auto& q : qp) {
        const Vec2 t = nc.traction(q.point);
        const auto n = el.shape(q.point);
        for (int a = 0; a < 3; ++a) {
          rhs[2 * v[a]] += q.weight * n[a] * t.x;
          rhs[2 * v[a] + 1] += q.weight * n[a] * t.y;
        }
      }
    }
  }
  return rhs;
}

InterfaceBasis interface_basis(const TriMesh& mesh, const InterfaceMesh& iface, InterfaceMode mode) {
  InterfaceBasis basis;
  basis.mode = mode;
  const int nq = static_cast<int>(iface.quadrature.size());
  basis.num_nodes =
      mode == InterfaceMode::P1P1 ? static_cast<int>(iface.num_band_dofs()) : static_cast<int>(iface.segments.size());
  basis.weights.resize(nq);
  Triplets trip;
  for (std::size_t s = 0; s < iface.segments.size(); ++s) {
    const auto& seg = iface.segments[s];
    const P1Element el(mesh.corners(seg.cell));
    const auto& dofs = iface.band_cell_dofs[iface.segment_band_cell[s]];
    for (int k = 0; k < iface.points_per_segment; ++k) {
      const int q = static_cast<int>(s) * iface.points_per_segment + k;
      const QuadPoint& qp = iface.quadrature[q];
      basis.weights[q] = qp.weight;
      basis.points.push_back(qp.point);
      basis.normals.push_back(seg.normal);
      basis.segment.push_back(static_cast<int>(s));
      if (mode == InterfaceMode::P1P1) {
        const auto n = el.shape(qp.point);
        for (int a = 0; a < 3; ++a)
          if (n[a] != 0.0) trip.emplace_back(q, dofs[a], n[a]);
      } else {
        trip.emplace_back(q, static_cast<int>(s), 1.0);
      }
    }
  }
  basis.eval.resize(nq, basis.num_nodes);
  basis.eval.setFromTriplets(trip.begin(), trip.end());
  return basis;
}

SparseMatrix bulk_trace(const FESpace& space, const InterfaceMesh& iface) {
  const TriMesh& mesh = space.mesh();
  Triplets trip;
  for (std::size_t s = 0; s < iface.segments.size(); ++s) {
    const auto& seg = iface.segments[s];
    const P1Element el(mesh.corners(seg.cell));
    const auto v = space.cell_vertices(seg.cell);
    for (int k = 0; k < iface.points_per_segment; ++k) {
      const int q = static_cast<int>(s) * iface.points_per_segment + k;
      const auto n = el.shape(iface.quadrature[q].point);
      for (int a = 0; a < 3; ++a)
        if (n[a] != 0.0) trip.emplace_back(q, v[a], n[a]);
    }
  }
  SparseMatrix m(static_cast<int>(iface.quadrature.size()), space.num_vertices());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix node_trace(const FESpace& space, const InterfaceMesh& iface, InterfaceMode mode) {
  Triplets trip;
  int rows = 0;
  if (mode == InterfaceMode::P1P1) {
    rows = static_cast<int>(iface.num_band_dofs());
    for (int b = 0; b < rows; ++b) {
      const int v = space.local(iface.band_vertices[b]);
      if (v < 0) throw Error(ErrorKind::Dimension, "band vertex without bulk dofs");
      trip.emplace_back(b, v, 1.0);
    }
  } else {
    rows = static_cast<int>(iface.segments.size());
    for (int s = 0; s < rows; ++s) {
      const auto& seg = iface.segments[s];
      const P1Element el(space.mesh().corners(seg.cell));
      const auto v = space.cell_vertices(seg.cell);
      const auto n = el.shape(0.5 * (seg.a + seg.b));
      for (int a = 0; a < 3; ++a)
        if (n[a] != 0.0) trip.emplace_back(s, v[a], n[a]);
    }
  }
  SparseMatrix m(rows, space.num_vertices());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SparseMatrix interface_coupling(const FESpace& space, const InterfaceMesh& iface, const InterfaceBasis& basis) {
  const SparseMatrix trace = bulk_trace(space, iface);
  return SparseMatrix(trace.transpose() * basis.weights.asDiagonal() * basis.eval);
}

SparseSym assemble_latin_augmentation(const FESpace& space, std::span<const InterfaceMesh* const> interfaces,
                                      double k_minus) {
  const TriMesh& mesh = space.mesh();
  Triplets trip;
  if (k_minus != 0.0) {
    for (const InterfaceMesh* iface : interfaces) {
      for (std::size_t s = 0; s < iface->segments.size(); ++s) {
        const auto& seg = iface->segments[s];
        const P1Element el(mesh.corners(seg.cell));
        Eigen::Matrix<double, 6, 6> ke = Eigen::Matrix<double, 6, 6>::Zero();
        for (const auto& q : iface->segment_points(s)) {
          const Matrix26 n = shape_matrix(el.shape(q.point));
          ke += (k_minus * q.weight) * (n.transpose() * n);
        }
        add_symmetric(trip, vector_dofs(space.cell_vertices(seg.cell)), ke);
      }
    }
  }
  return SparseSym(space.num_dofs(), trip);
}

Eigen::VectorXd assemble_rhs_latin(const FESpace& space, std::span<const InterfaceLoad> loads, double k_minus) {
  Eigen::MatrixX2d acc = Eigen::MatrixX2d::Zero(space.num_vertices(), 2);
  for (const auto& load : loads) {
    const InterfaceBasis basis = interface_basis(space.mesh(), *load.iface, load.mode);
    if (load.f_hat->rows() != basis.num_nodes || load.w_hat->rows() != basis.num_nodes) {
      throw Error(ErrorKind::Dimension, "interface field does not match the interface nodes");
    }
    const SparseMatrix c = interface_coupling(space, *load.iface, basis);
    acc += c * (*load.f_hat + k_minus * *load.w_hat);
  }
  Eigen::VectorXd out(space.num_dofs());
  for (int v = 0; v < space.num_vertices(); ++v) {
    out[2 * v] = acc(v, 0);
    out[2 * v + 1] = acc(v, 1);
  }
  return out;
}

SparseSym assemble_interface_mass(const InterfaceBasis& basis) {
  Triplets trip;
  const SparseMatrix e = basis.eval;
  // Accumulate per quadrature point so entry (a,b) and (b,a) see identical sums.
  const SparseMatrix et = e.transpose();
  for (int q = 0; q < et.outerSize(); ++q) {
    for (SparseMatrix::InnerIterator a(et, q); a; ++a)
      for (SparseMatrix::InnerIterator b(et, q); b; ++b)
        trip.emplace_back(static_cast<int>(a.row()), static_cast<int>(b.row()),
                          basis.weights[q] * a.value() * b.value());
  }
  return SparseSym(basis.num_nodes, trip);
}

SparseSym assemble_gradient_jump(const TriMesh& mesh, const InterfaceMesh& iface, double gamma_pi) {
  Triplets trip;
  if (gamma_pi != 0.0) {
    auto band_pos = [&](int cell) {
      return static_cast<int>(std::lower_bound(iface.band_cells.begin(), iface.band_cells.end(), cell) -
                              iface.band_cells.begin());
    };
    for (int f : iface.interior_faces) {
      const Face& face = mesh.face(f);
      const P1Element l(mesh.corners(face.left));
      const P1Element r(mesh.corners(face.right));
      const auto& dl = iface.band_cell_dofs[band_pos(face.left)];
      const auto& dr = iface.band_cell_dofs[band_pos(face.right)];
      Eigen::Matrix<double, 6, 1> g;
      for (int k = 0; k < 3; ++k) {
        g[k] = dot(l.grad[k], face.normal);
        g[3 + k] = -dot(r.grad[k], face.normal);
      }
      const double h = face_h(mesh, face);
      const std::array<int, 6> dofs = {dl[0], dl[1], dl[2], dr[0], dr[1], dr[2]};
      const Eigen::Matrix<double, 6, 6> ke = (gamma_pi * h * h * face.length) * (g * g.transpose());
      add_symmetric(trip, dofs, ke);
    }
  }
  return SparseSym(static_cast<int>(iface.num_band_dofs()), trip);
}

SparseSym assemble_normal_slope(const TriMesh& mesh, const InterfaceMesh& iface, double delta) {
  Triplets trip;
  if (delta != 0.0) {
    for (std::size_t s = 0; s < iface.segments.size(); ++s) {
      const auto& seg = iface.segments[s];
      const P1Element el(mesh.corners(seg.cell));
      const auto& dofs = iface.band_cell_dofs[iface.segment_band_cell[s]];
      Eigen::Vector3d g;
      for (int k = 0; k < 3; ++k) g[k] = dot(el.grad[k], seg.normal);
      const double h = mesh.diameter(seg.cell);
      const Eigen::Matrix3d ke = (delta * h * h * seg.length()) * (g * g.transpose());
      add_symmetric(trip, dofs, ke);
    }
  }
  return SparseSym(static_cast<int>(iface.num_band_dofs()), trip);
}

SparseSym assemble_interface_projection(const TriMesh& mesh, const InterfaceMesh& iface, double gamma_pi,
                                        InterfaceMode mode, double normal_slope) {
  const InterfaceBasis basis = interface_basis(mesh, iface, mode);
  const SparseSym m = assemble_interface_mass(basis);
  if (mode == InterfaceMode::P1P0) return m;
  const SparseSym j = assemble_gradient_jump(mesh, iface, gamma_pi);
  const SparseSym r = assemble_normal_slope(mesh, iface, normal_slope);
  return SparseSym(SparseMatrix(m.matrix() + j.matrix() + r.matrix()));
}

}  // namespace latincut
