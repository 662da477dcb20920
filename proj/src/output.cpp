#include "latincut/output.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "latincut/error.hpp"
#include "latincut/format.hpp"

namespace latincut {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

void write_convergence_csv(const std::string& path, std::span<const LevelResult> levels) {
  std::string s = "h,H1_error,energy_error,rate_to_previous\n";
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const LevelResult& l = levels[k];
    s += format_double(l.h) + "," + format_double(l.h1) + "," + format_double(l.energy) + ",";
    if (k > 0) {
      const LevelResult& p = levels[k - 1];
      s += format_double(std::log(l.energy / p.energy) / std::log(l.h / p.h));
    }
    s += "\n";
  }
  write_text(path, s);
}

void write_iterations_csv(const std::string& path, std::span<const IterationSample> history) {
  std::string s = "it,energy_error_vs_ref,latin_indicator\n";
  for (const auto& h : history)
    s += std::to_string(h.iteration) + "," + format_double(h.energy_error) + "," + format_double(h.indicator) + "\n";
  write_text(path, s);
}

void write_profile_csv(const std::string& path, std::span<const ProfilePoint> profile) {
  std::string s = "theta,traction\n";
  for (const auto& p : profile) s += format_double(p.theta) + "," + format_double(p.traction) + "\n";
  write_text(path, s);
}

void write_condition_csv(const std::string& path, std::span<const ConditionSample> samples) {
  std::string s = "eps,gamma_g,kappa\n";
  for (const auto& c : samples)
    s += format_double(c.eps) + "," + format_double(c.gamma_g) + "," + format_double(c.result.kappa) + "\n";
  write_text(path, s);
}

void write_scaling_csv(const std::string& path, std::span<const ConditionSample> samples) {
  std::string s = "h,kappa\n";
  for (const auto& c : samples) s += format_double(c.h) + "," + format_double(c.result.kappa) + "\n";
  write_text(path, s);
}

void write_vtk(const std::string& path, const FESpace& space, const Eigen::VectorXd& u, const std::string& title) {
  if (u.size() != space.num_dofs()) throw Error(ErrorKind::Dimension, "field does not match the space");
  const TriMesh& mesh = space.mesh();
  const CutDomain& dom = space.domain();
  const Eigen::Matrix3d d = dom.material.hooke();

  std::vector<Triangle2> tris;
  std::vector<Vec2> disp;
  std::vector<Eigen::Vector3d> stress;
  std::vector<Triangle2> pieces;
  for (const PhysicalCell& pc : dom.cells) {
    pieces.clear();
    dom.physical_triangles(mesh, pc, pieces);
    const P1Element el(mesh.corners(pc.cell));
    const auto lv = space.cell_vertices(pc.cell);
    Eigen::Vector3d strain = Eigen::Vector3d::Zero();
    for (int k = 0; k < 3; ++k) {
      const double ux = u[2 * lv[k]], uy = u[2 * lv[k] + 1];
      strain[0] += el.grad[k].x * ux;
      strain[1] += el.grad[k].y * uy;
      strain[2] += el.grad[k].y * ux + el.grad[k].x * uy;
    }
    const Eigen::Vector3d sigma = d * strain;
    for (const Triangle2& t : pieces) {
      tris.push_back(t);
      stress.push_back(sigma);
      for (const Vec2& p : t) {
        const auto phi = el.shape(p);
        Vec2 v;
        for (int k = 0; k < 3; ++k) {
          v.x += phi[k] * u[2 * lv[k]];
          v.y += phi[k] * u[2 * lv[k] + 1];
        }
        disp.push_back(v);
      }
    }
  }

  std::ostringstream s;
  const std::size_t nt = tris.size();
  s << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  s << "POINTS " << 3 * nt << " double\n";
  for (const Triangle2& t : tris)
    for (const Vec2& p : t) s << format_double(p.x) << " " << format_double(p.y) << " 0\n";
  s << "CELLS " << nt << " " << 4 * nt << "\n";
  for (std::size_t k = 0; k < nt; ++k) s << "3 " << 3 * k << " " << 3 * k + 1 << " " << 3 * k + 2 << "\n";
  s << "CELL_TYPES " << nt << "\n";
  for (std::size_t k = 0; k < nt; ++k) s << "5\n";
  s << "POINT_DATA " << 3 * nt << "\nVECTORS displacement double\n";
  for (const Vec2& v : disp) s << format_double(v.x) << " " << format_double(v.y) << " 0\n";
  s << "CELL_DATA " << nt << "\n";
  const char* names[3] = {"stress_xx", "stress_yy", "stress_xy"};
  for (int c = 0; c < 3; ++c) {
    s << "SCALARS " << names[c] << " double 1\nLOOKUP_TABLE default\n";
    for (const auto& sig : stress) s << format_double(sig[c]) << "\n";
  }
  write_text(path, s.str());
}

}  // namespace latincut
