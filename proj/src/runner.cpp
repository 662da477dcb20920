#include "latincut/runner.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>

#include "latincut/error.hpp"
#include "latincut/format.hpp"
#include "latincut/output.hpp"

namespace latincut {

namespace {

class Outputs {
 public:
  explicit Outputs(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir + "': " + ec.message());
  }

  std::string path(const std::string& name) {
    files_.push_back(name);
    return (dir_ / name).string();
  }

  std::vector<std::string> files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

// Separate solve of the output level carrying the checkpoint exports.
void export_run(const RunConfig& c, InterfaceMode mode, const std::string& profile_prefix, bool fields,
                Outputs& out, std::ostream& log) {
  if (c.checkpoints.empty()) return;
  ProblemDef def = c.problem;
  def.latin.mode = mode;
  def.latin.it_max = std::max(def.latin.it_max, c.checkpoints.back());
  const Discretization d = discretize(def, level_mesh(def, c.output_level));
  log << "export run (" << to_string(mode) << ", level " << c.output_level << ", " << def.latin.it_max
      << " iterations)\n";
  d.solver->run([&](const LatinState& s) {
    if (!std::binary_search(c.checkpoints.begin(), c.checkpoints.end(), s.iteration)) return;
    const std::string it = std::to_string(s.iteration);
    if (c.export_profiles && d.solver->num_interfaces() > 0) {
      const auto profile = traction_profile(d.solver->basis(0), s.interfaces[0].side[0].f_hat, 0);
      write_profile_csv(out.path(profile_prefix + it + ".csv"), profile);
    }
    if (fields) {
      for (int i = 0; i < d.solver->num_subdomains(); ++i) {
        write_vtk(out.path("fields_it" + it + "_sub" + std::to_string(i) + ".vtk"), d.solver->system(i).space(),
                  s.u[i], "subdomain " + std::to_string(i) + " iteration " + it);
      }
    }
  });
}

void convergence_experiment(const RunConfig& c, Outputs& out, std::ostream& log) {
  const ProblemDef& def = c.problem;
  log << "reference solve at level " << def.reference_level << "\n";
  const ReferenceSolution ref(def);
  std::vector<LevelResult> levels;
  for (int l = 0; l < def.levels; ++l) {
    const bool last = l + 1 == def.levels;
    levels.push_back(run_level(def, l, ref, last));
    log << "level " << l << ": h = " << format_double(levels.back().h) << ", H1 error "
        << format_double(levels.back().h1) << ", energy error " << format_double(levels.back().energy) << "\n";
  }
  if (c.export_convergence) {
    write_convergence_csv(out.path("convergence.csv"), levels);
    write_iterations_csv(out.path("iterations.csv"), levels.back().history);
  }
  if (levels.size() >= 3) {
    ConvergenceRecord rec;
    for (const auto& l : levels) {
      rec.h.push_back(l.h);
      rec.h1.push_back(l.h1);
      rec.energy.push_back(l.energy);
    }
    const RateFit fit = fit_rates(rec);
    log << "fitted rates: H1 " << format_double(fit.h1) << ", energy " << format_double(fit.energy) << "\n";
  }
  export_run(c, def.latin.mode, "profile_", c.export_fields, out, log);
  if (c.compare_p1p0) export_run(c, InterfaceMode::P1P0, "profile_p1p0_", false, out, log);
}

}  // namespace

std::vector<std::string> run_experiment(const RunConfig& config, std::ostream& log) {
  config.validate();
  Outputs out(config.output_dir);
  write_text(out.path("config.resolved"), to_config_text(config));
  const std::string& name = config.problem.experiment;
  if (name == "ellipse" || name == "two-inclusions") {
    convergence_experiment(config, out, log);
  } else if (name == "crack-condition") {
    const auto samples = crack_sweep(config.problem, config.sweep_eps, config.sweep_gamma_g, config.sweep_case == "ii",
                                     config.sweep_eps_x, config.workers);
    for (const auto& s : samples) {
      log << "eps " << format_double(s.eps) << ", gamma_g " << format_double(s.gamma_g) << ": kappa "
          << format_double(s.result.kappa) << "\n";
    }
    if (config.export_condition) write_condition_csv(out.path("condition.csv"), samples);
  } else if (name == "crack-scaling") {
    const auto samples = crack_scaling(config.problem, config.scaling_eps, config.workers);
    std::vector<double> h, kappa;
    for (const auto& s : samples) {
      log << "h " << format_double(s.h) << ": kappa " << format_double(s.result.kappa) << "\n";
      h.push_back(s.h);
      kappa.push_back(s.result.kappa);
    }
    if (samples.size() >= 2) log << "log-log slope " << format_double(fit_rate(h, kappa)) << "\n";
    if (config.export_condition) write_scaling_csv(out.path("condition_scaling.csv"), samples);
  } else {
    throw Error(ErrorKind::Validation, "unknown experiment '" + name + "'");
  }
  return out.files();
}

}  // namespace latincut
