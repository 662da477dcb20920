#pragma once

#include <span>
#include <string>
#include <vector>

#include "latincut/analysis.hpp"
#include "latincut/experiments.hpp"

namespace latincut {

/// h, H1_error, energy_error, rate_to_previous (energy norm; empty on the first row).
void write_convergence_csv(const std::string& path, std::span<const LevelResult> levels);

/// it, energy_error_vs_ref, latin_indicator.
void write_iterations_csv(const std::string& path, std::span<const IterationSample> history);

/// theta, traction.
void write_profile_csv(const std::string& path, std::span<const ProfilePoint> profile);

/// eps, gamma_g, kappa.
void write_condition_csv(const std::string& path, std::span<const ConditionSample> samples);

/// h, kappa.
void write_scaling_csv(const std::string& path, std::span<const ConditionSample> samples);

/// Legacy ASCII VTK of one subdomain on its physical sub-triangulation: point
/// displacement (3 components) and cell stresses stress_xx, stress_yy, stress_xy.
void write_vtk(const std::string& path, const FESpace& space, const Eigen::VectorXd& u, const std::string& title);

/// Writes `text` to `path`; throws Io on failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace latincut
