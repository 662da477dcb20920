#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "latincut/config.hpp"

namespace latincut {

/// Runs the configured experiment and writes its outputs into config.output_dir.
/// Returns the written file names (relative to the output directory).
std::vector<std::string> run_experiment(const RunConfig& config, std::ostream& log);

}  // namespace latincut
