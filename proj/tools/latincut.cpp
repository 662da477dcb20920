#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>

#include "latincut/config.hpp"
#include "latincut/error.hpp"
#include "latincut/runner.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kNumericalError = 2 };

int report(std::string_view kind, std::string_view stage, const std::string& message, int code) {
  const nlohmann::json record = {{"error", kind}, {"stage", stage}, {"message", message}, {"exit_code", code}};
  std::cerr << record.dump() << "\n";
  return code;
}

int guarded(std::string_view stage, const std::function<void()>& body) {
  using latincut::ErrorKind;
  try {
    body();
    return kOk;
  } catch (const latincut::Error& e) {
    const bool config = e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::Validation ||
                        e.kind() == ErrorKind::Configuration;
    return report(latincut::to_string(e.kind()), stage, e.what(), config ? kConfigError : kNumericalError);
  } catch (const std::exception& e) {
    return report("internal", stage, e.what(), kNumericalError);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cut finite element contact solver with LaTIn domain decomposition"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  auto* run = app.add_subcommand("run", "run the experiment described by a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("-o,--output", output_dir, "output directory (overrides run.output_dir)");

  auto* validate = app.add_subcommand("validate", "parse and validate a config file, print the resolved keys");
  validate->add_option("config", config_path, "config file")->required();

  auto* list = app.add_subcommand("list-experiments", "list the built-in experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kConfigError;
  }

  if (list->parsed()) {
    for (const auto& e : latincut::experiment_catalog()) std::cout << e.name << "\t" << e.summary << "\n";
    return kOk;
  }

  latincut::RunConfig config;
  if (const int rc = guarded("config", [&] {
        config = latincut::load_config(config_path, latincut::process_environment());
        if (!output_dir.empty()) config.output_dir = output_dir;
      });
      rc != kOk) {
    return rc;
  }

  if (validate->parsed()) {
    std::cout << latincut::to_config_text(config);
    return kOk;
  }
  return guarded("run", [&] {
    const auto files = latincut::run_experiment(config, std::cout);
    std::cout << "wrote " << files.size() << " files to " << config.output_dir << "\n";
  });
}
