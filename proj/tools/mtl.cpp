#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mtl/pipeline.hpp"
#include "mtl/reproduce.hpp"

namespace {

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config;
  std::vector<std::string> overrides;
  std::string out;
  std::string profile;
};

void add_config_command(CLI::App& root, Subcommand& sc, const std::string& name, const std::string& help,
                        bool takes_profile) {
  sc.app = root.add_subcommand(name, help);
  sc.app->add_option("config", sc.config, "config file")->required();
  sc.app->add_option("--set", sc.overrides, "override: name=value or section.key=value");
  sc.app->add_option("--out", sc.out, "output directory");
  if (takes_profile) sc.app->add_option("--profile", sc.profile, "MTL1 profile to analyze instead of solving");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mass-transfer instability analysis for coupled Schroedinger systems"};
  app.require_subcommand(1);

  Subcommand validate, groundstate, analyze, simulate, sweep;
  add_config_command(app, validate, "validate", "check gauge invariance, synchronicity and structure", false);
  add_config_command(app, groundstate, "groundstate", "compute and certify the ground state", false);
  add_config_command(app, analyze, "analyze", "assemble the instability matrix and report a verdict", true);
  add_config_command(app, simulate, "simulate", "evolve perturbed data and record the trace", true);
  add_config_command(app, sweep, "sweep", "scan a parameter for the sign change of the minimal eigenvalue", false);

  std::string case_name, case_out = "out/reproduce";
  CLI::App* reproduce = app.add_subcommand("reproduce", "run a built-in reproduction case");
  reproduce->add_option("case", case_name, "case name")
      ->required()
      ->check(CLI::IsMember(mtl::reproduce_cases()));
  reproduce->add_option("--out", case_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : mtl::kExitConfigError;
  }

  if (reproduce->parsed()) {
    try {
      return mtl::cmd_reproduce(case_name, case_out + "/" + case_name, std::cout);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return mtl::kExitInternal;
    }
  }

  for (Subcommand* sc : {&validate, &groundstate, &analyze, &simulate, &sweep}) {
    if (!sc->app->parsed()) continue;
    mtl::CommandOptions options;
    options.config = sc->config;
    options.overrides = sc->overrides;
    if (!sc->out.empty()) options.out = sc->out;
    if (!sc->profile.empty()) options.profile = sc->profile;
    return mtl::run_command(sc->app->get_name(), options, std::cout, std::cerr);
  }
  return mtl::kExitInternal;
}
