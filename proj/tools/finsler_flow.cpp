// finsler-flow: scenario runner for the Finsler geometric-flow engine.
//
// Subcommands share one scenario config (a bundled preset name or a file
// path) and differ only in which pipeline phases they enable. Exit code 0
// means every enabled check passed.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "finsler/runner.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  int threads = 0;
  int refinements = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config,
                  "scenario preset name or config file path")
      ->required();
  cmd->add_option("--seed", args.seed, "override the run seed")
      ->each([&](const std::string&) { args.seed_set = true; });
  cmd->add_option("--out", args.out, "override the output directory");
  cmd->add_option("--threads", args.threads, "worker threads for grid maps");
  cmd->add_option("--refinements", args.refinements,
                  "refinement levels for identity checks (1-4)");
}

int run_with(const CommonArgs& args, const finsler::RunSelection& sel) {
  finsler::ScenarioConfig cfg;
  try {
    cfg = finsler::resolve_scenario(args.config);
    if (args.seed_set) cfg.seed = args.seed;
    if (!args.out.empty()) cfg.output_directory = args.out;
    if (args.threads > 0) cfg.threads = args.threads;
    if (args.refinements > 0) cfg.refinements = args.refinements;
    finsler::validate_scenario(cfg);
  } catch (const finsler::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  finsler::RunReport report;
  try {
    report = finsler::run_scenario(cfg, sel);
    finsler::emit_report(report);
  } catch (const finsler::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  for (const finsler::CheckOutcome& c : report.rollup)
    std::printf("%-4s %s (value %.6g, threshold %.6g)\n",
                c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                c.threshold);
  if (report.partial)
    std::printf("FAIL partial run: %s\n", report.failure.c_str());
  std::printf("%s rollup (%s); report written to %s\n",
              report.pass ? "PASS" : "FAIL", cfg.name.c_str(),
              cfg.output_directory.c_str());
  return report.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finsler geometric-flow engine: heat flow, evolution "
               "identities, gradient estimate and Harnack bounds"};
  app.require_subcommand(1);

  CommonArgs args;
  finsler::RunSelection selection;

  CLI::App* all = app.add_subcommand("run-all", "full pipeline");
  add_common(all, args);
  all->callback([&] { selection = finsler::RunSelection::all(); });

  CLI::App* ids =
      app.add_subcommand("check-identities", "identity residual suite only");
  add_common(ids, args);
  ids->callback([&] { selection = finsler::RunSelection::only_identities(); });

  CLI::App* est = app.add_subcommand("estimate-constants",
                                     "hypothesis constants and Q only");
  add_common(est, args);
  est->callback([&] { selection = finsler::RunSelection::only_estimates(); });

  CLI::App* heat =
      app.add_subcommand("run-heat-flow", "heat-flow trajectory only");
  add_common(heat, args);
  heat->callback([&] { selection = finsler::RunSelection::only_heat_flow(); });

  CLI::App* th1 = app.add_subcommand("verify-gradient-estimate",
                                     "gradient-estimate margin sweep");
  add_common(th1, args);
  th1->callback([&] { selection = finsler::RunSelection::only_gradient_estimate(); });

  CLI::App* th2 =
      app.add_subcommand("verify-harnack", "Harnack pair margins");
  add_common(th2, args);
  th2->callback([&] { selection = finsler::RunSelection::only_harnack(); });

  CLI::App* presets =
      app.add_subcommand("list-presets", "print bundled scenario names");
  presets->callback([] {
    for (const std::string& p : finsler::preset_names())
      std::printf("%s\n", p.c_str());
  });

  CLI::App* print_cfg = app.add_subcommand(
      "print-config", "print the canonical text of a preset or file");
  std::string print_name;
  print_cfg->add_option("name", print_name, "preset name or path")->required();
  print_cfg->callback([&] {
    std::printf("%s",
                finsler::emit_scenario(finsler::resolve_scenario(print_name))
                    .c_str());
  });

  CLI11_PARSE(app, argc, argv);

  if (app.got_subcommand("list-presets") || app.got_subcommand("print-config"))
    return 0;
  return run_with(args, selection);
}
