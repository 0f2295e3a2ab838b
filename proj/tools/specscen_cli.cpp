#include <iostream>

#include <CLI11.hpp>

#include "specscen/pipeline.hpp"

namespace cli = specscen::cli;

int main(int argc, char** argv) {
  CLI::App app{"specscen: specification-directed scenario generation and coverage"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> agent;
  std::optional<int> multiplier;
  std::vector<std::string> inputs;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* opt = sub->add_option("--config", config_path, "run configuration (JSON)");
    if (need_config) opt->required();
    sub->add_option("--seed", seed, "master seed override");
    sub->add_option("--jobs", jobs, "concurrent simulations");
    sub->add_option("--agent", agent, "ego agent: follower, compliant-stopper, scripted");
  };

  auto* generate = app.add_subcommand("generate", "relational graphs, scenes and scenario scripts");
  add_common(generate, true);
  auto* simulate = app.add_subcommand("simulate", "run scripts and write traces");
  add_common(simulate, false);
  simulate->add_option("scripts", inputs, "script files (instead of --config)");
  auto* evaluate = app.add_subcommand("evaluate", "coverage report and curve");
  add_common(evaluate, true);
  evaluate->add_option("traces", inputs, "trace files (default: every trace of each spec)");
  auto* run_all = app.add_subcommand("run-all", "generate, simulate and evaluate");
  add_common(run_all, true);
  auto* baseline = app.add_subcommand("baseline-random", "random-placement baseline");
  add_common(baseline, true);
  baseline->add_option("--multiplier", multiplier, "NPC multiplier (1 or 10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    cli::Outcome out;
    if (simulate->parsed() && config_path.empty()) {
      if (inputs.empty()) return 0;
      std::vector<cli::fs::path> scripts(inputs.begin(), inputs.end());
      out = cli::cmd_simulate_scripts(scripts, agent.value_or("follower"), jobs.value_or(1));
    } else {
      cli::RunConfig cfg = cli::load_run_config(config_path);
      if (seed) cfg.seed = *seed;
      if (jobs) cfg.jobs = *jobs;
      if (agent) cfg.agent = *agent;
      if (multiplier) cfg.multiplier = *multiplier;
      if (generate->parsed()) out = cli::cmd_generate(cfg);
      else if (simulate->parsed()) out = cli::cmd_simulate(cfg);
      else if (evaluate->parsed()) out = cli::cmd_evaluate(cfg, {inputs.begin(), inputs.end()});
      else if (run_all->parsed()) out = cli::cmd_run_all(cfg);
      else out = cli::cmd_baseline_random(cfg);
    }
    for (const auto& m : out.messages) std::cerr << m << '\n';
    for (const auto& r : out.reports) std::cout << specscen::eval::format_table({r});
    return out.exit_code();
  } catch (const cli::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
