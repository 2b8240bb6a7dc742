#include <CLI11.hpp>

#include "cli_app.hpp"

int main(int argc, char** argv) {
  using meshmdp::app::Options;
  Options opt;
  CLI::App app{"Weighted stochastic mesh solver for finite-horizon MDPs"};
  app.set_version_flag("--version", std::string(MESHMDP_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  unsigned workers = 0;
  app.add_option("--config", config_path, "config file (key-value text or manifest .json)");
  app.add_option("--set", opt.overrides, "override section.key=value (repeatable)")->take_all();
  app.add_option("--out", opt.out_dir, "output directory")->capture_default_str();
  auto* workers_opt = app.add_option("--workers", workers, "worker threads (0 = all cores)");
  app.add_flag("--self-test", opt.self_test, "check self_test.* bounds; exit 4 on failure");

  app.add_subcommand("solve", "one mesh solve: values, policy, cost counters");
  app.add_subcommand("lqg-table", "LQG benchmark table over run.n_paths");
  app.add_subcommand("lqg-sweep", "mesh and reference values over sweep.lambdas");
  auto* oracle = app.add_subcommand("oracle", "closed-form or grid-DP reference value");
  std::string method;
  auto* method_opt =
      oracle->add_option("--method", method, "closed_form | grid_dp")
          ->check(CLI::IsMember({"closed_form", "grid_dp"}));
  app.add_subcommand("check-weights", "weight consistency curve against quadrature");
  app.add_subcommand("calibrate", "pick lambda matching calibrate.target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : meshmdp::app::kConfigError;
  }

  opt.command = app.get_subcommands().front()->get_name();
  if (!config_path.empty()) opt.config_path = config_path;
  if (workers_opt->count() > 0) opt.workers = workers;
  if (method_opt->count() > 0) opt.method = method;
  return meshmdp::app::run_command(opt);
}
