// Command-line front end: parses a key=value experiment config and runs
// simulation sweeps, bound computations, posterior traces, config validation,
// or canonical config echo.  Exit codes: 0 success, 1 configuration error,
// 2 runtime error.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "dsa/config.hpp"
#include "dsa/errors.hpp"
#include "dsa/experiment.hpp"
#include "dsa/sim.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out = "-";
  std::uint64_t seed = 0;
  long long runs = 0;
  int threads = 1;
};

void add_common_options(CLI::App* sub, CommonOptions* opts) {
  sub->add_option("--config", opts->config_path, "Path to key=value config file")
      ->required();
  sub->add_option("--out", opts->out, "Output path, or '-' for stdout")
      ->capture_default_str();
  sub->add_option("--seed", opts->seed, "Override the config's master seed");
  sub->add_option("--runs", opts->runs, "Override the config's episode count")
      ->check(CLI::PositiveNumber);
  sub->add_option("--threads", opts->threads,
                  "Worker threads (0 = hardware concurrency)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opportunistic spectrum-access policy simulator"};
  app.require_subcommand(1);

  CommonOptions opts;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Run every (policy, zeta, snr_db) sweep cell");
  CLI::App* bound =
      app.add_subcommand("bound", "Compute the full-observation reward bound per cell");
  CLI::App* trace =
      app.add_subcommand("trace", "Per-slot posterior mass on the true signal level");
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Check a config and every expanded cell");
  CLI::App* echo =
      app.add_subcommand("echo-config", "Print the parsed config in canonical form");
  for (CLI::App* sub : {simulate, bound, trace, validate_cmd, echo})
    add_common_options(sub, &opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::vector<std::string> warnings;
    dsa::ExperimentSpec spec = dsa::parse_config(opts.config_path, &warnings);
    for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';

    CLI::App* sub = app.get_subcommands().front();
    if (sub->count("--seed") > 0) spec.seed = opts.seed;
    if (sub->count("--runs") > 0) spec.runs = opts.runs;

    if (sub == simulate) {
      dsa::write_text_atomic(opts.out, dsa::result_csv(dsa::cmd_simulate(spec, opts.threads)));
    } else if (sub == bound) {
      dsa::write_text_atomic(opts.out, dsa::result_csv(dsa::cmd_bound(spec)));
    } else if (sub == trace) {
      dsa::write_text_atomic(opts.out, dsa::trace_csv(dsa::cmd_trace(spec, opts.threads)));
    } else if (sub == validate_cmd) {
      // The parse above already enforced the schema; additionally expand and
      // check every sweep cell so model-level problems surface here.
      std::vector<std::string> violations;
      for (dsa::PolicyKind policy : spec.policies)
        for (double zeta : spec.zeta_list)
          for (double snr : spec.snr_db_list) {
            const dsa::SimConfig cell =
                dsa::make_sim_config(spec, policy, zeta, snr, opts.threads);
            for (const std::string& v : dsa::validate(cell))
              violations.push_back(dsa::to_string(policy) + " cell: " + v);
          }
      if (!violations.empty()) {
        for (const std::string& v : violations) std::cerr << "invalid: " << v << '\n';
        return 1;
      }
      dsa::write_text_atomic(opts.out, "ok\n");
    } else if (sub == echo) {
      dsa::write_text_atomic(opts.out, dsa::emit_config(spec));
    }
    return 0;
  } catch (const dsa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
