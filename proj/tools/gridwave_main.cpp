#include <CLI11.hpp>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "gridwave/errors.hpp"
#include "gridwave/pipeline.hpp"
#include "gridwave/wavelet.hpp"

namespace {

struct CommonArgs {
  std::string scenario;
  std::string signals;
  std::string out_dir;
  int levels = 5;
  std::string extension = "symmetric";
  double threshold = 1e-4;
  double theta_in = 0.8;
  double theta_out = 0.5;
  std::vector<double> event_window;
  std::vector<double> coherency_window;
  std::vector<double> rocof_window;
};

void add_common_options(CLI::App* cmd, CommonArgs* args, bool analysis_flags) {
  cmd->add_option("--scenario", args->scenario, "scenario description file");
  cmd->add_option("--signals", args->signals, "signals CSV file");
  cmd->add_option("--out", args->out_dir, "output directory")->required();
  if (analysis_flags) {
    cmd->add_option("--levels", args->levels, "decomposition depth (default 5)");
    cmd->add_option("--extension", args->extension,
                    "boundary extension: symmetric|periodic|zero");
    cmd->add_option("--threshold", args->threshold, "|D1| detection threshold in Hz");
    cmd->add_option("--theta-in", args->theta_in, "within-group correlation threshold");
    cmd->add_option("--theta-out", args->theta_out, "opposing-group correlation threshold");
    cmd->add_option("--event-window", args->event_window, "energy window: T0 T1 seconds")
        ->expected(2);
    cmd->add_option("--coherency-window", args->coherency_window,
                    "coherency window: T0 T1 seconds")
        ->expected(2);
    cmd->add_option("--rocof-window", args->rocof_window, "ROCOF fit window: T0 T1 seconds")
        ->expected(2);
  }
}

int run(const CommonArgs& args, gridwave::PipelineScope scope) {
  gridwave::PipelineConfig config;
  config.scenario_path = args.scenario;
  config.signals_path = args.signals;
  config.output_dir = args.out_dir;
  config.scope = scope;
  config.levels = args.levels;
  config.threshold = args.threshold;
  config.theta_in = args.theta_in;
  config.theta_out = args.theta_out;
  try {
    config.extension = gridwave::parse_extension(args.extension);
  } catch (const gridwave::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  auto window = [](const std::vector<double>& w)
      -> std::optional<std::pair<double, double>> {
    if (w.size() == 2) return std::make_pair(w[0], w[1]);
    return std::nullopt;
  };
  config.event_window = window(args.event_window);
  config.coherency_window = window(args.coherency_window);
  config.rocof_window = window(args.rocof_window);

  const gridwave::PipelineOutcome outcome = gridwave::run_pipeline(config);
  if (outcome.exit_code != 0) {
    std::fprintf(stderr, "error: %s\n", outcome.message.c_str());
    return outcome.exit_code;
  }
  if (!outcome.message.empty()) std::printf("%s\n", outcome.message.c_str());
  if (outcome.loss_of_synchronism) std::printf("warning: loss of synchronism flagged\n");
  std::printf("wrote %zu file(s) to %s\n", outcome.files_written.size(),
              args.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swing-equation simulation and wavelet analysis of bus-frequency records"};
  app.require_subcommand(1);

  CommonArgs args;
  using gridwave::PipelineScope;
  struct Sub {
    const char* name;
    const char* help;
    PipelineScope scope;
    bool analysis_flags;
  };
  const Sub subs[] = {
      {"simulate", "run a scenario and write signals.csv", PipelineScope::simulate_only, false},
      {"decompose", "write per-channel band components", PipelineScope::decompose_only, true},
      {"analyze", "full pipeline: decompose, localize, coherency, ROCOF",
       PipelineScope::full, true},
      {"localize", "D1-energy disturbance localization", PipelineScope::localize_only, true},
      {"coherency", "coherent-group partition from the deepest detail band",
       PipelineScope::coherency_only, true},
      {"rocof", "rate-of-change-of-frequency estimates", PipelineScope::rocof_only, true},
  };
  for (const auto& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    add_common_options(cmd, &args, sub.analysis_flags);
    cmd->callback([&args, scope = sub.scope] { std::exit(run(args, scope)); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  return 0;
}
