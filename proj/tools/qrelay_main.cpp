// qrelay: partial decode-forward rates and coding simulations for
// classical-quantum relay channels.

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrelay/cli_commands.hpp"
#include "qrelay/example_channels.hpp"
#include "qrelay/parallel.hpp"

using nlohmann::json;
namespace cli = qrelay::cli;

namespace {

struct Output {
  bool json = false;
  std::string manifest;
};

void add_output_flags(CLI::App* app, Output& out) {
  app->add_flag("--json", out.json, "Print the JSON report instead of the table");
  app->add_option("--manifest", out.manifest, "Write a run manifest to this path");
}

int emit(const std::string& command, const json& config, const Output& o) {
  const auto start = std::chrono::steady_clock::now();
  const cli::CommandResult r = cli::run_command(command, config);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (o.json ? cli::report_text(r.report) : r.text);
  if (!o.manifest.empty()) {
    std::ofstream(o.manifest, std::ios::binary) << cli::report_text(cli::make_manifest(command, config, r, seconds));
  }
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partial decode-forward rates and block-Markov coding simulations for cc-qq relay channels"};
  app.require_subcommand(1);
  const int hw_threads = qrelay::detail::default_thread_count();

  // validate
  std::string validate_path;
  Output validate_out;
  auto* validate = app.add_subcommand("validate", "Check a channel spec file and list every problem");
  validate->add_option("spec", validate_path, "Channel spec (JSON)")->required();
  add_output_flags(validate, validate_out);

  // rate
  std::string rate_path;
  int rate_u = 0, rate_restarts = 8, rate_grid = 0, rate_iters = 4000, rate_threads = hw_threads;
  std::uint64_t rate_seed = 1;
  Output rate_out;
  auto* rate = app.add_subcommand("rate", "Maximize the partial decode-forward rate");
  rate->add_option("spec", rate_path, "Channel spec (JSON)")->required();
  rate->add_option("--u-size", rate_u, "|U| (0 selects |X|)")->check(CLI::NonNegativeNumber);
  rate->add_option("--restarts", rate_restarts, "Multistart restarts")->check(CLI::PositiveNumber);
  rate->add_option("--grid", rate_grid, "Exhaustive grid with this resolution instead of multistart (0 = off)");
  rate->add_option("--max-iters", rate_iters, "Objective evaluations per restart")->check(CLI::PositiveNumber);
  rate->add_option("--seed", rate_seed, "Random seed");
  rate->add_option("--threads", rate_threads, "Worker threads (results do not depend on it)");
  add_output_flags(rate, rate_out);

  // simulate
  std::string sim_path, sim_mode = "exact", sim_dist = "optimized";
  int sim_n = 4, sim_blocks = 2, sim_trials = 200, sim_u = 0, sim_restarts = 8, sim_threads = hw_threads;
  std::optional<double> sim_rm, sim_rl;
  double sim_fraction = 0.5, sim_delta = qrelay::examples::kQubitTestDelta;
  std::size_t sim_cap = 4096;
  std::uint64_t sim_seed = 1;
  bool sim_chained = false;
  Output sim_out;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo simulation of the block-Markov scheme");
  sim->add_option("spec", sim_path, "Channel spec (JSON)")->required();
  sim->add_option("--n", sim_n, "Block length")->check(CLI::PositiveNumber);
  sim->add_option("--blocks", sim_blocks, "Number of blocks b (>= 2)");
  sim->add_option("--rm", sim_rm, "Rate of the directly decoded part m");
  sim->add_option("--rl", sim_rl, "Rate of the relayed part l");
  sim->add_option("--fraction", sim_fraction, "Without --rm/--rl: fraction of the achievable rate to use");
  sim->add_option("--delta", sim_delta, "Typicality width");
  sim->add_option("--trials", sim_trials, "Codebook draws")->check(CLI::PositiveNumber);
  sim->add_option("--mode", sim_mode, "exact | hn")->check(CLI::IsMember({"exact", "hn"}));
  auto* genie = sim->add_flag("--genie", "Destination is told l_{j-1} (default)");
  sim->add_flag("--chained", sim_chained, "Destination uses its previous window's decision")->excludes(genie);
  sim->add_option("--seed", sim_seed, "Random seed");
  sim->add_option("--dim-cap", sim_cap, "Largest operator dimension formed");
  sim->add_option("--dist", sim_dist, "optimized | uniform input distribution")
      ->check(CLI::IsMember({"optimized", "uniform"}));
  sim->add_option("--u-size", sim_u, "|U| (0 selects |X|)");
  sim->add_option("--restarts", sim_restarts, "Optimizer restarts for --dist optimized");
  sim->add_option("--threads", sim_threads, "Worker threads (results do not depend on it)");
  add_output_flags(sim, sim_out);

  // check
  std::string check_dims;
  int check_min = 2, check_max = 16, check_instances = 100;
  std::uint64_t check_seed = 1;
  double check_hn = 4.0;
  Output check_out;
  auto* check = app.add_subcommand("check", "Randomized verification of the operator lemmas and projector bounds");
  check->add_option("--dims", check_dims, "Dimension range, e.g. 2..16");
  check->add_option("--instances", check_instances, "Instances per suite")->check(CLI::PositiveNumber);
  check->add_option("--seed", check_seed, "Random seed");
  check->add_option("--hn-confusion-coefficient", check_hn)->group("");
  add_output_flags(check, check_out);

  // replay
  std::string replay_path;
  bool replay_json = false;
  auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare output digests");
  replay->add_option("manifest", replay_path, "Manifest written by --manifest")->required();
  replay->add_flag("--json", replay_json, "Print the JSON report");

  // export-examples
  std::string export_dir = "channels";
  Output export_out;
  auto* exporter = app.add_subcommand("export-examples", "Write the built-in example channels as spec files");
  exporter->add_option("--dir", export_dir, "Output directory");
  add_output_flags(exporter, export_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitParse;
  }

  if (*validate) return emit("validate", {{"channel", validate_path}}, validate_out);
  if (*rate) {
    return emit("rate",
                {{"channel", rate_path},
                 {"u_size", rate_u},
                 {"restarts", rate_restarts},
                 {"max_iters", rate_iters},
                 {"seed", rate_seed},
                 {"grid", rate_grid},
                 {"threads", rate_threads}},
                rate_out);
  }
  if (*sim) {
    json config = {{"channel", sim_path}, {"n", sim_n},          {"blocks", sim_blocks},   {"fraction", sim_fraction},
                   {"delta", sim_delta},  {"trials", sim_trials}, {"seed", sim_seed},       {"mode", sim_mode},
                   {"window", sim_chained ? "chained" : "genie"}, {"dim_cap", sim_cap},    {"dist", sim_dist},
                   {"u_size", sim_u},     {"restarts", sim_restarts}, {"threads", sim_threads}};
    config["rm"] = sim_rm ? json(*sim_rm) : json(nullptr);
    config["rl"] = sim_rl ? json(*sim_rl) : json(nullptr);
    return emit("simulate", config, sim_out);
  }
  if (*check) {
    if (!check_dims.empty()) {
      std::smatch m;
      if (!std::regex_match(check_dims, m, std::regex(R"((\d+)\.\.(\d+))"))) {
        std::cerr << "--dims expects MIN..MAX\n";
        return cli::kExitParse;
      }
      check_min = std::stoi(m[1]);
      check_max = std::stoi(m[2]);
    }
    json config = {{"dim_min", check_min}, {"dim_max", check_max}, {"instances", check_instances}, {"seed", check_seed}};
    if (check_hn != 4.0) config["hn_confusion"] = check_hn;
    return emit("check", config, check_out);
  }
  if (*replay) {
    std::ifstream in(replay_path, std::ios::binary);
    if (!in) {
      std::cerr << "cannot read " << replay_path << "\n";
      return cli::kExitParse;
    }
    json manifest;
    try {
      manifest = json::parse(in);
    } catch (const json::parse_error& e) {
      std::cerr << "malformed manifest: " << e.what() << "\n";
      return cli::kExitParse;
    }
    const cli::CommandResult r = cli::cmd_replay(manifest);
    std::cout << (replay_json ? cli::report_text(r.report) : r.text);
    return r.exit_code;
  }
  if (*exporter) return emit("export-examples", {{"dir", export_dir}}, export_out);
  return cli::kExitParse;
}
