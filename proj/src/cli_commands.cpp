#include "qrelay/cli_commands.hpp"

#include <filesystem>
#include <optional>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "qrelay/channel_spec.hpp"
#include "qrelay/example_channels.hpp"

namespace qrelay::cli {

using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
      return kExitParse;
    case ErrorKind::SizeCap:
      return kExitCap;
    default:
      return kExitValidation;
  }
}

namespace {

// Fills keys missing from `config` with the defaults; unknown keys are errors.
json merged(const json& config, const json& defaults) {
  if (!config.is_object()) throw Error(ErrorKind::InvalidConfig, "configuration must be an object");
  json out = defaults;
  for (const auto& [key, value] : config.items()) {
    if (!defaults.contains(key)) throw Error(ErrorKind::InvalidConfig, "unknown option \"" + key + "\"");
    out[key] = value;
  }
  return out;
}

template <typename T>
T get(const json& config, const char* key) {
  try {
    return config.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::InvalidConfig, std::string("option \"") + key + "\" has the wrong type");
  }
}

json echo_without_threads(json config) {
  config.erase("threads");
  return config;
}

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"sd", e.sd}, {"half_width", e.half_width}}; }

json hn_json(const HnEstimates& h) {
  return {{"alpha", estimate_json(h.alpha)},
          {"beta", estimate_json(h.beta)},
          {"term_a", estimate_json(h.term_a)},
          {"term_b", estimate_json(h.term_b)},
          {"total", estimate_json(h.total)}};
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

OptimizerConfig optimizer_config(const json& c) {
  OptimizerConfig o;
  o.u_size = get<int>(c, "u_size");
  o.restarts = get<int>(c, "restarts");
  o.seed = get<std::uint64_t>(c, "seed");
  o.threads = get<int>(c, "threads");
  if (c.contains("max_iters")) o.max_iters = get<int>(c, "max_iters");
  if (c.contains("grid") && get<int>(c, "grid") > 0) {
    o.mode = SearchMode::Grid;
    o.grid_resolution = get<int>(c, "grid");
  }
  return o;
}

}  // namespace

std::string report_text(const json& report) { return report.dump(2) + "\n"; }

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::InvalidConfig, "SHA-256 digest failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

json to_json(const InputDistribution& d) {
  return {{"u_size", d.u_size()}, {"x_size", d.x_size()}, {"x1_size", d.x1_size()},
          {"index", "(u * x_size + x) * x1_size + x1"}, {"p", d.probs()}};
}

json to_json(const RateReport& r) {
  json restarts = json::array();
  for (const auto& d : r.diagnostics) {
    restarts.push_back({{"index", d.index}, {"best_value", d.best_value}, {"evaluations", d.evaluations}});
  }
  return {{"pdf_rate", r.quantities.pdf_rate},
          {"i_xx1_b", r.quantities.i_xx1_b},
          {"i_u_b1_given_x1", r.quantities.i_u_b1_given_x1},
          {"i_x_b_given_x1u", r.quantities.i_x_b_given_x1u},
          {"preset_direct", r.preset_direct},
          {"preset_decode_forward", r.preset_df},
          {"best_distribution", to_json(r.best_dist)},
          {"restarts", restarts}};
}

json to_json(const SimulationReport& r) {
  json blocks = json::array();
  for (std::size_t j = 0; j < r.relay_error.size(); ++j) {
    blocks.push_back({{"block", j + 1},
                      {"relay_error", estimate_json(r.relay_error[j])},
                      {"destination_error", estimate_json(r.destination_error[j])},
                      {"hn", hn_json(r.hn[j])}});
  }
  const SimulationConfig& c = r.config;
  return {{"config",
           {{"n", c.n},
            {"blocks", c.blocks},
            {"r_m", c.rates.r_m},
            {"r_ell", c.rates.r_ell},
            {"delta", c.delta},
            {"trials", c.trials},
            {"seed", c.seed},
            {"mode", to_string(c.mode)},
            {"window", to_string(c.window)},
            {"dim_cap", c.dim_cap},
            {"max_messages", c.limits.max_messages}}},
          {"m_count", r.m_count},
          {"l_count", r.l_count},
          {"effective_rate", r.effective_rate},
          {"destination_is_bound", r.destination_is_bound},
          {"blocks", blocks},
          {"relay_error", estimate_json(r.relay_overall)},
          {"destination_error", estimate_json(r.destination_overall)},
          {"hn", hn_json(r.hn_overall)},
          {"relay_decision_error_rate", r.relay_decision_error_rate},
          {"propagated_window_rate", r.propagated_window_rate}};
}

json to_json(const std::vector<SuiteResult>& suites) {
  json out = json::array();
  for (const auto& s : suites) {
    out.push_back({{"name", s.name},
                   {"checks", s.checks},
                   {"failures", s.failures},
                   {"worst_margin", s.worst_margin},
                   {"pass", s.pass()}});
  }
  return out;
}

CommandResult cmd_validate(const json& config) {
  const json c = merged(config, {{"channel", ""}});
  const auto path = get<std::string>(c, "channel");
  const ChannelSpecResult r = load_channel_spec(path);
  CommandResult out;
  json diags = json::array();
  std::ostringstream text;
  for (const auto& d : r.diagnostics) {
    diags.push_back({{"kind", to_string(d.kind)}, {"message", d.message}});
    text << d.message << "\n";
  }
  if (r.diagnostics.empty()) text << path << ": OK\n";
  out.exit_code = r.diagnostics.empty() ? kExitOk : kExitValidation;
  out.report = {{"command", "validate"}, {"config", c}, {"valid", r.diagnostics.empty()}, {"diagnostics", diags}};
  out.text = text.str();
  return out;
}

CommandResult cmd_rate(const json& config) {
  const json c = merged(config, {{"channel", ""},
                                 {"u_size", 0},
                                 {"restarts", 8},
                                 {"max_iters", 4000},
                                 {"seed", 1},
                                 {"grid", 0},
                                 {"threads", 1}});
  const RelayChannel ch = load_channel(get<std::string>(c, "channel"));
  const RateReport r = optimize_rate(ch, optimizer_config(c));
  CommandResult out;
  out.report = to_json(r);
  out.report["command"] = "rate";
  out.report["config"] = echo_without_threads(c);
  std::ostringstream text;
  text << "pdf_rate               " << fmt(r.quantities.pdf_rate) << " bits/use\n"
       << "  I(X X1; B)           " << fmt(r.quantities.i_xx1_b) << "\n"
       << "  I(U; B1 | X1)        " << fmt(r.quantities.i_u_b1_given_x1) << "\n"
       << "  I(X; B | X1 U)       " << fmt(r.quantities.i_x_b_given_x1u) << "\n"
       << "preset_direct          " << fmt(r.preset_direct) << "\n"
       << "preset_decode_forward  " << fmt(r.preset_df) << "\n"
       << "best p(u,x,x1)        ";
  for (double p : r.best_dist.probs()) text << " " << fmt(p, 4);
  text << "\n";
  out.text = text.str();
  return out;
}

CommandResult cmd_simulate(const json& config) {
  const json c = merged(config, {{"channel", ""},
                                 {"n", 4},
                                 {"blocks", 2},
                                 {"rm", nullptr},
                                 {"rl", nullptr},
                                 {"fraction", 0.5},
                                 {"delta", examples::kQubitTestDelta},
                                 {"trials", 200},
                                 {"seed", 1},
                                 {"mode", "exact"},
                                 {"window", "genie"},
                                 {"dim_cap", 4096},
                                 {"dist", "optimized"},
                                 {"u_size", 0},
                                 {"restarts", 8},
                                 {"threads", 1}});
  const RelayChannel ch = load_channel(get<std::string>(c, "channel"));

  OptimizerConfig oc = optimizer_config(c);
  const std::string dist_kind = get<std::string>(c, "dist");
  std::optional<InputDistribution> dist;
  if (dist_kind == "optimized") {
    dist = optimize_rate(ch, oc).best_dist;
  } else if (dist_kind == "uniform") {
    dist = InputDistribution::uniform(oc.effective_u_size(ch), ch.x_size(), ch.x1_size());
  } else {
    throw Error(ErrorKind::InvalidConfig, "dist must be \"optimized\" or \"uniform\"");
  }
  const InfoQuantities q = evaluate_rate(ch, *dist);

  SimulationConfig sc;
  sc.n = get<int>(c, "n");
  sc.blocks = get<int>(c, "blocks");
  if (c["rm"].is_null() != c["rl"].is_null()) throw Error(ErrorKind::InvalidConfig, "give both --rm and --rl or neither");
  sc.rates = c["rm"].is_null() ? split_rates(q, get<double>(c, "fraction"))
                               : RateSplit{get<double>(c, "rm"), get<double>(c, "rl")};
  sc.delta = get<double>(c, "delta");
  sc.trials = get<int>(c, "trials");
  sc.seed = get<std::uint64_t>(c, "seed");
  const std::string mode = get<std::string>(c, "mode");
  if (mode != "exact" && mode != "hn") throw Error(ErrorKind::InvalidConfig, "mode must be exact or hn");
  sc.mode = mode == "exact" ? SimMode::Exact : SimMode::HnBound;
  const std::string window = get<std::string>(c, "window");
  if (window != "genie" && window != "chained") throw Error(ErrorKind::InvalidConfig, "window must be genie or chained");
  sc.window = window == "genie" ? WindowMode::Genie : WindowMode::Chained;
  sc.dim_cap = get<std::size_t>(c, "dim_cap");
  sc.threads = get<int>(c, "threads");

  const SimulationReport r = run_simulation(ch, *dist, sc);
  CommandResult out;
  out.report = to_json(r);
  out.report["command"] = "simulate";
  out.report["options"] = echo_without_threads(c);
  out.report["distribution"] = to_json(*dist);
  out.report["pdf_rate"] = q.pdf_rate;

  std::ostringstream text;
  text << "n=" << sc.n << " blocks=" << sc.blocks << " |M|=" << r.m_count << " |L|=" << r.l_count
       << " r_m=" << fmt(sc.rates.r_m, 4) << " r_ell=" << fmt(sc.rates.r_ell, 4) << " mode=" << mode
       << " window=" << window << " trials=" << sc.trials << "\n";
  text << "block  relay_error           destination_error" << (r.destination_is_bound ? " (HN bound)" : "") << "\n";
  for (std::size_t j = 0; j < r.relay_error.size(); ++j) {
    text << std::setw(5) << j + 1 << "  " << fmt(r.relay_error[j].mean) << " +- " << fmt(r.relay_error[j].half_width)
         << "  " << fmt(r.destination_error[j].mean) << " +- " << fmt(r.destination_error[j].half_width) << "\n";
  }
  text << "HN terms: alpha " << fmt(r.hn_overall.alpha.mean) << ", beta " << fmt(r.hn_overall.beta.mean) << ", (A) "
       << fmt(r.hn_overall.term_a.mean) << ", (B) " << fmt(r.hn_overall.term_b.mean) << ", total "
       << fmt(r.hn_overall.total.mean) << "\n";
  text << "effective rate " << fmt(r.effective_rate, 4) << " of pdf_rate " << fmt(q.pdf_rate, 4) << "\n";
  out.text = text.str();
  return out;
}

CommandResult cmd_check(const json& config) {
  const json c = merged(config, {{"dim_min", 2}, {"dim_max", 16}, {"instances", 100}, {"seed", 1}, {"hn_confusion", 4.0}});
  LemmaSuiteConfig lc;
  lc.dim_min = get<int>(c, "dim_min");
  lc.dim_max = get<int>(c, "dim_max");
  lc.instances = get<int>(c, "instances");
  lc.seed = get<std::uint64_t>(c, "seed");
  lc.hn.confusion = get<double>(c, "hn_confusion");
  const auto suites = run_lemma_suite(lc);

  CommandResult out;
  bool all = true;
  int checks = 0;
  std::ostringstream text;
  for (const auto& s : suites) {
    all = all && s.pass();
    checks += s.checks;
    text << (s.pass() ? "PASS " : "FAIL ") << std::left << std::setw(20) << s.name << std::right << " checks "
         << std::setw(4) << s.checks << "  failures " << std::setw(4) << s.failures << "  worst margin "
         << std::scientific << std::setprecision(3) << s.worst_margin << std::defaultfloat << "\n";
  }
  text << checks << " checks, " << (all ? "all PASS" : "FAILURES present") << "\n";
  json echo = c;
  if (echo["hn_confusion"].get<double>() == 4.0) echo.erase("hn_confusion");
  out.report = {{"command", "check"}, {"config", echo}, {"suites", to_json(suites)}, {"total_checks", checks}, {"pass", all}};
  out.exit_code = all ? kExitOk : kExitValidation;
  out.text = text.str();
  return out;
}

CommandResult cmd_export_examples(const json& config) {
  const json c = merged(config, {{"dir", "channels"}});
  const std::filesystem::path dir = get<std::string>(c, "dir");
  std::filesystem::create_directories(dir);
  CommandResult out;
  json files = json::array();
  std::ostringstream text;
  for (const auto& nc : examples::shipped()) {
    const auto path = dir / (nc.name + ".json");
    std::ofstream(path, std::ios::binary) << channel_spec_text(nc.channel);
    files.push_back(path.string());
    text << "wrote " << path.string() << "\n";
  }
  out.report = {{"command", "export-examples"}, {"config", c}, {"files", files}};
  out.text = text.str();
  return out;
}

CommandResult run_command(const std::string& command, const json& config) {
  try {
    if (command == "validate") return cmd_validate(config);
    if (command == "rate") return cmd_rate(config);
    if (command == "simulate") return cmd_simulate(config);
    if (command == "check") return cmd_check(config);
    if (command == "export-examples") return cmd_export_examples(config);
    throw Error(ErrorKind::InvalidConfig, "unknown command \"" + command + "\"");
  } catch (const Error& e) {
    CommandResult out;
    out.exit_code = exit_code_for(e.kind());
    out.report = {{"command", command}, {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
    out.text = std::string("error: ") + e.what() + "\n";
    return out;
  }
}

json make_manifest(const std::string& command, const json& config, const CommandResult& result,
                   double wall_clock_seconds) {
  return {{"command", command},
          {"config", config},
          {"seed", config.contains("seed") ? config["seed"] : json(nullptr)},
          {"tool_version", kToolVersion},
          {"wall_clock_seconds", wall_clock_seconds},
          {"exit_code", result.exit_code},
          {"output_digest", sha256_hex(report_text(result.report))}};
}

CommandResult cmd_replay(const json& manifest) {
  CommandResult out;
  try {
    const auto command = manifest.at("command").get<std::string>();
    const auto expected = manifest.at("output_digest").get<std::string>();
    const CommandResult rerun = run_command(command, manifest.at("config"));
    const std::string actual = sha256_hex(report_text(rerun.report));
    const bool match = actual == expected;
    out.exit_code = match ? kExitOk : kExitValidation;
    out.report = {{"command", "replay"},
                  {"replayed", command},
                  {"expected_digest", expected},
                  {"actual_digest", actual},
                  {"match", match}};
    out.text = std::string(match ? "digest match " : "digest MISMATCH ") + actual + "\n";
  } catch (const json::exception& e) {
    out.exit_code = kExitParse;
    out.report = {{"command", "replay"}, {"error", {{"kind", "ParseError"}, {"message", e.what()}}}};
    out.text = std::string("error: malformed manifest: ") + e.what() + "\n";
  } catch (const Error& e) {
    out.exit_code = exit_code_for(e.kind());
    out.report = {{"command", "replay"}, {"error", {{"kind", to_string(e.kind())}, {"message", e.what()}}}};
    out.text = std::string("error: ") + e.what() + "\n";
  }
  return out;
}

}  // namespace qrelay::cli
