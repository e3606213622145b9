#include "delaylab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "delaylab/config.hpp"
#include "delaylab/errors.hpp"

namespace delaylab {

namespace {

// A bound is met when the empirical mean lies below it within 3 standard errors.
bool bound_met(const std::string& name, const AggregateStats& stats, double value) {
  if (name == "lemma") return stats.mean_final_g_star <= value;
  return stats.mean_final_regret <= value + 3.0 * stats.stderr_final_regret;
}

}  // namespace

std::string summary_line(const AggregateStats& stats) {
  return "mean_final_regret=" + format_real(stats.mean_final_regret) +
         " stderr=" + format_real(stats.stderr_final_regret) +
         " mean_g_star=" + format_real(stats.mean_final_g_star) + " runs=" + std::to_string(stats.runs) +
         " horizon=" + std::to_string(stats.horizon);
}

void write_aggregate_csv(std::ostream& out, const AggregateStats& stats, const std::vector<BoundCurve>& bounds) {
  out << "t,mean_regret,stderr,mean_g_star";
  for (const auto& b : bounds) out << ',' << b.label;
  out << '\n';
  for (std::size_t s = 0; s < stats.mean_regret.size(); ++s) {
    out << s + 1 << ',' << format_real(stats.mean_regret[s]) << ',' << format_real(stats.stderr_regret[s]) << ','
        << format_real(stats.mean_g_star[s]);
    for (const auto& b : bounds) out << ',' << format_real(b.values[s]);
    out << '\n';
  }
}

std::string summary_json(const ExperimentConfig& config, const AggregateStats& stats,
                         const std::vector<BoundCurve>& bounds) {
  nlohmann::ordered_json doc;
  doc["runs"] = stats.runs;
  doc["horizon"] = stats.horizon;
  doc["seed"] = config.seed;
  doc["learner"] = {{"meta", to_string(config.learner.meta)}, {"base", to_string(config.learner.base)}};
  doc["mean_final_regret"] = stats.mean_final_regret;
  doc["stderr_final_regret"] = stats.stderr_final_regret;
  doc["mean_g_star"] = stats.mean_final_g_star;
  doc["mean_arm_g_star"] = stats.mean_final_arm_g_star;
  doc["mean_play_counts"] = stats.mean_play_counts;
  if (stats.mean_base_queries) {
    doc["mean_base_queries"] = *stats.mean_base_queries;
    doc["mean_base_counts"] = *stats.mean_base_counts;
  }
  if (stats.mean_extended_base_counts) doc["mean_extended_base_counts"] = *stats.mean_extended_base_counts;
  auto checks = nlohmann::ordered_json::object();
  for (const auto& b : bounds) {
    const double value = b.values.back();
    checks[b.label] = {{"value", value}, {"pass", bound_met(b.label, stats, value)}};
  }
  doc["bounds"] = checks;
  return doc.dump(2) + "\n";
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::ios_base::failure("cannot open " + tmp.string());
    f << contents;
    f.flush();
    if (!f) throw std::ios_base::failure("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::ios_base::failure("cannot rename onto " + path.string());
  }
}

int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  AggregateStats stats;
  std::vector<BoundCurve> bounds;
  std::ostringstream trace_csv;
  try {
    stats = monte_carlo(config);
    bounds = bound_curves(config, stats);
    const auto env = make_environment(config.environment);
    write_trace_csv(trace_csv, run_single(config, *env, 0).trace);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
  std::ostringstream aggregate_csv;
  write_aggregate_csv(aggregate_csv, stats, bounds);
  const std::string summary = summary_json(config, stats, bounds);
  try {
    std::filesystem::create_directories(config.out_dir);
    // Render everything first so a failure leaves no partial files behind.
    write_file_atomically(config.out_dir / "trace.csv", trace_csv.str());
    write_file_atomically(config.out_dir / "aggregate.csv", aggregate_csv.str());
    write_file_atomically(config.out_dir / "summary.json", summary);
  } catch (const std::exception& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  }
  out << summary_line(stats) << '\n';
  return kExitOk;
}

int cmd_validate(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  ValidationReport report;
  try {
    report = validate_experiment(config);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ProtocolError& e) {
    err << "FAIL protocol: " << e.what() << '\n';
    return kExitInvariantFailure;
  }
  for (const auto& line : report.log) out << line << '\n';
  if (!report.ok) {
    err << "invariant '" << report.failed_invariant << "' violated at run " << report.run << ", t = " << report.step;
    if (!report.detail.empty()) err << ": " << report.detail;
    err << '\n';
    return kExitInvariantFailure;
  }
  return kExitOk;
}

int cmd_bounds(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  const auto& env = config.environment;
  const std::size_t k = env.num_actions();
  const auto mean_delay = config.delay.mean();
  const auto max_delay = config.delay.max_delay();
  if (!mean_delay && !max_delay) {
    err << "config error: delay: bounds need an i.i.d. or bounded delay model\n";
    return kExitConfigError;
  }
  const bool bernoulli = env.kind == EnvironmentSpec::Kind::bernoulli;
  const bool theorem1 = config.learner.base == BaseKind::exp3 || config.learner.base == BaseKind::hedge;

  std::vector<Step> checkpoints;
  for (Step n = 10; n < config.horizon; n *= 10) checkpoints.push_back(n);
  checkpoints.push_back(config.horizon);

  out << "n,g_star_proxy";
  if (mean_delay) out << ",lemma";
  if (theorem1) out << ",theorem1";
  if (bernoulli) out << ",theorem4,theorem5";
  out << '\n';
  const auto& p = config.bound_params;
  for (Step n : checkpoints) {
    const auto nn = static_cast<double>(n);
    // Constant delays give G*_n exactly; otherwise the i.i.d. budget (or the
    // largest possible delay) stands in for E[G*_n].
    double proxy = 0.0;
    if (max_delay && (!mean_delay || *max_delay == *mean_delay)) {
      proxy = static_cast<double>(*max_delay);
    } else {
      proxy = bernstein_budget(nn, *mean_delay) + 1.0;
      if (max_delay) proxy = std::min(proxy, static_cast<double>(*max_delay));
    }
    proxy = std::min(proxy, nn);
    out << n << ',' << format_real(proxy);
    if (mean_delay) out << ',' << format_real(bernstein_budget(nn, *mean_delay) + 1.0);
    if (theorem1) {
      const bool hedge = config.learner.base == BaseKind::hedge;
      const auto f = [hedge, k](double m) { return hedge ? hedge_regret_bound(m, k) : exp3_regret_bound(m, k); };
      out << ',' << format_real(bold_regret_bound(f, proxy, nn));
    }
    if (bernoulli) {
      const std::vector<double> g(k, proxy);
      out << ',' << format_real(ucb1_regret_bound(nn, action_gaps(env.means), g));
      out << ',' << format_real(klucb_regret_bound(nn, env.means, p.epsilon, g, p.klucb));
    }
    out << '\n';
  }
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  CLI::App app{
      "delaylab: online learning under delayed feedback.\n"
      "Exit codes: 0 success, 1 invariant failure, 2 config error, 3 I/O error.\n"
      "`run` prints one summary line:\n"
      "  mean_final_regret=<x> stderr=<x> mean_g_star=<x> runs=<r> horizon=<n>"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> runs;
  std::optional<int> jobs;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment file (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--runs", runs, "Number of runs");
    sub->add_option("--jobs", jobs, "Worker threads (output does not depend on it)");
  };
  auto* run = app.add_subcommand("run", "Simulate and write trace/aggregate CSVs and a JSON summary");
  auto* validate = app.add_subcommand("validate", "Check the exact invariants on the configured setting");
  auto* bounds = app.add_subcommand("bounds", "Print closed-form bound tables without simulating");
  add_common(run);
  add_common(validate);
  add_common(bounds);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  ExperimentConfig config;
  try {
    config = parse_config(config_path);
    if (out_dir) config.out_dir = *out_dir;
    if (seed) config.seed = *seed;
    if (runs) config.runs = *runs;
    if (jobs) config.jobs = *jobs;
    validate_config(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  if (*run) return cmd_run(config, std::cout, std::cerr);
  if (*validate) return cmd_validate(config, std::cout, std::cerr);
  return cmd_bounds(config, std::cout, std::cerr);
}

}  // namespace delaylab
