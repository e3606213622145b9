#include "delaylab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <thread>

#include "delaylab/delayed_ucb.hpp"
#include "delaylab/errors.hpp"
#include "delaylab/log.hpp"

namespace delaylab {

std::string to_string(MetaKind kind) {
  switch (kind) {
    case MetaKind::none: return "none";
    case MetaKind::bold: return "bold";
    case MetaKind::qpmd: return "qpmd";
  }
  return "?";
}

std::string to_string(BaseKind kind) {
  switch (kind) {
    case BaseKind::ucb1: return "ucb1";
    case BaseKind::kl_ucb: return "kl-ucb";
    case BaseKind::exp3: return "exp3";
    case BaseKind::hedge: return "hedge";
  }
  return "?";
}

std::unique_ptr<Environment> make_environment(const EnvironmentSpec& spec) {
  if (spec.kind == EnvironmentSpec::Kind::bernoulli) return std::make_unique<BernoulliBandit>(spec.means);
  return std::make_unique<MatrixEnvironment>(spec.matrix, spec.feedback);
}

std::unique_ptr<BaseLearner> make_base(const LearnerSpec& spec, std::size_t num_actions, std::uint64_t seed) {
  switch (spec.base) {
    case BaseKind::ucb1: return std::make_unique<Ucb1>(num_actions);
    case BaseKind::kl_ucb: return std::make_unique<KlUcb>(num_actions, spec.kl_tolerance);
    case BaseKind::exp3: return std::make_unique<Exp3>(num_actions, spec.gamma, seed);
    case BaseKind::hedge: return std::make_unique<Hedge>(num_actions, spec.eta, seed);
  }
  throw std::invalid_argument("unknown base learner");
}

BaseFactory make_base_factory(const LearnerSpec& spec, std::size_t num_actions) {
  return [spec, num_actions](std::uint64_t seed) { return make_base(spec, num_actions, seed); };
}

std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, std::size_t num_actions) {
  switch (spec.meta) {
    case MetaKind::bold: return std::make_unique<BoldLearner>(num_actions, make_base_factory(spec, num_actions));
    case MetaKind::qpmd: return std::make_unique<QpmdLearner>(num_actions, make_base_factory(spec, num_actions));
    case MetaKind::none:
      if (spec.base == BaseKind::ucb1) return std::make_unique<DelayedUcb>(num_actions, IndexKind::ucb1);
      if (spec.base == BaseKind::kl_ucb) {
        return std::make_unique<DelayedUcb>(num_actions, IndexKind::kl_ucb, spec.kl_tolerance);
      }
      break;
  }
  throw ConfigError("learner.meta", "base '" + to_string(spec.base) + "' needs a meta learner (bold or qpmd)");
}

namespace {

const std::set<std::string> kKnownBounds = {"lemma", "theorem1", "theorem3", "theorem4", "theorem5"};

bool is_bernoulli(const ExperimentConfig& c) {
  return c.environment.kind == EnvironmentSpec::Kind::bernoulli;
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
  if (c.horizon < 1) throw ConfigError("horizon", "must be at least 1");
  if (c.runs < 1) throw ConfigError("runs", "must be at least 1");
  if (c.jobs < 1) throw ConfigError("jobs", "must be at least 1");

  const auto& env = c.environment;
  if (env.kind == EnvironmentSpec::Kind::bernoulli) {
    if (env.means.empty()) throw ConfigError("environment.means", "needs at least one arm");
    for (double m : env.means) {
      if (!(m >= 0.0 && m <= 1.0)) throw ConfigError("environment.means", "values must lie in [0,1]");
    }
  } else {
    if (env.matrix.num_actions() == 0) throw ConfigError("environment.path", "reward matrix is empty");
    if (static_cast<Step>(env.matrix.steps()) < c.horizon) {
      throw ConfigError("environment.path", "reward matrix has fewer rows than the horizon");
    }
  }
  const std::size_t k = env.num_actions();

  if (c.learner.base == BaseKind::hedge && !(env.kind == EnvironmentSpec::Kind::matrix &&
                                             env.feedback == FeedbackKind::full_information)) {
    throw ConfigError("learner.base", "hedge requires a full-information environment");
  }
  if (c.learner.meta == MetaKind::none &&
      !(c.learner.base == BaseKind::ucb1 || c.learner.base == BaseKind::kl_ucb)) {
    throw ConfigError("learner.meta", "only ucb1 and kl-ucb run without a meta learner");
  }
  if (!(c.learner.gamma > 0.0 && c.learner.gamma <= 1.0)) throw ConfigError("learner.gamma", "must lie in (0,1]");
  if (!(c.learner.eta > 0.0)) throw ConfigError("learner.eta", "must be positive");
  if (!(c.learner.kl_tolerance > 0.0)) throw ConfigError("learner.kl_tolerance", "must be positive");

  if (const auto* per = std::get_if<DelayModel::PerAction>(&c.delay.kind())) {
    if (per->models.size() != k) throw ConfigError("delay.models", "needs one model per action");
  }

  if (const auto* seq = std::get_if<DelayModel::Sequence>(&c.delay.kind())) {
    if (static_cast<Step>(seq->values.size()) < c.horizon) {
      throw ConfigError("delay.values", "sequence is shorter than the horizon");
    }
  }

  if (c.qpmd_extended && c.learner.meta != MetaKind::qpmd) {
    throw ConfigError("qpmd_extended", "only applies to the qpmd meta learner");
  }

  for (const auto& b : c.bounds) {
    if (!kKnownBounds.contains(b)) throw ConfigError("bounds", "unknown bound '" + b + "'");
    const auto& l = c.learner;
    if (b == "lemma" && !c.delay.mean()) {
      throw ConfigError("bounds", "lemma needs an i.i.d. (action-independent) delay model");
    }
    if (b == "theorem1" && !(l.meta == MetaKind::bold && (l.base == BaseKind::exp3 || l.base == BaseKind::hedge))) {
      throw ConfigError("bounds", "theorem1 applies to bold with exp3 or hedge");
    }
    if (b == "theorem3" && !(l.meta == MetaKind::qpmd && is_bernoulli(c) &&
                             (l.base == BaseKind::ucb1 || l.base == BaseKind::kl_ucb))) {
      throw ConfigError("bounds", "theorem3 applies to qpmd with ucb1 or kl-ucb on a bernoulli environment");
    }
    if (b == "theorem4" && !(l.meta == MetaKind::none && l.base == BaseKind::ucb1 && is_bernoulli(c))) {
      throw ConfigError("bounds", "theorem4 applies to delayed ucb1 on a bernoulli environment");
    }
    if (b == "theorem5" && !(l.meta == MetaKind::none && l.base == BaseKind::kl_ucb && is_bernoulli(c))) {
      throw ConfigError("bounds", "theorem5 applies to delayed kl-ucb on a bernoulli environment");
    }
  }
  if ((std::find(c.bounds.begin(), c.bounds.end(), "theorem5") != c.bounds.end() ||
       std::find(c.bounds.begin(), c.bounds.end(), "theorem3") != c.bounds.end()) &&
      !(c.bound_params.epsilon > 0.0)) {
    throw ConfigError("bound_params.epsilon", "must be positive");
  }
}

RunOutcome run_single(const ExperimentConfig& config, const Environment& env, std::int64_t run_index) {
  RunOutcome out;
  out.learner = make_learner(config.learner, env.num_actions());
  const auto run = static_cast<std::uint64_t>(run_index);
  if (!config.qpmd_extended) {
    out.trace = run_episode(env, *out.learner, config.delay, config.horizon, config.seed, run, config.faults);
    return out;
  }
  Episode episode(env, *out.learner, config.delay, config.seed, run, config.faults);
  for (Step t = 1; t <= config.horizon; ++t) episode.step();
  out.trace = episode.snapshot();
  auto& qpmd = dynamic_cast<QpmdLearner&>(*out.learner);
  // Reward matrices end at their last row; Bernoulli environments do not.
  const Step limit = dynamic_cast<const MatrixEnvironment*>(&env) != nullptr
                         ? static_cast<Step>(dynamic_cast<const MatrixEnvironment&>(env).matrix().steps())
                         : 100 * config.horizon;
  while (qpmd.base_queries() < config.horizon && episode.steps_done() < limit) episode.step();
  const auto& history = qpmd.base_predictions();
  const auto upto = std::min<std::size_t>(history.size(), static_cast<std::size_t>(config.horizon));
  std::vector<std::int64_t> counts(env.num_actions(), 0);
  for (std::size_t q = 0; q < upto; ++q) ++counts[history[q]];
  out.extended_base_counts = std::move(counts);
  if (qpmd.base_queries() < config.horizon) {
    log_warning("extended QPM-D run stopped before its base reached n queries");
  }
  return out;
}

std::vector<double> regret_curve(const RunTrace& trace, const EnvironmentSpec& env) {
  std::vector<double> curve(trace.actions.size());
  if (env.kind == EnvironmentSpec::Kind::bernoulli) {
    const auto gaps = action_gaps(env.means);
    double total = 0.0;
    for (std::size_t s = 0; s < curve.size(); ++s) {
      total += gaps[trace.actions[s]];
      curve[s] = total;
    }
    return curve;
  }
  std::vector<double> totals(env.matrix.num_actions(), 0.0);
  double earned = 0.0;
  for (std::size_t s = 0; s < curve.size(); ++s) {
    const auto& row = env.matrix.row(static_cast<Step>(s + 1));
    for (std::size_t a = 0; a < row.size(); ++a) totals[a] += row[a];
    earned += row[trace.actions[s]];
    curve[s] = *std::max_element(totals.begin(), totals.end()) - earned;
  }
  return curve;
}

namespace {

struct RunResult {
  std::vector<double> regret;
  std::vector<std::int64_t> g_star;                 // running max of G_t
  std::vector<std::vector<std::int64_t>> arm_g_star;  // running max of G_{i,t}
  std::vector<std::int64_t> plays;
  std::optional<std::int64_t> base_queries;
  std::optional<std::vector<std::int64_t>> base_counts;
  std::optional<std::vector<std::int64_t>> extended_counts;
};

RunResult simulate(const ExperimentConfig& config, std::int64_t run_index) {
  const auto env = make_environment(config.environment);
  const std::size_t k = env->num_actions();
  RunOutcome outcome = run_single(config, *env, run_index);
  const RunTrace& trace = outcome.trace;

  RunResult r;
  r.regret = regret_curve(trace, config.environment);
  r.g_star.resize(trace.outstanding.size());
  std::int64_t best = 0;
  for (std::size_t s = 0; s < trace.outstanding.size(); ++s) {
    best = std::max(best, trace.outstanding[s]);
    r.g_star[s] = best;
  }
  r.arm_g_star = action_gap_series(trace, k);
  for (std::size_t s = 1; s < r.arm_g_star.size(); ++s) {
    for (std::size_t i = 0; i < k; ++i) r.arm_g_star[s][i] = std::max(r.arm_g_star[s][i], r.arm_g_star[s - 1][i]);
  }
  r.plays.assign(k, 0);
  for (Action a : trace.actions) ++r.plays[a];
  if (const auto* q = dynamic_cast<const QpmdLearner*>(outcome.learner.get())) {
    r.base_queries = q->base_queries_at(trace.horizon);
    r.base_counts = q->base_counts_at(trace.horizon);
  }
  r.extended_counts = std::move(outcome.extended_base_counts);
  return r;
}

void add_into(std::vector<double>& acc, const std::vector<std::int64_t>& x) {
  if (acc.empty()) acc.assign(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) acc[i] += static_cast<double>(x[i]);
}

}  // namespace

AggregateStats monte_carlo(const ExperimentConfig& config) {
  validate_config(config);
  if (config.learner.meta == MetaKind::bold && config.delay.action_dependent()) {
    log_warning("bold with action-dependent delays: the instance schedule depends on the actions");
  }
  const auto n = static_cast<std::size_t>(config.horizon);
  const std::size_t k = config.environment.num_actions();

  std::vector<RunningStats> regret(n);
  std::vector<double> g_star_sum(n, 0.0);
  std::vector<std::vector<double>> arm_sum(n, std::vector<double>(k, 0.0));
  std::vector<double> plays_sum(k, 0.0);
  double queries_sum = 0.0;
  std::vector<double> base_counts_sum;
  std::vector<double> extended_sum;
  bool have_qpmd = false;
  bool have_extended = false;

  const auto jobs = static_cast<std::int64_t>(config.jobs);
  const std::int64_t chunk = std::max<std::int64_t>(1, jobs * 4);
  for (std::int64_t first = 0; first < config.runs; first += chunk) {
    const std::int64_t count = std::min(chunk, config.runs - first);
    std::vector<RunResult> results(static_cast<std::size_t>(count));
    if (jobs == 1) {
      for (std::int64_t j = 0; j < count; ++j) results[static_cast<std::size_t>(j)] = simulate(config, first + j);
    } else {
      std::vector<std::thread> workers;
      std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
      for (std::int64_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
          try {
            for (std::int64_t j = w; j < count; j += jobs) {
              results[static_cast<std::size_t>(j)] = simulate(config, first + j);
            }
          } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
          }
        });
      }
      for (auto& th : workers) th.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    // Merge strictly in run-index order.
    for (const auto& r : results) {
      for (std::size_t s = 0; s < n; ++s) {
        regret[s].add(r.regret[s]);
        g_star_sum[s] += static_cast<double>(r.g_star[s]);
        for (std::size_t i = 0; i < k; ++i) arm_sum[s][i] += static_cast<double>(r.arm_g_star[s][i]);
      }
      for (std::size_t i = 0; i < k; ++i) plays_sum[i] += static_cast<double>(r.plays[i]);
      if (r.base_queries) {
        have_qpmd = true;
        queries_sum += static_cast<double>(*r.base_queries);
        add_into(base_counts_sum, *r.base_counts);
      }
      if (r.extended_counts) {
        have_extended = true;
        add_into(extended_sum, *r.extended_counts);
      }
    }
  }

  const auto runs = static_cast<double>(config.runs);
  const auto scale = [runs](std::vector<double> v) {
    for (double& x : v) x /= runs;
    return v;
  };
  AggregateStats stats;
  stats.runs = config.runs;
  stats.horizon = config.horizon;
  stats.mean_regret.resize(n);
  stats.stderr_regret.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    stats.mean_regret[s] = regret[s].mean();
    stats.stderr_regret[s] = regret[s].standard_error();
  }
  stats.mean_g_star = scale(g_star_sum);
  stats.mean_arm_g_star.resize(n);
  for (std::size_t s = 0; s < n; ++s) stats.mean_arm_g_star[s] = scale(arm_sum[s]);
  stats.mean_play_counts = scale(plays_sum);
  stats.mean_final_regret = stats.mean_regret.back();
  stats.stderr_final_regret = stats.stderr_regret.back();
  stats.mean_final_g_star = stats.mean_g_star.back();
  stats.mean_final_arm_g_star = stats.mean_arm_g_star.back();
  if (have_qpmd) {
    stats.mean_base_queries = queries_sum / runs;
    stats.mean_base_counts = scale(base_counts_sum);
  }
  if (have_extended) stats.mean_extended_base_counts = scale(extended_sum);
  return stats;
}

std::vector<BoundCurve> bound_curves(const ExperimentConfig& config, const AggregateStats& stats) {
  std::vector<BoundCurve> curves;
  const auto n = static_cast<std::size_t>(stats.horizon);
  const auto& env = config.environment;
  const std::size_t k = env.num_actions();
  const auto& p = config.bound_params;
  for (const auto& name : config.bounds) {
    BoundCurve curve{name, std::vector<double>(n), {}};
    for (std::size_t s = 0; s < n; ++s) {
      const auto t = static_cast<double>(s + 1);
      const auto& arm_g = stats.mean_arm_g_star[s];
      double v = 0.0;
      if (name == "lemma") {
        v = bernstein_budget(t, *config.delay.mean()) + 1.0;
      } else if (name == "theorem1") {
        const bool hedge = config.learner.base == BaseKind::hedge;
        const auto f = [hedge, k](double m) { return hedge ? hedge_regret_bound(m, k) : exp3_regret_bound(m, k); };
        v = bold_regret_bound(f, stats.mean_g_star[s], t);
      } else if (name == "theorem3") {
        const auto gaps = action_gaps(env.means);
        double penalty = 0.0;
        for (std::size_t i = 0; i < k; ++i) penalty += gaps[i] * arm_g[i];
        const std::vector<double> zeros(k, 0.0);
        const double base = config.learner.base == BaseKind::ucb1
                                ? ucb1_regret_bound(t, gaps, zeros)
                                : klucb_nondelayed_bound(t, env.means, p.epsilon, p.klucb);
        v = base + penalty;
      } else if (name == "theorem4") {
        v = ucb1_regret_bound(t, action_gaps(env.means), arm_g);
      } else if (name == "theorem5") {
        v = klucb_regret_bound(t, env.means, p.epsilon, arm_g, p.klucb);
      }
      curve.values[s] = v;
    }
    if (name == "theorem3" || name == "theorem5") {
      curve.parameters = {{"epsilon", p.epsilon}, {"c1", p.klucb.c1}, {"c2", p.klucb.c2}, {"beta", p.klucb.beta}};
    }
    if (name == "lemma") curve.parameters = {{"mean_delay", *config.delay.mean()}};
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::optional<std::string> qpmd_lemma_violation(const RunTrace& trace, const QpmdLearner& learner) {
  const std::size_t k = learner.num_actions();
  // The learner may have run past the horizon (extended QPM-D); compare at n.
  const std::int64_t n_prime = learner.base_queries_at(trace.horizon);
  const auto base_counts = learner.base_counts_at(trace.horizon);
  if (n_prime > trace.horizon) {
    return "n' = " + std::to_string(n_prime) + " exceeds n = " + std::to_string(trace.horizon);
  }
  std::vector<std::int64_t> plays(k, 0);
  for (Action a : trace.actions) ++plays[a];
  const auto g_star = max_action_gaps(trace, k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::int64_t diff = plays[i] - base_counts[i];
    if (diff < 0 || diff > g_star[i]) {
      return "action " + std::to_string(i) + ": T_i(n) - T'_i(n') = " + std::to_string(diff) +
             " outside [0, G*_{i,n} = " + std::to_string(g_star[i]) + "]";
    }
  }
  return std::nullopt;
}

std::optional<Step> pool_law_violation(const RunTrace& trace, const BoldLearner& learner) {
  std::int64_t g_star = 0;
  const auto& sizes = learner.pool_sizes();
  for (std::size_t s = 0; s < trace.outstanding.size(); ++s) {
    g_star = std::max(g_star, trace.outstanding[s]);
    if (s >= sizes.size() || static_cast<std::int64_t>(sizes[s]) != g_star + 1) return static_cast<Step>(s + 1);
  }
  return std::nullopt;
}

namespace {

std::optional<Step> exactness_violation(const RunTrace& trace) {
  const Step n = trace.horizon;
  const Step stride = n <= 50 ? 1 : std::max<Step>(1, n / 50);
  for (Step t = 1; t <= n; t += stride) {
    if (trace.outstanding[static_cast<std::size_t>(t - 1)] != outstanding_count(trace.delays, t)) return t;
  }
  if (trace.outstanding.back() != outstanding_count(trace.delays, n)) return n;
  return std::nullopt;
}

std::optional<Step> partition_violation(const RunTrace& trace, std::size_t k) {
  const auto series = action_gap_series(trace, k);
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::int64_t total = 0;
    for (auto g : series[s]) total += g;
    if (total != trace.outstanding[s]) return static_cast<Step>(s + 1);
  }
  return std::nullopt;
}

// Each origin delivered once, at origin + delay, or listed as undelivered.
std::optional<Step> delivery_violation(const RunTrace& trace) {
  std::vector<int> seen(trace.actions.size(), 0);
  for (const auto& batch : trace.batches) {
    for (const auto& e : batch.events) {
      const auto i = static_cast<std::size_t>(e.origin_step - 1);
      if (e.origin_step + trace.delays[i] != batch.arrival_step) return batch.arrival_step;
      ++seen[i];
    }
  }
  for (const auto& e : trace.undelivered) {
    const auto i = static_cast<std::size_t>(e.origin_step - 1);
    if (e.origin_step + trace.delays[i] <= trace.horizon) return e.origin_step;
    ++seen[i];
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (seen[i] != 1) return static_cast<Step>(i + 1);
  }
  return std::nullopt;
}

}  // namespace

ValidationReport validate_experiment(const ExperimentConfig& config) {
  validate_config(config);
  ValidationReport report;
  const auto env = make_environment(config.environment);
  const std::size_t k = env->num_actions();
  std::vector<std::vector<std::vector<double>>> observed(k);

  const auto fail = [&report](std::string name, std::int64_t run, Step t, std::string detail) {
    report.ok = false;
    report.failed_invariant = std::move(name);
    report.run = run;
    report.step = t;
    report.detail = std::move(detail);
    report.log.push_back("FAIL " + report.failed_invariant + " run=" + std::to_string(run) +
                         " t=" + std::to_string(t) + (report.detail.empty() ? "" : " " + report.detail));
    return report;
  };

  for (std::int64_t r = 0; r < config.runs; ++r) {
    RunOutcome out = run_single(config, *env, r);
    const RunTrace& trace = out.trace;
    if (const auto* bold = dynamic_cast<const BoldLearner*>(out.learner.get())) {
      if (auto t = pool_law_violation(trace, *bold)) {
        return fail("pool-law", r, *t, "M_t != G*_t + 1");
      }
    }
    if (const auto* qpmd = dynamic_cast<const QpmdLearner*>(out.learner.get())) {
      if (auto msg = qpmd_lemma_violation(trace, *qpmd)) return fail("qpmd-lemma", r, trace.horizon, *msg);
    }
    if (auto t = exactness_violation(trace)) return fail("outstanding-exactness", r, *t, "");
    if (auto t = partition_violation(trace, k)) return fail("partition-identity", r, *t, "");
    if (auto t = delivery_violation(trace)) return fail("delivery", r, *t, "");
    const auto seq = observed_feedbacks(trace, k);
    for (std::size_t i = 0; i < k; ++i) observed[i].push_back(seq[i]);
  }
  if (config.learner.meta == MetaKind::bold) report.log.push_back("PASS pool-law");
  if (config.learner.meta == MetaKind::qpmd) report.log.push_back("PASS qpmd-lemma");
  report.log.push_back("PASS outstanding-exactness");
  report.log.push_back("PASS partition-identity");
  report.log.push_back("PASS delivery");

  {
    ExperimentConfig zero = config;
    zero.delay = DelayModel::constant(0);
    zero.faults = {};
    zero.qpmd_extended = false;
    const RunOutcome delayed = run_single(zero, *env, 0);
    const auto base = make_base(config.learner, k, first_instance_seed(config.seed, 0));
    const RunTrace plain = run_nondelayed(*env, *base, config.horizon, config.seed, 0);
    for (std::size_t s = 0; s < plain.actions.size(); ++s) {
      if (plain.actions[s] != delayed.trace.actions[s] || plain.rewards[s] != delayed.trace.rewards[s]) {
        return fail("zero-delay-equivalence", 0, static_cast<Step>(s + 1), "");
      }
    }
    report.log.push_back("PASS zero-delay-equivalence");
  }

  if (config.environment.kind == EnvironmentSpec::Kind::bernoulli) {
    const auto arms = reorder_distribution_check(observed, config.environment.means);
    for (std::size_t i = 0; i < arms.size(); ++i) {
      const auto& a = arms[i];
      if (a.status == CheckStatus::fail) {
        return fail("reorder-distribution", -1, config.horizon,
                    "action " + std::to_string(i) + " mean=" + format_real(a.empirical_mean) +
                        " autocorrelation=" + format_real(a.autocorrelation));
      }
      if (a.status == CheckStatus::inconclusive) {
        report.log.push_back("INCONCLUSIVE reorder-distribution action " + std::to_string(i) + " (" +
                             std::to_string(a.samples) + " samples)");
      }
    }
    report.log.push_back("PASS reorder-distribution");
  }
  return report;
}

}  // namespace delaylab
