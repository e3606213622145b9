#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "delaylab/base_learners.hpp"
#include "delaylab/environments.hpp"
#include "delaylab/labkit.hpp"
#include "delaylab/meta_learners.hpp"
#include "delaylab/protocol.hpp"

namespace delaylab {

enum class MetaKind { none, bold, qpmd };
enum class BaseKind { ucb1, kl_ucb, exp3, hedge };

struct LearnerSpec {
  MetaKind meta = MetaKind::none;
  BaseKind base = BaseKind::ucb1;
  double gamma = 0.1;
  double eta = 0.1;
  double kl_tolerance = kDefaultKlTolerance;
};

struct EnvironmentSpec {
  enum class Kind { bernoulli, matrix };
  Kind kind = Kind::bernoulli;
  std::vector<double> means;
  std::filesystem::path matrix_path;
  RewardMatrix matrix;
  FeedbackKind feedback = FeedbackKind::bandit;

  std::size_t num_actions() const noexcept {
    return kind == Kind::bernoulli ? means.size() : matrix.num_actions();
  }
};

struct BoundParams {
  double epsilon = 0.1;
  KlUcbConstants klucb;
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  DelayModel delay = DelayModel::constant(0);
  LearnerSpec learner;
  Step horizon = 1;
  std::int64_t runs = 1;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::filesystem::path out_dir = "out";
  // Any of: lemma, theorem1, theorem3, theorem4, theorem5.
  std::vector<std::string> bounds;
  BoundParams bound_params;
  // Keep QPM-D running past the horizon until its base was queried n times.
  bool qpmd_extended = false;
  EpisodeOptions faults;
};

std::string to_string(MetaKind kind);
std::string to_string(BaseKind kind);

std::unique_ptr<Environment> make_environment(const EnvironmentSpec& spec);
BaseFactory make_base_factory(const LearnerSpec& spec, std::size_t num_actions);
std::unique_ptr<BaseLearner> make_base(const LearnerSpec& spec, std::size_t num_actions, std::uint64_t seed);
std::unique_ptr<Learner> make_learner(const LearnerSpec& spec, std::size_t num_actions);

// Throws ConfigError naming the offending key.
void validate_config(const ExperimentConfig& config);

// One simulated episode with its learner kept for inspection.
struct RunOutcome {
  RunTrace trace;
  std::unique_ptr<Learner> learner;
  // Base-learner prediction counts after the extended QPM-D run, if requested.
  std::optional<std::vector<std::int64_t>> extended_base_counts;
};

RunOutcome run_single(const ExperimentConfig& config, const Environment& env, std::int64_t run_index);

// Cumulative regret per step: pseudo-regret on Bernoulli environments,
// realized regret against the best fixed action on reward matrices.
std::vector<double> regret_curve(const RunTrace& trace, const EnvironmentSpec& env);

struct AggregateStats {
  std::int64_t runs = 0;
  Step horizon = 0;
  std::vector<double> mean_regret;
  std::vector<double> stderr_regret;
  std::vector<double> mean_g_star;                     // E[G*_t]
  std::vector<std::vector<double>> mean_arm_g_star;    // [t-1][i] = E[G*_{i,t}]
  std::vector<double> mean_play_counts;                // E[T_i(n)]
  double mean_final_regret = 0.0;
  double stderr_final_regret = 0.0;
  double mean_final_g_star = 0.0;
  std::vector<double> mean_final_arm_g_star;
  // QPM-D only.
  std::optional<double> mean_base_queries;
  std::optional<std::vector<double>> mean_base_counts;
  std::optional<std::vector<double>> mean_extended_base_counts;
};

// Runs config.runs episodes with per-run substreams; results are merged in
// run-index order, so the output does not depend on config.jobs.
AggregateStats monte_carlo(const ExperimentConfig& config);

// Requested bound curves, evaluated pointwise from the aggregate.
std::vector<BoundCurve> bound_curves(const ExperimentConfig& config, const AggregateStats& stats);

struct ValidationReport {
  bool ok = true;
  std::string failed_invariant;
  std::int64_t run = -1;
  Step step = 0;
  std::string detail;
  std::vector<std::string> log;  // one line per check
};

// Exact invariants and the reorder check for the configured setting.
ValidationReport validate_experiment(const ExperimentConfig& config);

// Lemma relating QPM-D's real plays to its base learner's predictions:
// n' <= n and 0 <= T_i(n) - T'_i(n') <= G*_{i,n}. Returns a description of
// the first violation.
std::optional<std::string> qpmd_lemma_violation(const RunTrace& trace, const QpmdLearner& learner);

// M_t = G*_t + 1 at every step; returns the first offending step.
std::optional<Step> pool_law_violation(const RunTrace& trace, const BoldLearner& learner);

}  // namespace delaylab
