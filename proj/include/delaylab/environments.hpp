#pragma once

#include <filesystem>
#include <optional>
#include <variant>
#include <vector>

#include "delaylab/rng.hpp"
#include "delaylab/types.hpp"

namespace delaylab {

struct Outcome {
  double reward = 0.0;  // r_t(a_t), in [0,1]
  Payload payload;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t num_actions() const = 0;
  virtual FeedbackKind feedback_kind() const = 0;
  // Consumes draws only from `rng` (the environment substream).
  virtual Outcome draw(Step t, Action action, Rng& rng) const = 0;
};

// Stochastic bandit with Bernoulli(mu_i) rewards.
class BernoulliBandit final : public Environment {
 public:
  explicit BernoulliBandit(std::vector<double> means);

  const std::vector<double>& means() const noexcept { return means_; }
  std::size_t num_actions() const override { return means_.size(); }
  FeedbackKind feedback_kind() const override { return FeedbackKind::bandit; }
  Outcome draw(Step t, Action action, Rng& rng) const override;

 private:
  std::vector<double> means_;
};

double bernoulli_pull(const BernoulliBandit& env, Action action, Rng& rng);

// Delta_i = max_j mu_j - mu_i.
std::vector<double> action_gaps(const std::vector<double>& means);
inline std::vector<double> action_gaps(const BernoulliBandit& env) {
  return action_gaps(env.means());
}

// Oblivious adversary: an n x K table of rewards fixed before the run.
class RewardMatrix {
 public:
  RewardMatrix() = default;
  explicit RewardMatrix(std::vector<std::vector<double>> rows);

  std::size_t steps() const noexcept { return rows_.size(); }
  std::size_t num_actions() const noexcept { return rows_.empty() ? 0 : rows_.front().size(); }
  const std::vector<double>& row(Step t) const;

 private:
  std::vector<std::vector<double>> rows_;
};

double adversarial_reward(const RewardMatrix& matrix, Step t, Action action);

struct BestAction {
  Action action = 0;
  double total = 0.0;
};
// Column with the largest sum, ties to the lowest index.
BestAction best_fixed_action(const RewardMatrix& matrix);

// One row per step, K comma-separated values in [0,1].
RewardMatrix load_reward_matrix(const std::filesystem::path& path);

class MatrixEnvironment final : public Environment {
 public:
  MatrixEnvironment(RewardMatrix matrix, FeedbackKind kind)
      : matrix_(std::move(matrix)), kind_(kind) {}

  const RewardMatrix& matrix() const noexcept { return matrix_; }
  std::size_t num_actions() const override { return matrix_.num_actions(); }
  FeedbackKind feedback_kind() const override { return kind_; }
  Outcome draw(Step t, Action action, Rng& rng) const override;

 private:
  RewardMatrix matrix_;
  FeedbackKind kind_;
};

class DelayModel {
 public:
  struct Constant { std::int64_t value; };
  // Number of failures before the first success, p = 1/(mean+1).
  struct Geometric { double mean; };
  struct Uniform { std::int64_t lo, hi; };
  struct Empirical { std::vector<std::int64_t> values; };
  struct PerAction { std::vector<DelayModel> models; };
  // tau_t = values[t-1]; replays a recorded delay sequence.
  struct Sequence { std::vector<std::int64_t> values; };

  static DelayModel constant(std::int64_t value);
  static DelayModel geometric(double mean);
  static DelayModel uniform(std::int64_t lo, std::int64_t hi);
  static DelayModel empirical(std::vector<std::int64_t> values);
  static DelayModel per_action(std::vector<DelayModel> models);
  static DelayModel sequence(std::vector<std::int64_t> values);

  std::int64_t sample(Step t, Action action, Rng& rng) const;

  bool action_dependent() const noexcept;
  // E[tau] for i.i.d. models; nullopt for per-action and replayed sequences.
  std::optional<double> mean() const;
  // Largest possible delay, when bounded.
  std::optional<std::int64_t> max_delay() const;

  const auto& kind() const noexcept { return kind_; }

 private:
  using Kind = std::variant<Constant, Geometric, Uniform, Empirical, PerAction, Sequence>;
  explicit DelayModel(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

inline std::int64_t sample_delay(const DelayModel& model, Step t, Action action, Rng& rng) {
  return model.sample(t, action, rng);
}

}  // namespace delaylab
