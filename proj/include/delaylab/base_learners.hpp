#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "delaylab/environments.hpp"
#include "delaylab/protocol.hpp"
#include "delaylab/rng.hpp"
#include "delaylab/types.hpp"

namespace delaylab {

inline constexpr double kUnexplored = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultKlTolerance = 1e-9;

// Non-delayed learner. Every predict() is followed by exactly one update()
// for that prediction before the next predict().
class BaseLearner {
 public:
  virtual ~BaseLearner() = default;
  virtual std::size_t num_actions() const = 0;
  virtual Action predict() = 0;
  virtual void update(Action action, std::span<const double> payload) = 0;
};

// Builds a fresh base learner from its own RNG seed.
using BaseFactory = std::function<std::unique_ptr<BaseLearner>(std::uint64_t seed)>;

// Per-arm sample statistics: s observations and their running mean.
struct ArmEstimate {
  std::int64_t pulls = 0;
  double reward_sum = 0.0;

  double mean() const noexcept {
    return pulls > 0 ? reward_sum / static_cast<double>(pulls) : 0.0;
  }
  void add(double reward) noexcept {
    ++pulls;
    reward_sum += reward;
  }
};

// mu + sqrt(2 ln t / s); +inf when s == 0.
double ucb1_index(double mean_estimate, std::int64_t s, double t);

// KL divergence between Bernoulli(p) and Bernoulli(q), with 0 log 0 = 0 and
// x log(x/0) = +inf.
double bernoulli_kl(double p, double q);

// d(x,y) when x < y, else 0.
double bernoulli_kl_plus(double x, double y);

// ln t + 3 ln(max(ln t, 1)), clamped below at 0.
double kl_ucb_threshold(double t);

// max{q in [mean,1] : s d(mean,q) <= threshold(t)} by bisection.
double kl_ucb_index(double mean_estimate, std::int64_t s, double t,
                    double tolerance = kDefaultKlTolerance);

// Argmax with ties to the lowest index.
Action index_select(std::span<const double> indices);

class Ucb1 final : public BaseLearner {
 public:
  explicit Ucb1(std::size_t num_actions);

  std::size_t num_actions() const override { return arms_.size(); }
  Action predict() override;
  void update(Action action, std::span<const double> payload) override;
  const std::vector<ArmEstimate>& arms() const noexcept { return arms_; }

 private:
  std::vector<ArmEstimate> arms_;
  std::int64_t round_ = 0;
};

class KlUcb final : public BaseLearner {
 public:
  KlUcb(std::size_t num_actions, double tolerance = kDefaultKlTolerance);

  std::size_t num_actions() const override { return arms_.size(); }
  Action predict() override;
  void update(Action action, std::span<const double> payload) override;

 private:
  std::vector<ArmEstimate> arms_;
  double tolerance_;
  std::int64_t round_ = 0;
};

// EXP3 with mixing gamma: p = (1-gamma) w/sum(w) + gamma/K and
// w_a <- w_a exp(gamma (r/p_a) / K). Weights are kept in the log domain.
class Exp3 final : public BaseLearner {
 public:
  Exp3(std::size_t num_actions, double gamma, std::uint64_t seed);

  std::size_t num_actions() const override { return log_weights_.size(); }
  Action predict() override;
  void update(Action action, std::span<const double> payload) override;

  std::vector<double> distribution() const;
  const std::vector<double>& log_weights() const noexcept { return log_weights_; }

 private:
  std::vector<double> log_weights_;
  double gamma_;
  Rng rng_;
  std::vector<double> last_distribution_;
};

// Hedge on losses 1 - r over a full-information reward vector.
class Hedge final : public BaseLearner {
 public:
  Hedge(std::size_t num_actions, double eta, std::uint64_t seed);

  std::size_t num_actions() const override { return log_weights_.size(); }
  Action predict() override;
  void update(Action action, std::span<const double> payload) override;

  // w_a <- w_a exp(-eta loss_a); returns the normalized distribution.
  std::vector<double> step(std::span<const double> losses);
  std::vector<double> distribution() const;

 private:
  std::vector<double> log_weights_;
  double eta_;
  Rng rng_;
};

// Standalone forms of the two updates on explicit weight vectors.
void exp3_update(std::vector<double>& weights, std::span<const double> distribution,
                 Action action, double reward, double gamma);
std::vector<double> exp3_distribution(std::span<const double> weights, double gamma);
std::vector<double> hedge_step(std::vector<double>& weights, std::span<const double> losses,
                               double eta);

// Plain non-delayed loop: predict, observe, update. Uses the same environment
// substream as run_episode and seeds the base like the first instance a meta
// learner would create, so zero-delay runs are comparable step by step.
RunTrace run_nondelayed(const Environment& env, BaseLearner& base, Step horizon,
                        std::uint64_t master_seed, std::uint64_t run_index = 0);

// Seed run_episode hands to instance 0 of a meta learner for this run.
std::uint64_t first_instance_seed(std::uint64_t master_seed, std::uint64_t run_index);

}  // namespace delaylab
