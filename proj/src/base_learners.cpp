#include "delaylab/base_learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "delaylab/errors.hpp"

namespace delaylab {

namespace {

double reward_of(Action action, std::span<const double> payload) {
  if (payload.empty()) throw ProtocolError("empty feedback payload");
  const double r = payload.size() == 1 ? payload[0] : payload[action];
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("reward outside [0,1]");
  return r;
}

std::vector<double> normalized_exp(std::span<const double> log_weights) {
  const double top = *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> p(log_weights.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(log_weights[i] - top);
    sum += p[i];
  }
  for (double& x : p) x /= sum;
  return p;
}

Action sample_from(std::span<const double> p, Rng& rng) {
  std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
  return dist(rng);
}

}  // namespace

double ucb1_index(double mean_estimate, std::int64_t s, double t) {
  if (s <= 0) return kUnexplored;
  return mean_estimate + std::sqrt(2.0 * std::log(t) / static_cast<double>(s));
}

double bernoulli_kl(double p, double q) {
  double d = 0.0;
  if (p > 0.0) {
    if (q <= 0.0) return kUnexplored;
    d += p * std::log(p / q);
  }
  if (p < 1.0) {
    if (q >= 1.0) return kUnexplored;
    d += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  // Rounding can push d(p,q) for q ~ p a hair below zero.
  return std::max(d, 0.0);
}

double bernoulli_kl_plus(double x, double y) { return x < y ? bernoulli_kl(x, y) : 0.0; }

double kl_ucb_threshold(double t) {
  const double lt = std::log(t);
  return std::max(0.0, lt + 3.0 * std::log(std::max(lt, 1.0)));
}

double kl_ucb_index(double mean_estimate, std::int64_t s, double t, double tolerance) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("kl_ucb_index: tolerance must be positive");
  if (s <= 0) return kUnexplored;
  const double budget = kl_ucb_threshold(t) / static_cast<double>(s);
  if (budget <= 0.0) return mean_estimate;
  const auto feasible = [&](double q) { return bernoulli_kl(mean_estimate, q) <= budget; };
  if (feasible(1.0)) return 1.0;
  double lo = mean_estimate;  // feasible: d = 0
  double hi = 1.0;            // infeasible
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

Action index_select(std::span<const double> indices) {
  if (indices.empty()) throw std::invalid_argument("index_select: no indices");
  Action best = 0;
  for (Action i = 1; i < indices.size(); ++i) {
    if (indices[i] > indices[best]) best = i;
  }
  return best;
}

Ucb1::Ucb1(std::size_t num_actions) : arms_(num_actions) {
  if (num_actions == 0) throw std::invalid_argument("Ucb1: no actions");
}

Action Ucb1::predict() {
  const auto t = static_cast<double>(++round_);
  std::vector<double> idx(arms_.size());
  for (std::size_t i = 0; i < arms_.size(); ++i) idx[i] = ucb1_index(arms_[i].mean(), arms_[i].pulls, t);
  return index_select(idx);
}

void Ucb1::update(Action action, std::span<const double> payload) {
  arms_.at(action).add(reward_of(action, payload));
}

KlUcb::KlUcb(std::size_t num_actions, double tolerance) : arms_(num_actions), tolerance_(tolerance) {
  if (num_actions == 0) throw std::invalid_argument("KlUcb: no actions");
  if (!(tolerance > 0.0)) throw std::invalid_argument("KlUcb: tolerance must be positive");
}

Action KlUcb::predict() {
  const auto t = static_cast<double>(++round_);
  std::vector<double> idx(arms_.size());
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    idx[i] = kl_ucb_index(arms_[i].mean(), arms_[i].pulls, t, tolerance_);
  }
  return index_select(idx);
}

void KlUcb::update(Action action, std::span<const double> payload) {
  arms_.at(action).add(reward_of(action, payload));
}

std::vector<double> exp3_distribution(std::span<const double> weights, double gamma) {
  double sum = 0.0;
  for (double w : weights) sum += w;
  const double k = static_cast<double>(weights.size());
  std::vector<double> p(weights.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = (1.0 - gamma) * weights[i] / sum + gamma / k;
  return p;
}

void exp3_update(std::vector<double>& weights, std::span<const double> distribution, Action action,
                 double reward, double gamma) {
  if (!(reward >= 0.0 && reward <= 1.0)) throw std::invalid_argument("exp3: reward outside [0,1]");
  const double estimate = reward / distribution[action];
  weights.at(action) *= std::exp(gamma * estimate / static_cast<double>(weights.size()));
}

std::vector<double> hedge_step(std::vector<double>& weights, std::span<const double> losses,
                               double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("hedge: eta must be positive");
  if (losses.size() != weights.size()) throw std::invalid_argument("hedge: loss vector size");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(losses[i] >= 0.0 && losses[i] <= 1.0)) throw std::invalid_argument("hedge: loss outside [0,1]");
    weights[i] *= std::exp(-eta * losses[i]);
  }
  double sum = 0.0;
  for (double w : weights) sum += w;
  std::vector<double> p(weights.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = weights[i] / sum;
  return p;
}

Exp3::Exp3(std::size_t num_actions, double gamma, std::uint64_t seed)
    : log_weights_(num_actions, 0.0), gamma_(gamma), rng_(seed) {
  if (num_actions == 0) throw std::invalid_argument("Exp3: no actions");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("Exp3: gamma must lie in (0,1]");
}

std::vector<double> Exp3::distribution() const {
  auto p = normalized_exp(log_weights_);
  const double k = static_cast<double>(p.size());
  for (double& x : p) x = (1.0 - gamma_) * x + gamma_ / k;
  return p;
}

Action Exp3::predict() {
  last_distribution_ = distribution();
  return sample_from(last_distribution_, rng_);
}

void Exp3::update(Action action, std::span<const double> payload) {
  if (last_distribution_.empty()) throw ProtocolError("Exp3: update before predict");
  const double r = reward_of(action, payload);
  const double estimate = r / last_distribution_.at(action);
  log_weights_[action] += gamma_ * estimate / static_cast<double>(log_weights_.size());
  last_distribution_.clear();
}

Hedge::Hedge(std::size_t num_actions, double eta, std::uint64_t seed)
    : log_weights_(num_actions, 0.0), eta_(eta), rng_(seed) {
  if (num_actions == 0) throw std::invalid_argument("Hedge: no actions");
  if (!(eta > 0.0)) throw std::invalid_argument("Hedge: eta must be positive");
}

std::vector<double> Hedge::distribution() const { return normalized_exp(log_weights_); }

std::vector<double> Hedge::step(std::span<const double> losses) {
  if (losses.size() != log_weights_.size()) throw std::invalid_argument("hedge: loss vector size");
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!(losses[i] >= 0.0 && losses[i] <= 1.0)) throw std::invalid_argument("hedge: loss outside [0,1]");
    log_weights_[i] -= eta_ * losses[i];
  }
  return distribution();
}

Action Hedge::predict() { return sample_from(distribution(), rng_); }

void Hedge::update(Action /*action*/, std::span<const double> payload) {
  if (payload.size() != log_weights_.size()) {
    throw ProtocolError("Hedge needs full-information feedback");
  }
  std::vector<double> losses(payload.size());
  std::transform(payload.begin(), payload.end(), losses.begin(), [](double r) { return 1.0 - r; });
  step(losses);
}

std::uint64_t first_instance_seed(std::uint64_t master_seed, std::uint64_t run_index) {
  return child_seed(substream_seed(master_seed, Stream::learner, run_index), 0);
}

RunTrace run_nondelayed(const Environment& env, BaseLearner& base, Step horizon,
                        std::uint64_t master_seed, std::uint64_t run_index) {
  if (horizon < 1) throw EmptyRunError();
  if (base.num_actions() != env.num_actions()) {
    throw ProtocolError("learner and environment disagree on the number of actions");
  }
  Rng env_rng(substream_seed(master_seed, Stream::environment, run_index));
  RunTrace trace;
  trace.horizon = horizon;
  for (Step t = 1; t <= horizon; ++t) {
    const Action a = base.predict();
    if (a >= env.num_actions()) throw ProtocolError("base learner returned out-of-range action");
    Outcome outcome = env.draw(t, a, env_rng);
    base.update(a, outcome.payload);
    trace.actions.push_back(a);
    trace.rewards.push_back(outcome.reward);
    trace.delays.push_back(0);
    trace.outstanding.push_back(0);
    trace.batches.push_back({t, {{t, std::move(outcome.payload)}}});
  }
  return trace;
}

}  // namespace delaylab
