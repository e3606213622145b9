#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "delaylab/environments.hpp"
#include "delaylab/protocol.hpp"

namespace delaylab {

// Closed-form curve sampled at t = 1..n (values[t-1]).
struct BoundCurve {
  std::string label;
  std::vector<double> values;
  std::map<std::string, double> parameters;
};

// sum_i Delta_i T_i(n).
double pseudo_regret(std::span<const std::int64_t> play_counts, std::span<const double> means);

// Best fixed action's total minus the learner's realized total.
double realized_regret(const RunTrace& trace, const RewardMatrix& matrix);

// B(n,t) = t + 2 ln n + sqrt(4 t ln n), evaluated at t = mean_delay.
double bernstein_budget(double n, double mean_delay);

// (g+1) f(n/(g+1)).
double bold_regret_bound(const std::function<double(double)>& f_base, double g_star_mean, double n);

// sum_{Delta_i>0} [8 ln n / Delta_i + 3.5 Delta_i] + sum_i Delta_i E[G*_{i,n}].
double ucb1_regret_bound(double n, std::span<const double> gaps, std::span<const double> g_star_means);

struct KlUcbConstants {
  double c1 = 10.0;
  double c2 = 0.0;
  double beta = 1.0;
};

// sum_{Delta_i>0} Delta_i [ln n / d(mu_i,mu*) (1+eps) + C1 ln ln n]
//   + sum_i Delta_i [C2 / n^beta E[G*_{i,n}] + E[G*_{i,n}] + 1].
// ln ln n is taken as ln(max(ln n, 1)) so that small n stay finite.
double klucb_regret_bound(double n, std::span<const double> means, double epsilon,
                          std::span<const double> g_star_means, const KlUcbConstants& constants = {});

// Non-delayed KL-UCB bound:
// sum_{Delta_i>0} Delta_i [ln n / d(mu_i,mu*) (1+eps) + C1 ln ln n + C2 / n^beta].
double klucb_nondelayed_bound(double n, std::span<const double> means, double epsilon,
                              const KlUcbConstants& constants = {});

// Regret bounds of the shipped base learners, as functions of their horizon.
double hedge_regret_bound(double m, std::size_t num_actions);
double exp3_regret_bound(double m, std::size_t num_actions);

// Observed feedback values per action in arrival order (one sequence per trace).
std::vector<std::vector<double>> observed_feedbacks(const RunTrace& trace, std::size_t num_actions);

enum class CheckStatus { pass, fail, inconclusive };

struct ReorderArmReport {
  CheckStatus status = CheckStatus::inconclusive;
  std::int64_t samples = 0;
  double empirical_mean = 0.0;
  double mean_tolerance = 0.0;  // 4 binomial standard deviations
  double autocorrelation = 0.0;
  double autocorrelation_tolerance = 0.0;  // 4 / sqrt(N)
};

inline constexpr std::int64_t kReorderMinSamples = 100;

// sequences[i] holds, per run, the observed feedbacks of action i in the
// order received. Passes an arm iff its pooled mean is within 4 binomial
// standard deviations of means[i] and the pooled lag-1 autocorrelation is
// within 4/sqrt(N) of 0.
std::vector<ReorderArmReport> reorder_distribution_check(
    const std::vector<std::vector<std::vector<double>>>& sequences, std::span<const double> means);

// Sample mean and standard error accumulated in a fixed order.
class RunningStats {
 public:
  void add(double x) noexcept;
  std::int64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  double variance() const noexcept;  // sample variance, 0 when n < 2
  double standard_error() const noexcept;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace delaylab
