#include "delaylab/labkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "delaylab/base_learners.hpp"

namespace delaylab {

double pseudo_regret(std::span<const std::int64_t> play_counts, std::span<const double> means) {
  if (play_counts.size() != means.size()) throw std::invalid_argument("pseudo_regret: length mismatch");
  const auto gaps = action_gaps(std::vector<double>(means.begin(), means.end()));
  double regret = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) regret += gaps[i] * static_cast<double>(play_counts[i]);
  return regret;
}

double realized_regret(const RunTrace& trace, const RewardMatrix& matrix) {
  if (static_cast<std::size_t>(trace.horizon) > matrix.steps() || trace.actions.size() != trace.rewards.size()) {
    throw std::invalid_argument("realized_regret: trace does not fit the matrix");
  }
  std::vector<double> totals(matrix.num_actions(), 0.0);
  double earned = 0.0;
  for (std::size_t s = 0; s < trace.actions.size(); ++s) {
    const auto& row = matrix.row(static_cast<Step>(s + 1));
    for (std::size_t a = 0; a < row.size(); ++a) totals[a] += row[a];
    earned += row.at(trace.actions[s]);
  }
  return *std::max_element(totals.begin(), totals.end()) - earned;
}

double bernstein_budget(double n, double mean_delay) {
  const double ln = std::log(n);
  return mean_delay + 2.0 * ln + std::sqrt(4.0 * mean_delay * ln);
}

double bold_regret_bound(const std::function<double(double)>& f_base, double g_star_mean, double n) {
  if (g_star_mean < 0.0) throw std::invalid_argument("bold_regret_bound: negative G*");
  const double pool = g_star_mean + 1.0;
  return pool * f_base(n / pool);
}

double ucb1_regret_bound(double n, std::span<const double> gaps, std::span<const double> g_star_means) {
  if (gaps.size() != g_star_means.size()) throw std::invalid_argument("ucb1_regret_bound: length mismatch");
  double bound = 0.0;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] > 0.0) bound += 8.0 * std::log(n) / gaps[i] + 3.5 * gaps[i];
    bound += gaps[i] * g_star_means[i];
  }
  return bound;
}

double klucb_regret_bound(double n, std::span<const double> means, double epsilon,
                          std::span<const double> g_star_means, const KlUcbConstants& constants) {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("klucb_regret_bound: epsilon must be nonnegative");
  if (means.size() != g_star_means.size()) throw std::invalid_argument("klucb_regret_bound: length mismatch");
  const double best = *std::max_element(means.begin(), means.end());
  const double ln = std::log(n);
  const double lnln = std::log(std::max(ln, 1.0));
  double bound = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double gap = best - means[i];
    if (gap > 0.0) {
      bound += gap * (ln / bernoulli_kl(means[i], best) * (1.0 + epsilon) + constants.c1 * lnln);
    }
    bound += gap * (constants.c2 / std::pow(n, constants.beta) * g_star_means[i] + g_star_means[i] + 1.0);
  }
  return bound;
}

double klucb_nondelayed_bound(double n, std::span<const double> means, double epsilon,
                              const KlUcbConstants& constants) {
  const double best = *std::max_element(means.begin(), means.end());
  const double ln = std::log(n);
  const double lnln = std::log(std::max(ln, 1.0));
  double bound = 0.0;
  for (double mu : means) {
    const double gap = best - mu;
    if (gap <= 0.0) continue;
    bound += gap * (ln / bernoulli_kl(mu, best) * (1.0 + epsilon) + constants.c1 * lnln +
                    constants.c2 / std::pow(n, constants.beta));
  }
  return bound;
}

double hedge_regret_bound(double m, std::size_t num_actions) {
  return std::sqrt(m * std::log(static_cast<double>(num_actions)));
}

double exp3_regret_bound(double m, std::size_t num_actions) {
  const double k = static_cast<double>(num_actions);
  return 2.0 * std::sqrt((std::numbers::e - 1.0) * m * k * std::log(k));
}

std::vector<std::vector<double>> observed_feedbacks(const RunTrace& trace, std::size_t num_actions) {
  std::vector<std::vector<double>> seq(num_actions);
  for (const auto& batch : trace.batches) {
    for (const auto& e : batch.events) {
      const Action a = trace.actions.at(static_cast<std::size_t>(e.origin_step - 1));
      seq.at(a).push_back(e.payload.size() == 1 ? e.payload[0] : e.payload.at(a));
    }
  }
  return seq;
}

std::vector<ReorderArmReport> reorder_distribution_check(
    const std::vector<std::vector<std::vector<double>>>& sequences, std::span<const double> means) {
  if (sequences.size() != means.size()) throw std::invalid_argument("reorder check: length mismatch");
  std::vector<ReorderArmReport> reports(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    auto& rep = reports[i];
    double sum = 0.0;
    for (const auto& run : sequences[i]) {
      rep.samples += static_cast<std::int64_t>(run.size());
      for (double x : run) sum += x;
    }
    if (rep.samples < kReorderMinSamples) continue;
    const auto n = static_cast<double>(rep.samples);
    const double mu = means[i];
    rep.empirical_mean = sum / n;
    rep.mean_tolerance = 4.0 * std::sqrt(mu * (1.0 - mu) / n);

    double var = 0.0;
    double cov = 0.0;
    std::int64_t pairs = 0;
    for (const auto& run : sequences[i]) {
      for (std::size_t k = 0; k < run.size(); ++k) {
        const double dx = run[k] - rep.empirical_mean;
        var += dx * dx;
        if (k + 1 < run.size()) {
          cov += dx * (run[k + 1] - rep.empirical_mean);
          ++pairs;
        }
      }
    }
    var /= n;
    rep.autocorrelation = (var > 0.0 && pairs > 0) ? (cov / static_cast<double>(pairs)) / var : 0.0;
    rep.autocorrelation_tolerance = 4.0 / std::sqrt(n);

    const bool mean_ok = std::abs(rep.empirical_mean - mu) <= rep.mean_tolerance;
    const bool corr_ok = std::abs(rep.autocorrelation) <= rep.autocorrelation_tolerance;
    rep.status = mean_ok && corr_ok ? CheckStatus::pass : CheckStatus::fail;
  }
  return reports;
}

void RunningStats::add(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningStats::variance() const noexcept {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double RunningStats::standard_error() const noexcept {
  return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

}  // namespace delaylab
