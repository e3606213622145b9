#include "delaylab/environments.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace delaylab {

namespace {

bool is_probability(double x) { return x >= 0.0 && x <= 1.0; }

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

BernoulliBandit::BernoulliBandit(std::vector<double> means) : means_(std::move(means)) {
  if (means_.empty()) throw std::invalid_argument("bernoulli bandit needs at least one arm");
  for (double m : means_) {
    if (!is_probability(m)) throw std::invalid_argument("arm means must lie in [0,1]");
  }
}

Outcome BernoulliBandit::draw(Step /*t*/, Action action, Rng& rng) const {
  const double r = bernoulli_pull(*this, action, rng);
  return {r, Payload{r}};
}

double bernoulli_pull(const BernoulliBandit& env, Action action, Rng& rng) {
  if (action >= env.num_actions()) throw std::out_of_range("bernoulli_pull: invalid action");
  std::bernoulli_distribution coin(env.means()[action]);
  return coin(rng) ? 1.0 : 0.0;
}

std::vector<double> action_gaps(const std::vector<double>& means) {
  std::vector<double> gaps(means.size(), 0.0);
  if (means.empty()) return gaps;
  const double best = *std::max_element(means.begin(), means.end());
  std::transform(means.begin(), means.end(), gaps.begin(), [best](double m) { return best - m; });
  return gaps;
}

RewardMatrix::RewardMatrix(std::vector<std::vector<double>> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) return;
  const std::size_t k = rows_.front().size();
  if (k == 0) throw std::invalid_argument("reward matrix needs at least one column");
  for (const auto& row : rows_) {
    if (row.size() != k) throw std::invalid_argument("reward matrix rows differ in width");
    for (double v : row) {
      if (!is_probability(v)) throw std::invalid_argument("reward matrix entries must lie in [0,1]");
    }
  }
}

const std::vector<double>& RewardMatrix::row(Step t) const {
  if (t < 1 || static_cast<std::size_t>(t) > rows_.size()) {
    throw std::out_of_range("reward matrix: step out of range");
  }
  return rows_[static_cast<std::size_t>(t - 1)];
}

double adversarial_reward(const RewardMatrix& matrix, Step t, Action action) {
  const auto& r = matrix.row(t);
  if (action >= r.size()) throw std::out_of_range("reward matrix: invalid action");
  return r[action];
}

BestAction best_fixed_action(const RewardMatrix& matrix) {
  std::vector<double> totals(matrix.num_actions(), 0.0);
  for (Step t = 1; t <= static_cast<Step>(matrix.steps()); ++t) {
    const auto& r = matrix.row(t);
    for (std::size_t a = 0; a < r.size(); ++a) totals[a] += r[a];
  }
  BestAction best;
  for (std::size_t a = 0; a < totals.size(); ++a) {
    if (a == 0 || totals[a] > best.total) best = {a, totals[a]};
  }
  return best;
}

RewardMatrix load_reward_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reward matrix " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return RewardMatrix(std::move(rows));
}

Outcome MatrixEnvironment::draw(Step t, Action action, Rng& /*rng*/) const {
  const double r = adversarial_reward(matrix_, t, action);
  if (kind_ == FeedbackKind::full_information) return {r, matrix_.row(t)};
  return {r, Payload{r}};
}

DelayModel DelayModel::constant(std::int64_t value) {
  if (value < 0) throw std::invalid_argument("constant delay must be nonnegative");
  return DelayModel(Constant{value});
}

DelayModel DelayModel::geometric(double mean) {
  if (!(mean > 0.0)) throw std::invalid_argument("geometric delay mean must be positive");
  return DelayModel(Geometric{mean});
}

DelayModel DelayModel::uniform(std::int64_t lo, std::int64_t hi) {
  if (lo < 0 || lo > hi) throw std::invalid_argument("uniform delay needs 0 <= lo <= hi");
  return DelayModel(Uniform{lo, hi});
}

DelayModel DelayModel::empirical(std::vector<std::int64_t> values) {
  if (values.empty()) throw std::invalid_argument("empirical delay list is empty");
  if (std::any_of(values.begin(), values.end(), [](std::int64_t v) { return v < 0; })) {
    throw std::invalid_argument("empirical delays must be nonnegative");
  }
  return DelayModel(Empirical{std::move(values)});
}

DelayModel DelayModel::per_action(std::vector<DelayModel> models) {
  if (models.empty()) throw std::invalid_argument("per-action delay model needs sub-models");
  return DelayModel(PerAction{std::move(models)});
}

DelayModel DelayModel::sequence(std::vector<std::int64_t> values) {
  if (values.empty()) throw std::invalid_argument("delay sequence is empty");
  if (std::any_of(values.begin(), values.end(), [](std::int64_t v) { return v < 0; })) {
    throw std::invalid_argument("sequence delays must be nonnegative");
  }
  return DelayModel(Sequence{std::move(values)});
}

std::int64_t DelayModel::sample(Step t, Action action, Rng& rng) const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.value; },
          [&rng](const Geometric& g) {
            std::geometric_distribution<std::int64_t> dist(1.0 / (g.mean + 1.0));
            return dist(rng);
          },
          [&rng](const Uniform& u) {
            std::uniform_int_distribution<std::int64_t> dist(u.lo, u.hi);
            return dist(rng);
          },
          [&rng](const Empirical& e) {
            std::uniform_int_distribution<std::size_t> pick(0, e.values.size() - 1);
            return e.values[pick(rng)];
          },
          [&](const PerAction& p) {
            if (action >= p.models.size()) throw std::out_of_range("per-action delay: invalid action");
            return p.models[action].sample(t, action, rng);
          },
          [t](const Sequence& q) {
            if (t < 1 || static_cast<std::size_t>(t) > q.values.size()) {
              throw std::out_of_range("delay sequence shorter than the run");
            }
            return q.values[static_cast<std::size_t>(t - 1)];
          },
      },
      kind_);
}

bool DelayModel::action_dependent() const noexcept {
  return std::holds_alternative<PerAction>(kind_);
}

std::optional<double> DelayModel::mean() const {
  return std::visit(
      Overloaded{
          [](const Constant& c) -> std::optional<double> { return static_cast<double>(c.value); },
          [](const Geometric& g) -> std::optional<double> { return g.mean; },
          [](const Uniform& u) -> std::optional<double> {
            return 0.5 * static_cast<double>(u.lo + u.hi);
          },
          [](const Empirical& e) -> std::optional<double> {
            const double sum = std::accumulate(e.values.begin(), e.values.end(), 0.0);
            return sum / static_cast<double>(e.values.size());
          },
          [](const PerAction&) -> std::optional<double> { return std::nullopt; },
          [](const Sequence&) -> std::optional<double> { return std::nullopt; },
      },
      kind_);
}

std::optional<std::int64_t> DelayModel::max_delay() const {
  return std::visit(
      Overloaded{
          [](const Constant& c) -> std::optional<std::int64_t> { return c.value; },
          [](const Geometric&) -> std::optional<std::int64_t> { return std::nullopt; },
          [](const Uniform& u) -> std::optional<std::int64_t> { return u.hi; },
          [](const Empirical& e) -> std::optional<std::int64_t> {
            return *std::max_element(e.values.begin(), e.values.end());
          },
          [](const PerAction& p) -> std::optional<std::int64_t> {
            std::int64_t hi = 0;
            for (const auto& m : p.models) {
              auto sub = m.max_delay();
              if (!sub) return std::nullopt;
              hi = std::max(hi, *sub);
            }
            return hi;
          },
          [](const Sequence& q) -> std::optional<std::int64_t> {
            return *std::max_element(q.values.begin(), q.values.end());
          },
      },
      kind_);
}

}  // namespace delaylab
