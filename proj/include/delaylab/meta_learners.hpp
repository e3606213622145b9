#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <set>
#include <vector>

#include "delaylab/base_learners.hpp"
#include "delaylab/protocol.hpp"

namespace delaylab {

// Black-box reduction that keeps a pool of non-delayed base instances and
// hands each step to a free one, creating a new instance when all are busy.
class BoldLearner final : public Learner {
 public:
  BoldLearner(std::size_t num_actions, BaseFactory factory);

  std::size_t num_actions() const override { return num_actions_; }
  void begin(std::uint64_t seed) override;
  Action select(Step t) override;
  void absorb(const FeedbackBatch& batch, std::span<const Action> actions) override;
  std::vector<std::string> diagnostic_columns() const override { return {"instance", "pool_size"}; }
  std::vector<std::string> diagnostics() const override;

  struct Pick {
    std::size_t instance;
    Action action;
  };
  Pick predict(Step t);

  std::size_t pool_size() const noexcept { return instances_.size(); }
  std::size_t busy_count() const noexcept { return instances_.size() - free_.size(); }
  // Instance used at each step so far (0-based ids).
  const std::vector<std::size_t>& schedule() const noexcept { return schedule_; }
  // M_t after the prediction of each step.
  const std::vector<std::size_t>& pool_sizes() const noexcept { return pool_sizes_; }
  const BaseLearner& instance(std::size_t id) const { return *instances_.at(id); }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  std::size_t num_actions_;
  BaseFactory factory_;
  std::uint64_t seed_ = 0;
  std::vector<std::unique_ptr<BaseLearner>> instances_;
  std::set<std::size_t> free_;
  std::vector<std::size_t> assignment_;  // origin step -> instance, kNone once absorbed
  std::vector<std::size_t> schedule_;
  std::vector<std::size_t> pool_sizes_;
};

// Queued reduction: arrived feedback waits in per-action FIFO queues and is
// replayed to a single base learner, which therefore sees no delay.
class QpmdLearner final : public Learner {
 public:
  QpmdLearner(std::size_t num_actions, BaseFactory factory);

  std::size_t num_actions() const override { return num_actions_; }
  void begin(std::uint64_t seed) override;
  Action select(Step t) override;
  void absorb(const FeedbackBatch& batch, std::span<const Action> actions) override;
  std::vector<std::string> diagnostic_columns() const override { return {"queued", "base_queries"}; }
  std::vector<std::string> diagnostics() const override;

  // n': number of times the base has been asked for a prediction.
  std::int64_t base_queries() const noexcept { return base_queries_; }
  // T'_i(n'): predictions of each action made by the base.
  const std::vector<std::int64_t>& base_counts() const noexcept { return base_counts_; }
  // Every base prediction in query order.
  const std::vector<Action>& base_predictions() const noexcept { return base_predictions_; }
  // n' and T'_i(n') as they stood right after the play of step t.
  std::int64_t base_queries_at(Step t) const { return queries_by_step_.at(static_cast<std::size_t>(t - 1)); }
  std::vector<std::int64_t> base_counts_at(Step t) const;
  Action intent() const noexcept { return intent_; }
  std::size_t queue_length(Action a) const { return queues_.at(a).size(); }
  std::size_t queued_total() const noexcept;
  std::int64_t enqueued() const noexcept { return enqueued_; }
  std::int64_t dequeued() const noexcept { return dequeued_; }
  // Every payload in arrival order, per action (the h'_{i,s} sequences).
  const std::vector<std::vector<double>>& replayed_rewards() const noexcept { return replayed_; }

 private:
  void query_base();

  std::size_t num_actions_;
  BaseFactory factory_;
  std::unique_ptr<BaseLearner> base_;
  std::vector<std::deque<Payload>> queues_;
  Action intent_ = 0;
  std::int64_t base_queries_ = 0;
  std::vector<std::int64_t> base_counts_;
  std::vector<Action> base_predictions_;
  std::vector<std::int64_t> queries_by_step_;
  std::int64_t enqueued_ = 0;
  std::int64_t dequeued_ = 0;
  std::vector<std::vector<double>> replayed_;
};

}  // namespace delaylab
