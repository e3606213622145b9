#include "delaylab/meta_learners.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "delaylab/errors.hpp"

namespace delaylab {

BoldLearner::BoldLearner(std::size_t num_actions, BaseFactory factory)
    : num_actions_(num_actions), factory_(std::move(factory)) {
  if (num_actions_ == 0) throw std::invalid_argument("BoldLearner: no actions");
  if (!factory_) throw std::invalid_argument("BoldLearner: missing base factory");
}

void BoldLearner::begin(std::uint64_t seed) {
  seed_ = seed;
  instances_.clear();
  free_.clear();
  assignment_.clear();
  schedule_.clear();
  pool_sizes_.clear();
}

BoldLearner::Pick BoldLearner::predict(Step t) {
  if (t != static_cast<Step>(schedule_.size()) + 1) {
    throw ProtocolError("BoldLearner: predict called out of step order");
  }
  std::size_t id;
  if (free_.empty()) {
    id = instances_.size();
    instances_.push_back(factory_(child_seed(seed_, id)));
  } else {
    id = *free_.begin();
    free_.erase(free_.begin());
  }
  const Action a = instances_[id]->predict();
  assignment_.push_back(id);
  schedule_.push_back(id);
  pool_sizes_.push_back(instances_.size());
  return {id, a};
}

Action BoldLearner::select(Step t) { return predict(t).action; }

void BoldLearner::absorb(const FeedbackBatch& batch, std::span<const Action> actions) {
  for (const auto& event : batch.events) {
    const auto origin = static_cast<std::size_t>(event.origin_step);
    if (event.origin_step < 1 || origin > assignment_.size() || assignment_[origin - 1] == kNone) {
      throw ProtocolError("BoldLearner: feedback for unknown origin step " +
                          std::to_string(event.origin_step));
    }
    const std::size_t id = assignment_[origin - 1];
    assignment_[origin - 1] = kNone;
    instances_[id]->update(actions[origin - 1], event.payload);
    free_.insert(id);
  }
}

std::vector<std::string> BoldLearner::diagnostics() const {
  return {std::to_string(schedule_.empty() ? 0 : schedule_.back()), std::to_string(instances_.size())};
}

QpmdLearner::QpmdLearner(std::size_t num_actions, BaseFactory factory)
    : num_actions_(num_actions), factory_(std::move(factory)) {
  if (num_actions_ == 0) throw std::invalid_argument("QpmdLearner: no actions");
  if (!factory_) throw std::invalid_argument("QpmdLearner: missing base factory");
}

void QpmdLearner::begin(std::uint64_t seed) {
  base_ = factory_(child_seed(seed, 0));
  queues_.assign(num_actions_, {});
  base_queries_ = 0;
  base_counts_.assign(num_actions_, 0);
  base_predictions_.clear();
  queries_by_step_.clear();
  enqueued_ = 0;
  dequeued_ = 0;
  replayed_.assign(num_actions_, {});
  query_base();
}

void QpmdLearner::query_base() {
  intent_ = base_->predict();
  if (intent_ >= num_actions_) throw ProtocolError("QpmdLearner: base returned out-of-range action");
  ++base_queries_;
  ++base_counts_[intent_];
  base_predictions_.push_back(intent_);
}

Action QpmdLearner::select(Step /*t*/) {
  while (!queues_[intent_].empty()) {
    Payload payload = std::move(queues_[intent_].front());
    queues_[intent_].pop_front();
    ++dequeued_;
    base_->update(intent_, payload);
    query_base();
  }
  queries_by_step_.push_back(base_queries_);
  return intent_;
}

std::vector<std::int64_t> QpmdLearner::base_counts_at(Step t) const {
  const auto upto = static_cast<std::size_t>(base_queries_at(t));
  std::vector<std::int64_t> counts(num_actions_, 0);
  for (std::size_t q = 0; q < upto; ++q) ++counts[base_predictions_[q]];
  return counts;
}

void QpmdLearner::absorb(const FeedbackBatch& batch, std::span<const Action> actions) {
  for (const auto& event : batch.events) {
    const auto origin = static_cast<std::size_t>(event.origin_step);
    if (event.origin_step < 1 || origin > actions.size()) {
      throw ProtocolError("QpmdLearner: feedback for unknown origin step");
    }
    const Action a = actions[origin - 1];
    if (!event.payload.empty()) {
      replayed_[a].push_back(event.payload.size() == 1 ? event.payload[0] : event.payload[a]);
    }
    queues_[a].push_back(event.payload);
    ++enqueued_;
  }
}

std::size_t QpmdLearner::queued_total() const noexcept {
  return std::accumulate(queues_.begin(), queues_.end(), std::size_t{0},
                         [](std::size_t acc, const auto& q) { return acc + q.size(); });
}

std::vector<std::string> QpmdLearner::diagnostics() const {
  return {std::to_string(queued_total()), std::to_string(base_queries_)};
}

}  // namespace delaylab
