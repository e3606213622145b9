#pragma once

#include <vector>

#include "delaylab/protocol.hpp"

namespace delaylab::testing {

// Plays a fixed script of actions (cycling) and records every batch.
class ScriptedLearner final : public Learner {
 public:
  ScriptedLearner(std::size_t num_actions, std::vector<Action> script)
      : num_actions_(num_actions), script_(std::move(script)) {}

  std::size_t num_actions() const override { return num_actions_; }
  void begin(std::uint64_t) override { batches.clear(); }
  Action select(Step t) override { return script_[static_cast<std::size_t>(t - 1) % script_.size()]; }
  void absorb(const FeedbackBatch& batch, std::span<const Action>) override { batches.push_back(batch); }

  std::vector<FeedbackBatch> batches;

 private:
  std::size_t num_actions_;
  std::vector<Action> script_;
};

inline std::vector<Step> origins(const FeedbackBatch& batch) {
  std::vector<Step> out;
  for (const auto& e : batch.events) out.push_back(e.origin_step);
  return out;
}

}  // namespace delaylab::testing
