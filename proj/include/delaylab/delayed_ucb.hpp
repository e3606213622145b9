#pragma once

#include <cstdint>
#include <vector>

#include "delaylab/base_learners.hpp"
#include "delaylab/protocol.hpp"

namespace delaylab {

enum class IndexKind { ucb1, kl_ucb };

// Per-arm bookkeeping of plays T_i and observed feedbacks S_i.
struct ArmLedger {
  struct Arm {
    std::int64_t plays = 0;
    std::int64_t observed = 0;
    double reward_sum = 0.0;
    double mean_estimate = 0.0;

    std::int64_t in_flight() const noexcept { return plays - observed; }
  };
  std::vector<Arm> arms;

  explicit ArmLedger(std::size_t num_actions = 0) : arms(num_actions) {}
};

// Index policy computed from observed rewards only: a_t = argmax_i B_{i,S_i(t-1),t}.
Action delayed_select(ArmLedger& ledger, Step t, IndexKind kind,
                      double tolerance = kDefaultKlTolerance);

void delayed_absorb(ArmLedger& ledger, const FeedbackBatch& batch, std::span<const Action> origin_actions);

class DelayedUcb final : public Learner {
 public:
  DelayedUcb(std::size_t num_actions, IndexKind kind, double tolerance = kDefaultKlTolerance);

  std::size_t num_actions() const override { return ledger_.arms.size(); }
  void begin(std::uint64_t seed) override;
  Action select(Step t) override;
  void absorb(const FeedbackBatch& batch, std::span<const Action> actions) override;
  std::vector<std::string> diagnostic_columns() const override;
  std::vector<std::string> diagnostics() const override;

  const ArmLedger& ledger() const noexcept { return ledger_; }

 private:
  ArmLedger ledger_;
  IndexKind kind_;
  double tolerance_;
};

}  // namespace delaylab
