#include "delaylab/delayed_ucb.hpp"

#include <stdexcept>
#include <string>

#include "delaylab/errors.hpp"

namespace delaylab {

Action delayed_select(ArmLedger& ledger, Step t, IndexKind kind, double tolerance) {
  std::vector<double> indices(ledger.arms.size());
  const auto time = static_cast<double>(t);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto& arm = ledger.arms[i];
    indices[i] = kind == IndexKind::ucb1
                     ? ucb1_index(arm.mean_estimate, arm.observed, time)
                     : kl_ucb_index(arm.mean_estimate, arm.observed, time, tolerance);
  }
  const Action a = index_select(indices);
  ++ledger.arms[a].plays;
  return a;
}

void delayed_absorb(ArmLedger& ledger, const FeedbackBatch& batch, std::span<const Action> origin_actions) {
  for (const auto& event : batch.events) {
    const auto origin = static_cast<std::size_t>(event.origin_step);
    if (event.origin_step < 1 || origin > origin_actions.size()) {
      throw ProtocolError("delayed_absorb: unknown origin step");
    }
    const Action a = origin_actions[origin - 1];
    auto& arm = ledger.arms.at(a);
    if (arm.observed >= arm.plays) {
      throw ProtocolError("delayed_absorb: more feedback than plays for action " + std::to_string(a));
    }
    if (event.payload.empty()) throw ProtocolError("delayed_absorb: empty payload");
    const double r = event.payload.size() == 1 ? event.payload[0] : event.payload[a];
    ++arm.observed;
    arm.reward_sum += r;
    arm.mean_estimate = arm.reward_sum / static_cast<double>(arm.observed);
  }
}

DelayedUcb::DelayedUcb(std::size_t num_actions, IndexKind kind, double tolerance)
    : ledger_(num_actions), kind_(kind), tolerance_(tolerance) {
  if (num_actions == 0) throw std::invalid_argument("DelayedUcb: no actions");
  if (!(tolerance > 0.0)) throw std::invalid_argument("DelayedUcb: tolerance must be positive");
}

void DelayedUcb::begin(std::uint64_t /*seed*/) { ledger_ = ArmLedger(ledger_.arms.size()); }

Action DelayedUcb::select(Step t) { return delayed_select(ledger_, t, kind_, tolerance_); }

void DelayedUcb::absorb(const FeedbackBatch& batch, std::span<const Action> actions) {
  delayed_absorb(ledger_, batch, actions);
}

std::vector<std::string> DelayedUcb::diagnostic_columns() const {
  std::vector<std::string> cols;
  for (std::size_t i = 0; i < ledger_.arms.size(); ++i) {
    cols.push_back("plays_" + std::to_string(i));
    cols.push_back("observed_" + std::to_string(i));
  }
  return cols;
}

std::vector<std::string> DelayedUcb::diagnostics() const {
  std::vector<std::string> out;
  for (const auto& arm : ledger_.arms) {
    out.push_back(std::to_string(arm.plays));
    out.push_back(std::to_string(arm.observed));
  }
  return out;
}

}  // namespace delaylab
