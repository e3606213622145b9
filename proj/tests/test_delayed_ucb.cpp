#include <doctest.h>

#include <cmath>
#include <random>

#include "delaylab/delayed_ucb.hpp"
#include "delaylab/errors.hpp"
#include "oracles.hpp"

using namespace delaylab;

namespace {

ArmLedger ledger_of(std::vector<std::int64_t> observed, std::vector<double> means) {
  ArmLedger ledger(observed.size());
  for (std::size_t i = 0; i < observed.size(); ++i) {
    auto& arm = ledger.arms[i];
    arm.plays = observed[i];
    arm.observed = observed[i];
    arm.mean_estimate = means[i];
    arm.reward_sum = means[i] * static_cast<double>(observed[i]);
  }
  return ledger;
}

FeedbackBatch batch_of(Step arrival, std::vector<Step> origins, double reward = 1.0) {
  FeedbackBatch b{arrival, {}};
  for (Step o : origins) b.events.push_back({o, Payload{reward}});
  return b;
}

}  // namespace

TEST_CASE("unobserved arms are selected first, lowest index on ties") {
  for (IndexKind kind : {IndexKind::ucb1, IndexKind::kl_ucb}) {
    auto ledger = ledger_of({3, 0, 0}, {0.9, 0.0, 0.0});
    // Arm 1 was played but nothing came back yet; its index stays infinite.
    ledger.arms[1].plays = 2;
    CHECK(delayed_select(ledger, 6, kind) == 1);
    CHECK(ledger.arms[1].plays == 3);
  }
}

TEST_CASE("delayed ucb1 selection example") {
  auto ledger = ledger_of({4, 1}, {0.5, 0.9});
  // ln 7: arm 0 -> 0.5 + sqrt(2 ln 7 / 4) = 1.486, arm 1 -> 0.9 + sqrt(2 ln 7) = 2.873.
  CHECK(delayed_select(ledger, 7, IndexKind::ucb1) == 1);
  CHECK(ledger.arms[1].plays == 2);
  CHECK(ledger.arms[0].plays == 4);
}

TEST_CASE("delayed kl-ucb uses observed counts only") {
  // Same observations, many more plays in flight on arm 0: the choice must not change.
  auto a = ledger_of({20, 20}, {0.6, 0.5});
  auto b = a;
  b.arms[0].plays += 50;
  CHECK(delayed_select(a, 100, IndexKind::kl_ucb) == delayed_select(b, 100, IndexKind::kl_ucb));
}

TEST_CASE("delayed absorb updates the observed statistics") {
  ArmLedger ledger(2);
  ledger.arms[0] = {4, 3, 1.0, 1.0 / 3.0};
  const std::vector<Action> actions{0, 0, 0, 0};
  delayed_absorb(ledger, batch_of(5, {4}), actions);
  CHECK(ledger.arms[0].observed == 4);
  CHECK(ledger.arms[0].reward_sum == 2.0);
  CHECK(ledger.arms[0].mean_estimate == 0.5);
  CHECK_THROWS_AS(delayed_absorb(ledger, batch_of(5, {1}), actions), ProtocolError);
  CHECK_THROWS_AS(delayed_absorb(ledger, batch_of(5, {9}), actions), ProtocolError);
}

TEST_CASE("plays minus observed equals the per-action gap") {
  BernoulliBandit env({0.3, 0.5, 0.45});
  for (IndexKind kind : {IndexKind::ucb1, IndexKind::kl_ucb}) {
    DelayedUcb learner(3, kind);
    const auto delays = DelayModel::geometric(7.0);
    Episode episode(env, learner, delays, 4);
    for (Step t = 1; t <= 400; ++t) {
      episode.step();
      const auto snap = episode.snapshot();
      for (Action i = 0; i < 3; ++i) {
        const auto& arm = learner.ledger().arms[i];
        CHECK(arm.in_flight() >= 0);
        CHECK(arm.observed <= arm.plays);
        // per_action_gap(t+1) counts plays up to t whose feedback is still missing after step t.
        CHECK(arm.in_flight() == per_action_gap(snap, i, t + 1));
      }
    }
  }
}

TEST_CASE("zero-delay delayed ucb matches the plain policies") {
  BernoulliBandit env({0.35, 0.6, 0.58, 0.2});
  for (std::uint64_t run = 0; run < 5; ++run) {
    DelayedUcb d1(4, IndexKind::ucb1);
    Ucb1 u1(4);
    const auto a = run_episode(env, d1, DelayModel::constant(0), 600, 9, run);
    const auto b = run_nondelayed(env, u1, 600, 9, run);
    CHECK(a.actions == b.actions);
    CHECK(a.rewards == b.rewards);

    DelayedUcb d2(4, IndexKind::kl_ucb);
    KlUcb u2(4);
    const auto c = run_episode(env, d2, DelayModel::constant(0), 600, 9, run);
    const auto d = run_nondelayed(env, u2, 600, 9, run);
    CHECK(c.actions == d.actions);
    CHECK(c.rewards == d.rewards);
  }
}

TEST_CASE("kl plus matches an independent grid") {
  for (int i = 0; i <= 50; ++i) {
    for (int j = 1; j < 50; ++j) {
      const double x = i / 50.0;
      const double y = j / 50.0;
      const double expected = x < y ? oracle::kl(x, y) : 0.0;
      CHECK(bernoulli_kl_plus(x, y) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}
