#include <doctest.h>

#include <random>
#include <sstream>

#include "delaylab/errors.hpp"
#include "delaylab/protocol.hpp"
#include "test_support.hpp"

using namespace delaylab;
using delaylab::testing::origins;
using delaylab::testing::ScriptedLearner;

namespace {

RunTrace scripted_run(std::vector<std::int64_t> delays, std::vector<Action> script = {0},
                      std::size_t k = 1, std::uint64_t seed = 1) {
  BernoulliBandit env(std::vector<double>(k, 0.5));
  ScriptedLearner learner(k, std::move(script));
  const auto n = static_cast<Step>(delays.size());
  return run_episode(env, learner, DelayModel::sequence(std::move(delays)), n, seed);
}

}  // namespace

TEST_CASE("zero delay delivers each feedback in its own step") {
  BernoulliBandit env({0.4, 0.6});
  ScriptedLearner learner(2, {0, 1, 1});
  const auto trace = run_episode(env, learner, DelayModel::constant(0), 30, 9);
  REQUIRE(trace.batches.size() == 30);
  for (Step t = 1; t <= 30; ++t) {
    const auto& b = trace.batches[static_cast<std::size_t>(t - 1)];
    CHECK(b.arrival_step == t);
    CHECK(origins(b) == std::vector<Step>{t});
    CHECK(trace.outstanding[static_cast<std::size_t>(t - 1)] == 0);
  }
  CHECK(trace.undelivered.empty());
  CHECK(learner.batches.size() == 30);
}

TEST_CASE("constant delay 2 over five steps") {
  BernoulliBandit env({0.5});
  ScriptedLearner learner(1, {0});
  const auto trace = run_episode(env, learner, DelayModel::constant(2), 5, 3);
  CHECK(trace.batches[0].events.empty());
  CHECK(trace.batches[1].events.empty());
  CHECK(origins(trace.batches[2]) == std::vector<Step>{1});
  CHECK(origins(trace.batches[3]) == std::vector<Step>{2});
  CHECK(origins(trace.batches[4]) == std::vector<Step>{3});
  REQUIRE(trace.undelivered.size() == 2);
  CHECK(trace.undelivered[0].origin_step == 4);
  CHECK(trace.undelivered[1].origin_step == 5);
}

TEST_CASE("constant delay: max outstanding equals the delay") {
  for (std::int64_t tau : {1, 3, 7}) {
    BernoulliBandit env({0.5});
    ScriptedLearner learner(1, {0});
    const auto trace = run_episode(env, learner, DelayModel::constant(tau), 40, 3);
    CHECK(*std::max_element(trace.outstanding.begin(), trace.outstanding.end()) == tau);
    CHECK(max_outstanding(trace.delays, 40) == tau);
  }
}

TEST_CASE("outstanding_count and max_outstanding by the definition") {
  const std::vector<std::int64_t> zeros(10, 0);
  for (Step t = 1; t <= 11; ++t) CHECK(outstanding_count(zeros, t) == 0);
  CHECK(max_outstanding(zeros, 10) == 0);

  const std::vector<std::int64_t> d{3, 1, 0};
  CHECK(outstanding_count(d, 1) == 0);
  CHECK(outstanding_count(d, 3) == 2);
  CHECK(outstanding_count(d, 4) == 1);
  CHECK(max_outstanding(d, 4) == 2);
}

TEST_CASE("per-action gaps") {
  SUBCASE("zero delays") {
    const auto trace = scripted_run(std::vector<std::int64_t>(12, 0), {0, 1, 2}, 3);
    for (Step t = 1; t <= 12; ++t) {
      for (Action a = 0; a < 3; ++a) CHECK(per_action_gap(trace, a, t) == 0);
    }
  }
  SUBCASE("single arm, two in flight") {
    const auto trace = scripted_run({2, 2, 0});
    CHECK(per_action_gap(trace, 0, 3) == 2);
    CHECK(scheduled_action_gap(trace, 0, 3) == 2);
  }
  SUBCASE("partition identity on random runs") {
    std::mt19937_64 gen(99);
    std::uniform_int_distribution<int> d(0, 6);
    std::uniform_int_distribution<int> a(0, 2);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<std::int64_t> delays(30);
      std::vector<Action> script(30);
      for (auto& x : delays) x = d(gen);
      for (auto& x : script) x = static_cast<Action>(a(gen));
      const auto trace = scripted_run(delays, script, 3);
      const auto series = action_gap_series(trace, 3);
      for (Step t = 1; t <= 30; ++t) {
        std::int64_t sum = 0;
        for (Action i = 0; i < 3; ++i) {
          const auto g = per_action_gap(trace, i, t);
          CHECK(g == scheduled_action_gap(trace, i, t));
          CHECK(g == series[static_cast<std::size_t>(t - 1)][i]);
          sum += g;
        }
        CHECK(sum == outstanding_count(trace.delays, t));
      }
    }
  }
}

TEST_CASE("engine G_t matches the definitional sum; delivery is complete") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> len(1, 50);
  std::uniform_int_distribution<int> d(0, 12);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::int64_t> delays(static_cast<std::size_t>(len(gen)));
    for (auto& x : delays) x = d(gen);
    const auto trace = scripted_run(delays);
    for (Step t = 1; t <= trace.horizon; ++t) {
      CHECK(trace.outstanding[static_cast<std::size_t>(t - 1)] == outstanding_count(delays, t));
    }
    std::vector<int> seen(delays.size(), 0);
    for (const auto& b : trace.batches) {
      for (std::size_t j = 0; j < b.events.size(); ++j) {
        const auto& e = b.events[j];
        CHECK(e.origin_step + delays[static_cast<std::size_t>(e.origin_step - 1)] == b.arrival_step);
        if (j > 0) CHECK(b.events[j - 1].origin_step < e.origin_step);
        ++seen[static_cast<std::size_t>(e.origin_step - 1)];
      }
    }
    for (const auto& e : trace.undelivered) {
      CHECK(e.origin_step + delays[static_cast<std::size_t>(e.origin_step - 1)] > trace.horizon);
      ++seen[static_cast<std::size_t>(e.origin_step - 1)];
    }
    for (int s : seen) CHECK(s == 1);
  }
}

TEST_CASE("protocol errors") {
  BernoulliBandit env({0.5, 0.5});
  ScriptedLearner ok(2, {0});
  CHECK_THROWS_AS(run_episode(env, ok, DelayModel::constant(0), 0, 1), EmptyRunError);
  ScriptedLearner rogue(2, {0, 5});
  CHECK_THROWS_AS(run_episode(env, rogue, DelayModel::constant(0), 4, 1), ProtocolError);
}

TEST_CASE("same seed gives an identical trace serialization") {
  BernoulliBandit env({0.3, 0.8});
  const auto serialize = [&](std::uint64_t seed) {
    ScriptedLearner learner(2, {0, 1, 1, 0});
    const auto trace = run_episode(env, learner, DelayModel::geometric(3.0), 200, seed);
    std::ostringstream out;
    write_trace_csv(out, trace);
    return out.str();
  };
  CHECK(serialize(42) == serialize(42));
  CHECK(serialize(42) != serialize(43));
}

TEST_CASE("trace csv layout") {
  BernoulliBandit env({1.0});
  ScriptedLearner learner(1, {0});
  const auto trace = run_episode(env, learner, DelayModel::sequence({1, 0, 0}), 3, 1);
  std::ostringstream out;
  write_trace_csv(out, trace);
  CHECK(out.str() ==
        "t,action,reward,delay,g_t,arrivals\n"
        "1,0,1,1,0,\n"
        "2,0,1,0,1,1;2\n"
        "3,0,1,0,0,3\n");
  CHECK(format_real(0.1) == "0.10000000000000001");
}

TEST_CASE("dropping an origin keeps G_t definitional") {
  BernoulliBandit env({0.5});
  ScriptedLearner learner(1, {0});
  EpisodeOptions opts;
  opts.drop_origin = 2;
  const auto trace = run_episode(env, learner, DelayModel::constant(0), 5, 1, 0, opts);
  CHECK(trace.batches[1].events.empty());
  for (auto g : trace.outstanding) CHECK(g == 0);
}
