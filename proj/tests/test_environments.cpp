#include <doctest.h>

#include <cmath>
#include <random>

#include "delaylab/environments.hpp"

using namespace delaylab;

TEST_CASE("bernoulli_pull degenerate arms") {
  BernoulliBandit env({1.0, 0.0});
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(bernoulli_pull(env, 0, rng) == 1.0);
    CHECK(bernoulli_pull(env, 1, rng) == 0.0);
  }
}

TEST_CASE("bernoulli_pull concentrates around the mean") {
  BernoulliBandit env({0.7});
  Rng rng(11);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += bernoulli_pull(env, 0, rng);
  CHECK(std::abs(sum / n - 0.7) <= 0.006);
}

TEST_CASE("bernoulli_pull consumes exactly one draw") {
  BernoulliBandit env({0.3, 0.9});
  Rng a(5);
  Rng b(5);
  bernoulli_pull(env, 1, a);
  b.discard(1);
  CHECK(a() == b());
}

TEST_CASE("bernoulli bandit rejects bad input") {
  CHECK_THROWS_AS(BernoulliBandit({}), std::invalid_argument);
  CHECK_THROWS_AS(BernoulliBandit({1.2}), std::invalid_argument);
  BernoulliBandit env({0.5});
  Rng rng(1);
  CHECK_THROWS_AS(bernoulli_pull(env, 1, rng), std::out_of_range);
}

TEST_CASE("action gaps") {
  CHECK(action_gaps({0.5, 0.5}) == std::vector<double>{0.0, 0.0});
  const auto g = action_gaps({0.7, 0.5});
  CHECK(g[0] == 0.0);
  CHECK(g[1] == doctest::Approx(0.2).epsilon(1e-12));
  const auto h = action_gaps({0.2, 0.9, 0.6});
  CHECK(h[0] == doctest::Approx(0.7));
  CHECK(h[1] == 0.0);
  CHECK(h[2] == doctest::Approx(0.3));
}

TEST_CASE("gap vector property: min is zero and all nonnegative") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> means(1 + trial % 7);
    for (auto& m : means) m = u(gen);
    const auto gaps = action_gaps(means);
    double lo = gaps[0];
    for (double g : gaps) {
      CHECK(g >= 0.0);
      lo = std::min(lo, g);
    }
    CHECK(lo == 0.0);
  }
}

TEST_CASE("reward matrix lookup and best fixed action") {
  RewardMatrix m({{1, 0}, {1, 0}, {0, 1}});
  CHECK(adversarial_reward(m, 3, 1) == 1.0);
  const auto best = best_fixed_action(m);
  CHECK(best.action == 0);
  CHECK(best.total == 2.0);
  CHECK_THROWS_AS(adversarial_reward(m, 4, 0), std::out_of_range);
  CHECK_THROWS_AS(adversarial_reward(m, 1, 2), std::out_of_range);

  RewardMatrix single({{0.25}, {0.5}});
  CHECK(best_fixed_action(single).action == 0);
  CHECK(best_fixed_action(single).total == 0.75);

  CHECK_THROWS_AS(RewardMatrix({{0.5, 1.5}}), std::invalid_argument);
}

TEST_CASE("best_fixed_action matches exhaustive search") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> k_dist(1, 8);
  std::uniform_int_distribution<int> n_dist(1, 64);
  std::uniform_int_distribution<int> level(0, 4);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = k_dist(gen);
    const int n = n_dist(gen);
    std::vector<std::vector<double>> rows(n, std::vector<double>(k));
    for (auto& r : rows) {
      for (auto& v : r) v = level(gen) / 4.0;  // coarse values so ties happen
    }
    RewardMatrix m(rows);
    // Brute force: total reward of every fixed policy.
    std::size_t best = 0;
    double best_total = -1.0;
    for (int a = 0; a < k; ++a) {
      double total = 0.0;
      for (int t = 1; t <= n; ++t) total += adversarial_reward(m, t, a);
      if (total > best_total) {
        best_total = total;
        best = a;
      }
    }
    const auto got = best_fixed_action(m);
    CHECK(got.action == best);
    CHECK(got.total == best_total);
  }
}

TEST_CASE("delay models") {
  Rng rng(23);
  SUBCASE("constant") {
    auto m = DelayModel::constant(5);
    for (Step t = 1; t < 50; ++t) CHECK(m.sample(t, t % 3, rng) == 5);
    CHECK(*m.mean() == 5.0);
  }
  SUBCASE("geometric mean and variance parameterization") {
    auto m = DelayModel::geometric(5.0);
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto d = m.sample(1, 0, rng);
      REQUIRE(d >= 0);
      sum += static_cast<double>(d);
    }
    const double sigma = std::sqrt(5.0 * 6.0);
    CHECK(std::abs(sum / n - 5.0) <= 4.0 * sigma / std::sqrt(n));
  }
  SUBCASE("geometric can return zero") {
    auto m = DelayModel::geometric(0.5);
    bool zero = false;
    for (int i = 0; i < 1000 && !zero; ++i) zero = m.sample(1, 0, rng) == 0;
    CHECK(zero);
  }
  SUBCASE("uniform is inclusive") {
    auto m = DelayModel::uniform(2, 4);
    std::vector<int> hits(5, 0);
    for (int i = 0; i < 3000; ++i) ++hits[m.sample(1, 0, rng)];
    CHECK(hits[0] == 0);
    CHECK(hits[1] == 0);
    CHECK(hits[2] > 0);
    CHECK(hits[3] > 0);
    CHECK(hits[4] > 0);
  }
  SUBCASE("empirical picks list entries") {
    auto m = DelayModel::empirical({1, 7});
    for (int i = 0; i < 200; ++i) {
      const auto d = m.sample(1, 0, rng);
      CHECK((d == 1 || d == 7));
    }
    CHECK(*m.mean() == 4.0);
  }
  SUBCASE("per action delegates") {
    auto m = DelayModel::per_action({DelayModel::constant(0), DelayModel::constant(9)});
    CHECK(m.action_dependent());
    CHECK_FALSE(m.mean().has_value());
    for (Step t = 1; t < 20; ++t) {
      CHECK(m.sample(t, 0, rng) == 0);
      CHECK(m.sample(t, 1, rng) == 9);
    }
  }
  SUBCASE("sequence replays by step") {
    auto m = DelayModel::sequence({3, 1, 0});
    CHECK(m.sample(1, 0, rng) == 3);
    CHECK(m.sample(3, 0, rng) == 0);
    CHECK_THROWS_AS(m.sample(4, 0, rng), std::out_of_range);
  }
  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(DelayModel::geometric(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DelayModel::uniform(3, 2), std::invalid_argument);
    CHECK_THROWS_AS(DelayModel::constant(-1), std::invalid_argument);
  }
}
