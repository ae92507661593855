#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace srsg;
using srsg::testing::brute_gae;
using srsg::testing::max_rel_error;
using srsg::testing::numeric_grad;

TEST(Gae, TwoStepExample) {
  const std::vector<double> r{1, 1}, v{0, 0, 0};
  const auto g = compute_gae(r, v, {}, 0.99, 0.95, -1);
  EXPECT_NEAR(g.advantages[0], 1.9405, 1e-12);
  EXPECT_NEAR(g.advantages[1], 1.0, 1e-12);
  EXPECT_EQ(g.returns, g.advantages);
}

TEST(Gae, ZeroRewardsAndValues) {
  const std::vector<double> r(9, 0.0), v(10, 0.0);
  for (double a : compute_gae(r, v, {}, 0.99, 0.95, 5).advantages) EXPECT_EQ(a, 0.0);
}

TEST(Gae, HorizonZeroIsTdError) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> r(12), v(13);
  for (auto& x : r) x = u(rng);
  for (auto& x : v) x = u(rng);
  const auto g = compute_gae(r, v, {}, 0.9, 0.8, 0);
  for (std::size_t t = 0; t < r.size(); ++t) EXPECT_NEAR(g.advantages[t], r[t] + 0.9 * v[t + 1] - v[t], 1e-14);
}

TEST(Gae, MatchesDirectDoubleSum) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t T = 1 + rng() % 64;
    const int h = int(rng() % 10) - 1;
    std::vector<double> r(T), v(T + 1);
    std::vector<std::uint8_t> d(T);
    for (auto& x : r) x = u(rng);
    for (auto& x : v) x = u(rng);
    for (auto& x : d) x = rng() % 7 == 0;
    const auto g = compute_gae(r, v, d, 0.99, 0.95, h);
    const auto ref = brute_gae(r, v, d, 0.99, 0.95, h);
    for (std::size_t t = 0; t < T; ++t) {
      ASSERT_NEAR(g.advantages[t], ref[t], 1e-10);
      ASSERT_NEAR(g.returns[t], ref[t] + v[t], 1e-10);
    }
  }
}

TEST(Gae, ShapeMismatchIsContractError) {
  EXPECT_THROW(compute_gae(std::vector<double>(3), std::vector<double>(3), {}, 0.9, 0.9, 1), ContractError);
}

TEST(ActorLoss, IdentityPolicyGivesMinusMeanAdvantage) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const std::size_t B = 6, A = 15;
  std::vector<double> z(B * A), adv(B), old(B);
  std::vector<std::size_t> act(B);
  for (auto& x : z) x = u(rng);
  for (std::size_t b = 0; b < B; ++b) {
    act[b] = rng() % A;
    adv[b] = u(rng);
    old[b] = nn::categorical::log_prob(std::span<const double>(z).subspan(b * A, A), act[b]);
  }
  const auto out = ppo_actor_loss(z, A, act, old, adv, 0.2);
  EXPECT_NEAR(out.loss, -std::accumulate(adv.begin(), adv.end(), 0.0) / double(B), 1e-14);
  EXPECT_EQ(out.clip_fraction, 0.0);
}

TEST(ActorLoss, ClippedSampleHasNoGradient) {
  // one sample, A > 0, ratio = 2 > 1 + eps
  const std::vector<double> z{std::log(0.5), std::log(0.5)};
  const std::vector<std::size_t> act{0};
  const std::vector<double> old{std::log(0.25)}, adv{1.0};
  const auto out = ppo_actor_loss(z, 2, act, old, adv, 0.2);
  EXPECT_NEAR(out.loss, -1.2, 1e-12);
  EXPECT_EQ(out.grad[0], 0.0);
  EXPECT_EQ(out.grad[1], 0.0);
  EXPECT_EQ(out.clip_fraction, 1.0);
}

TEST(ActorLoss, ZeroAdvantagesGiveZeroGradient) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> z(4 * 15), old(4, -2.0), adv(4, 0.0);
  for (auto& x : z) x = u(rng);
  const std::vector<std::size_t> act{1, 2, 3, 4};
  for (double g : ppo_actor_loss(z, 15, act, old, adv, 0.2).grad) EXPECT_EQ(g, 0.0);
}

TEST(ActorLoss, NonFiniteRatioIsTrainingError) {
  const std::vector<double> z{0.0, 0.0}, old{-1e6}, adv{1.0};
  const std::vector<std::size_t> act{0};
  EXPECT_THROW(ppo_actor_loss(z, 2, act, old, adv, 0.2), TrainingError);
}

TEST(ActorLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1), shift(-0.4, 0.4);
  const std::size_t B = 5, A = 15;
  const double eps = 0.2;
  int checked = 0;
  while (checked < 10) {
    std::vector<double> z(B * A), adv(B), old(B);
    std::vector<std::size_t> act(B);
    bool near_kink = false;
    for (auto& x : z) x = u(rng);
    for (std::size_t b = 0; b < B; ++b) {
      act[b] = rng() % A;
      adv[b] = u(rng);
      const double lp = nn::categorical::log_prob(std::span<const double>(z).subspan(b * A, A), act[b]);
      old[b] = lp + shift(rng);
      const double ratio = std::exp(lp - old[b]);
      near_kink |= std::abs(ratio - 1 - eps) < 1e-3 || std::abs(ratio - 1 + eps) < 1e-3;
    }
    if (near_kink) continue;
    const auto out = ppo_actor_loss(z, A, act, old, adv, eps);
    const auto num =
        numeric_grad([&](std::span<const double> q) { return ppo_actor_loss(q, A, act, old, adv, eps).loss; }, z);
    EXPECT_LE(max_rel_error(out.grad, num), 1e-4);
    ++checked;
  }
}

TEST(CriticLoss, PerfectPrediction) {
  const std::vector<double> v{1.5, -2}, t{1.5, -2};
  const auto out = ppo_critic_loss(v, v, t, 0.2);
  EXPECT_EQ(out.loss, 0.0);
}

TEST(CriticLoss, TakesTheSmallerOfTheTwoErrors) {
  const double eps = 0.2;
  const std::vector<double> target{1.0}, old{1.0}, v{1.0 + 2 * eps};
  const auto out = ppo_critic_loss(v, old, target, eps);
  EXPECT_NEAR(out.loss, eps * eps, 1e-15);
  EXPECT_EQ(out.grad[0], 0.0);
}

TEST(CriticLoss, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  const double eps = 0.2;
  int checked = 0;
  while (checked < 10) {
    const std::size_t B = 6;
    std::vector<double> v(B), old(B), tgt(B);
    bool near_kink = false;
    for (std::size_t b = 0; b < B; ++b) {
      v[b] = u(rng), old[b] = v[b] + 0.5 * u(rng), tgt[b] = u(rng);
      const double diff = v[b] - old[b];
      const double e1 = v[b] - tgt[b], e2 = old[b] + std::clamp(diff, -eps, eps) - tgt[b];
      near_kink |= std::abs(std::abs(diff) - eps) < 1e-3 || std::abs(e1 * e1 - e2 * e2) < 1e-3;
    }
    if (near_kink) continue;
    const auto out = ppo_critic_loss(v, old, tgt, eps);
    const auto num = numeric_grad([&](std::span<const double> q) { return ppo_critic_loss(q, old, tgt, eps).loss; }, v);
    EXPECT_LE(max_rel_error(out.grad, num), 1e-4);
    ++checked;
  }
}

TEST(Entropy, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> z(3 * 15);
    for (auto& x : z) x = u(rng);
    const auto out = mean_entropy(z, 15);
    const auto num = numeric_grad([](std::span<const double> q) { return mean_entropy(q, 15).loss; }, z);
    EXPECT_LE(max_rel_error(out.grad, num), 1e-4);
  }
}

TEST(Entropy, AscentRaisesEntropy) {
  std::vector<double> z{2.0, -1.0, 0.5, 0.0, 3.0};
  double last = mean_entropy(z, 5).loss;
  for (int s = 0; s < 100; ++s) {
    const auto out = mean_entropy(z, 5);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] += 0.5 * out.grad[k];
    const double h = mean_entropy(z, 5).loss;
    EXPECT_GT(h, last);
    last = h;
  }
  EXPECT_LT(std::log(5.0) - last, 0.05);
}
