#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace srsg;
using srsg::testing::RefSku;

namespace {

StoreConfig two_sku_store(OverflowMode mode, Units capacity = 10) {
  StoreConfig cfg;
  cfg.capacity = capacity;
  cfg.overflow_mode = mode;
  cfg.skus.resize(2);
  for (auto& s : cfg.skus) s.lead_time = LeadTimeSpec::constant(1);
  return cfg;
}

}  // namespace

TEST(Reset, BuildsStateFromInitialStock) {
  const auto cfg = two_sku_store(OverflowMode::strict);
  const std::vector<Units> init{3, 3};
  const auto st = reset(cfg, 7, init);
  EXPECT_EQ(st.t, 0);
  EXPECT_EQ(st.total_stock(), 6);
  for (const auto& k : st.skus) {
    EXPECT_EQ(k.in_transit(), 0);
    EXPECT_EQ(k.sales.count(), 0u);
    for (Units v : k.sales.values()) EXPECT_EQ(v, 0);
  }
}

TEST(Reset, RejectsStockAboveCapacity) {
  const auto cfg = two_sku_store(OverflowMode::strict);
  const std::vector<Units> init{6, 6};
  EXPECT_THROW(reset(cfg, 7, init), ConfigError);
}

TEST(Reset, SameSeedSameState) {
  std::mt19937_64 rng(3);
  const auto cfg = srsg::testing::random_store(rng, 4, 100, OverflowMode::strict);
  EXPECT_EQ(reset(cfg, 11), reset(cfg, 11));
}

TEST(Reset, DefaultStockIsHalfCapacitySplitEvenly) {
  std::mt19937_64 rng(3);
  const auto cfg = srsg::testing::random_store(rng, 3, 100, OverflowMode::strict);
  EXPECT_EQ(default_initial_stock(cfg), (std::vector<Units>{16, 16, 16}));
}

TEST(OverflowRatio, PaperMode) {
  EXPECT_EQ(compute_overflow_ratio(14, 7, 10, OverflowMode::paper), (OverflowRatio{2, 7}));
  EXPECT_DOUBLE_EQ(compute_overflow_ratio(14, 7, 10, OverflowMode::paper).value(), 2.0 / 7.0);
}

TEST(OverflowRatio, NoOverflowIsZeroInEitherMode) {
  EXPECT_EQ(compute_overflow_ratio(8, 5, 10, OverflowMode::paper).num, 0);
  EXPECT_EQ(compute_overflow_ratio(8, 5, 10, OverflowMode::strict).num, 0);
}

TEST(OverflowRatio, StrictMode) {
  EXPECT_EQ(compute_overflow_ratio(14, 7, 10, OverflowMode::strict), (OverflowRatio{4, 7}));
  EXPECT_EQ(compute_overflow_ratio(30, 5, 10, OverflowMode::strict), (OverflowRatio{1, 1}));
  EXPECT_EQ(compute_overflow_ratio(14, 0, 10, OverflowMode::strict).num, 0);
}

TEST(OverflowRatio, ZeroRatioKeepsAllArrivals) {
  const OverflowRatio zero{};
  for (Units a = 0; a < 50; ++a) EXPECT_EQ(zero.retained(a), a);
}

TEST(Profit, Examples) {
  SkuConfig c;
  c.price = 10, c.cost = 6, c.order_cost = 1, c.holding_cost = 0.1;
  EXPECT_DOUBLE_EQ(compute_profit(c, 5, 3, 20), 29.0);
  EXPECT_DOUBLE_EQ(compute_profit(c, 5, 0, 20), 48.0);
  EXPECT_DOUBLE_EQ(compute_profit(c, 0, 0, 0), 0.0);
}

class StepExample : public ::testing::TestWithParam<OverflowMode> {};

// Stock [6, 4], demand [2, 1], arrivals [4, 3] landing within the step.
TEST_P(StepExample, HandEvaluation) {
  const auto cfg = two_sku_store(GetParam());
  const std::vector<Units> init{6, 4}, orders{4, 3}, demand{2, 1};
  auto st = reset(cfg, 1, init);
  const auto out = step_joint(cfg, st, orders, demand);
  EXPECT_EQ(out.sales, (std::vector<Units>{2, 1}));
  EXPECT_EQ(out.arrivals, (std::vector<Units>{4, 3}));
  EXPECT_EQ(out.afterstate, (std::vector<Units>{8, 6}));
  if (GetParam() == OverflowMode::paper) {
    EXPECT_EQ(out.rho, (OverflowRatio{4, 14}));
    EXPECT_EQ(st.skus[0].in_stock, 6);
    EXPECT_EQ(st.skus[1].in_stock, 5);
  } else {
    EXPECT_EQ(out.rho, (OverflowRatio{4, 7}));
    EXPECT_EQ(st.skus[0].in_stock, 5);
    EXPECT_EQ(st.skus[1].in_stock, 4);
    EXPECT_LE(st.total_stock(), cfg.capacity);
  }
}

INSTANTIATE_TEST_SUITE_P(Modes, StepExample, ::testing::Values(OverflowMode::paper, OverflowMode::strict));

TEST(Step, IdleStepChangesOnlyTheClock) {
  const auto cfg = two_sku_store(OverflowMode::strict);
  const std::vector<Units> init{3, 4}, zero{0, 0};
  auto st = reset(cfg, 1, init);
  const auto out = step_joint(cfg, st, zero, zero);
  EXPECT_EQ(st.t, 1);
  EXPECT_EQ(st.skus[0].in_stock, 3);
  EXPECT_EQ(st.skus[1].in_stock, 4);
  EXPECT_EQ(out.sales, zero);
  EXPECT_EQ(out.rho.num, 0);
}

TEST(Step, NegativeInputsAreContractErrors) {
  const auto cfg = two_sku_store(OverflowMode::strict);
  auto st = reset(cfg, 1);
  const std::vector<Units> bad{-1, 0}, ok{0, 0}, short_v{0};
  EXPECT_THROW(step_joint(cfg, st, bad, ok), ContractError);
  EXPECT_THROW(step_joint(cfg, st, ok, bad), ContractError);
  EXPECT_THROW(step_joint(cfg, st, short_v, ok), ContractError);
}

TEST(Step, HistoriesRotate) {
  const auto cfg = two_sku_store(OverflowMode::strict, 1000);
  const std::vector<Units> init{100, 400};
  auto st = reset(cfg, 1, init);
  for (Units t = 1; t <= 25; ++t) {
    const std::vector<Units> orders{t, 0}, demand{1, t};
    step_joint(cfg, st, orders, demand);
  }
  const auto o = st.skus[0].orders.values();
  EXPECT_EQ(o.back(), 25);
  EXPECT_EQ(o.front(), 5);
  EXPECT_EQ(st.skus[1].sales.values().back(), 25);
}

TEST(LeadTime, SamplesStayInRange) {
  std::mt19937_64 rng(5);
  const auto g = LeadTimeSpec::geometric(3.0, 6);
  double sum = 0;
  for (int k = 0; k < 20000; ++k) {
    const int L = g.sample(rng);
    ASSERT_GE(L, 1);
    ASSERT_LE(L, 6);
    sum += L;
  }
  EXPECT_NEAR(sum / 20000, 2.7, 0.3);  // truncation pulls the mean below 3
  const auto c = LeadTimeSpec::constant(4);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(c.sample(rng), 4);
}

// Property sweep against the scalar reference model.
TEST(StepProperties, MatchReferenceAndConservation) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng() % 6;
    const auto mode = trial % 2 ? OverflowMode::paper : OverflowMode::strict;
    const auto cfg = srsg::testing::random_store(rng, n, Units(10 + rng() % 60), mode);
    auto st = reset(cfg, rng());
    std::vector<RefSku> ref(n);
    for (std::size_t i = 0; i < n; ++i) ref[i].stock = st.skus[i].in_stock;
    std::uniform_int_distribution<Units> q(0, 12);
    for (int t = 0; t < 60; ++t) {
      std::vector<Units> orders(n), demand(n);
      for (std::size_t i = 0; i < n; ++i) orders[i] = q(rng) % 3 ? q(rng) : 0, demand[i] = q(rng);
      std::vector<Units> transit_before(n);
      for (std::size_t i = 0; i < n; ++i) transit_before[i] = st.skus[i].in_transit();
      const auto out = step_joint(cfg, st, orders, demand);
      const auto r = srsg::testing::ref_step(cfg, ref, t, orders, demand, out.lead_times);
      for (std::size_t i = 0; i < n; ++i) {
        ASSERT_EQ(out.sales[i], r.sales[i]);
        ASSERT_LE(out.sales[i], demand[i]);
        ASSERT_LE(out.sales[i], out.stock[i]);
        ASSERT_EQ(out.arrivals[i], r.arrivals[i]);
        ASSERT_EQ(out.afterstate[i], r.afterstate[i]);
        ASSERT_EQ(st.skus[i].in_stock, r.stock_after[i]);
        ASSERT_GE(st.skus[i].in_stock, 0);
        ASSERT_EQ(st.skus[i].in_transit(), r.transit_after[i]);
        ASSERT_EQ(st.skus[i].in_transit() - transit_before[i], orders[i] - out.arrivals[i]);
        ASSERT_NEAR(out.profit[i], r.profit[i], 1e-12);
        for (const auto& e : st.skus[i].pipeline) ASSERT_GT(e.quantity, 0);
      }
      ASSERT_EQ(out.rho, (OverflowRatio{r.rho_num, r.rho_den}));
      if (mode == OverflowMode::strict) ASSERT_LE(st.total_stock(), cfg.capacity);
    }
  }
}

TEST(StepProperties, Deterministic) {
  std::mt19937_64 rng(99);
  const auto cfg = srsg::testing::random_store(rng, 4, 40, OverflowMode::strict);
  auto a = reset(cfg, 5), b = reset(cfg, 5);
  for (int t = 0; t < 100; ++t) {
    const std::vector<Units> orders{Units(t % 7), 3, 0, Units(t % 5)}, demand{2, 3, 4, Units(t % 3)};
    const auto oa = step_joint(cfg, a, orders, demand);
    const auto ob = step_joint(cfg, b, orders, demand);
    ASSERT_EQ(oa.lead_times, ob.lead_times);
    ASSERT_EQ(oa.profit, ob.profit);
  }
  EXPECT_EQ(a, b);
}

TEST(StepProperties, PaperModeCanExceedCapacity) {
  const auto cfg = two_sku_store(OverflowMode::paper);
  const std::vector<Units> init{5, 5}, orders{10, 10}, none{0, 0};
  auto st = reset(cfg, 1, init);
  step_joint(cfg, st, orders, none);
  EXPECT_GT(st.total_stock(), cfg.capacity);
}
