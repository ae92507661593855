#pragma once

// Observation layout, discrete order multipliers and reward scaling shared by
// every agent. Agents are interchangeable: one layout, one action table.

#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "srsg/errors.hpp"
#include "srsg/inventory.hpp"

namespace srsg {

// Observation indices.
//   0        storage capacity C
//   1        units in stock İ_t
//   2        units in transit T_t
//   3..23    orders over the latest 21 steps, oldest first
//   24..44   sales over the latest 21 steps, oldest first
//   45       population std of those 21 sales
//   46       unit sale price p
//   47       unit procurement cost q
//   48       total stock of the store
//   49       total units unloaded at the end of the previous step
//   50       overflow ratio times that unloading
namespace obs {
inline constexpr std::size_t kCapacity = 0;
inline constexpr std::size_t kStock = 1;
inline constexpr std::size_t kTransit = 2;
inline constexpr std::size_t kOrders = 3;
inline constexpr std::size_t kSales = kOrders + kHistoryLength;
inline constexpr std::size_t kSalesStd = kSales + kHistoryLength;
inline constexpr std::size_t kPrice = kSalesStd + 1;
inline constexpr std::size_t kCost = kPrice + 1;
inline constexpr std::size_t kTotalStock = kCost + 1;
inline constexpr std::size_t kTotalArrivals = kTotalStock + 1;
inline constexpr std::size_t kTotalExcess = kTotalArrivals + 1;
inline constexpr std::size_t kSize = kTotalExcess + 1;
}  // namespace obs

static_assert(obs::kSize == 51);

using Observation = std::array<double, obs::kSize>;

struct ObservationOptions {
  bool normalize = false;      // divide unit features by capacity, prices by price_scale
  bool include_context = true; // zero the three store-wide features when false
  double price_scale = 1.0;
};

inline double population_std(std::span<const Units> xs) {
  if (xs.empty()) return 0.0;
  double mean = 0;
  for (Units x : xs) mean += double(x);
  mean /= double(xs.size());
  double ss = 0;
  for (Units x : xs) ss += (double(x) - mean) * (double(x) - mean);
  return std::sqrt(ss / double(xs.size()));
}

inline Observation build_observation(const SkuState& sku, const SkuConfig& cfg, Units capacity,
                                     const ContextFeatures& totals,
                                     const ObservationOptions& opt = {}) {
  const double u = opt.normalize ? 1.0 / double(capacity) : 1.0;
  const double m = opt.normalize ? 1.0 / opt.price_scale : 1.0;
  Observation o{};
  o[obs::kCapacity] = double(capacity) * u;
  o[obs::kStock] = double(sku.in_stock) * u;
  o[obs::kTransit] = double(sku.in_transit()) * u;
  const auto orders = sku.orders.values();
  const auto sales = sku.sales.values();
  for (std::size_t j = 0; j < kHistoryLength; ++j) {
    o[obs::kOrders + j] = double(orders[j]) * u;
    o[obs::kSales + j] = double(sales[j]) * u;
  }
  o[obs::kSalesStd] = population_std(sales) * u;
  o[obs::kPrice] = cfg.price * m;
  o[obs::kCost] = cfg.cost * m;
  if (opt.include_context) {
    o[obs::kTotalStock] = double(totals.total_stock) * u;
    o[obs::kTotalArrivals] = double(totals.total_arrivals) * u;
    o[obs::kTotalExcess] = totals.total_excess * u;
  }
  return o;
}

inline constexpr std::array<double, 15> kActionMultipliers{
    0.0, 1.0 / 3, 2.0 / 3, 1.0, 4.0 / 3, 5.0 / 3, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 9.0, 12.0};
inline constexpr std::size_t kNumActions = kActionMultipliers.size();
inline constexpr std::size_t kSalesWindow = 14;

// Order quantity: multiplier times the mean daily sales over the last two
// weeks (fewer days early in an episode), rounded half up.
inline Units action_to_order(std::size_t action, const History& sales) {
  if (action >= kNumActions) throw ContractError("action_to_order: action index out of range");
  const double q = kActionMultipliers[action] * sales.mean_last(kSalesWindow);
  return std::max<Units>(0, Units(std::floor(q + 0.5)));
}

inline constexpr double kRewardScale = 1e6;

enum class RewardMode { individual, team };

inline double compute_reward(Money profit) { return profit / kRewardScale; }

inline std::vector<double> compute_rewards(std::span<const Money> profits, RewardMode mode) {
  std::vector<double> r(profits.size());
  if (mode == RewardMode::team) {
    const double total = std::accumulate(profits.begin(), profits.end(), 0.0) / kRewardScale;
    std::fill(r.begin(), r.end(), total);
  } else {
    for (std::size_t i = 0; i < profits.size(); ++i) r[i] = compute_reward(profits[i]);
  }
  return r;
}

}  // namespace srsg
