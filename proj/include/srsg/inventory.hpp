#pragma once

// Joint multi-SKU store simulator. Every SKU draws from one shared inventory
// capacity; arrivals that would overflow it are discarded proportionally.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "srsg/errors.hpp"

namespace srsg {

using Units = std::int64_t;
using Money = double;

inline constexpr std::size_t kHistoryLength = 21;
inline constexpr int kDefaultMaxLeadTime = 14;

struct LeadTimeSpec {
  enum class Kind { constant, geometric };
  Kind kind = Kind::constant;
  double mean = 1.0;  // the constant value for Kind::constant
  int max = kDefaultMaxLeadTime;

  static LeadTimeSpec constant(int k) { return {Kind::constant, double(k), std::max(k, 1)}; }
  static LeadTimeSpec geometric(double mean, int max = kDefaultMaxLeadTime) {
    return {Kind::geometric, mean, max};
  }

  // Typical lead time, used by baselines that assume a fixed delay.
  int nominal() const { return std::clamp(int(std::lround(mean)), 1, max); }

  // One uniform draw per call regardless of kind, so per-SKU streams stay
  // aligned between the joint and local simulators.
  template <class Rng>
  int sample(Rng& rng) const {
    const double u = (double((rng() >> 11) + 1)) * 0x1.0p-53;  // (0, 1]
    if (kind == Kind::constant) return nominal();
    const double p = 1.0 / mean;
    if (p >= 1.0) return 1;
    const double k = 1.0 + std::floor(std::log(u) / std::log1p(-p));
    return int(std::clamp(k, 1.0, double(max)));
  }
};

struct SkuConfig {
  Money price = 10.0;        // p_i
  Money cost = 5.0;          // q_i
  Money order_cost = 1.0;    // o, charged once per non-zero order
  Money holding_cost = 0.05; // h, per unit in stock per step
  LeadTimeSpec lead_time{};

  void validate(const std::string& where = "sku") const {
    if (!(price > 0)) throw ConfigError(where + ".price: must be > 0");
    if (!(cost >= 0)) throw ConfigError(where + ".cost: must be >= 0");
    if (!(order_cost >= 0)) throw ConfigError(where + ".order_cost: must be >= 0");
    if (!(holding_cost >= 0)) throw ConfigError(where + ".holding_cost: must be >= 0");
    if (!(lead_time.mean >= 1.0)) throw ConfigError(where + ".lead_time.mean: must be >= 1");
    if (lead_time.max < 1) throw ConfigError(where + ".lead_time.max: must be >= 1");
  }
};

enum class OverflowMode {
  paper,   // excess divided by total afterstate, applied to arrivals only
  strict,  // excess divided by total arrivals; capacity holds exactly
};

inline std::string to_string(OverflowMode m) { return m == OverflowMode::paper ? "paper" : "strict"; }
inline OverflowMode parse_overflow_mode(const std::string& s) {
  if (s == "paper") return OverflowMode::paper;
  if (s == "strict") return OverflowMode::strict;
  throw ConfigError("overflow mode must be 'paper' or 'strict', got '" + s + "'");
}

struct StoreConfig {
  Units capacity = 100;  // I_max
  std::vector<SkuConfig> skus;
  OverflowMode overflow_mode = OverflowMode::strict;
  int horizon = 100;

  std::size_t n() const { return skus.size(); }

  Money max_price() const {
    Money m = 0;
    for (const auto& s : skus) m = std::max(m, s.price);
    return m;
  }

  void validate() const {
    if (skus.empty()) throw ConfigError("store.n: must be >= 1");
    if (capacity <= 0) throw ConfigError("store.capacity: must be > 0");
    if (horizon < 1) throw ConfigError("store.horizon: must be >= 1");
    for (std::size_t i = 0; i < skus.size(); ++i) skus[i].validate("skus[" + std::to_string(i) + "]");
  }
};

// Fixed-length window of the most recent values, oldest first, zero padded.
class History {
 public:
  void push(Units x) {
    std::shift_left(values_.begin(), values_.end(), 1);
    values_.back() = x;
    ++count_;
  }
  std::span<const Units, kHistoryLength> values() const { return values_; }
  std::size_t count() const { return count_; }

  // Mean of the last k recorded values (fewer if fewer were recorded).
  double mean_last(std::size_t k) const {
    const std::size_t m = std::min({k, count_, kHistoryLength});
    if (m == 0) return 0.0;
    Units sum = 0;
    for (std::size_t j = kHistoryLength - m; j < kHistoryLength; ++j) sum += values_[j];
    return double(sum) / double(m);
  }

  bool operator==(const History&) const = default;

 private:
  std::array<Units, kHistoryLength> values_{};
  std::size_t count_ = 0;
};

struct PipelineEntry {
  int arrival_step;  // lands at the end of this step
  Units quantity;
  bool operator==(const PipelineEntry&) const = default;
};

struct SkuState {
  Units in_stock = 0;  // İ_t
  std::vector<PipelineEntry> pipeline;
  History orders;
  History sales;

  Units in_transit() const {
    Units s = 0;
    for (const auto& e : pipeline) s += e.quantity;
    return s;
  }
  bool operator==(const SkuState&) const = default;
};

// Overflow ratio as an exact fraction so that floor((1 - rho) * A) never
// suffers from rounding.
struct OverflowRatio {
  Units num = 0;
  Units den = 1;

  double value() const { return den == 0 ? 0.0 : double(num) / double(den); }
  // floor((1 - rho) * arrivals)
  Units retained(Units arrivals) const {
    if (num == 0) return arrivals;
    return (den - num) * arrivals / den;
  }
  bool operator==(const OverflowRatio& o) const { return num * o.den == o.num * den; }
};

inline OverflowRatio compute_overflow_ratio(Units total_afterstate, Units total_arrivals,
                                            Units capacity, OverflowMode mode) {
  const Units excess = std::max<Units>(total_afterstate - capacity, 0);
  if (excess == 0) return {0, 1};
  if (mode == OverflowMode::paper) return {excess, total_afterstate};
  if (total_arrivals == 0) return {0, 1};
  return {std::min(excess, total_arrivals), total_arrivals};
}

inline Money compute_profit(const SkuConfig& cfg, Units sales, Units order, Units stock) {
  return cfg.price * double(sales) - cfg.cost * double(order) -
         (order > 0 ? cfg.order_cost : 0.0) - cfg.holding_cost * double(stock);
}

// Independent per-SKU random stream; the same (seed, index) pair always
// yields the same lead-time sequence.
inline std::mt19937_64 sku_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(index),
                    0x5eedu};
  return std::mt19937_64(seq);
}

struct StoreState {
  int t = 0;
  std::vector<SkuState> skus;
  std::vector<std::mt19937_64> rngs;
  OverflowRatio last_rho{};
  std::vector<Units> last_arrivals;
  std::vector<Units> last_afterstates;

  Units total_stock() const {
    Units s = 0;
    for (const auto& k : skus) s += k.in_stock;
    return s;
  }
  Units total_last_arrivals() const {
    return std::accumulate(last_arrivals.begin(), last_arrivals.end(), Units{0});
  }
  bool operator==(const StoreState&) const = default;
};

struct StepOutcome {
  std::vector<Units> stock;       // İ_t, before the step
  std::vector<Units> orders;      // O_t
  std::vector<int> lead_times;    // L_t sampled for O_t
  std::vector<Units> sales;       // S_t
  std::vector<Units> arrivals;    // A_{t+1}
  std::vector<Units> afterstate;  // Î_t
  std::vector<Units> discarded;
  std::vector<Money> profit;      // F_t
  OverflowRatio rho{};
  Units total_stock = 0;       // ċ_t
  Units total_afterstate = 0;  // ĉ_t
  Units total_arrivals = 0;
};

// Store-wide quantities an agent observes about the shared resource.
struct ContextFeatures {
  Units total_stock = 0;     // sum of İ_t over all SKUs
  Units total_arrivals = 0;  // arrivals unloaded at the end of the previous step
  double total_excess = 0;   // rho_{t-1} times those arrivals
};

inline ContextFeatures context_features(const StoreState& st) {
  const Units arrivals = st.total_last_arrivals();
  return {st.total_stock(), arrivals, st.last_rho.value() * double(arrivals)};
}

inline std::vector<Units> default_initial_stock(const StoreConfig& cfg) {
  return std::vector<Units>(cfg.n(), cfg.capacity / Units(2 * cfg.n()));
}

inline StoreState reset(const StoreConfig& cfg, std::uint64_t seed,
                        std::span<const Units> initial_stock) {
  cfg.validate();
  if (initial_stock.size() != cfg.n()) throw ConfigError("initial_stock: expected one entry per SKU");
  Units total = 0;
  for (Units s : initial_stock) {
    if (s < 0) throw ConfigError("initial_stock: must be >= 0");
    total += s;
  }
  if (total > cfg.capacity)
    throw ConfigError("initial_stock: total " + std::to_string(total) + " exceeds capacity " +
                      std::to_string(cfg.capacity));
  StoreState st;
  st.skus.resize(cfg.n());
  for (std::size_t i = 0; i < cfg.n(); ++i) {
    st.skus[i].in_stock = initial_stock[i];
    st.rngs.push_back(sku_rng(seed, i));
  }
  st.last_arrivals.assign(cfg.n(), 0);
  st.last_afterstates.assign(cfg.n(), 0);
  return st;
}

inline StoreState reset(const StoreConfig& cfg, std::uint64_t seed) {
  const auto init = default_initial_stock(cfg);
  return reset(cfg, seed, init);
}

namespace detail {

struct HalfStep {
  Units stock = 0;
  int lead_time = 1;
  Units sales = 0;
  Units arrivals = 0;
  Units afterstate = 0;
};

// Order placement, sale and arrival for one SKU; everything that does not
// depend on the other SKUs.
template <class Rng>
HalfStep begin_sku_step(SkuState& sku, const SkuConfig& cfg, int t, Units order, Units demand,
                        Rng& rng) {
  HalfStep h;
  h.stock = sku.in_stock;
  h.lead_time = cfg.lead_time.sample(rng);
  if (order > 0) sku.pipeline.push_back({t + h.lead_time, order});
  h.sales = std::min(demand, sku.in_stock);
  auto landed = [t](const PipelineEntry& e) { return e.arrival_step <= t + 1; };
  for (const auto& e : sku.pipeline)
    if (landed(e)) h.arrivals += e.quantity;
  std::erase_if(sku.pipeline, landed);
  h.afterstate = sku.in_stock - h.sales + h.arrivals;
  return h;
}

inline Units finish_sku_step(SkuState& sku, const HalfStep& h, const OverflowRatio& rho,
                             Units order) {
  const Units kept = rho.retained(h.arrivals);
  sku.in_stock = sku.in_stock - h.sales + kept;
  sku.orders.push(order);
  sku.sales.push(h.sales);
  return h.arrivals - kept;
}

inline void check_step_inputs(std::size_t n, std::span<const Units> orders,
                              std::span<const Units> demands) {
  require(orders.size() == n && demands.size() == n, "step: orders/demands must have one entry per SKU");
  for (std::size_t i = 0; i < n; ++i)
    require(orders[i] >= 0 && demands[i] >= 0, "step: orders and demands must be >= 0");
}

}  // namespace detail

// Advances the store by one step: order -> sale -> arrival -> discard.
inline StepOutcome step_joint(const StoreConfig& cfg, StoreState& state,
                              std::span<const Units> orders, std::span<const Units> demands) {
  const std::size_t n = cfg.n();
  detail::check_step_inputs(n, orders, demands);

  StepOutcome out;
  out.stock.resize(n);
  out.orders.assign(orders.begin(), orders.end());
  out.lead_times.resize(n);
  out.sales.resize(n);
  out.arrivals.resize(n);
  out.afterstate.resize(n);
  out.discarded.resize(n);
  out.profit.resize(n);

  std::vector<detail::HalfStep> half(n);
  for (std::size_t i = 0; i < n; ++i) {
    half[i] = detail::begin_sku_step(state.skus[i], cfg.skus[i], state.t, orders[i], demands[i],
                                     state.rngs[i]);
    out.stock[i] = half[i].stock;
    out.lead_times[i] = half[i].lead_time;
    out.sales[i] = half[i].sales;
    out.arrivals[i] = half[i].arrivals;
    out.afterstate[i] = half[i].afterstate;
    out.total_stock += half[i].stock;
    out.total_afterstate += half[i].afterstate;
    out.total_arrivals += half[i].arrivals;
  }

  out.rho = compute_overflow_ratio(out.total_afterstate, out.total_arrivals, cfg.capacity,
                                   cfg.overflow_mode);

  for (std::size_t i = 0; i < n; ++i) {
    out.discarded[i] = detail::finish_sku_step(state.skus[i], half[i], out.rho, orders[i]);
    out.profit[i] = compute_profit(cfg.skus[i], half[i].sales, orders[i], half[i].stock);
  }

  state.last_rho = out.rho;
  state.last_arrivals = out.arrivals;
  state.last_afterstates = out.afterstate;
  ++state.t;
  return out;
}

}  // namespace srsg
