#pragma once

// Base-stock and (s,S) replenishment skylines. Levels are fitted per SKU by
// exhaustive search on a capacity-free single-SKU replay, then executed in
// the joint store with a utilisation cap v and a review interval tau.

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "srsg/errors.hpp"
#include "srsg/inventory.hpp"
#include "srsg/trainer.hpp"

namespace srsg {

struct BaseStockParams {
  Units Z = 0;
  double v = 1.0;
  int tau = 1;
};

struct SSParams {
  Units s = 0;
  Units S = 0;
  bool operator==(const SSParams&) const = default;
};

// Single-SKU replay without capacity. An order placed at step t is available
// for sale at step t + L (immediately when L = 0). Order cost is not charged.
template <class Rule>
Money simulate_policy_profit(std::span<const Units> demand, const SkuConfig& cfg, int L, Rule&& rule) {
  std::vector<Units> due(demand.size() + std::size_t(std::max(L, 0)) + 1, 0);
  Units stock = 0, transit = 0;
  Money profit = 0;
  for (std::size_t t = 0; t < demand.size(); ++t) {
    stock += due[t];
    transit -= due[t];
    const Units held = stock;
    const Units order = std::max<Units>(0, rule(stock, transit));
    if (L <= 0) {
      stock += order;
    } else {
      due[t + std::size_t(L)] += order;
      transit += order;
    }
    const Units sold = std::min(demand[t], stock);
    stock -= sold;
    profit += cfg.price * double(sold) - cfg.cost * double(order) - cfg.holding_cost * double(held);
  }
  return profit;
}

inline Money base_stock_profit(std::span<const Units> demand, const SkuConfig& cfg, int L, Units Z) {
  return simulate_policy_profit(demand, cfg, L, [Z](Units I, Units T) { return std::max<Units>(0, Z - I - T); });
}

inline Money ss_profit(std::span<const Units> demand, const SkuConfig& cfg, int L, SSParams p) {
  return simulate_policy_profit(demand, cfg, L, [p](Units I, Units T) { return I + T <= p.s ? p.S - (I + T) : Units{0}; });
}

inline Units default_level_max(std::span<const Units> demand, int L) {
  const Units mx = demand.empty() ? 0 : *std::max_element(demand.begin(), demand.end());
  return mx * Units(L + 2) * 4;
}

struct LevelRange {
  Units lo = 0;
  Units hi = 0;
};

struct FitResult {
  Units Z = 0;
  Money profit = 0;
};

// Exhaustive search over integer Z in [lo, hi]; ties go to the smaller Z.
inline FitResult fit_base_stock(std::span<const Units> demand, const SkuConfig& cfg, int L, LevelRange range) {
  if (range.lo < 0 || range.hi < range.lo) throw ConfigError("fit_base_stock: empty level range");
  FitResult best{range.lo, base_stock_profit(demand, cfg, L, range.lo)};
  for (Units z = range.lo + 1; z <= range.hi; ++z) {
    const Money p = base_stock_profit(demand, cfg, L, z);
    if (p > best.profit) best = {z, p};
  }
  return best;
}

inline FitResult fit_base_stock(std::span<const Units> demand, const SkuConfig& cfg, int L) {
  return fit_base_stock(demand, cfg, L, {0, default_level_max(demand, L)});
}

// Candidates 0 <= s <= S with s in [s_lo, s_hi] and S in [S_lo, S_hi].
struct SSGrid {
  Units s_lo = 0, s_hi = 0;
  Units S_lo = 0, S_hi = 0;
};

struct SSFitResult {
  SSParams params;
  Money profit = 0;
};

// Exhaustive search; ties go to the smaller S, then the smaller s.
inline SSFitResult fit_ss_policy(std::span<const Units> demand, const SkuConfig& cfg, int L, SSGrid g) {
  if (g.s_lo < 0 || g.s_hi < g.s_lo || g.S_hi < g.S_lo || g.S_hi < g.s_lo)
    throw ConfigError("fit_ss_policy: empty (s,S) grid");
  SSFitResult best;
  bool have = false;
  for (Units S = g.S_lo; S <= g.S_hi; ++S)
    for (Units s = g.s_lo; s <= std::min(g.s_hi, S); ++s) {
      const Money p = ss_profit(demand, cfg, L, {s, S});
      if (!have || p > best.profit) {
        best = {{s, S}, p};
        have = true;
      }
    }
  if (!have) throw ConfigError("fit_ss_policy: grid has no point with s <= S");
  return best;
}

inline SSFitResult fit_ss_policy(std::span<const Units> demand, const SkuConfig& cfg, int L) {
  const Units hi = default_level_max(demand, L);
  return fit_ss_policy(demand, cfg, L, {0, hi, 0, hi});
}

// Caps an order by the storage slack floor(vC) - sum_j (I_j + T_j) and applies
// the review interval.
inline Units gate_order(Units order, double v, int tau, Units store_position, Units capacity, int t) {
  const Units slack = Units(std::floor(v * double(capacity))) - store_position;
  order = std::max<Units>(0, std::min(order, slack));
  return t % tau == 0 ? order : 0;
}

inline Units base_stock_order(const BaseStockParams& p, Units I, Units T, Units store_position, Units capacity, int t) {
  return gate_order(std::max<Units>(0, p.Z - I - T), p.v, p.tau, store_position, capacity, t);
}

inline Units ss_order(const SSParams& p, double v, int tau, Units I, Units T, Units store_position, Units capacity,
                      int t) {
  return gate_order(I + T <= p.s ? p.S - (I + T) : 0, v, tau, store_position, capacity, t);
}

// ---------------------------------------------------------------------------

enum class BaselinePolicy { base_stock, ss };
enum class BaselineVariant { static_fit, dynamic_fit, oracle };

inline std::string to_string(BaselinePolicy p) { return p == BaselinePolicy::base_stock ? "base-stock" : "ss"; }
inline std::string to_string(BaselineVariant v) {
  switch (v) {
    case BaselineVariant::static_fit: return "static";
    case BaselineVariant::dynamic_fit: return "dynamic";
    case BaselineVariant::oracle: return "oracle";
  }
  return "static";
}
inline BaselinePolicy parse_baseline_policy(const std::string& s) {
  if (s == "base-stock" || s == "base_stock" || s == "basestock") return BaselinePolicy::base_stock;
  if (s == "ss") return BaselinePolicy::ss;
  throw ConfigError("baseline policy must be 'base-stock' or 'ss', got '" + s + "'");
}
inline BaselineVariant parse_baseline_variant(const std::string& s) {
  if (s == "static") return BaselineVariant::static_fit;
  if (s == "dynamic") return BaselineVariant::dynamic_fit;
  if (s == "oracle") return BaselineVariant::oracle;
  throw ConfigError("baseline variant must be static|dynamic|oracle, got '" + s + "'");
}

struct BaselineConfig {
  BaselinePolicy policy = BaselinePolicy::base_stock;
  BaselineVariant variant = BaselineVariant::static_fit;
  std::vector<double> v_grid{1.0, 1.1, 1.25, 1.5, 2.0};
  std::vector<int> tau_grid{1, 2, 3, 5, 7};
  int refit_interval = 30;
  int refit_window = 90;
  int eval_episodes = 4;

  void validate() const {
    if (v_grid.empty()) throw ConfigError("baseline.v_grid: must not be empty");
    for (double v : v_grid)
      if (!(v >= 1.0)) throw ConfigError("baseline.v_grid: every v must be >= 1");
    if (tau_grid.empty()) throw ConfigError("baseline.tau_grid: must not be empty");
    for (int t : tau_grid)
      if (t < 1) throw ConfigError("baseline.tau_grid: every tau must be >= 1");
    if (refit_interval < 1) throw ConfigError("baseline.refit_interval: must be >= 1");
    if (refit_window < 1) throw ConfigError("baseline.refit_window: must be >= 1");
    if (eval_episodes < 1) throw ConfigError("baseline.eval_episodes: must be >= 1");
  }
};

struct SkuFit {
  Units Z = 0;  // base stock
  SSParams ss;  // (s,S); Z mirrors S
  Money fit_profit = 0;
};

struct BaselineResult {
  BaselinePolicy policy = BaselinePolicy::base_stock;
  BaselineVariant variant = BaselineVariant::static_fit;
  double v = 1.0;
  int tau = 1;
  std::vector<SkuFit> fits;  // the levels in force at the end of the test window
  ProfitStats profit;
  Units discarded = 0;       // summed over evaluation episodes
  int overflow_steps = 0;
};

inline SkuFit fit_sku(BaselinePolicy policy, std::span<const Units> demand, const SkuConfig& cfg) {
  const int L = cfg.lead_time.nominal();
  SkuFit f;
  if (policy == BaselinePolicy::base_stock) {
    const auto r = fit_base_stock(demand, cfg, L);
    f.Z = r.Z;
    f.ss = {r.Z, r.Z};
    f.fit_profit = r.profit;
  } else {
    const auto r = fit_ss_policy(demand, cfg, L);
    f.ss = r.params;
    f.Z = r.params.S;
    f.fit_profit = r.profit;
  }
  return f;
}

inline std::vector<SkuFit> fit_all(BaselinePolicy policy, const DemandMatrix& demand, std::size_t lo, std::size_t hi,
                                   const StoreConfig& store, std::size_t workers = 0) {
  std::vector<SkuFit> fits(store.n());
  parallel_for(store.n(), workers, [&](std::size_t i) {
    fits[i] = fit_sku(policy, std::span<const Units>(demand[i]).subspan(lo, hi - lo), store.skus[i]);
  });
  return fits;
}

namespace detail {

// Train followed by test, per SKU.
inline DemandMatrix concat_series(const DemandMatrix& a, const DemandMatrix& b) {
  DemandMatrix out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = a[i];
    out[i].insert(out[i].end(), b[i].begin(), b[i].end());
  }
  return out;
}

}  // namespace detail

// Levels in force from each refit step onwards; entry 0 starts at step 0.
struct FitSchedule {
  std::vector<int> from_step;
  std::vector<std::vector<SkuFit>> fits;

  const std::vector<SkuFit>& at(int t) const {
    std::size_t k = 0;
    while (k + 1 < from_step.size() && from_step[k + 1] <= t) ++k;
    return fits[k];
  }
};

inline FitSchedule make_fit_schedule(const Scenario& sc, const BaselineConfig& bc) {
  const std::size_t train_len = sc.train_length();
  FitSchedule fs;
  if (bc.variant == BaselineVariant::oracle) {
    fs.from_step.push_back(0);
    fs.fits.push_back(fit_all(bc.policy, sc.test, 0, sc.test_length(), sc.store));
  } else if (bc.variant == BaselineVariant::static_fit) {
    fs.from_step.push_back(0);
    fs.fits.push_back(fit_all(bc.policy, sc.train, 0, train_len, sc.store));
  } else {
    const DemandMatrix all = detail::concat_series(sc.train, sc.test);
    for (int t = 0; t < int(sc.test_length()); t += bc.refit_interval) {
      const std::size_t hi = train_len + std::size_t(t);
      const std::size_t lo = hi - std::min<std::size_t>(std::size_t(bc.refit_window), hi);
      fs.from_step.push_back(t);
      fs.fits.push_back(fit_all(bc.policy, all, lo, hi, sc.store));
    }
  }
  return fs;
}

// Runs the policy over the test series of sc for one (v, tau) pair.
inline BaselineResult execute_baseline(const Scenario& sc, const BaselineConfig& bc, const FitSchedule& fs, double v,
                                       int tau, std::uint64_t seed) {
  const std::size_t n = sc.n();
  BaselineResult res;
  res.policy = bc.policy;
  res.variant = bc.variant;
  res.v = v;
  res.tau = tau;
  res.fits = fs.fits.back();
  std::vector<double> totals;
  for (int e = 0; e < bc.eval_episodes; ++e) {
    const auto sum = run_joint(sc.store, sc.test, 0, int(sc.test_length()), eval_lead_seed(seed, e), sc.initial_stock,
                               [&](const StoreState& st) {
                                 const auto& fits = fs.at(st.t);
                                 Units position = 0;
                                 for (const auto& k : st.skus) position += k.in_stock + k.in_transit();
                                 std::vector<Units> orders(n);
                                 for (std::size_t i = 0; i < n; ++i) {
                                   const auto& k = st.skus[i];
                                   orders[i] = bc.policy == BaselinePolicy::base_stock
                                                   ? base_stock_order({fits[i].Z, v, tau}, k.in_stock, k.in_transit(),
                                                                      position, sc.store.capacity, st.t)
                                                   : ss_order(fits[i].ss, v, tau, k.in_stock, k.in_transit(), position,
                                                              sc.store.capacity, st.t);
                                 }
                                 return orders;
                               });
    totals.push_back(sum.profit);
    res.discarded += sum.discarded;
    res.overflow_steps += sum.overflow_steps;
  }
  res.profit = profit_stats(std::move(totals));
  return res;
}

// Grid search over (v, tau); keeps the pair with the highest mean profit.
inline BaselineResult run_baseline(const Scenario& sc, const BaselineConfig& bc, std::uint64_t seed) {
  sc.validate();
  bc.validate();
  const auto fs = make_fit_schedule(sc, bc);
  BaselineResult best;
  bool have = false;
  for (double v : bc.v_grid)
    for (int tau : bc.tau_grid) {
      auto r = execute_baseline(sc, bc, fs, v, tau, seed);
      if (!have || r.profit.mean > best.profit.mean) {
        best = std::move(r);
        have = true;
      }
    }
  return best;
}

inline void write_baseline_params_csv(std::ostream& os, const BaselineResult& r,
                                      const std::vector<std::string>& sku_ids = {}) {
  const bool ss = r.policy == BaselinePolicy::ss;
  os << (ss ? "sku_id,s,S,v,tau,fit_profit\n" : "sku_id,Z,v,tau,fit_profit\n");
  for (std::size_t i = 0; i < r.fits.size(); ++i) {
    const std::string id = i < sku_ids.size() ? sku_ids[i] : std::to_string(i);
    const auto& f = r.fits[i];
    os << id << ',';
    if (ss)
      os << f.ss.s << ',' << f.ss.S;
    else
      os << f.Z;
    os << ',' << r.v << ',' << r.tau << ',' << f.fit_profit << '\n';
  }
}

}  // namespace srsg
