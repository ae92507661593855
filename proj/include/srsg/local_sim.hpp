#pragma once

// Single-SKU simulator that replays the rest of the store from a recorded
// context trajectory instead of simulating the other SKUs.

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "srsg/errors.hpp"
#include "srsg/inventory.hpp"

namespace srsg {

// Occupancy attributable to every SKU except the simulated one. Point t holds
// c_t = (ĉ_{t-1}, ċ_t) for the complement; others_arrivals is aligned with
// hat_prev (units unloaded during step t-1).
struct ContextPoint {
  Units hat_prev = 0;
  Units dot = 0;
  Units others_arrivals = 0;
  bool operator==(const ContextPoint&) const = default;
};

// A trajectory driving a horizon-T episode holds T + 1 points: step t reads
// point t (observation) and point t + 1 (the complement's afterstate).
struct ContextTrajectory {
  std::vector<ContextPoint> points;

  std::size_t size() const { return points.size(); }
  int max_horizon() const { return points.empty() ? 0 : int(points.size()) - 1; }
  bool operator==(const ContextTrajectory&) const = default;

  static ContextTrajectory zeros(int horizon) {
    return {std::vector<ContextPoint>(std::size_t(horizon) + 1)};
  }
};

inline void write_context_csv(std::ostream& os, const ContextTrajectory& traj) {
  os << "step,hat_prev,dot,others_arrivals\n";
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const auto& p = traj.points[t];
    os << t << ',' << p.hat_prev << ',' << p.dot << ',' << p.others_arrivals << '\n';
  }
}

inline ContextTrajectory read_context_csv(std::istream& is) {
  ContextTrajectory traj;
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line)) throw ParseError("empty context file");
  ++lineno;
  if (line != "step,hat_prev,dot,others_arrivals")
    throw ParseError("expected header 'step,hat_prev,dot,others_arrivals'", lineno);
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    long long step = 0;
    ContextPoint p;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ss >> step >> c1 >> p.hat_prev >> c2 >> p.dot >> c3 >> p.others_arrivals) || c1 != ',' ||
        c2 != ',' || c3 != ',')
      throw ParseError("malformed context row", lineno);
    if (step != (long long)traj.size()) throw ParseError("steps must be contiguous from 0", lineno);
    if (p.hat_prev < 0 || p.dot < 0 || p.others_arrivals < 0)
      throw ParseError("context values must be >= 0", lineno);
    traj.points.push_back(p);
  }
  return traj;
}

struct LocalStepOutcome {
  Units stock = 0;
  Units order = 0;
  int lead_time = 1;
  Units sales = 0;
  Units arrivals = 0;
  Units afterstate = 0;
  Units discarded = 0;
  Money profit = 0;
  OverflowRatio rho{};
  Units total_stock = 0;
  Units total_afterstate = 0;
  Units total_arrivals = 0;
};

class LocalSimulator {
 public:
  LocalSimulator(const StoreConfig& store, std::size_t sku_index, std::uint64_t seed,
                 Units initial_stock)
      : sku_cfg_(store.skus.at(sku_index)),
        capacity_(store.capacity),
        mode_(store.overflow_mode),
        horizon_(store.horizon),
        sku_index_(sku_index),
        seed_(seed),
        initial_stock_(initial_stock) {
    if (initial_stock < 0 || initial_stock > capacity_)
      throw ConfigError("initial_stock: must lie in [0, capacity]");
    traj_ = ContextTrajectory::zeros(horizon_);
    restart();
  }

  // Binds a trajectory and restarts the episode at t = 0.
  void set_context_trajectory(ContextTrajectory traj) {
    if (traj.max_horizon() < horizon_)
      throw ConfigError("context trajectory covers " + std::to_string(traj.max_horizon()) +
                        " steps, horizon is " + std::to_string(horizon_));
    traj_ = std::move(traj);
    restart();
  }

  // New lead-time stream; takes effect from the next restart.
  void reseed(std::uint64_t seed) { seed_ = seed; }

  void restart() {
    t_ = 0;
    sku_ = SkuState{};
    sku_.in_stock = initial_stock_;
    rng_ = sku_rng(seed_, sku_index_);
    last_rho_ = {};
    last_arrivals_ = 0;
  }

  LocalStepOutcome step(Units order, Units demand) {
    detail::require(order >= 0 && demand >= 0, "step_local: order and demand must be >= 0");
    if (std::size_t(t_) + 1 >= traj_.size())
      throw EpisodeExhausted("local simulator stepped past the end of its context trajectory");
    const ContextPoint& now = traj_.points[std::size_t(t_)];
    const ContextPoint& next = traj_.points[std::size_t(t_) + 1];

    const auto h = detail::begin_sku_step(sku_, sku_cfg_, t_, order, demand, rng_);
    LocalStepOutcome out;
    out.stock = h.stock;
    out.order = order;
    out.lead_time = h.lead_time;
    out.sales = h.sales;
    out.arrivals = h.arrivals;
    out.afterstate = h.afterstate;
    out.total_stock = h.stock + now.dot;
    out.total_afterstate = h.afterstate + next.hat_prev;
    out.total_arrivals = h.arrivals + next.others_arrivals;
    out.rho = compute_overflow_ratio(out.total_afterstate, out.total_arrivals, capacity_, mode_);
    out.discarded = detail::finish_sku_step(sku_, h, out.rho, order);
    out.profit = compute_profit(sku_cfg_, h.sales, order, h.stock);

    last_rho_ = out.rho;
    last_arrivals_ = h.arrivals;
    ++t_;
    return out;
  }

  // Shared-resource features at the current step, own share plus complement.
  ContextFeatures context_features() const {
    const ContextPoint& now = traj_.points.at(std::size_t(t_));
    const Units arrivals = last_arrivals_ + now.others_arrivals;
    return {sku_.in_stock + now.dot, arrivals, last_rho_.value() * double(arrivals)};
  }

  int t() const { return t_; }
  int horizon() const { return horizon_; }
  bool done() const { return t_ >= horizon_; }
  const SkuState& sku_state() const { return sku_; }
  const SkuConfig& sku_config() const { return sku_cfg_; }
  std::size_t sku_index() const { return sku_index_; }
  Units capacity() const { return capacity_; }
  const ContextTrajectory& trajectory() const { return traj_; }

 private:
  SkuConfig sku_cfg_;
  Units capacity_;
  OverflowMode mode_;
  int horizon_;
  std::size_t sku_index_;
  std::uint64_t seed_;
  Units initial_stock_;

  ContextTrajectory traj_;
  int t_ = 0;
  SkuState sku_;
  std::mt19937_64 rng_;
  OverflowRatio last_rho_{};
  Units last_arrivals_ = 0;
};

}  // namespace srsg
