#pragma once

// Context extraction from joint rollouts, the recurrent occupancy predictor
// and trajectory augmentation.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "srsg/errors.hpp"
#include "srsg/inventory.hpp"
#include "srsg/local_sim.hpp"
#include "srsg/nn.hpp"

namespace srsg {

// Per-SKU resource usage recorded while running the joint simulator.
struct JointRecord {
  std::size_t n = 0;
  int steps = 0;
  std::vector<Units> stock;       // (steps + 1) x n, İ_t
  std::vector<Units> afterstate;  // steps x n, Î_t
  std::vector<Units> arrivals;    // steps x n, A_{t+1}

  explicit JointRecord(std::size_t skus = 0) : n(skus) {}

  void start(const StoreState& st) {
    stock.clear();
    afterstate.clear();
    arrivals.clear();
    steps = 0;
    for (const auto& s : st.skus) stock.push_back(s.in_stock);
  }
  void append(const StepOutcome& out, const StoreState& after) {
    afterstate.insert(afterstate.end(), out.afterstate.begin(), out.afterstate.end());
    arrivals.insert(arrivals.end(), out.arrivals.begin(), out.arrivals.end());
    for (const auto& s : after.skus) stock.push_back(s.in_stock);
    ++steps;
  }

  Units total(const std::vector<Units>& v, int t) const {
    return std::accumulate(v.begin() + std::ptrdiff_t(std::size_t(t) * n),
                           v.begin() + std::ptrdiff_t(std::size_t(t + 1) * n), Units{0});
  }
};

// Complement of agent i: store totals minus the agent's own share.
inline ContextTrajectory extract_context(const JointRecord& rec, std::size_t agent) {
  if (agent >= rec.n) throw ContractError("extract_context: agent index out of range");
  ContextTrajectory traj;
  traj.points.resize(std::size_t(rec.steps) + 1);
  auto own = [&](const std::vector<Units>& v, int t) { return v[std::size_t(t) * rec.n + agent]; };
  traj.points[0].dot = rec.total(rec.stock, 0) - own(rec.stock, 0);
  for (int t = 1; t <= rec.steps; ++t) {
    auto& p = traj.points[std::size_t(t)];
    p.hat_prev = rec.total(rec.afterstate, t - 1) - own(rec.afterstate, t - 1);
    p.dot = rec.total(rec.stock, t) - own(rec.stock, t);
    p.others_arrivals = rec.total(rec.arrivals, t - 1) - own(rec.arrivals, t - 1);
  }
  return traj;
}

// ---------------------------------------------------------------------------

struct ContextModelConfig {
  int window = 8;
  int hidden = 64;
  int steps = 500;  // Adam steps per training call
  int batch = 32;
  double lr = 0.005;

  void validate() const {
    if (window < 1) throw ConfigError("context_model.window: must be >= 1");
    if (hidden < 1) throw ConfigError("context_model.hidden: must be >= 1");
    if (steps < 0) throw ConfigError("context_model.steps: must be >= 0");
    if (batch < 1) throw ConfigError("context_model.batch: must be >= 1");
    if (!(lr >= 0)) throw ConfigError("context_model.lr: must be >= 0");
  }
};

// Next-step predictor of the complement's stock level ċ^{-i}. Inputs and
// targets are scaled by 1 / capacity.
class ContextModel {
 public:
  ContextModel(const ContextModelConfig& cfg, Units capacity)
      : cfg_(cfg), lstm_(1, std::size_t(cfg.hidden)), capacity_(capacity) {
    cfg_.validate();
    params_ = nn::ParamSet(std::vector<double>(param_count(), 0.0));
  }

  std::size_t param_count() const { return lstm_.param_count() + lstm_.hidden_size() + 1; }
  int window() const { return cfg_.window; }
  Units capacity() const { return capacity_; }
  nn::ParamSet& params() { return params_; }
  const nn::ParamSet& params() const { return params_; }

  template <class Rng>
  void initialize(Rng& rng) {
    auto p = lstm_.init(rng);
    p.resize(param_count(), 0.0);
    std::uniform_real_distribution<double> u(-0.1, 0.1);
    for (std::size_t j = 0; j < lstm_.hidden_size(); ++j) p[lstm_.param_count() + j] = u(rng);
    params_ = nn::ParamSet(std::move(p));
  }

  // Unclamped prediction on the scaled axis.
  double predict_scaled(std::span<const double> window) const {
    const auto c = lstm_.forward(lstm_params(), window);
    return head(c.hidden(c.steps - 1));
  }

  // Prediction in units, clamped to [0, capacity].
  double predict_next(std::span<const Units> window) const {
    std::vector<double> x(window.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = double(window[k]) / double(capacity_);
    return clamp_prediction(predict_scaled(x) * double(capacity_));
  }

  double clamp_prediction(double raw) const { return std::clamp(raw, 0.0, double(capacity_)); }

  // Sliding (window -> next value) pairs from the stock series ċ of each
  // trajectory, scaled.
  struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;
    std::size_t size() const { return targets.size(); }
  };

  Dataset make_dataset(std::span<const ContextTrajectory> trajs) const {
    Dataset d;
    const auto L = std::size_t(cfg_.window);
    for (const auto& tr : trajs) {
      if (tr.size() <= L) continue;
      std::vector<double> s(tr.size());
      for (std::size_t t = 0; t < tr.size(); ++t) s[t] = double(tr.points[t].dot) / double(capacity_);
      for (std::size_t t = 0; t + L < s.size(); ++t) {
        d.inputs.emplace_back(s.begin() + std::ptrdiff_t(t), s.begin() + std::ptrdiff_t(t + L));
        d.targets.push_back(s[t + L]);
      }
    }
    return d;
  }

  double mse(const Dataset& d) const {
    if (d.size() == 0) return 0.0;
    double s = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      const double e = predict_scaled(d.inputs[k]) - d.targets[k];
      s += e * e;
    }
    return s / double(d.size());
  }

  // Mean squared error over the given samples and its gradient.
  double loss_and_grad(const Dataset& d, std::span<const std::size_t> idx, std::span<double> grad) const {
    std::fill(grad.begin(), grad.end(), 0.0);
    const std::size_t H = lstm_.hidden_size();
    const auto lp = lstm_params();
    const double* w = params_.values.data() + lstm_.param_count();
    double* gw = grad.data() + lstm_.param_count();
    double loss = 0;
    const double inv = 1.0 / double(idx.size());
    for (std::size_t k : idx) {
      const auto c = lstm_.forward(lp, d.inputs[k]);
      const auto h = c.hidden(c.steps - 1);
      const double e = head(h) - d.targets[k];
      loss += e * e * inv;
      const double de = 2.0 * e * inv;
      std::vector<double> dh(c.steps * H, 0.0);
      for (std::size_t j = 0; j < H; ++j) {
        gw[j] += de * h[j];
        dh[(c.steps - 1) * H + j] = de * w[j];
      }
      gw[H] += de;
      lstm_.backward(lp, c, dh, grad.first(lstm_.param_count()));
    }
    return loss;
  }

  // Adam on random minibatches; returns the final MSE over the whole dataset.
  template <class Rng>
  double train(std::span<const ContextTrajectory> trajs, Rng& rng) {
    const Dataset d = make_dataset(trajs);
    if (d.size() == 0)
      throw ConfigError("context model: need a trajectory longer than the window (" +
                        std::to_string(cfg_.window) + ")");
    std::vector<double> grad(param_count());
    std::vector<std::size_t> idx(std::min<std::size_t>(std::size_t(cfg_.batch), d.size()));
    std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
    const nn::AdamConfig adam{cfg_.lr};
    for (int s = 0; s < cfg_.steps; ++s) {
      for (auto& k : idx) k = pick(rng);
      loss_and_grad(d, idx, grad);
      nn::adam_update(params_, grad, adam);
    }
    return mse(d);
  }

 private:
  std::span<const double> lstm_params() const {
    return std::span<const double>(params_.values).first(lstm_.param_count());
  }
  double head(std::span<const double> h) const {
    const double* w = params_.values.data() + lstm_.param_count();
    double y = w[h.size()];
    for (std::size_t j = 0; j < h.size(); ++j) y += w[j] * h[j];
    return y;
  }

  ContextModelConfig cfg_;
  nn::Lstm lstm_;
  Units capacity_;
  nn::ParamSet params_;
};

// ---------------------------------------------------------------------------

enum class AugmentMode { none, noise, predictor, mixed };

inline std::string to_string(AugmentMode m) {
  switch (m) {
    case AugmentMode::none: return "none";
    case AugmentMode::noise: return "noise";
    case AugmentMode::predictor: return "predictor";
    case AugmentMode::mixed: return "mixed";
  }
  return "none";
}

inline AugmentMode parse_augment_mode(const std::string& s) {
  if (s == "none") return AugmentMode::none;
  if (s == "noise") return AugmentMode::noise;
  if (s == "predictor") return AugmentMode::predictor;
  if (s == "mixed") return AugmentMode::mixed;
  throw ConfigError("augmentation mode must be none|noise|predictor|mixed, got '" + s + "'");
}

struct AugmentSpec {
  AugmentMode mode = AugmentMode::noise;
  double p_aug = 1.0;
  double noise_scale = 0.05;  // Gaussian sigma as a fraction of capacity

  bool uses_predictor() const { return mode == AugmentMode::predictor || mode == AugmentMode::mixed; }

  void validate() const {
    if (!(p_aug >= 0 && p_aug <= 1)) throw ConfigError("augment.p_aug: must lie in [0, 1]");
    if (!(noise_scale >= 0)) throw ConfigError("augment.noise_scale: must be >= 0");
  }
};

// Replaces each point's stock level independently with probability p_aug.
// hat_prev moves by the same amount; others_arrivals scales proportionally.
template <class Rng>
ContextTrajectory augment(const ContextTrajectory& traj, const AugmentSpec& spec, Units capacity,
                          const ContextModel* predictor, Rng& rng) {
  if (spec.mode == AugmentMode::none || spec.p_aug <= 0) return traj;
  if (spec.uses_predictor() && predictor == nullptr)
    throw ContractError("augment: predictor mode requires a trained context model");
  ContextTrajectory out = traj;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, spec.noise_scale * double(capacity));
  const std::size_t L = predictor ? std::size_t(predictor->window()) : 0;
  std::vector<Units> window;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    if (!(coin(rng) < spec.p_aug)) continue;
    bool use_predictor = spec.mode == AugmentMode::predictor ||
                         (spec.mode == AugmentMode::mixed && coin(rng) < 0.5);
    if (use_predictor && t < L) {
      if (spec.mode == AugmentMode::predictor) continue;
      use_predictor = false;
    }
    const ContextPoint& src = traj.points[t];
    Units dot;
    if (use_predictor) {
      window.clear();
      for (std::size_t k = t - L; k < t; ++k) window.push_back(traj.points[k].dot);
      dot = Units(std::lround(predictor->predict_next(window)));
    } else {
      dot = std::max<Units>(0, src.dot + Units(std::lround(noise(rng))));
    }
    ContextPoint& p = out.points[t];
    p.hat_prev = std::max<Units>(0, src.hat_prev + (dot - src.dot));
    if (src.dot > 0)
      p.others_arrivals = Units(std::lround(double(src.others_arrivals) * double(dot) / double(src.dot)));
    p.dot = dot;
  }
  return out;
}

}  // namespace srsg
