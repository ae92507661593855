#pragma once

// Generalized advantage estimation and the clipped PPO objectives, expressed
// on network outputs (logits and values). Gradients returned here are with
// respect to those outputs; the trainer backpropagates them into parameters.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "srsg/errors.hpp"
#include "srsg/nn.hpp"

namespace srsg {

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

// A_t = sum_{l=0}^{h} (gamma lambda)^l delta_{t+l}, stopping after a done
// step. horizon < 0 means untruncated. values has one extra bootstrap entry.
inline GaeResult compute_gae(std::span<const double> rewards, std::span<const double> values,
                             std::span<const std::uint8_t> dones, double gamma, double lambda, int horizon) {
  const std::size_t T = rewards.size();
  if (values.size() != T + 1) throw ContractError("compute_gae: values must have rewards.size() + 1 entries");
  if (!dones.empty() && dones.size() != T) throw ContractError("compute_gae: dones size mismatch");
  auto done = [&](std::size_t t) { return !dones.empty() && dones[t]; };

  std::vector<double> delta(T), decay(T);
  for (std::size_t t = 0; t < T; ++t) {
    const double nonterminal = done(t) ? 0.0 : 1.0;
    delta[t] = rewards[t] + gamma * values[t + 1] * nonterminal - values[t];
    decay[t] = gamma * lambda * nonterminal;
  }
  // Untruncated recursion G_t = delta_t + decay_t G_{t+1}.
  std::vector<double> G(T + 1, 0.0);
  for (std::size_t t = T; t-- > 0;) G[t] = delta[t] + decay[t] * G[t + 1];

  GaeResult r;
  r.advantages.resize(T);
  r.returns.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    double a = G[t];
    if (horizon >= 0 && t + std::size_t(horizon) + 1 < T) {
      double prod = 1.0;
      for (std::size_t l = 0; l <= std::size_t(horizon) && prod != 0.0; ++l) prod *= decay[t + l];
      a -= prod * G[t + std::size_t(horizon) + 1];
    }
    r.advantages[t] = a;
    r.returns[t] = a + values[t];
  }
  return r;
}

struct LossOutput {
  double loss = 0;
  std::vector<double> grad;  // d loss / d outputs
  double clip_fraction = 0;
};

// Negated clipped surrogate, averaged over the batch. logits is batch x A.
inline LossOutput ppo_actor_loss(std::span<const double> logits, std::size_t num_actions,
                                 std::span<const std::size_t> actions,
                                 std::span<const double> old_log_probs,
                                 std::span<const double> advantages, double clip) {
  const std::size_t B = actions.size();
  if (logits.size() != B * num_actions || old_log_probs.size() != B || advantages.size() != B)
    throw ContractError("ppo_actor_loss: batch shape mismatch");
  LossOutput out;
  out.grad.assign(logits.size(), 0.0);
  if (B == 0) return out;
  const double inv = 1.0 / double(B);
  std::size_t clipped = 0;
  for (std::size_t b = 0; b < B; ++b) {
    const auto z = logits.subspan(b * num_actions, num_actions);
    const double lse = nn::categorical::log_sum_exp(z);
    const double lp = z[actions[b]] - lse;
    const double ratio = std::exp(lp - old_log_probs[b]);
    if (!std::isfinite(ratio)) throw TrainingError("ppo_actor_loss: non-finite probability ratio");
    const double A = advantages[b];
    const double unclipped = ratio * A;
    const double clipped_ratio = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
    const double surrogate = clipped_ratio * A;
    double dobj_dlp;
    if (unclipped <= surrogate) {
      out.loss -= unclipped * inv;
      dobj_dlp = unclipped;
    } else {
      out.loss -= surrogate * inv;
      dobj_dlp = (ratio > 1.0 - clip && ratio < 1.0 + clip) ? unclipped : 0.0;
    }
    if (ratio < 1.0 - clip || ratio > 1.0 + clip) ++clipped;
    // d log pi(a) / d z_k = 1[k = a] - p_k
    double* g = out.grad.data() + b * num_actions;
    for (std::size_t k = 0; k < num_actions; ++k) {
      const double p = std::exp(z[k] - lse);
      g[k] = -inv * dobj_dlp * ((k == actions[b] ? 1.0 : 0.0) - p);
    }
  }
  out.clip_fraction = double(clipped) / double(B);
  return out;
}

// Mean policy entropy and its gradient with respect to the logits.
inline LossOutput mean_entropy(std::span<const double> logits, std::size_t num_actions) {
  const std::size_t B = logits.size() / num_actions;
  LossOutput out;
  out.grad.assign(logits.size(), 0.0);
  if (B == 0) return out;
  const double inv = 1.0 / double(B);
  for (std::size_t b = 0; b < B; ++b) {
    const auto z = logits.subspan(b * num_actions, num_actions);
    out.loss += nn::categorical::entropy(z) * inv;
    nn::categorical::entropy_grad(z, inv, std::span<double>(out.grad).subspan(b * num_actions, num_actions));
  }
  return out;
}

// mean of min{(V - R)^2, (V_old + clip(V - V_old, -eps, eps) - R)^2}.
inline LossOutput ppo_critic_loss(std::span<const double> values, std::span<const double> old_values,
                                  std::span<const double> targets, double clip) {
  const std::size_t B = values.size();
  if (old_values.size() != B || targets.size() != B) throw ContractError("ppo_critic_loss: batch shape mismatch");
  LossOutput out;
  out.grad.assign(B, 0.0);
  if (B == 0) return out;
  const double inv = 1.0 / double(B);
  for (std::size_t b = 0; b < B; ++b) {
    const double diff = values[b] - old_values[b];
    const double vclip = old_values[b] + std::clamp(diff, -clip, clip);
    const double e1 = values[b] - targets[b];
    const double e2 = vclip - targets[b];
    if (e1 * e1 <= e2 * e2) {
      out.loss += e1 * e1 * inv;
      out.grad[b] = 2.0 * e1 * inv;
    } else {
      out.loss += e2 * e2 * inv;
      out.grad[b] = (diff > -clip && diff < clip) ? 2.0 * e2 * inv : 0.0;
    }
  }
  return out;
}

}  // namespace srsg
