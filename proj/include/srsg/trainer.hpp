#pragma once

// Rollout collection in the joint and local simulators, the PPO update, the
// CD-PPO outer loop, independent PPO and greedy evaluation.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "srsg/agent_io.hpp"
#include "srsg/context.hpp"
#include "srsg/data.hpp"
#include "srsg/errors.hpp"
#include "srsg/inventory.hpp"
#include "srsg/local_sim.hpp"
#include "srsg/nn.hpp"
#include "srsg/parallel.hpp"
#include "srsg/policy.hpp"
#include "srsg/ppo.hpp"

namespace srsg {

inline std::uint64_t derive_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  std::seed_seq s{std::uint32_t(a), std::uint32_t(a >> 32), std::uint32_t(b), std::uint32_t(b >> 32),
                  std::uint32_t(c), std::uint32_t(c >> 32)};
  std::array<std::uint32_t, 2> out{};
  s.generate(out.begin(), out.end());
  return (std::uint64_t(out[0]) << 32) | out[1];
}

// A store plus the demand it replays. Training episodes take store.horizon
// steps from a window of the train series; evaluation runs the whole test
// series once.
struct Scenario {
  StoreConfig store;
  DemandMatrix train;
  DemandMatrix test;
  std::vector<Units> initial_stock;
  ObservationOptions obs;

  std::size_t n() const { return store.n(); }
  std::size_t train_length() const { return train.empty() ? 0 : train.front().size(); }
  std::size_t test_length() const { return test.empty() ? 0 : test.front().size(); }

  void validate() const {
    store.validate();
    if (train.size() != n() || test.size() != n())
      throw ConfigError("data: demand series count does not match store.n");
    if (train_length() < std::size_t(store.horizon))
      throw ConfigError("store.horizon: longer than the training series (" + std::to_string(train_length()) + ")");
    if (test_length() == 0) throw ConfigError("data.test_length: must be >= 1");
    if (initial_stock.size() != n()) throw ConfigError("store.initial_stock: expected one entry per SKU");
    if (std::accumulate(initial_stock.begin(), initial_stock.end(), Units{0}) > store.capacity)
      throw ConfigError("store.initial_stock: total exceeds capacity");
  }
};

inline ObservationOptions default_observation_options(const StoreConfig& store) {
  return {true, true, store.max_price()};
}

inline Scenario make_scenario(StoreConfig store, const DemandDataset& train, const DemandDataset& test) {
  Scenario sc;
  sc.obs = default_observation_options(store);
  sc.initial_stock = default_initial_stock(store);
  sc.store = std::move(store);
  sc.train = train.series;
  sc.test = test.series;
  sc.validate();
  return sc;
}

struct TrainConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  double entropy_coef = 0.01;
  double critic_coef = 0.5;
  double lr = 0.00025;
  double max_grad_norm = 10.0;
  int parallel_envs = 10;
  int gae_horizon = 5;
  int chunk_length = 10;
  int epochs = 50;
  std::int64_t sample_budget = 0;  // stop once this many samples are counted; 0 disables
  int inner_rounds = 1;
  int ppo_epochs = 4;
  int minibatches = 4;
  bool reward_standardization = true;
  bool advantage_normalization = true;
  RewardMode reward_mode = RewardMode::individual;
  bool train_with_joint_data = true;
  bool lr_anneal = false;  // decay lr linearly to zero over the epoch or sample budget
  int eval_episodes = 4;
  int eval_interval = 1;
  std::size_t workers = 0;

  void validate() const {
    if (!(gamma > 0 && gamma <= 1)) throw ConfigError("train.gamma: must lie in (0, 1]");
    if (!(lambda > 0 && lambda <= 1)) throw ConfigError("train.lambda: must lie in (0, 1]");
    if (!(clip > 0 && clip < 1)) throw ConfigError("train.clip: must lie in (0, 1)");
    if (!(entropy_coef >= 0)) throw ConfigError("train.entropy_coef: must be >= 0");
    if (!(critic_coef >= 0)) throw ConfigError("train.critic_coef: must be >= 0");
    if (!(lr >= 0)) throw ConfigError("train.lr: must be >= 0");
    if (!(max_grad_norm >= 0)) throw ConfigError("train.max_grad_norm: must be >= 0");
    if (parallel_envs < 1) throw ConfigError("train.parallel_envs: must be >= 1");
    if (gae_horizon < -1) throw ConfigError("train.gae_horizon: must be >= 0, or -1 for untruncated");
    if (chunk_length < 1) throw ConfigError("train.chunk_length: must be >= 1");
    if (epochs < 0) throw ConfigError("train.epochs: must be >= 0");
    if (sample_budget < 0) throw ConfigError("train.sample_budget: must be >= 0");
    if (inner_rounds < 0) throw ConfigError("train.inner_rounds: must be >= 0");
    if (ppo_epochs < 1) throw ConfigError("train.ppo_epochs: must be >= 1");
    if (minibatches < 1) throw ConfigError("train.minibatches: must be >= 1");
    if (eval_episodes < 1) throw ConfigError("train.eval_episodes: must be >= 1");
    if (eval_interval < 1) throw ConfigError("train.eval_interval: must be >= 1");
  }
};

// Settings specific to the context-aware trainer.
struct ContextConfig {
  AugmentSpec augment;
  ContextModelConfig model;
  int joint_envs = 0;  // joint episodes per context collection; 0 means train.parallel_envs
  int local_envs = 5;  // context trajectories each agent replays per inner round
  bool fresh_local_windows = false;

  void validate() const {
    augment.validate();
    model.validate();
    if (joint_envs < 0) throw ConfigError("context.joint_envs: must be >= 0");
    if (local_envs < 1) throw ConfigError("context.local_envs: must be >= 1");
  }
};

// One joint step with n agents counts n samples; one local step counts 1.
struct SampleCounter {
  std::int64_t joint = 0;
  std::int64_t local = 0;

  void add_joint(std::size_t agents, std::int64_t steps) { joint += std::int64_t(agents) * steps; }
  void add_local(std::int64_t steps) { local += steps; }
  std::int64_t total() const { return joint + local; }
  bool operator==(const SampleCounter&) const = default;
};

// One agent's experience over one episode.
struct Segment {
  std::vector<double> obs;  // steps x obs::kSize
  std::vector<std::size_t> actions;
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;  // steps + 1; the last entry bootstraps
  std::vector<std::uint8_t> dones;
  std::vector<double> policy_states;  // steps x state_size, recurrent only
  std::vector<double> value_states;

  std::size_t steps() const { return actions.size(); }
};

enum class ActMode { sample, greedy };

// Decision state for a group of agents sharing one ActorCritic.
class AgentGroup {
 public:
  AgentGroup(const ActorCritic& ac, std::size_t agents)
      : ac_(ac),
        n_(agents),
        pstate_(agents * ac.policy().state_size(), 0.0),
        vstate_(agents * ac.value().state_size(), 0.0) {}

  // obs holds one row per agent. Records the step into segs when given.
  std::vector<std::size_t> act(std::span<const double> obs, ActMode mode, std::mt19937_64& rng,
                               std::vector<Segment>* segs) {
    const auto& P = ac_.policy();
    const auto& V = ac_.value();
    if (segs) {
      for (std::size_t i = 0; i < n_; ++i) {
        auto& s = (*segs)[i];
        const auto row = obs.subspan(i * obs::kSize, obs::kSize);
        s.obs.insert(s.obs.end(), row.begin(), row.end());
        const auto ps = std::span<const double>(pstate_).subspan(i * P.state_size(), P.state_size());
        const auto vs = std::span<const double>(vstate_).subspan(i * V.state_size(), V.state_size());
        s.policy_states.insert(s.policy_states.end(), ps.begin(), ps.end());
        s.value_states.insert(s.value_states.end(), vs.begin(), vs.end());
      }
    }
    const auto logits = P.step(ac_.policy_params.values, obs, n_, pstate_);
    std::vector<double> values;
    if (segs) values = V.step(ac_.value_params.values, obs, n_, vstate_);
    std::vector<std::size_t> actions(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto z = std::span<const double>(logits).subspan(i * kNumActions, kNumActions);
      actions[i] = mode == ActMode::sample ? nn::categorical::sample(z, rng) : nn::categorical::argmax(z);
      if (segs) {
        auto& s = (*segs)[i];
        s.actions.push_back(actions[i]);
        s.log_probs.push_back(nn::categorical::log_prob(z, actions[i]));
        s.values.push_back(values[i]);
      }
    }
    return actions;
  }

  // Appends V(obs) as the bootstrap value of every segment.
  void bootstrap(std::span<const double> obs, std::vector<Segment>& segs) const {
    std::vector<double> vs = vstate_;
    const auto values = ac_.value().step(ac_.value_params.values, obs, n_, vs);
    for (std::size_t i = 0; i < n_; ++i) segs[i].values.push_back(values[i]);
  }

 private:
  const ActorCritic& ac_;
  std::size_t n_;
  std::vector<double> pstate_, vstate_;
};

// ---------------------------------------------------------------------------
// Joint rollouts

struct EpisodeSummary {
  Money profit = 0;
  std::vector<Money> sku_profit;
  Units discarded = 0;
  int overflow_steps = 0;        // steps with a non-zero overflow ratio
  int capacity_violations = 0;   // step boundaries with total stock above capacity
};

// Runs `steps` joint steps on demand columns [start, start + steps). decide
// maps the current state to one order per SKU.
template <class Decide>
EpisodeSummary run_joint(const StoreConfig& store, const DemandMatrix& demand, std::size_t start, int steps,
                         std::uint64_t lead_seed, std::span<const Units> initial_stock, Decide&& decide) {
  StoreState st = reset(store, lead_seed, initial_stock);
  EpisodeSummary sum;
  sum.sku_profit.assign(store.n(), 0.0);
  std::vector<Units> d(store.n());
  for (int t = 0; t < steps; ++t) {
    const std::vector<Units> orders = decide(st);
    for (std::size_t i = 0; i < store.n(); ++i) d[i] = demand[i].at(start + std::size_t(t));
    const auto out = step_joint(store, st, orders, d);
    for (std::size_t i = 0; i < store.n(); ++i) {
      sum.sku_profit[i] += out.profit[i];
      sum.profit += out.profit[i];
      sum.discarded += out.discarded[i];
    }
    if (out.rho.num > 0) ++sum.overflow_steps;
    if (st.total_stock() > store.capacity) ++sum.capacity_violations;
  }
  return sum;
}

inline std::vector<double> joint_observations(const Scenario& sc, const StoreState& st) {
  const auto feats = context_features(st);
  std::vector<double> obs(sc.n() * obs::kSize);
  for (std::size_t i = 0; i < sc.n(); ++i) {
    const auto o = build_observation(st.skus[i], sc.store.skus[i], sc.store.capacity, feats, sc.obs);
    std::copy(o.begin(), o.end(), obs.begin() + std::ptrdiff_t(i * obs::kSize));
  }
  return obs;
}

struct JointEpisode {
  std::vector<Segment> segments;  // one per agent
  JointRecord record;
  std::vector<Money> profit;      // per agent over the episode
  std::size_t start = 0;
  std::uint64_t lead_seed = 0;
};

// One training episode of store.horizon steps on the train series.
inline JointEpisode run_joint_episode(const Scenario& sc, const ActorCritic& ac, std::size_t start,
                                      std::uint64_t lead_seed, std::uint64_t act_seed, RewardMode reward_mode) {
  const std::size_t n = sc.n();
  const int T = sc.store.horizon;
  JointEpisode ep;
  ep.start = start;
  ep.lead_seed = lead_seed;
  ep.segments.resize(n);
  ep.profit.assign(n, 0.0);
  ep.record = JointRecord(n);
  StoreState st = reset(sc.store, lead_seed, sc.initial_stock);
  ep.record.start(st);
  AgentGroup group(ac, n);
  std::mt19937_64 rng(act_seed);
  std::vector<Units> orders(n), demand(n);
  for (int t = 0; t < T; ++t) {
    const auto obs = joint_observations(sc, st);
    const auto actions = group.act(obs, ActMode::sample, rng, &ep.segments);
    for (std::size_t i = 0; i < n; ++i) {
      orders[i] = action_to_order(actions[i], st.skus[i].sales);
      demand[i] = sc.train[i].at(start + std::size_t(t));
    }
    const auto out = step_joint(sc.store, st, orders, demand);
    ep.record.append(out, st);
    const auto rewards = compute_rewards(out.profit, reward_mode);
    for (std::size_t i = 0; i < n; ++i) {
      ep.segments[i].rewards.push_back(rewards[i]);
      ep.segments[i].dones.push_back(0);
      ep.profit[i] += out.profit[i];
    }
  }
  group.bootstrap(joint_observations(sc, st), ep.segments);
  return ep;
}

// One agent's episode in its local simulator, driven by `traj`.
inline Segment run_local_episode(const Scenario& sc, const ActorCritic& ac, std::size_t agent,
                                 const ContextTrajectory& traj, std::size_t start, std::uint64_t lead_seed,
                                 std::uint64_t act_seed, Money* profit = nullptr) {
  LocalSimulator sim(sc.store, agent, lead_seed, sc.initial_stock[agent]);
  sim.set_context_trajectory(traj);
  std::vector<Segment> seg(1);
  AgentGroup group(ac, 1);
  std::mt19937_64 rng(act_seed);
  auto observe = [&] {
    const auto o = build_observation(sim.sku_state(), sim.sku_config(), sim.capacity(), sim.context_features(), sc.obs);
    return std::vector<double>(o.begin(), o.end());
  };
  Money total = 0;
  while (!sim.done()) {
    const auto obs = observe();
    const auto a = group.act(obs, ActMode::sample, rng, &seg)[0];
    const Units order = action_to_order(a, sim.sku_state().sales);
    const auto out = sim.step(order, sc.train[agent].at(start + std::size_t(sim.t())));
    seg[0].rewards.push_back(compute_reward(out.profit));
    seg[0].dones.push_back(0);
    total += out.profit;
  }
  group.bootstrap(observe(), seg);
  if (profit) *profit = total;
  return std::move(seg[0]);
}

// ---------------------------------------------------------------------------
// Evaluation

struct ProfitStats {
  double mean = 0;
  double std = 0;
  std::vector<double> totals;
};

inline ProfitStats profit_stats(std::vector<double> totals) {
  ProfitStats s;
  s.totals = std::move(totals);
  if (s.totals.empty()) return s;
  s.mean = std::accumulate(s.totals.begin(), s.totals.end(), 0.0) / double(s.totals.size());
  double ss = 0;
  for (double x : s.totals) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / double(s.totals.size()));
  return s;
}

inline std::uint64_t eval_lead_seed(std::uint64_t seed, int episode) { return derive_seed(seed, std::uint64_t(episode), 0xe7a1); }

// Total profit over the test series, one value per lead-time seed. Actions
// are the argmax unless mode asks for sampling.
inline ProfitStats evaluate(const Scenario& sc, const ActorCritic& ac, int episodes, std::uint64_t seed,
                            ActMode mode = ActMode::greedy) {
  std::vector<double> totals;
  for (int e = 0; e < episodes; ++e) {
    AgentGroup group(ac, sc.n());
    std::mt19937_64 rng(derive_seed(seed, std::uint64_t(e), 0x5a3f));
    const auto sum = run_joint(sc.store, sc.test, 0, int(sc.test_length()), eval_lead_seed(seed, e),
                               sc.initial_stock, [&](const StoreState& st) {
                                 const auto obs = joint_observations(sc, st);
                                 const auto a = group.act(obs, mode, rng, nullptr);
                                 std::vector<Units> orders(sc.n());
                                 for (std::size_t i = 0; i < sc.n(); ++i)
                                   orders[i] = action_to_order(a[i], st.skus[i].sales);
                                 return orders;
                               });
    totals.push_back(sum.profit);
  }
  return profit_stats(std::move(totals));
}

// Uniformly random actions on the test series.
inline ProfitStats evaluate_random(const Scenario& sc, int episodes, std::uint64_t seed) {
  std::vector<double> totals;
  for (int e = 0; e < episodes; ++e) {
    std::mt19937_64 rng(derive_seed(seed, std::uint64_t(e), 0x7a4d));
    std::uniform_int_distribution<std::size_t> pick(0, kNumActions - 1);
    const auto sum = run_joint(sc.store, sc.test, 0, int(sc.test_length()), eval_lead_seed(seed, e),
                               sc.initial_stock, [&](const StoreState& st) {
                                 std::vector<Units> orders(sc.n());
                                 for (std::size_t i = 0; i < sc.n(); ++i)
                                   orders[i] = action_to_order(pick(rng), st.skus[i].sales);
                                 return orders;
                               });
    totals.push_back(sum.profit);
  }
  return profit_stats(std::move(totals));
}

// ---------------------------------------------------------------------------
// PPO update

struct UpdateStats {
  double actor_loss = 0;
  double critic_loss = 0;
  double entropy = 0;
  double clip_fraction = 0;
  double first_ratio_deviation = 0;  // max |ratio - 1| on the first minibatch
  int minibatches = 0;
  std::size_t samples = 0;
};

// Rows [start, start + len) of one segment.
struct ChunkRef {
  std::size_t segment;
  std::size_t start;
  std::size_t len;
};

inline std::vector<ChunkRef> make_chunks(std::span<const Segment> segs, std::size_t L) {
  std::vector<ChunkRef> out;
  for (std::size_t s = 0; s < segs.size(); ++s)
    for (std::size_t t = 0; t < segs[s].steps(); t += L) out.push_back({s, t, std::min(L, segs[s].steps() - t)});
  return out;
}

// Optimisation targets for a batch of segments.
struct PreparedBatch {
  std::vector<std::vector<double>> advantages;
  std::vector<std::vector<double>> returns;
};

inline PreparedBatch prepare_batch(std::span<const Segment> segs, const TrainConfig& cfg) {
  double mu = 0, sigma = 1;
  std::size_t count = 0;
  if (cfg.reward_standardization) {
    double s = 0, ss = 0;
    for (const auto& g : segs)
      for (double r : g.rewards) {
        s += r;
        ss += r * r;
        ++count;
      }
    if (count > 0) {
      mu = s / double(count);
      sigma = std::sqrt(std::max(ss / double(count) - mu * mu, 0.0));
      if (sigma < 1e-12) sigma = 1.0;
    }
  }
  PreparedBatch pb;
  for (const auto& g : segs) {
    std::vector<double> r(g.rewards.size());
    for (std::size_t t = 0; t < r.size(); ++t) r[t] = (g.rewards[t] - mu) / sigma;
    auto gae = compute_gae(r, g.values, g.dones, cfg.gamma, cfg.lambda, cfg.gae_horizon);
    pb.advantages.push_back(std::move(gae.advantages));
    pb.returns.push_back(std::move(gae.returns));
  }
  if (cfg.advantage_normalization) {
    double s = 0, ss = 0;
    std::size_t m = 0;
    for (const auto& a : pb.advantages)
      for (double x : a) {
        s += x;
        ss += x * x;
        ++m;
      }
    if (m > 1) {
      const double mean = s / double(m);
      const double sd = std::sqrt(std::max(ss / double(m) - mean * mean, 0.0));
      for (auto& a : pb.advantages)
        for (double& x : a) x = (x - mean) / (sd + 1e-8);
    }
  }
  return pb;
}

struct Minibatch {
  std::vector<Network::Chunk> policy_chunks;
  std::vector<Network::Chunk> value_chunks;
  std::vector<std::size_t> actions;
  std::vector<double> old_log_probs;
  std::vector<double> advantages;
  std::vector<double> old_values;
  std::vector<double> returns;
};

inline Minibatch gather_minibatch(std::span<const Segment> segs, const PreparedBatch& pb,
                                  std::span<const ChunkRef> chunks, const ActorCritic& ac) {
  Minibatch mb;
  const std::size_t ps = ac.policy().state_size(), vs = ac.value().state_size();
  for (const auto& c : chunks) {
    const Segment& g = segs[c.segment];
    const auto obs = std::span<const double>(g.obs).subspan(c.start * obs::kSize, c.len * obs::kSize);
    mb.policy_chunks.push_back({obs, std::span<const double>(g.policy_states).subspan(c.start * ps, ps)});
    mb.value_chunks.push_back({obs, std::span<const double>(g.value_states).subspan(c.start * vs, vs)});
    for (std::size_t t = c.start; t < c.start + c.len; ++t) {
      mb.actions.push_back(g.actions[t]);
      mb.old_log_probs.push_back(g.log_probs[t]);
      mb.advantages.push_back(pb.advantages[c.segment][t]);
      mb.old_values.push_back(g.values[t]);
      mb.returns.push_back(pb.returns[c.segment][t]);
    }
  }
  return mb;
}

struct StepLosses {
  double actor = 0, critic = 0, entropy = 0, clip_fraction = 0, ratio_deviation = 0;
};

// One optimiser step on L_actor + c_critic L_critic - c_entropy H. Policy and
// value nets are separate, so each receives its own part of the gradient.
inline StepLosses overall_update(ActorCritic& ac, const Minibatch& mb, const TrainConfig& cfg) {
  StepLosses out;
  const auto& P = ac.policy();
  const auto& V = ac.value();
  const nn::AdamConfig adam{cfg.lr};

  const auto pc = P.forward(ac.policy_params.values, mb.policy_chunks);
  const auto logits = pc.output();
  auto actor = ppo_actor_loss(logits, kNumActions, mb.actions, mb.old_log_probs, mb.advantages, cfg.clip);
  const auto ent = mean_entropy(logits, kNumActions);
  for (std::size_t b = 0; b < mb.actions.size(); ++b) {
    const double lp = nn::categorical::log_prob(logits.subspan(b * kNumActions, kNumActions), mb.actions[b]);
    out.ratio_deviation = std::max(out.ratio_deviation, std::abs(std::exp(lp - mb.old_log_probs[b]) - 1.0));
  }
  std::vector<double> dlogits(actor.grad.size());
  for (std::size_t k = 0; k < dlogits.size(); ++k) dlogits[k] = actor.grad[k] - cfg.entropy_coef * ent.grad[k];
  std::vector<double> gp(P.param_count(), 0.0);
  P.backward(ac.policy_params.values, pc, dlogits, gp);
  nn::clip_grad_norm(gp, cfg.max_grad_norm);
  nn::adam_update(ac.policy_params, gp, adam);

  const auto vc = V.forward(ac.value_params.values, mb.value_chunks);
  auto critic = ppo_critic_loss(vc.output(), mb.old_values, mb.returns, cfg.clip);
  for (double& g : critic.grad) g *= cfg.critic_coef;
  std::vector<double> gv(V.param_count(), 0.0);
  V.backward(ac.value_params.values, vc, critic.grad, gv);
  nn::clip_grad_norm(gv, cfg.max_grad_norm);
  nn::adam_update(ac.value_params, gv, adam);

  out.actor = actor.loss;
  out.critic = critic.loss;
  out.entropy = ent.loss;
  out.clip_fraction = actor.clip_fraction;
  return out;
}

// ppo_epochs passes over the batch, each split into `minibatches` random
// groups of chunks.
inline UpdateStats ppo_update(ActorCritic& ac, std::span<const Segment> segs, const TrainConfig& cfg,
                              std::mt19937_64& rng) {
  UpdateStats st;
  if (segs.empty()) return st;
  const auto pb = prepare_batch(segs, cfg);
  auto chunks = make_chunks(segs, std::size_t(cfg.chunk_length));
  for (const auto& g : segs) st.samples += g.steps();
  const std::size_t groups = std::min<std::size_t>(std::size_t(cfg.minibatches), chunks.size());
  for (int e = 0; e < cfg.ppo_epochs; ++e) {
    std::shuffle(chunks.begin(), chunks.end(), rng);
    for (std::size_t m = 0; m < groups; ++m) {
      const std::size_t lo = m * chunks.size() / groups, hi = (m + 1) * chunks.size() / groups;
      const auto mb = gather_minibatch(segs, pb, std::span<const ChunkRef>(chunks).subspan(lo, hi - lo), ac);
      const auto l = overall_update(ac, mb, cfg);
      if (st.minibatches == 0) st.first_ratio_deviation = l.ratio_deviation;
      st.actor_loss = l.actor;
      st.critic_loss = l.critic;
      st.entropy = l.entropy;
      st.clip_fraction = l.clip_fraction;
      ++st.minibatches;
    }
  }
  return st;
}

// ---------------------------------------------------------------------------
// Training loops

struct MetricsRow {
  int epoch = 0;
  std::int64_t joint_samples = 0;
  std::int64_t local_samples = 0;
  double mean_profit = 0;
  double std_profit = 0;
  double elapsed_seconds = 0;
};

inline constexpr const char* kMetricsHeader = "epoch,joint_samples,local_samples,mean_profit,std_profit,elapsed_seconds";

inline void write_metrics_header(std::ostream& os) { os << kMetricsHeader << '\n'; }

inline void write_metrics_row(std::ostream& os, const MetricsRow& r) {
  std::ostringstream ss;
  ss.precision(10);
  ss << r.epoch << ',' << r.joint_samples << ',' << r.local_samples << ',' << r.mean_profit << ',' << r.std_profit
     << ',' << r.elapsed_seconds << '\n';
  os << ss.str();
}

inline std::vector<MetricsRow> read_metrics_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line) || line != kMetricsHeader)
    throw ParseError(std::string("expected header '") + kMetricsHeader + "'", lineno);
  std::vector<MetricsRow> rows;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    MetricsRow r;
    if (!(ss >> r.epoch >> r.joint_samples >> r.local_samples >> r.mean_profit >> r.std_profit >> r.elapsed_seconds))
      throw ParseError("malformed metrics row", lineno);
    rows.push_back(r);
  }
  return rows;
}

struct TrainResult {
  std::vector<MetricsRow> metrics;
  SampleCounter samples;
  std::vector<double> context_model_mse;  // per epoch, predictor modes only
};

using MetricsCallback = std::function<void(const MetricsRow&)>;

namespace detail {

class EpochLoop {
 public:
  EpochLoop(const Scenario& sc, const TrainConfig& cfg, const ActorCritic& ac, std::uint64_t seed,
            TrainResult& result, MetricsCallback cb)
      : sc_(sc), cfg_(cfg), ac_(ac), seed_(seed), result_(result), cb_(std::move(cb)),
        t0_(std::chrono::steady_clock::now()) {}

  bool more(int epoch) const {
    if (epoch >= cfg_.epochs) return false;
    return cfg_.sample_budget == 0 || result_.samples.total() < cfg_.sample_budget;
  }

  // Config for the next update, with the learning rate annealed if enabled.
  TrainConfig update_config(int epoch) const {
    TrainConfig c = cfg_;
    if (!cfg_.lr_anneal) return c;
    double progress = cfg_.sample_budget > 0 ? double(result_.samples.total()) / double(cfg_.sample_budget)
                                             : double(epoch - 1) / double(std::max(cfg_.epochs, 1));
    c.lr = cfg_.lr * std::max(0.0, 1.0 - progress);
    return c;
  }

  void report(int epoch, bool force) {
    if (!force && epoch % cfg_.eval_interval != 0) return;
    const auto stats = evaluate(sc_, ac_, cfg_.eval_episodes, seed_);
    MetricsRow r;
    r.epoch = epoch;
    r.joint_samples = result_.samples.joint;
    r.local_samples = result_.samples.local;
    r.mean_profit = stats.mean;
    r.std_profit = stats.std;
    r.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    last_reported_ = epoch;
    result_.metrics.push_back(r);
    if (cb_) cb_(r);
  }

  void finish(int epoch) {
    if (last_reported_ != epoch) report(epoch, true);
  }

 private:
  const Scenario& sc_;
  const TrainConfig& cfg_;
  const ActorCritic& ac_;
  std::uint64_t seed_;
  TrainResult& result_;
  MetricsCallback cb_;
  std::chrono::steady_clock::time_point t0_;
  int last_reported_ = -1;
};

}  // namespace detail

struct ContextDynamics {
  std::vector<JointEpisode> episodes;
  std::vector<std::vector<ContextTrajectory>> trajectories;  // [agent][episode]
};

// `episodes` joint episodes with the current shared policy, their per-agent
// context complements, and n * T counted samples each.
inline ContextDynamics get_context_dynamics(const Scenario& sc, const ActorCritic& ac, const TrainConfig& cfg,
                                            std::size_t episodes, std::uint64_t seed, SampleCounter& counter) {
  const int T = sc.store.horizon;
  const std::size_t E = episodes;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, sc.train_length() - std::size_t(T));
  std::vector<std::size_t> starts(E);
  std::vector<std::uint64_t> lead(E), act(E);
  for (std::size_t e = 0; e < E; ++e) {
    starts[e] = pick(rng);
    lead[e] = rng();
    act[e] = rng();
  }
  ContextDynamics cd;
  cd.episodes.resize(E);
  parallel_for(E, cfg.workers, [&](std::size_t e) {
    cd.episodes[e] = run_joint_episode(sc, ac, starts[e], lead[e], act[e], cfg.reward_mode);
  });
  cd.trajectories.assign(sc.n(), {});
  for (std::size_t i = 0; i < sc.n(); ++i)
    for (const auto& ep : cd.episodes) cd.trajectories[i].push_back(extract_context(ep.record, i));
  counter.add_joint(sc.n(), std::int64_t(E) * T);
  return cd;
}

// Local rollout of one agent against a bound trajectory followed by a PPO
// update of the shared parameters.
inline UpdateStats decentralized_ppo(const Scenario& sc, ActorCritic& ac, const TrainConfig& cfg, std::size_t agent,
                                     const ContextTrajectory& traj, std::size_t start, std::uint64_t seed,
                                     SampleCounter& counter) {
  std::mt19937_64 rng(seed);
  const std::uint64_t lead_seed = rng(), act_seed = rng();
  std::vector<Segment> segs;
  segs.push_back(run_local_episode(sc, ac, agent, traj, start, lead_seed, act_seed));
  counter.add_local(std::int64_t(segs.back().steps()));
  return ppo_update(ac, segs, cfg, rng);
}

// Context-aware decentralized PPO.
inline TrainResult cd_ppo(const Scenario& sc, const TrainConfig& cfg, const ContextConfig& ctx, ActorCritic& ac,
                          std::uint64_t seed, MetricsCallback cb = {}) {
  sc.validate();
  cfg.validate();
  ctx.validate();
  TrainResult res;
  detail::EpochLoop loop(sc, cfg, ac, seed, res, std::move(cb));
  std::mt19937_64 rng(derive_seed(seed, 0xcd));
  std::optional<ContextModel> predictor;
  if (ctx.augment.uses_predictor()) {
    predictor.emplace(ctx.model, sc.store.capacity);
    predictor->initialize(rng);
  }
  const int T = sc.store.horizon;
  std::uniform_int_distribution<std::size_t> pick(0, sc.train_length() - std::size_t(T));

  loop.report(0, true);
  int epoch = 0;
  while (loop.more(epoch)) {
    ++epoch;
    const std::size_t joint_envs = std::size_t(ctx.joint_envs > 0 ? ctx.joint_envs : cfg.parallel_envs);
    auto cd = get_context_dynamics(sc, ac, cfg, joint_envs, rng(), res.samples);
    if (predictor) {
      std::vector<ContextTrajectory> all;
      for (const auto& per_agent : cd.trajectories) all.insert(all.end(), per_agent.begin(), per_agent.end());
      res.context_model_mse.push_back(predictor->train(all, rng));
    }
    const std::size_t L = std::min<std::size_t>(std::size_t(ctx.local_envs), cd.episodes.size());
    for (int k = 0; k < cfg.inner_rounds; ++k) {
      struct Job {
        std::size_t agent, episode, start;
        ContextTrajectory traj;
        std::uint64_t lead_seed, act_seed;
      };
      std::vector<Job> jobs;
      for (std::size_t i = 0; i < sc.n(); ++i)
        for (std::size_t e = 0; e < L; ++e) {
          Job j{i, e, cd.episodes[e].start, {}, cd.episodes[e].lead_seed, rng()};
          j.traj = augment(cd.trajectories[i][e], ctx.augment, sc.store.capacity,
                           predictor ? &*predictor : nullptr, rng);
          if (ctx.fresh_local_windows) {
            j.start = pick(rng);
            j.lead_seed = rng();
          }
          jobs.push_back(std::move(j));
        }
      std::vector<Segment> segs(jobs.size());
      parallel_for(jobs.size(), cfg.workers, [&](std::size_t k2) {
        const auto& j = jobs[k2];
        segs[k2] = run_local_episode(sc, ac, j.agent, j.traj, j.start, j.lead_seed, j.act_seed);
      });
      for (const auto& s : segs) res.samples.add_local(std::int64_t(s.steps()));
      if (k == 0 && cfg.train_with_joint_data)
        for (auto& ep : cd.episodes)
          for (auto& s : ep.segments) segs.push_back(std::move(s));
      ppo_update(ac, segs, loop.update_config(epoch), rng);
    }
    loop.report(epoch, false);
  }
  loop.finish(epoch);
  return res;
}

// Independent PPO: every update uses joint-simulator experience only.
inline TrainResult ippo_train(const Scenario& sc, const TrainConfig& cfg, ActorCritic& ac, std::uint64_t seed,
                              MetricsCallback cb = {}) {
  sc.validate();
  cfg.validate();
  TrainResult res;
  detail::EpochLoop loop(sc, cfg, ac, seed, res, std::move(cb));
  std::mt19937_64 rng(derive_seed(seed, 0x1990));
  loop.report(0, true);
  int epoch = 0;
  while (loop.more(epoch)) {
    ++epoch;
    auto cd = get_context_dynamics(sc, ac, cfg, std::size_t(cfg.parallel_envs), rng(), res.samples);
    std::vector<Segment> segs;
    for (auto& ep : cd.episodes)
      for (auto& s : ep.segments) segs.push_back(std::move(s));
    ppo_update(ac, segs, loop.update_config(epoch), rng);
    loop.report(epoch, false);
  }
  loop.finish(epoch);
  return res;
}

}  // namespace srsg
