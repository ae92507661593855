#pragma once

// Shared policy and value networks. One ActorCritic instance serves every
// agent (parameter sharing), either feed-forward or recurrent.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "srsg/agent_io.hpp"
#include "srsg/errors.hpp"
#include "srsg/nn.hpp"

namespace srsg {

enum class NetworkKind { fc, rnn };

inline std::string to_string(NetworkKind k) { return k == NetworkKind::fc ? "fc" : "rnn"; }
inline NetworkKind parse_network_kind(const std::string& s) {
  if (s == "fc") return NetworkKind::fc;
  if (s == "rnn") return NetworkKind::rnn;
  throw ConfigError("network must be 'fc' or 'rnn', got '" + s + "'");
}

// fc:  in -> hidden -> hidden -> out (tanh MLP)
// rnn: LSTM(in -> hidden), then hidden -> hidden -> out
class Network {
 public:
  // A contiguous run of observations starting from a stored recurrent state.
  struct Chunk {
    std::span<const double> obs;     // len x input
    std::span<const double> state0;  // state_size(); empty for fc
  };

  struct Cache {
    std::vector<std::size_t> lengths;
    std::vector<nn::LstmCache> lstm;
    nn::MlpCache head;
    std::span<const double> output() const { return head.output(); }
  };

  Network() = default;
  Network(NetworkKind kind, std::size_t input, std::size_t hidden, std::size_t output)
      : kind_(kind), input_(input), hidden_(hidden) {
    if (kind == NetworkKind::fc) {
      head_ = nn::Mlp({input, hidden, hidden, output});
    } else {
      lstm_ = nn::Lstm(input, hidden);
      head_ = nn::Mlp({hidden, hidden, output});
    }
  }

  NetworkKind kind() const { return kind_; }
  std::size_t input_size() const { return input_; }
  std::size_t output_size() const { return head_.output_size(); }
  std::size_t lstm_params() const { return kind_ == NetworkKind::rnn ? lstm_.param_count() : 0; }
  std::size_t param_count() const { return lstm_params() + head_.param_count(); }
  std::size_t state_size() const { return kind_ == NetworkKind::rnn ? 2 * hidden_ : 0; }

  std::string shape_text() const {
    std::string s = to_string(kind_) + " " + std::to_string(input_) + " " + std::to_string(hidden_) + " " +
                    std::to_string(output_size());
    return s;
  }

  template <class Rng>
  std::vector<double> init(Rng& rng, double out_gain) const {
    std::vector<double> p;
    if (kind_ == NetworkKind::rnn) p = lstm_.init(rng);
    const auto h = head_.init(rng, out_gain);
    p.insert(p.end(), h.begin(), h.end());
    return p;
  }

  // One step for a batch of independent rows. state (batch x state_size) is
  // advanced in place.
  std::vector<double> step(std::span<const double> params, std::span<const double> obs, std::size_t batch,
                           std::span<double> state = {}) const {
    if (kind_ == NetworkKind::fc) {
      auto c = head_.forward(params, obs, batch);
      return {c.output().begin(), c.output().end()};
    }
    if (state.size() != batch * state_size()) throw ContractError("Network::step: state shape mismatch");
    std::vector<double> hidden(batch * hidden_);
    for (std::size_t b = 0; b < batch; ++b) {
      auto st = state.subspan(b * state_size(), state_size());
      auto c = lstm_.forward(params.first(lstm_params()), obs.subspan(b * input_, input_), st.first(hidden_),
                             st.subspan(hidden_));
      std::copy(c.hs.begin() + std::ptrdiff_t(hidden_), c.hs.end(), st.begin());
      std::copy(c.cs.begin() + std::ptrdiff_t(hidden_), c.cs.end(), st.begin() + std::ptrdiff_t(hidden_));
      std::copy(c.hs.begin() + std::ptrdiff_t(hidden_), c.hs.end(), hidden.begin() + std::ptrdiff_t(b * hidden_));
    }
    auto c = head_.forward(params.subspan(lstm_params()), hidden, batch);
    return {c.output().begin(), c.output().end()};
  }

  // Outputs for every observation of every chunk, in order.
  Cache forward(std::span<const double> params, std::span<const Chunk> chunks) const {
    if (params.size() != param_count()) throw ContractError("Network::forward: parameter count mismatch");
    Cache cache;
    std::size_t rows = 0;
    for (const auto& ch : chunks) {
      cache.lengths.push_back(ch.obs.size() / input_);
      rows += cache.lengths.back();
    }
    if (kind_ == NetworkKind::fc) {
      std::vector<double> x;
      x.reserve(rows * input_);
      for (const auto& ch : chunks) x.insert(x.end(), ch.obs.begin(), ch.obs.end());
      cache.head = head_.forward(params, x, rows);
      return cache;
    }
    std::vector<double> hidden;
    hidden.reserve(rows * hidden_);
    for (const auto& ch : chunks) {
      if (ch.state0.size() != state_size()) throw ContractError("Network::forward: chunk state missing");
      cache.lstm.push_back(lstm_.forward(params.first(lstm_params()), ch.obs, ch.state0.first(hidden_),
                                         ch.state0.subspan(hidden_)));
      const auto& c = cache.lstm.back();
      hidden.insert(hidden.end(), c.hs.begin() + std::ptrdiff_t(hidden_), c.hs.end());
    }
    cache.head = head_.forward(params.subspan(lstm_params()), hidden, rows);
    return cache;
  }

  void backward(std::span<const double> params, const Cache& cache, std::span<const double> dout,
                std::span<double> grad) const {
    if (kind_ == NetworkKind::fc) {
      head_.backward(params, cache.head, dout, grad);
      return;
    }
    std::vector<double> dhidden(cache.head.batch * hidden_);
    head_.backward(params.subspan(lstm_params()), cache.head, dout, grad.subspan(lstm_params()), dhidden);
    std::size_t row = 0;
    for (std::size_t k = 0; k < cache.lstm.size(); ++k) {
      const std::size_t len = cache.lengths[k];
      lstm_.backward(params.first(lstm_params()), cache.lstm[k],
                     std::span<const double>(dhidden).subspan(row * hidden_, len * hidden_),
                     grad.first(lstm_params()));
      row += len;
    }
  }

 private:
  NetworkKind kind_ = NetworkKind::fc;
  std::size_t input_ = 0, hidden_ = 0;
  nn::Lstm lstm_;
  nn::Mlp head_;
};

struct AgentConfig {
  NetworkKind network = NetworkKind::fc;
  std::size_t hidden = 64;
  double policy_out_gain = 0.01;
};

class ActorCritic {
 public:
  ActorCritic(const AgentConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        policy_(cfg.network, obs::kSize, cfg.hidden, kNumActions),
        value_(cfg.network, obs::kSize, cfg.hidden, 1) {
    std::mt19937_64 rng(seed);
    policy_params = nn::ParamSet(policy_.init(rng, cfg.policy_out_gain));
    value_params = nn::ParamSet(value_.init(rng, 1.0));
  }

  const AgentConfig& config() const { return cfg_; }
  const Network& policy() const { return policy_; }
  const Network& value() const { return value_; }

  std::vector<nn::ParamBlock> checkpoint_blocks() const {
    return {{"policy", policy_.shape_text(), policy_params.values}, {"value", value_.shape_text(), value_params.values}};
  }

  void load_blocks(const std::vector<nn::ParamBlock>& blocks) {
    for (const auto& b : blocks) {
      nn::ParamSet* target = b.name == "policy" ? &policy_params : b.name == "value" ? &value_params : nullptr;
      const Network* net = b.name == "policy" ? &policy_ : &value_;
      if (!target) throw ParseError("unknown checkpoint block '" + b.name + "'");
      if (b.shape != net->shape_text() || b.values.size() != net->param_count())
        throw ParseError("checkpoint block '" + b.name + "' has shape '" + b.shape + "', expected '" +
                         net->shape_text() + "'");
      *target = nn::ParamSet(b.values);
    }
  }

  nn::ParamSet policy_params;
  nn::ParamSet value_params;

 private:
  AgentConfig cfg_;
  Network policy_;
  Network value_;
};

}  // namespace srsg
