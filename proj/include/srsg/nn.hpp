#pragma once

// Dense networks with hand-written reverse mode: tanh MLPs, a single-layer
// LSTM, Adam and a categorical head. Everything is double precision and
// operates on flat parameter vectors so that blocks can be sliced with spans.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "srsg/errors.hpp"

namespace srsg::nn {

// Flat parameters plus Adam state.
struct ParamSet {
  std::vector<double> values;
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t step = 0;

  ParamSet() = default;
  explicit ParamSet(std::vector<double> vals)
      : values(std::move(vals)), m(values.size(), 0.0), v(values.size(), 0.0) {}

  std::size_t size() const { return values.size(); }
  bool operator==(const ParamSet&) const = default;
};

// ---------------------------------------------------------------------------
// MLP: tanh hidden layers, linear output. Layer l stores W as [in][out]
// followed by b[out].

struct MlpCache {
  std::size_t batch = 0;
  std::vector<std::vector<double>> acts;  // acts[0] is the input, acts.back() the output

  std::span<const double> output() const { return acts.back(); }
};

class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw ContractError("Mlp: need at least input and output sizes");
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
      w_off_.push_back(off);
      off += dims_[l] * dims_[l + 1];
      b_off_.push_back(off);
      off += dims_[l + 1];
    }
    count_ = off;
  }

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t input_size() const { return dims_.front(); }
  std::size_t output_size() const { return dims_.back(); }
  std::size_t param_count() const { return count_; }
  std::size_t layers() const { return dims_.size() - 1; }

  // Glorot-uniform weights, zero biases; the output layer is scaled by
  // out_gain (small for policy heads so the initial policy is near uniform).
  template <class Rng>
  std::vector<double> init(Rng& rng, double out_gain = 1.0) const {
    std::vector<double> p(count_, 0.0);
    for (std::size_t l = 0; l < layers(); ++l) {
      const double a = std::sqrt(6.0 / double(dims_[l] + dims_[l + 1])) *
                       (l + 1 == layers() ? out_gain : 1.0);
      std::uniform_real_distribution<double> u(-a, a);
      for (std::size_t k = 0; k < dims_[l] * dims_[l + 1]; ++k) p[w_off_[l] + k] = u(rng);
    }
    return p;
  }

  MlpCache forward(std::span<const double> params, std::span<const double> input,
                   std::size_t batch) const {
    if (params.size() != count_) throw ContractError("Mlp::forward: parameter count mismatch");
    if (input.size() != batch * input_size()) throw ContractError("Mlp::forward: input shape mismatch");
    MlpCache c;
    c.batch = batch;
    c.acts.reserve(dims_.size());
    c.acts.emplace_back(input.begin(), input.end());
    for (std::size_t l = 0; l < layers(); ++l) {
      const std::size_t in = dims_[l], out = dims_[l + 1];
      const double* W = params.data() + w_off_[l];
      const double* b = params.data() + b_off_[l];
      const std::vector<double>& x = c.acts[l];
      std::vector<double> y(batch * out);
      for (std::size_t r = 0; r < batch; ++r) {
        double* yr = y.data() + r * out;
        std::copy(b, b + out, yr);
        const double* xr = x.data() + r * in;
        for (std::size_t i = 0; i < in; ++i) {
          const double xi = xr[i];
          const double* Wi = W + i * out;
          for (std::size_t o = 0; o < out; ++o) yr[o] += xi * Wi[o];
        }
      }
      if (l + 1 < layers())
        for (double& v : y) v = std::tanh(v);
      c.acts.push_back(std::move(y));
    }
    return c;
  }

  // Accumulates dLoss/dparams into grad. If dinput is non-empty it receives
  // dLoss/dinput (batch x input_size).
  void backward(std::span<const double> params, const MlpCache& c, std::span<const double> dout,
                std::span<double> grad, std::span<double> dinput = {}) const {
    if (grad.size() != count_) throw ContractError("Mlp::backward: gradient size mismatch");
    if (dout.size() != c.batch * output_size()) throw ContractError("Mlp::backward: dout shape mismatch");
    const std::size_t batch = c.batch;
    std::vector<double> delta(dout.begin(), dout.end());
    for (std::size_t l = layers(); l-- > 0;) {
      const std::size_t in = dims_[l], out = dims_[l + 1];
      if (l + 1 < layers()) {
        const std::vector<double>& a = c.acts[l + 1];
        for (std::size_t k = 0; k < delta.size(); ++k) delta[k] *= 1.0 - a[k] * a[k];
      }
      const double* W = params.data() + w_off_[l];
      double* gW = grad.data() + w_off_[l];
      double* gb = grad.data() + b_off_[l];
      const std::vector<double>& x = c.acts[l];
      const bool need_prev = l > 0 || !dinput.empty();
      std::vector<double> prev(need_prev ? batch * in : 0, 0.0);
      for (std::size_t r = 0; r < batch; ++r) {
        const double* dr = delta.data() + r * out;
        const double* xr = x.data() + r * in;
        for (std::size_t o = 0; o < out; ++o) gb[o] += dr[o];
        for (std::size_t i = 0; i < in; ++i) {
          const double xi = xr[i];
          double* gWi = gW + i * out;
          for (std::size_t o = 0; o < out; ++o) gWi[o] += xi * dr[o];
        }
        if (need_prev) {
          double* pr = prev.data() + r * in;
          for (std::size_t i = 0; i < in; ++i) {
            const double* Wi = W + i * out;
            double s = 0;
            for (std::size_t o = 0; o < out; ++o) s += Wi[o] * dr[o];
            pr[i] = s;
          }
        }
      }
      if (l == 0) {
        if (!dinput.empty()) std::copy(prev.begin(), prev.end(), dinput.begin());
      } else {
        delta = std::move(prev);
      }
    }
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::size_t> w_off_, b_off_;
  std::size_t count_ = 0;
};

// ---------------------------------------------------------------------------
// Single-layer LSTM. Parameters: W as [(input + hidden)][4 * hidden] with gate
// blocks ordered (input, forget, cell, output), followed by b[4 * hidden].

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct LstmCache {
  std::size_t steps = 0;
  std::vector<double> xs;     // steps x input
  std::vector<double> hs;     // (steps + 1) x hidden, hs[0] = h0
  std::vector<double> cs;     // (steps + 1) x hidden
  std::vector<double> gates;  // steps x 4 hidden, post-activation
  std::vector<double> tanh_c; // steps x hidden

  std::span<const double> hidden(std::size_t t) const;  // h after step t (0-based)
};

class Lstm {
 public:
  Lstm() = default;
  Lstm(std::size_t input, std::size_t hidden) : in_(input), h_(hidden) {}

  std::size_t input_size() const { return in_; }
  std::size_t hidden_size() const { return h_; }
  std::size_t param_count() const { return (in_ + h_) * 4 * h_ + 4 * h_; }

  template <class Rng>
  std::vector<double> init(Rng& rng) const {
    std::vector<double> p(param_count(), 0.0);
    const double a = 1.0 / std::sqrt(double(h_));
    std::uniform_real_distribution<double> u(-a, a);
    for (std::size_t k = 0; k < (in_ + h_) * 4 * h_; ++k) p[k] = u(rng);
    for (std::size_t j = 0; j < h_; ++j) p[(in_ + h_) * 4 * h_ + h_ + j] = 1.0;  // forget bias
    return p;
  }

  LstmCache forward(std::span<const double> params, std::span<const double> xs,
                    std::span<const double> h0 = {}, std::span<const double> c0 = {}) const {
    if (params.size() != param_count()) throw ContractError("Lstm::forward: parameter count mismatch");
    if (xs.empty() || xs.size() % in_ != 0) throw ContractError("Lstm::forward: empty or misshapen sequence");
    const std::size_t T = xs.size() / in_, G = 4 * h_, K = in_ + h_;
    LstmCache c;
    c.steps = T;
    c.xs.assign(xs.begin(), xs.end());
    c.hs.assign((T + 1) * h_, 0.0);
    c.cs.assign((T + 1) * h_, 0.0);
    if (!h0.empty()) std::copy(h0.begin(), h0.end(), c.hs.begin());
    if (!c0.empty()) std::copy(c0.begin(), c0.end(), c.cs.begin());
    c.gates.assign(T * G, 0.0);
    c.tanh_c.assign(T * h_, 0.0);
    const double* W = params.data();
    const double* b = params.data() + K * G;
    std::vector<double> z(G);
    for (std::size_t t = 0; t < T; ++t) {
      std::copy(b, b + G, z.begin());
      for (std::size_t k = 0; k < K; ++k) {
        const double v = k < in_ ? xs[t * in_ + k] : c.hs[t * h_ + (k - in_)];
        const double* Wk = W + k * G;
        for (std::size_t g = 0; g < G; ++g) z[g] += v * Wk[g];
      }
      double* gt = c.gates.data() + t * G;
      for (std::size_t j = 0; j < h_; ++j) {
        gt[j] = sigmoid(z[j]);
        gt[h_ + j] = sigmoid(z[h_ + j]);
        gt[2 * h_ + j] = std::tanh(z[2 * h_ + j]);
        gt[3 * h_ + j] = sigmoid(z[3 * h_ + j]);
        const double cprev = c.cs[t * h_ + j];
        const double cn = gt[h_ + j] * cprev + gt[j] * gt[2 * h_ + j];
        c.cs[(t + 1) * h_ + j] = cn;
        const double tc = std::tanh(cn);
        c.tanh_c[t * h_ + j] = tc;
        c.hs[(t + 1) * h_ + j] = gt[3 * h_ + j] * tc;
      }
    }
    return c;
  }

  // Backpropagation through time. dh holds dLoss/dh_t for every step
  // (steps x hidden); optional dh_last/dc_last add gradient at the final
  // state. Accumulates into grad; fills dx, dh0, dc0 when non-empty.
  void backward(std::span<const double> params, const LstmCache& c, std::span<const double> dh,
                std::span<double> grad, std::span<double> dx = {}, std::span<double> dh0 = {},
                std::span<double> dc0 = {}, std::span<const double> dh_last = {},
                std::span<const double> dc_last = {}) const {
    const std::size_t T = c.steps, G = 4 * h_, K = in_ + h_;
    if (grad.size() != param_count()) throw ContractError("Lstm::backward: gradient size mismatch");
    if (dh.size() != T * h_) throw ContractError("Lstm::backward: dh shape mismatch");
    const double* W = params.data();
    double* gW = grad.data();
    double* gb = grad.data() + K * G;
    std::vector<double> dh_next(h_, 0.0), dc_next(h_, 0.0), dz(G), dcat(K);
    if (!dh_last.empty()) std::copy(dh_last.begin(), dh_last.end(), dh_next.begin());
    if (!dc_last.empty()) std::copy(dc_last.begin(), dc_last.end(), dc_next.begin());
    for (std::size_t t = T; t-- > 0;) {
      const double* gt = c.gates.data() + t * G;
      for (std::size_t j = 0; j < h_; ++j) {
        const double i = gt[j], f = gt[h_ + j], g = gt[2 * h_ + j], o = gt[3 * h_ + j];
        const double tc = c.tanh_c[t * h_ + j];
        const double dht = dh[t * h_ + j] + dh_next[j];
        const double dct = dc_next[j] + dht * o * (1.0 - tc * tc);
        dz[j] = dct * g * i * (1.0 - i);
        dz[h_ + j] = dct * c.cs[t * h_ + j] * f * (1.0 - f);
        dz[2 * h_ + j] = dct * i * (1.0 - g * g);
        dz[3 * h_ + j] = dht * tc * o * (1.0 - o);
        dc_next[j] = dct * f;
      }
      for (std::size_t g = 0; g < G; ++g) gb[g] += dz[g];
      for (std::size_t k = 0; k < K; ++k) {
        const double v = k < in_ ? c.xs[t * in_ + k] : c.hs[t * h_ + (k - in_)];
        const double* Wk = W + k * G;
        double* gWk = gW + k * G;
        double s = 0;
        for (std::size_t g = 0; g < G; ++g) {
          gWk[g] += v * dz[g];
          s += Wk[g] * dz[g];
        }
        dcat[k] = s;
      }
      if (!dx.empty())
        for (std::size_t k = 0; k < in_; ++k) dx[t * in_ + k] = dcat[k];
      for (std::size_t j = 0; j < h_; ++j) dh_next[j] = dcat[in_ + j];
    }
    if (!dh0.empty()) std::copy(dh_next.begin(), dh_next.end(), dh0.begin());
    if (!dc0.empty()) std::copy(dc_next.begin(), dc_next.end(), dc0.begin());
  }

 private:
  std::size_t in_ = 0, h_ = 0;
};

inline std::span<const double> LstmCache::hidden(std::size_t t) const {
  const std::size_t h = hs.size() / (steps + 1);
  return std::span<const double>(hs).subspan((t + 1) * h, h);
}

// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 0.00025;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

inline void adam_update(ParamSet& p, std::span<const double> grad, const AdamConfig& cfg) {
  if (grad.size() != p.size()) throw ContractError("adam_update: gradient size mismatch");
  for (double g : grad)
    if (!std::isfinite(g)) throw TrainingError("adam_update: non-finite gradient");
  ++p.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, double(p.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, double(p.step));
  for (std::size_t k = 0; k < p.size(); ++k) {
    p.m[k] = cfg.beta1 * p.m[k] + (1.0 - cfg.beta1) * grad[k];
    p.v[k] = cfg.beta2 * p.v[k] + (1.0 - cfg.beta2) * grad[k] * grad[k];
    const double mhat = p.m[k] / c1;
    const double vhat = p.v[k] / c2;
    p.values[k] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

// Rescales grad in place so its L2 norm is at most max_norm; returns the
// norm before clipping.
inline double clip_grad_norm(std::span<double> grad, double max_norm) {
  double ss = 0;
  for (double g : grad) ss += g * g;
  const double norm = std::sqrt(ss);
  if (max_norm > 0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (double& g : grad) g *= s;
  }
  return norm;
}

// ---------------------------------------------------------------------------
// Categorical distribution over logits.

namespace categorical {

inline double log_sum_exp(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double s = 0;
  for (double z : logits) s += std::exp(z - mx);
  return mx + std::log(s);
}

inline std::vector<double> probabilities(std::span<const double> logits) {
  const double lse = log_sum_exp(logits);
  std::vector<double> p(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) p[k] = std::exp(logits[k] - lse);
  return p;
}

inline double log_prob(std::span<const double> logits, std::size_t action) {
  return logits[action] - log_sum_exp(logits);
}

inline double entropy(std::span<const double> logits) {
  const double lse = log_sum_exp(logits);
  double h = 0;
  for (double z : logits) {
    const double lp = z - lse;
    const double p = std::exp(lp);
    if (p > 0) h -= p * lp;
  }
  return h;
}

// dH/dlogits = -p_k (log p_k + H)
inline void entropy_grad(std::span<const double> logits, double scale, std::span<double> out) {
  const double lse = log_sum_exp(logits);
  const double h = entropy(logits);
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const double lp = logits[k] - lse;
    const double p = std::exp(lp);
    out[k] += p > 0 ? -scale * p * (lp + h) : 0.0;
  }
}

// Inverse-CDF sample given u in [0, 1).
inline std::size_t sample(std::span<const double> logits, double u) {
  const auto p = probabilities(logits);
  double acc = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    acc += p[k];
    if (u < acc) return k;
  }
  for (std::size_t k = p.size(); k-- > 0;)
    if (p[k] > 0) return k;
  return p.size() - 1;
}

template <class Rng>
std::size_t sample(std::span<const double> logits, Rng& rng) {
  return sample(logits, double(rng() >> 11) * 0x1.0p-53);
}

inline std::size_t argmax(std::span<const double> logits) {
  return std::size_t(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

}  // namespace categorical

// ---------------------------------------------------------------------------
// Checkpoints: <prefix>.bin holds the raw doubles of every block back to back,
// <prefix>.manifest lists the blocks as text.
//
//   srsg-params 1
//   block <name> <count> <shape tokens...>

struct ParamBlock {
  std::string name;
  std::string shape;  // free text, e.g. "mlp 51 64 64 15"
  std::vector<double> values;
  bool operator==(const ParamBlock&) const = default;
};

namespace detail {
inline void write_atomically(const std::filesystem::path& path, const std::string& bytes,
                             bool binary) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, binary ? std::ios::binary : std::ios::out);
    if (!os) throw ConfigError("cannot write " + tmp.string());
    os.write(bytes.data(), std::streamsize(bytes.size()));
    if (!os) throw ConfigError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}
}  // namespace detail

inline void save_checkpoint(const std::filesystem::path& prefix, const std::vector<ParamBlock>& blocks) {
  std::ostringstream manifest;
  manifest << "srsg-params 1\n";
  std::string bin;
  for (const auto& b : blocks) {
    manifest << "block " << b.name << ' ' << b.values.size() << ' ' << b.shape << '\n';
    bin.append(reinterpret_cast<const char*>(b.values.data()), b.values.size() * sizeof(double));
  }
  auto bin_path = prefix;
  bin_path += ".bin";
  auto man_path = prefix;
  man_path += ".manifest";
  detail::write_atomically(bin_path, bin, true);
  detail::write_atomically(man_path, manifest.str(), false);
}

inline std::vector<ParamBlock> load_checkpoint(const std::filesystem::path& prefix) {
  auto bin_path = prefix;
  bin_path += ".bin";
  auto man_path = prefix;
  man_path += ".manifest";
  std::ifstream man(man_path);
  if (!man) throw ParseError("cannot open " + man_path.string());
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(man, line) || line != "srsg-params 1")
    throw ParseError("bad checkpoint manifest header", lineno);
  std::vector<ParamBlock> blocks;
  std::size_t total = 0;
  while (std::getline(man, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string tag;
    ParamBlock b;
    std::size_t count = 0;
    if (!(ss >> tag >> b.name >> count) || tag != "block") throw ParseError("bad block line", lineno);
    std::getline(ss >> std::ws, b.shape);
    b.values.resize(count);
    total += count;
    blocks.push_back(std::move(b));
  }
  std::ifstream bin(bin_path, std::ios::binary);
  if (!bin) throw ParseError("cannot open " + bin_path.string());
  for (auto& b : blocks)
    bin.read(reinterpret_cast<char*>(b.values.data()), std::streamsize(b.values.size() * sizeof(double)));
  if (!bin) throw ParseError("checkpoint binary shorter than manifest (" + std::to_string(total) + " values)");
  bin.peek();
  if (!bin.eof()) throw ParseError("checkpoint binary longer than manifest");
  return blocks;
}

}  // namespace srsg::nn
