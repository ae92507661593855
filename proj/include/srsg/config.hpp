#pragma once

// Experiment configuration: a YAML document with nested tables. Every value
// error names the offending field path, e.g. "train.lr: expected a number".
// Requires yaml-cpp.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "srsg/baselines.hpp"
#include "srsg/context.hpp"
#include "srsg/data.hpp"
#include "srsg/errors.hpp"
#include "srsg/inventory.hpp"
#include "srsg/policy.hpp"
#include "srsg/trainer.hpp"

namespace srsg {

struct DataConfig {
  enum class Source { synthetic, csv };
  Source source = Source::synthetic;
  std::string path;  // csv only
  std::size_t length = 400;
  std::size_t test_length = 100;
  std::uint64_t seed = 1;
  DemandPattern pattern;
};

struct ObservationConfig {
  bool normalize = true;
  bool context = true;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  std::string output_dir = "runs";

  std::size_t n = 5;
  Units capacity = 100;
  OverflowMode overflow_mode = OverflowMode::strict;
  int horizon = 100;
  std::vector<Units> initial_stock;  // empty: floor(capacity / 2n) each

  SkuRanges sku_ranges;
  std::uint64_t sku_seed = 7;
  std::vector<SkuConfig> skus;  // explicit list overrides sampling

  DataConfig data;
  ObservationConfig observation;
  AgentConfig agent;
  TrainConfig train;
  ContextConfig context;
  BaselineConfig baseline;

  void validate() const {
    if (seeds.empty()) throw ConfigError("seeds: must list at least one seed");
    if (n < 1) throw ConfigError("store.n: must be >= 1");
    if (capacity <= 0) throw ConfigError("store.capacity: must be > 0");
    if (horizon < 1) throw ConfigError("store.horizon: must be >= 1");
    if (!initial_stock.empty() && initial_stock.size() != n)
      throw ConfigError("store.initial_stock: expected " + std::to_string(n) + " entries");
    if (!skus.empty() && skus.size() != n) throw ConfigError("skus: expected " + std::to_string(n) + " entries");
    for (std::size_t i = 0; i < skus.size(); ++i) skus[i].validate("skus[" + std::to_string(i) + "]");
    sku_ranges.validate();
    if (data.source == DataConfig::Source::csv && data.path.empty()) throw ConfigError("data.path: required for csv");
    if (data.source == DataConfig::Source::synthetic && data.length <= data.test_length)
      throw ConfigError("data.test_length: must be shorter than data.length");
    if (data.test_length < 1) throw ConfigError("data.test_length: must be >= 1");
    if (agent.hidden < 1) throw ConfigError("agent.hidden: must be >= 1");
    train.validate();
    context.validate();
    baseline.validate();
  }
};

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// A YAML mapping with its field path; rejects keys nobody asked for.
class Table {
 public:
  Table(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap())
      throw ConfigError((path_.empty() ? std::string("<root>") : path_) + ": expected a table");
  }

  bool has(const std::string& key) const { return node_ && node_.IsMap() && node_[key]; }
  std::string path(const std::string& key) const { return join_path(path_, key); }

  template <class T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!has(key)) return;
    out = convert<T>(node_[key], path(key));
  }

  template <class T>
  void get_list(const std::string& key, std::vector<T>& out) {
    seen_.insert(key);
    if (!has(key)) return;
    const YAML::Node v = node_[key];
    if (!v.IsSequence()) throw ConfigError(path(key) + ": expected a list");
    out.clear();
    for (std::size_t k = 0; k < v.size(); ++k)
      out.push_back(convert<T>(v[k], path(key) + "[" + std::to_string(k) + "]"));
  }

  // [min, max] pair or a single number.
  void get_range(const std::string& key, Range& out) {
    seen_.insert(key);
    if (!has(key)) return;
    const YAML::Node v = node_[key];
    if (v.IsScalar()) {
      out.lo = out.hi = convert<double>(v, path(key));
      return;
    }
    if (!v.IsSequence() || v.size() != 2) throw ConfigError(path(key) + ": expected [min, max] or a number");
    out.lo = convert<double>(v[0], path(key) + "[0]");
    out.hi = convert<double>(v[1], path(key) + "[1]");
  }

  Table sub(const std::string& key) {
    seen_.insert(key);
    return Table(has(key) ? node_[key] : YAML::Node(), path(key));
  }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return has(key) ? node_[key] : YAML::Node();
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const auto key = it->first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError(path(key) + ": unknown field");
    }
  }

  template <class T>
  static T convert(const YAML::Node& v, const std::string& where) {
    if (!v.IsScalar()) throw ConfigError(where + ": expected a " + type_name<T>());
    try {
      return v.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(where + ": expected a " + type_name<T>() + ", got '" + v.Scalar() + "'");
    }
  }

 private:
  template <class T>
  static std::string type_name() {
    if constexpr (std::is_same_v<T, bool>) return "boolean";
    else if constexpr (std::is_integral_v<T>) return "integer";
    else if constexpr (std::is_floating_point_v<T>) return "number";
    else return "string";
  }

  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class E, class Parse>
void get_enum(Table& t, const std::string& key, E& out, Parse parse) {
  std::string s;
  t.get(key, s);
  if (s.empty()) return;
  try {
    out = parse(s);
  } catch (const ConfigError& e) {
    throw ConfigError(t.path(key) + ": " + e.what());
  }
}

inline SkuConfig parse_sku(Table t) {
  SkuConfig s;
  t.get("price", s.price);
  t.get("cost", s.cost);
  t.get("order_cost", s.order_cost);
  t.get("holding_cost", s.holding_cost);
  double lead = s.lead_time.mean;
  std::string kind = s.lead_time.kind == LeadTimeSpec::Kind::constant ? "constant" : "geometric";
  int lead_max = s.lead_time.max;
  t.get("lead_time", lead);
  t.get("lead_kind", kind);
  t.get("lead_max", lead_max);
  if (kind == "constant")
    s.lead_time = LeadTimeSpec::constant(int(std::lround(lead)));
  else if (kind == "geometric")
    s.lead_time = LeadTimeSpec::geometric(lead, lead_max);
  else
    throw ConfigError(t.path("lead_kind") + ": must be 'constant' or 'geometric'");
  t.finish();
  return s;
}

}  // namespace detail

inline ExperimentConfig parse_config(const YAML::Node& root) {
  ExperimentConfig c;
  detail::Table t(root, "");
  t.get("name", c.name);
  t.get_list("seeds", c.seeds);
  t.get("output_dir", c.output_dir);

  {
    auto s = t.sub("store");
    s.get("n", c.n);
    s.get("capacity", c.capacity);
    detail::get_enum(s, "overflow_mode", c.overflow_mode, parse_overflow_mode);
    s.get("horizon", c.horizon);
    s.get_list("initial_stock", c.initial_stock);
    s.finish();
  }
  {
    auto s = t.sub("sku_sampling");
    s.get("seed", c.sku_seed);
    s.get_range("price", c.sku_ranges.price);
    s.get_range("cost", c.sku_ranges.cost);
    s.get_range("order_cost", c.sku_ranges.order_cost);
    s.get_range("holding_cost", c.sku_ranges.holding_cost);
    s.get_range("lead_time", c.sku_ranges.lead_mean);
    std::string kind;
    s.get("lead_kind", kind);
    if (kind == "constant") c.sku_ranges.lead_kind = LeadTimeSpec::Kind::constant;
    else if (kind == "geometric") c.sku_ranges.lead_kind = LeadTimeSpec::Kind::geometric;
    else if (!kind.empty()) throw ConfigError(s.path("lead_kind") + ": must be 'constant' or 'geometric'");
    s.get("lead_max", c.sku_ranges.lead_max);
    s.finish();
  }
  if (auto skus = t.raw("skus"); skus && !skus.IsNull()) {
    if (!skus.IsSequence()) throw ConfigError("skus: expected a list of tables");
    for (std::size_t k = 0; k < skus.size(); ++k)
      c.skus.push_back(detail::parse_sku(detail::Table(skus[k], "skus[" + std::to_string(k) + "]")));
  }
  {
    auto s = t.sub("data");
    std::string source;
    s.get("source", source);
    if (source == "csv") c.data.source = DataConfig::Source::csv;
    else if (source == "synthetic" || source.empty()) c.data.source = DataConfig::Source::synthetic;
    else throw ConfigError(s.path("source") + ": must be 'synthetic' or 'csv'");
    s.get("path", c.data.path);
    s.get("length", c.data.length);
    s.get("test_length", c.data.test_length);
    s.get("seed", c.data.seed);
    std::string pattern;
    s.get("pattern", pattern);
    if (pattern == "constant") c.data.pattern.kind = DemandPattern::Kind::constant;
    else if (pattern == "seasonal") c.data.pattern.kind = DemandPattern::Kind::seasonal;
    else if (pattern == "poisson") c.data.pattern.kind = DemandPattern::Kind::poisson;
    else if (!pattern.empty()) throw ConfigError(s.path("pattern") + ": must be constant|seasonal|poisson");
    s.get("mean", c.data.pattern.mean);
    s.get("amplitude", c.data.pattern.amplitude);
    s.get("period", c.data.pattern.period);
    s.get("noise", c.data.pattern.noise);
    s.finish();
  }
  {
    auto s = t.sub("observation");
    s.get("normalize", c.observation.normalize);
    s.get("context", c.observation.context);
    s.finish();
  }
  {
    auto s = t.sub("agent");
    detail::get_enum(s, "network", c.agent.network, parse_network_kind);
    s.get("hidden", c.agent.hidden);
    s.get("policy_out_gain", c.agent.policy_out_gain);
    s.finish();
  }
  {
    auto s = t.sub("train");
    auto& tr = c.train;
    s.get("gamma", tr.gamma);
    s.get("lambda", tr.lambda);
    s.get("clip", tr.clip);
    s.get("entropy_coef", tr.entropy_coef);
    s.get("critic_coef", tr.critic_coef);
    s.get("lr", tr.lr);
    s.get("lr_anneal", tr.lr_anneal);
    s.get("max_grad_norm", tr.max_grad_norm);
    s.get("parallel_envs", tr.parallel_envs);
    s.get("gae_horizon", tr.gae_horizon);
    s.get("chunk_length", tr.chunk_length);
    s.get("epochs", tr.epochs);
    s.get("sample_budget", tr.sample_budget);
    s.get("inner_rounds", tr.inner_rounds);
    s.get("ppo_epochs", tr.ppo_epochs);
    s.get("minibatches", tr.minibatches);
    s.get("reward_standardization", tr.reward_standardization);
    s.get("advantage_normalization", tr.advantage_normalization);
    detail::get_enum(s, "reward", tr.reward_mode, [](const std::string& v) {
      if (v == "individual") return RewardMode::individual;
      if (v == "team") return RewardMode::team;
      throw ConfigError("must be 'individual' or 'team', got '" + v + "'");
    });
    s.get("train_with_joint_data", tr.train_with_joint_data);
    s.get("eval_episodes", tr.eval_episodes);
    s.get("eval_interval", tr.eval_interval);
    s.get("workers", tr.workers);
    s.finish();
  }
  {
    auto s = t.sub("context");
    auto& cx = c.context;
    s.get("joint_envs", cx.joint_envs);
    s.get("local_envs", cx.local_envs);
    s.get("fresh_local_windows", cx.fresh_local_windows);
    auto a = s.sub("augment");
    detail::get_enum(a, "mode", cx.augment.mode, parse_augment_mode);
    a.get("p_aug", cx.augment.p_aug);
    a.get("noise_scale", cx.augment.noise_scale);
    a.finish();
    auto m = s.sub("model");
    m.get("window", cx.model.window);
    m.get("hidden", cx.model.hidden);
    m.get("steps", cx.model.steps);
    m.get("batch", cx.model.batch);
    m.get("lr", cx.model.lr);
    m.finish();
    s.finish();
  }
  {
    auto s = t.sub("baseline");
    auto& b = c.baseline;
    detail::get_enum(s, "policy", b.policy, parse_baseline_policy);
    detail::get_enum(s, "variant", b.variant, parse_baseline_variant);
    s.get_list("v_grid", b.v_grid);
    s.get_list("tau_grid", b.tau_grid);
    s.get("refit_interval", b.refit_interval);
    s.get("refit_window", b.refit_window);
    s.get("eval_episodes", b.eval_episodes);
    s.finish();
  }
  t.finish();
  c.validate();
  return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("config: YAML syntax error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  return parse_config(root);
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config_string(ss.str());
}

// Canonical YAML rendering of the effective configuration.
inline std::string to_yaml(const ExperimentConfig& c) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  auto range = [&](const Range& r) {
    e << YAML::Flow << YAML::BeginSeq << r.lo << r.hi << YAML::EndSeq;
  };
  e << YAML::BeginMap;
  e << YAML::Key << "name" << YAML::Value << c.name;
  e << YAML::Key << "seeds" << YAML::Value << YAML::Flow << c.seeds;
  e << YAML::Key << "output_dir" << YAML::Value << c.output_dir;
  e << YAML::Key << "store" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "n" << YAML::Value << c.n;
  e << YAML::Key << "capacity" << YAML::Value << c.capacity;
  e << YAML::Key << "overflow_mode" << YAML::Value << to_string(c.overflow_mode);
  e << YAML::Key << "horizon" << YAML::Value << c.horizon;
  if (!c.initial_stock.empty()) e << YAML::Key << "initial_stock" << YAML::Value << YAML::Flow << c.initial_stock;
  e << YAML::EndMap;
  e << YAML::Key << "sku_sampling" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "seed" << YAML::Value << c.sku_seed;
  e << YAML::Key << "price" << YAML::Value;
  range(c.sku_ranges.price);
  e << YAML::Key << "cost" << YAML::Value;
  range(c.sku_ranges.cost);
  e << YAML::Key << "order_cost" << YAML::Value;
  range(c.sku_ranges.order_cost);
  e << YAML::Key << "holding_cost" << YAML::Value;
  range(c.sku_ranges.holding_cost);
  e << YAML::Key << "lead_time" << YAML::Value;
  range(c.sku_ranges.lead_mean);
  e << YAML::Key << "lead_kind" << YAML::Value
    << (c.sku_ranges.lead_kind == LeadTimeSpec::Kind::constant ? "constant" : "geometric");
  e << YAML::Key << "lead_max" << YAML::Value << c.sku_ranges.lead_max;
  e << YAML::EndMap;
  if (!c.skus.empty()) {
    e << YAML::Key << "skus" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : c.skus) {
      e << YAML::Flow << YAML::BeginMap;
      e << YAML::Key << "price" << YAML::Value << s.price;
      e << YAML::Key << "cost" << YAML::Value << s.cost;
      e << YAML::Key << "order_cost" << YAML::Value << s.order_cost;
      e << YAML::Key << "holding_cost" << YAML::Value << s.holding_cost;
      e << YAML::Key << "lead_time" << YAML::Value << s.lead_time.mean;
      e << YAML::Key << "lead_kind" << YAML::Value
        << (s.lead_time.kind == LeadTimeSpec::Kind::constant ? "constant" : "geometric");
      e << YAML::Key << "lead_max" << YAML::Value << s.lead_time.max;
      e << YAML::EndMap;
    }
    e << YAML::EndSeq;
  }
  e << YAML::Key << "data" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "source" << YAML::Value << (c.data.source == DataConfig::Source::csv ? "csv" : "synthetic");
  if (!c.data.path.empty()) e << YAML::Key << "path" << YAML::Value << c.data.path;
  e << YAML::Key << "length" << YAML::Value << c.data.length;
  e << YAML::Key << "test_length" << YAML::Value << c.data.test_length;
  e << YAML::Key << "seed" << YAML::Value << c.data.seed;
  const char* pattern = c.data.pattern.kind == DemandPattern::Kind::constant   ? "constant"
                        : c.data.pattern.kind == DemandPattern::Kind::seasonal ? "seasonal"
                                                                               : "poisson";
  e << YAML::Key << "pattern" << YAML::Value << pattern;
  e << YAML::Key << "mean" << YAML::Value << c.data.pattern.mean;
  e << YAML::Key << "amplitude" << YAML::Value << c.data.pattern.amplitude;
  e << YAML::Key << "period" << YAML::Value << c.data.pattern.period;
  e << YAML::Key << "noise" << YAML::Value << c.data.pattern.noise;
  e << YAML::EndMap;
  e << YAML::Key << "observation" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "normalize" << YAML::Value << c.observation.normalize;
  e << YAML::Key << "context" << YAML::Value << c.observation.context;
  e << YAML::EndMap;
  e << YAML::Key << "agent" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "network" << YAML::Value << to_string(c.agent.network);
  e << YAML::Key << "hidden" << YAML::Value << c.agent.hidden;
  e << YAML::Key << "policy_out_gain" << YAML::Value << c.agent.policy_out_gain;
  e << YAML::EndMap;
  const auto& tr = c.train;
  e << YAML::Key << "train" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "gamma" << YAML::Value << tr.gamma;
  e << YAML::Key << "lambda" << YAML::Value << tr.lambda;
  e << YAML::Key << "clip" << YAML::Value << tr.clip;
  e << YAML::Key << "entropy_coef" << YAML::Value << tr.entropy_coef;
  e << YAML::Key << "critic_coef" << YAML::Value << tr.critic_coef;
  e << YAML::Key << "lr" << YAML::Value << tr.lr;
  e << YAML::Key << "lr_anneal" << YAML::Value << tr.lr_anneal;
  e << YAML::Key << "max_grad_norm" << YAML::Value << tr.max_grad_norm;
  e << YAML::Key << "parallel_envs" << YAML::Value << tr.parallel_envs;
  e << YAML::Key << "gae_horizon" << YAML::Value << tr.gae_horizon;
  e << YAML::Key << "chunk_length" << YAML::Value << tr.chunk_length;
  e << YAML::Key << "epochs" << YAML::Value << tr.epochs;
  e << YAML::Key << "sample_budget" << YAML::Value << tr.sample_budget;
  e << YAML::Key << "inner_rounds" << YAML::Value << tr.inner_rounds;
  e << YAML::Key << "ppo_epochs" << YAML::Value << tr.ppo_epochs;
  e << YAML::Key << "minibatches" << YAML::Value << tr.minibatches;
  e << YAML::Key << "reward_standardization" << YAML::Value << tr.reward_standardization;
  e << YAML::Key << "advantage_normalization" << YAML::Value << tr.advantage_normalization;
  e << YAML::Key << "reward" << YAML::Value << (tr.reward_mode == RewardMode::team ? "team" : "individual");
  e << YAML::Key << "train_with_joint_data" << YAML::Value << tr.train_with_joint_data;
  e << YAML::Key << "eval_episodes" << YAML::Value << tr.eval_episodes;
  e << YAML::Key << "eval_interval" << YAML::Value << tr.eval_interval;
  e << YAML::Key << "workers" << YAML::Value << tr.workers;
  e << YAML::EndMap;
  const auto& cx = c.context;
  e << YAML::Key << "context" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "joint_envs" << YAML::Value << cx.joint_envs;
  e << YAML::Key << "local_envs" << YAML::Value << cx.local_envs;
  e << YAML::Key << "fresh_local_windows" << YAML::Value << cx.fresh_local_windows;
  e << YAML::Key << "augment" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "mode" << YAML::Value << to_string(cx.augment.mode);
  e << YAML::Key << "p_aug" << YAML::Value << cx.augment.p_aug;
  e << YAML::Key << "noise_scale" << YAML::Value << cx.augment.noise_scale;
  e << YAML::EndMap;
  e << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "window" << YAML::Value << cx.model.window;
  e << YAML::Key << "hidden" << YAML::Value << cx.model.hidden;
  e << YAML::Key << "steps" << YAML::Value << cx.model.steps;
  e << YAML::Key << "batch" << YAML::Value << cx.model.batch;
  e << YAML::Key << "lr" << YAML::Value << cx.model.lr;
  e << YAML::EndMap;
  e << YAML::EndMap;
  const auto& b = c.baseline;
  e << YAML::Key << "baseline" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "policy" << YAML::Value << to_string(b.policy);
  e << YAML::Key << "variant" << YAML::Value << to_string(b.variant);
  e << YAML::Key << "v_grid" << YAML::Value << YAML::Flow << b.v_grid;
  e << YAML::Key << "tau_grid" << YAML::Value << YAML::Flow << b.tau_grid;
  e << YAML::Key << "refit_interval" << YAML::Value << b.refit_interval;
  e << YAML::Key << "refit_window" << YAML::Value << b.refit_window;
  e << YAML::Key << "eval_episodes" << YAML::Value << b.eval_episodes;
  e << YAML::EndMap;
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

// 64-bit FNV-1a.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string config_hash(const ExperimentConfig& c) {
  std::ostringstream ss;
  ss << std::hex;
  ss.width(16);
  ss.fill('0');
  ss << fnv1a64(to_yaml(c));
  return ss.str();
}

inline DemandDataset load_dataset(const ExperimentConfig& c) {
  if (c.data.source == DataConfig::Source::csv) return load_demand_csv(c.data.path);
  return synth_demand(c.n, c.data.length, c.data.seed, c.data.pattern);
}

inline StoreConfig build_store(const ExperimentConfig& c) {
  StoreConfig s;
  s.capacity = c.capacity;
  s.overflow_mode = c.overflow_mode;
  s.horizon = c.horizon;
  s.skus = c.skus.empty() ? sample_sku_params(c.n, c.sku_ranges, c.sku_seed) : c.skus;
  s.validate();
  return s;
}

inline Scenario build_scenario(const ExperimentConfig& c, const DemandDataset& data) {
  if (data.n() != c.n)
    throw ConfigError("store.n: config says " + std::to_string(c.n) + " SKUs, demand data has " +
                      std::to_string(data.n()));
  auto [train, test] = split_train_test(data, c.data.test_length);
  Scenario sc;
  sc.store = build_store(c);
  sc.train = train.series;
  sc.test = test.series;
  sc.initial_stock = c.initial_stock.empty() ? default_initial_stock(sc.store) : c.initial_stock;
  sc.obs = {c.observation.normalize, c.observation.context, sc.store.max_price()};
  sc.validate();
  return sc;
}

inline Scenario build_scenario(const ExperimentConfig& c) { return build_scenario(c, load_dataset(c)); }

}  // namespace srsg
