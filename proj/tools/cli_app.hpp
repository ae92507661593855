#pragma once

// srsg command line: data generation, training, baselines, evaluation, plots.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srsg/config.hpp"
#include "srsg/srsg.hpp"

#ifndef SRSG_VERSION
#define SRSG_VERSION "0.1.0"
#endif

namespace srsg::cli {

namespace fs = std::filesystem;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string mode;
  std::string reward;
  std::string context;
  std::string aug;
  std::optional<double> p_aug;
};

inline void add_override_flags(CLI::App* cmd, Overrides& o, bool training) {
  cmd->add_option("--config", o.config, "experiment config (YAML)")->required();
  cmd->add_option("--seed", o.seed, "run this seed only");
  cmd->add_option("--out", o.out, "output root directory");
  cmd->add_option("--mode", o.mode, "overflow mode")->check(CLI::IsMember({"paper", "strict"}));
  cmd->add_option("--context", o.context, "context features")->check(CLI::IsMember({"on", "off"}));
  if (!training) return;
  cmd->add_option("--reward", o.reward, "reward signal")->check(CLI::IsMember({"individual", "team"}));
  cmd->add_option("--aug", o.aug, "context augmentation")
      ->check(CLI::IsMember({"none", "noise", "predictor", "mixed"}));
  cmd->add_option("--p-aug", o.p_aug, "augmentation probability")->check(CLI::Range(0.0, 1.0));
}

inline ExperimentConfig load_with_overrides(const Overrides& o) {
  auto c = load_config(o.config);
  if (o.seed) c.seeds = {*o.seed};
  if (!o.mode.empty()) c.overflow_mode = parse_overflow_mode(o.mode);
  if (!o.reward.empty()) c.train.reward_mode = o.reward == "team" ? RewardMode::team : RewardMode::individual;
  if (!o.context.empty()) c.observation.context = o.context == "on";
  if (!o.aug.empty()) c.context.augment.mode = parse_augment_mode(o.aug);
  if (o.p_aug) c.context.augment.p_aug = *o.p_aug;
  if (!o.out.empty()) {
    c.output_dir = o.out;
  } else if (const char* env = std::getenv("SRSG_OUTPUT_ROOT"); env && *env) {
    c.output_dir = env;
  }
  c.validate();
  return c;
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  nn::detail::write_atomically(path, text, false);
}

inline std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

inline nlohmann::json base_manifest(const ExperimentConfig& c, const std::string& command, std::uint64_t seed) {
  return {{"command", command},       {"config_hash", config_hash(c)}, {"seed", seed},
          {"version", SRSG_VERSION},  {"created", utc_now()},          {"name", c.name}};
}

inline fs::path run_dir(const ExperimentConfig& c, const std::string& tag, std::uint64_t seed) {
  return fs::path(c.output_dir) / c.name / tag / ("seed" + std::to_string(seed));
}

inline std::string metrics_text(const std::vector<MetricsRow>& rows) {
  std::ostringstream ss;
  write_metrics_header(ss);
  for (const auto& r : rows) write_metrics_row(ss, r);
  return ss.str();
}

inline int train_command(const Overrides& o, bool cd, std::ostream& out) {
  const auto c = load_with_overrides(o);
  const auto data = load_dataset(c);
  const auto sc = build_scenario(c, data);
  const std::string tag = cd ? "cdppo" : "ippo";
  for (auto seed : c.seeds) {
    const auto dir = run_dir(c, tag, seed);
    fs::create_directories(dir);
    write_text(dir / "config.yaml", to_yaml(c));
    ActorCritic ac(c.agent, derive_seed(seed, 0xac));
    std::vector<MetricsRow> rows;
    auto on_row = [&](const MetricsRow& r) {
      rows.push_back(r);
      write_text(dir / "metrics.csv", metrics_text(rows));
      out << tag << " seed " << seed << " epoch " << r.epoch << " samples " << r.joint_samples + r.local_samples
          << " profit " << r.mean_profit << " +- " << r.std_profit << '\n';
    };
    const auto res = cd ? cd_ppo(sc, c.train, c.context, ac, seed, on_row) : ippo_train(sc, c.train, ac, seed, on_row);
    nn::save_checkpoint(dir / "checkpoint", ac.checkpoint_blocks());
    auto m = base_manifest(c, "train-" + tag, seed);
    m["joint_samples"] = res.samples.joint;
    m["local_samples"] = res.samples.local;
    m["final_profit"] = rows.empty() ? 0.0 : rows.back().mean_profit;
    if (!res.context_model_mse.empty()) m["context_model_mse"] = res.context_model_mse.back();
    write_text(dir / "manifest.json", m.dump(2) + "\n");
    out << "wrote " << dir.string() << '\n';
  }
  return 0;
}

inline int baseline_command(const Overrides& o, const std::string& policy, const std::string& variant,
                            std::ostream& out) {
  auto c = load_with_overrides(o);
  if (!policy.empty()) c.baseline.policy = parse_baseline_policy(policy);
  if (!variant.empty()) c.baseline.variant = parse_baseline_variant(variant);
  const auto data = load_dataset(c);
  const auto sc = build_scenario(c, data);
  const std::string tag = "baseline-" + to_string(c.baseline.policy) + "-" + to_string(c.baseline.variant);
  for (auto seed : c.seeds) {
    const auto r = run_baseline(sc, c.baseline, seed);
    const auto dir = run_dir(c, tag, seed);
    std::ostringstream params;
    write_baseline_params_csv(params, r, data.sku_ids);
    write_text(dir / "params.csv", params.str());
    write_text(dir / "config.yaml", to_yaml(c));
    auto m = base_manifest(c, "fit-baseline", seed);
    m["policy"] = to_string(r.policy);
    m["variant"] = to_string(r.variant);
    m["v"] = r.v;
    m["tau"] = r.tau;
    m["mean_profit"] = r.profit.mean;
    m["std_profit"] = r.profit.std;
    m["discarded"] = r.discarded;
    m["overflow_steps"] = r.overflow_steps;
    write_text(dir / "manifest.json", m.dump(2) + "\n");
    out << tag << " seed " << seed << " profit " << r.profit.mean << " +- " << r.profit.std << " v " << r.v << " tau "
        << r.tau << " discarded " << r.discarded << '\n';
  }
  return 0;
}

inline int evaluate_command(const Overrides& o, const std::string& checkpoint, bool sample, bool random,
                            std::ostream& out) {
  const auto c = load_with_overrides(o);
  const auto sc = build_scenario(c);
  const int episodes = c.train.eval_episodes;
  for (auto seed : c.seeds) {
    ProfitStats st;
    if (random) {
      st = evaluate_random(sc, episodes, seed);
    } else {
      ActorCritic ac(c.agent, 0);
      ac.load_blocks(nn::load_checkpoint(checkpoint));
      st = evaluate(sc, ac, episodes, seed, sample ? ActMode::sample : ActMode::greedy);
    }
    out << "seed " << seed << " profit " << st.mean << " +- " << st.std << '\n';
  }
  return 0;
}

inline int gen_data_command(std::size_t n, std::size_t len, std::uint64_t seed, const std::string& pattern,
                            double mean, std::string out_path, std::ostream& out) {
  DemandPattern pat;
  pat.mean = mean;
  if (pattern == "constant") pat.kind = DemandPattern::Kind::constant;
  else if (pattern == "poisson") pat.kind = DemandPattern::Kind::poisson;
  const auto d = synth_demand(n, len, seed, pat);
  if (out_path.empty()) {
    const char* env = std::getenv("SRSG_OUTPUT_ROOT");
    out_path = (fs::path(env && *env ? env : ".") / "demand.csv").string();
  }
  std::ostringstream ss;
  write_demand_csv(ss, d);
  write_text(out_path, ss.str());
  out << "wrote " << out_path << " (" << n << " SKUs x " << len << " days)\n";
  return 0;
}

// One polyline of mean profit against counted samples.
inline std::string metrics_svg(const std::vector<MetricsRow>& rows, const std::string& title) {
  constexpr double W = 640, H = 400, M = 50;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!rows.empty()) {
    x0 = x1 = double(rows[0].joint_samples + rows[0].local_samples);
    y0 = y1 = rows[0].mean_profit;
    for (const auto& r : rows) {
      const double x = double(r.joint_samples + r.local_samples);
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, r.mean_profit), y1 = std::max(y1, r.mean_profit);
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  std::ostringstream ss;
  ss << std::setprecision(10);
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  ss << "<title>" << title << "</title>\n";
  ss << "<rect x=\"" << M << "\" y=\"" << M << "\" width=\"" << W - 2 * M << "\" height=\"" << H - 2 * M
     << "\" fill=\"none\" stroke=\"#888\"/>\n";
  ss << "<text x=\"" << M << "\" y=\"" << M - 10 << "\" font-size=\"12\">" << title << "</text>\n";
  ss << "<text x=\"" << M << "\" y=\"" << H - 15 << "\" font-size=\"11\">samples " << x0 << " .. " << x1
     << "</text>\n";
  ss << "<text x=\"" << W - M - 200 << "\" y=\"" << H - 15 << "\" font-size=\"11\">profit " << y0 << " .. " << y1
     << "</text>\n";
  ss << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double x = M + (double(rows[k].joint_samples + rows[k].local_samples) - x0) / (x1 - x0) * (W - 2 * M);
    const double y = H - M - (rows[k].mean_profit - y0) / (y1 - y0) * (H - 2 * M);
    ss << (k ? " " : "") << x << ',' << y;
  }
  ss << "\"/>\n</svg>\n";
  return ss.str();
}

inline int plot_command(const std::string& csv, std::string svg, std::ostream& out) {
  std::ifstream is(csv);
  if (!is) throw ConfigError("cannot open metrics file " + csv);
  const auto rows = read_metrics_csv(is);
  if (svg.empty()) svg = (fs::path(csv).replace_extension(".svg")).string();
  write_text(svg, metrics_svg(rows, fs::path(csv).filename().string()));
  out << "wrote " << svg << " (" << rows.size() << " points)\n";
  return 0;
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Shared-resource inventory agents: training, baselines and evaluation", "srsg"};
  app.set_version_flag("--version", SRSG_VERSION);
  app.require_subcommand(1);

  std::size_t gen_n = 5, gen_len = 400;
  std::uint64_t gen_seed = 1;
  std::string gen_pattern = "seasonal", gen_out;
  double gen_mean = 5.0;
  auto* gen = app.add_subcommand("gen-data", "write a synthetic demand CSV");
  gen->add_option("--n", gen_n, "number of SKUs")->check(CLI::PositiveNumber);
  gen->add_option("--len", gen_len, "days per SKU")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--pattern", gen_pattern, "demand shape")->check(CLI::IsMember({"constant", "seasonal", "poisson"}));
  gen->add_option("--mean", gen_mean, "mean daily demand")->check(CLI::NonNegativeNumber);
  gen->add_option("--out", gen_out, "output CSV path");

  Overrides cd_o, ippo_o, base_o, eval_o;
  auto* cd = app.add_subcommand("train-cdppo", "train with context-aware decentralized PPO");
  add_override_flags(cd, cd_o, true);
  auto* ippo = app.add_subcommand("train-ippo", "train independent PPO on the joint simulator");
  add_override_flags(ippo, ippo_o, true);

  std::string policy, variant;
  auto* base = app.add_subcommand("fit-baseline", "fit and execute a base-stock or (s,S) policy");
  add_override_flags(base, base_o, false);
  base->add_option("--policy", policy, "policy family")->check(CLI::IsMember({"base-stock", "ss"}));
  auto* v_static = base->add_flag("--static", "fit once on the training series");
  auto* v_dynamic = base->add_flag("--dynamic", "refit on a trailing window");
  auto* v_oracle = base->add_flag("--oracle", "fit on the test series");
  v_static->excludes(v_dynamic)->excludes(v_oracle);
  v_dynamic->excludes(v_oracle);

  std::string checkpoint;
  bool eval_sample = false, eval_random = false;
  auto* ev = app.add_subcommand("evaluate", "evaluate a checkpoint on the test series");
  add_override_flags(ev, eval_o, false);
  ev->add_option("--checkpoint", checkpoint, "checkpoint prefix (without .manifest/.bin)");
  ev->add_flag("--sample", eval_sample, "sample actions instead of argmax");
  ev->add_flag("--random", eval_random, "uniformly random actions, no checkpoint");

  std::string plot_csv, plot_out;
  auto* plot = app.add_subcommand("plot", "render a metrics CSV as an SVG learning curve");
  plot->add_option("metrics", plot_csv, "metrics CSV")->required();
  plot->add_option("--out", plot_out, "SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << SRSG_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << "run 'srsg --help' for usage\n";
    return 2;
  }

  try {
    if (gen->parsed()) return gen_data_command(gen_n, gen_len, gen_seed, gen_pattern, gen_mean, gen_out, out);
    if (cd->parsed()) return train_command(cd_o, true, out);
    if (ippo->parsed()) return train_command(ippo_o, false, out);
    if (base->parsed()) {
      const std::string var = *v_oracle ? "oracle" : *v_dynamic ? "dynamic" : *v_static ? "static" : "";
      return baseline_command(base_o, policy, var, out);
    }
    if (ev->parsed()) {
      if (checkpoint.empty() && !eval_random) {
        err << "usage error: evaluate needs --checkpoint or --random\n";
        return 2;
      }
      return evaluate_command(eval_o, checkpoint, eval_sample, eval_random, out);
    }
    if (plot->parsed()) return plot_command(plot_csv, plot_out, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const srsg::ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace srsg::cli
