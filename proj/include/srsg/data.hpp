#pragma once

// Demand series ingestion and generation, SKU parameter sampling.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "srsg/errors.hpp"
#include "srsg/inventory.hpp"

namespace srsg {

// series[sku][day]
using DemandMatrix = std::vector<std::vector<Units>>;

struct DemandDataset {
  std::string name;
  std::vector<std::string> sku_ids;
  DemandMatrix series;

  std::size_t n() const { return series.size(); }
  std::size_t length() const { return series.empty() ? 0 : series.front().size(); }
  bool operator==(const DemandDataset&) const = default;

  // Columns [start, start + len) of every series.
  DemandMatrix window(std::size_t start, std::size_t len) const {
    if (start + len > length()) throw ContractError("DemandDataset::window: out of range");
    DemandMatrix w(n());
    for (std::size_t i = 0; i < n(); ++i)
      w[i].assign(series[i].begin() + std::ptrdiff_t(start), series[i].begin() + std::ptrdiff_t(start + len));
    return w;
  }
};

namespace detail {

inline bool parse_int(std::string_view s, long long& out) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

// Numeric ids sort numerically, everything else lexicographically.
inline bool sku_id_less(const std::string& a, const std::string& b) {
  long long x = 0, y = 0;
  const bool na = parse_int(a, x), nb = parse_int(b, y);
  if (na && nb) return x < y;
  if (na != nb) return na;
  return a < b;
}

}  // namespace detail

inline DemandDataset read_demand_csv(std::istream& is, std::string name = "csv") {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line)) throw ParseError("empty demand file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "sku_id,day,demand") throw ParseError("expected header 'sku_id,day,demand'", lineno);

  std::map<std::string, std::map<long long, Units>, decltype(&detail::sku_id_less)> rows(&detail::sku_id_less);
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos)
      throw ParseError("expected 3 comma-separated fields", lineno);
    const std::string sku = line.substr(0, c1);
    long long day = 0, demand = 0;
    if (sku.empty()) throw ParseError("empty sku_id", lineno);
    if (!detail::parse_int(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), day))
      throw ParseError("day is not an integer", lineno);
    if (!detail::parse_int(std::string_view(line).substr(c2 + 1), demand))
      throw ParseError("demand is not an integer", lineno);
    if (demand < 0) throw ParseError("negative demand for sku " + sku, lineno);
    if (!rows[sku].emplace(day, demand).second)
      throw ParseError("duplicate day " + std::to_string(day) + " for sku " + sku, lineno);
  }
  if (rows.empty()) throw ParseError("demand file has no rows");

  DemandDataset d;
  d.name = std::move(name);
  long long first = 0, last = 0;
  bool have_range = false;
  for (const auto& [sku, days] : rows) {
    const long long lo = days.begin()->first, hi = days.rbegin()->first;
    long long expect = lo;
    for (const auto& [day, v] : days) {
      if (day != expect)
        throw ParseError("sku " + sku + " is missing day " + std::to_string(expect));
      ++expect;
    }
    if (!have_range) {
      first = lo;
      last = hi;
      have_range = true;
    } else if (lo != first || hi != last) {
      throw ParseError("sku " + sku + " covers days " + std::to_string(lo) + ".." + std::to_string(hi) +
                       ", expected " + std::to_string(first) + ".." + std::to_string(last));
    }
    d.sku_ids.push_back(sku);
    std::vector<Units> s;
    s.reserve(days.size());
    for (const auto& kv : days) s.push_back(kv.second);
    d.series.push_back(std::move(s));
  }
  return d;
}

inline DemandDataset load_demand_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open demand file " + path);
  return read_demand_csv(is, path);
}

inline void write_demand_csv(std::ostream& os, const DemandDataset& d) {
  os << "sku_id,day,demand\n";
  for (std::size_t i = 0; i < d.n(); ++i) {
    const std::string id = i < d.sku_ids.size() ? d.sku_ids[i] : std::to_string(i);
    for (std::size_t t = 0; t < d.length(); ++t) os << id << ',' << t << ',' << d.series[i][t] << '\n';
  }
}

struct DemandPattern {
  enum class Kind { constant, seasonal, poisson };
  Kind kind = Kind::seasonal;
  double mean = 5.0;       // the constant value for Kind::constant
  double amplitude = 0.5;  // relative, seasonal only
  double period = 50.0;
  bool noise = true;       // Poisson noise around the seasonal profile
};

inline DemandDataset synth_demand(std::size_t n, std::size_t length, std::uint64_t seed,
                                  const DemandPattern& pat) {
  if (n == 0 || length == 0) throw ConfigError("synth_demand: n and length must be >= 1");
  if (pat.mean < 0) throw ConfigError("data.mean: must be >= 0");
  if (pat.kind == DemandPattern::Kind::seasonal && !(pat.period > 0))
    throw ConfigError("data.period: must be > 0");
  std::mt19937_64 rng(seed);
  DemandDataset d;
  d.name = "synthetic";
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    d.sku_ids.push_back(std::to_string(i));
    std::vector<Units> s(length);
    const double phi = phase(rng);
    for (std::size_t t = 0; t < length; ++t) {
      switch (pat.kind) {
        case DemandPattern::Kind::constant:
          s[t] = Units(std::lround(pat.mean));
          break;
        case DemandPattern::Kind::poisson:
          s[t] = std::poisson_distribution<Units>(pat.mean)(rng);
          break;
        case DemandPattern::Kind::seasonal: {
          const double rate = std::max(
              0.0, pat.mean * (1.0 + pat.amplitude * std::sin(2.0 * std::numbers::pi * double(t) / pat.period + phi)));
          s[t] = pat.noise ? (rate > 0 ? std::poisson_distribution<Units>(rate)(rng) : 0) : Units(std::lround(rate));
          break;
        }
      }
    }
    d.series.push_back(std::move(s));
  }
  return d;
}

inline std::pair<DemandDataset, DemandDataset> split_train_test(const DemandDataset& d, std::size_t test_len) {
  if (test_len == 0 || test_len >= d.length())
    throw ConfigError("data.test_length: must lie strictly inside the series (length " +
                      std::to_string(d.length()) + ")");
  DemandDataset train = d, test = d;
  train.name = d.name + "[train]";
  test.name = d.name + "[test]";
  train.series = d.window(0, d.length() - test_len);
  test.series = d.window(d.length() - test_len, test_len);
  return {train, test};
}

struct Range {
  double lo = 0, hi = 0;
  template <class Rng>
  double sample(Rng& rng) const {
    return lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
  }
};

struct SkuRanges {
  Range price{5, 20};
  Range cost{2, 10};  // sampled below the SKU's price
  Range order_cost{1, 1};
  Range holding_cost{0.05, 0.05};
  Range lead_mean{1.5, 3.0};
  LeadTimeSpec::Kind lead_kind = LeadTimeSpec::Kind::geometric;
  int lead_max = kDefaultMaxLeadTime;

  void validate() const {
    auto check = [](const Range& r, const char* name, double floor) {
      if (!(r.lo <= r.hi)) throw ConfigError(std::string("sku_sampling.") + name + ": min > max");
      if (r.lo < floor) throw ConfigError(std::string("sku_sampling.") + name + ": below " + std::to_string(floor));
    };
    check(price, "price", 1e-9);
    check(cost, "cost", 0);
    check(order_cost, "order_cost", 0);
    check(holding_cost, "holding_cost", 0);
    check(lead_mean, "lead_time", 1);
    if (!(cost.lo < price.lo)) throw ConfigError("sku_sampling.cost: minimum must be below the minimum price");
    if (lead_max < 1) throw ConfigError("sku_sampling.lead_max: must be >= 1");
  }
};

inline std::vector<SkuConfig> sample_sku_params(std::size_t n, const SkuRanges& r, std::uint64_t seed) {
  r.validate();
  std::mt19937_64 rng(seed);
  std::vector<SkuConfig> out(n);
  for (auto& s : out) {
    s.price = r.price.sample(rng);
    const Range cost{r.cost.lo, std::min(r.cost.hi, s.price)};
    s.cost = cost.sample(rng);
    if (s.cost >= s.price) s.cost = r.cost.lo;
    s.order_cost = r.order_cost.sample(rng);
    s.holding_cost = r.holding_cost.sample(rng);
    const double lm = r.lead_mean.sample(rng);
    s.lead_time = r.lead_kind == LeadTimeSpec::Kind::constant ? LeadTimeSpec::constant(int(std::lround(lm)))
                                                              : LeadTimeSpec::geometric(lm, r.lead_max);
  }
  return out;
}

}  // namespace srsg
