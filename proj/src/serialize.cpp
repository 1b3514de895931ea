#include "cdid/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cdid {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

Json to_json(const CrossingPoint& c) {
  Json j;
  j["location"] = number(c.location);
  j["objective"] = number(c.objective);
  j["trim_lower"] = c.trim_lower;
  j["trim_upper"] = c.trim_upper;
  j["flat_set_width"] = number(c.flat_set_width);
  return j;
}

Json to_json(const PiecewiseQFit& fit) {
  Json j;
  j["knots"] = fit.knots;
  j["zeta"] = fit.zeta;
  j["fit_error"] = number(fit.fit_error);
  return j;
}

Json to_json(const BootstrapResult& b) {
  Json j;
  j["point"] = number(b.point);
  j["ci_lo"] = number(b.ci_lo);
  j["ci_hi"] = number(b.ci_hi);
  j["level"] = b.level;
  j["B"] = b.B;
  j["failures"] = b.failures;
  j["seed"] = b.seed;
  return j;
}

Json to_json(const std::vector<PeriodSummary>& summary) {
  Json arr = Json::array();
  for (const auto& s : summary) {
    Json j;
    j["period"] = s.period;
    j["n"] = s.n;
    j["y_mean"] = s.y_mean;
    j["y_sd"] = s.y_sd;
    j["x_mean"] = s.x_mean;
    j["x_sd"] = s.x_sd;
    j["y_min"] = s.y_min;
    j["y_max"] = s.y_max;
    j["x_min"] = s.x_min;
    j["x_max"] = s.x_max;
    arr.push_back(j);
  }
  return arr;
}

Json to_json(const EffectEstimate& e) {
  Json j;
  j["kind"] = to_string(e.kind);
  j["period_t"] = e.period_t;
  j["eval_x"] = number(e.eval_x);
  j["counterfactual_x"] = number(e.counterfactual_x);
  j["quantile_p"] = e.quantile_p ? Json(*e.quantile_p) : Json(nullptr);
  j["value"] = number(e.value);
  j["ci"] = e.ci ? Json::array({number(e.ci->lo), number(e.ci->hi)}) : Json(nullptr);
  j["retained_fraction"] = e.retained_fraction;
  j["flags"] = e.flags;
  return j;
}

Json to_json(const BoundsResult& b) {
  Json j;
  j["eval_x"] = number(b.eval_x);
  j["counterfactual_x"] = number(b.counterfactual_x);
  j["lower"] = format_double(b.lower);
  j["upper"] = format_double(b.upper);
  if (std::isfinite(b.lower)) j["lower"] = b.lower;
  if (std::isfinite(b.upper)) j["upper"] = b.upper;
  j["neighbors"] = Json::array({format_double(b.neighbors.lower), format_double(b.neighbors.upper)});
  if (std::isfinite(b.neighbors.lower)) j["neighbors"][0] = b.neighbors.lower;
  if (std::isfinite(b.neighbors.upper)) j["neighbors"][1] = b.neighbors.upper;
  j["periods_used"] = b.periods_used;
  j["point_identified"] = b.point_identified;
  return j;
}

Json to_json(const DominanceResult& d) {
  Json j;
  j["statistic"] = number(d.statistic);
  j["p_value"] = number(d.p_value);
  j["replicates"] = d.replicates;
  return j;
}

Json to_json(const LinearityTest& t) {
  Json j;
  j["statistic"] = number(t.statistic);
  j["p_value"] = number(t.p_value);
  j["periods"] = t.periods;
  j["ratios"] = t.ratios;
  j["replicates"] = t.replicates;
  j["failures"] = t.failures;
  return j;
}

Json trend_metadata(const TrendMap& trend) {
  Json j;
  j["period"] = trend.period();
  j["source"] = to_string(trend.source());
  j["anchor"] = number(trend.anchor);
  if (trend.source() == TrendSource::interval) {
    Json set = Json::array();
    for (const auto& iv : trend.control_set) set.push_back(Json::array({iv.lo, iv.hi}));
    j["control_set"] = set;
  }
  j["bandwidth_period"] = number(trend.bandwidth_period);
  j["bandwidth_reference"] = number(trend.bandwidth_reference);
  if (trend.source() == TrendSource::shift) {
    j["shift"] = trend.shift_value();
  } else {
    j["tail_slope"] = trend.tail_slope();
    j["identified_range"] = Json::array({trend.identified_range().lo, trend.identified_range().hi});
  }
  j["grid_size"] = trend.grid().size();
  j["flags"] = trend.flags;
  return j;
}

Json to_json(const DgpSpec& dgp) {
  Json j;
  j["kind"] = to_string(dgp.kind);
  Json periods = Json::array();
  for (const auto& p : dgp.periods) {
    Json q;
    q["loc"] = p.loc;
    q["scale"] = p.scale;
    q["bend"] = p.bend;
    q["level"] = p.level;
    q["outcome_scale"] = p.outcome_scale;
    q["shift_above"] = p.shift_above;
    periods.push_back(q);
  }
  j["periods"] = periods;
  j["beta"] = dgp.beta;
  j["beta_rank"] = dgp.beta_rank;
  j["rho"] = dgp.rho;
  j["shift_threshold"] = dgp.shift_threshold;
  j["hyper_seed"] = dgp.hyper_seed;
  return j;
}

namespace {

std::vector<double> numbers(const Json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::invalid_input, std::string("DGP config lacks '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_array()) throw Error(ErrorKind::invalid_input, std::string("DGP '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw Error(ErrorKind::invalid_input, std::string("DGP '") + key + "' must hold numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

double scalar(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw Error(ErrorKind::invalid_input, std::string("DGP '") + key + "' must be a number");
  return j.at(key).get<double>();
}

void apply_optional(const Json& j, DgpSpec& dgp) {
  auto per_period = [&](const char* key, auto member) {
    if (!j.contains(key)) return;
    auto v = numbers(j, key);
    if (v.size() != dgp.periods.size()) {
      throw Error(ErrorKind::invalid_input, std::string("DGP '") + key + "' has the wrong length");
    }
    for (std::size_t i = 0; i < v.size(); ++i) dgp.periods[i].*member = v[i];
  };
  per_period("bend", &PeriodParams::bend);
  per_period("shift_above", &PeriodParams::shift_above);
  per_period("outcome_scale", &PeriodParams::outcome_scale);
  dgp.shift_threshold = scalar(j, "shift_threshold", dgp.shift_threshold);
}

}  // namespace

DgpSpec dgp_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw Error(ErrorKind::invalid_input, "DGP config needs a string 'kind'");
  }
  const DgpKind kind = parse_dgp_kind(j.at("kind").get<std::string>());
  DgpSpec dgp;
  if (j.contains("periods")) {
    dgp.kind = kind;
    for (const auto& q : j.at("periods")) {
      PeriodParams p;
      p.loc = scalar(q, "loc", p.loc);
      p.scale = scalar(q, "scale", p.scale);
      p.bend = scalar(q, "bend", p.bend);
      p.level = scalar(q, "level", p.level);
      p.outcome_scale = scalar(q, "outcome_scale", p.outcome_scale);
      p.shift_above = scalar(q, "shift_above", p.shift_above);
      dgp.periods.push_back(p);
    }
    dgp.beta = scalar(j, "beta", 0.0);
    dgp.beta_rank = scalar(j, "beta_rank", 0.0);
    dgp.rho = scalar(j, "rho", 0.0);
    dgp.shift_threshold = scalar(j, "shift_threshold", dgp.shift_threshold);
    dgp.hyper_seed = static_cast<std::uint64_t>(scalar(j, "hyper_seed", 0.0));
    dgp.validate();
    return dgp;
  }
  switch (kind) {
    case DgpKind::linear_system:
      dgp = linear_system(numbers(j, "alpha"), scalar(j, "beta", 0.0), numbers(j, "gamma"),
                          numbers(j, "delta"), scalar(j, "rho", 0.0));
      break;
    case DgpKind::bounds_example: {
      if (j.contains("mu")) {
        auto mu = numbers(j, "mu"), sigma = numbers(j, "sigma"), delta = numbers(j, "delta");
        if (mu.size() != sigma.size() || mu.size() != delta.size()) {
          throw Error(ErrorKind::invalid_input, "DGP parameter vectors differ in length");
        }
        dgp.kind = DgpKind::bounds_example;
        for (std::size_t i = 0; i < mu.size(); ++i) {
          PeriodParams p;
          p.loc = mu[i];
          p.scale = sigma[i];
          p.level = delta[i];
          dgp.periods.push_back(p);
        }
      } else {
        const double T = scalar(j, "T", 3.0);
        dgp = bounds_example(static_cast<int>(T), static_cast<std::uint64_t>(scalar(j, "hyper_seed", 0.0)));
      }
      break;
    }
    case DgpKind::rc_linear:
      dgp = rc_linear(numbers(j, "loc"), numbers(j, "scale"), numbers(j, "delta"));
      break;
    case DgpKind::quantile_rc: {
      auto loc = numbers(j, "loc"), scale = numbers(j, "scale"), level = numbers(j, "level");
      if (loc.size() != scale.size() || loc.size() != level.size()) {
        throw Error(ErrorKind::invalid_input, "DGP parameter vectors differ in length");
      }
      dgp.kind = DgpKind::quantile_rc;
      for (std::size_t i = 0; i < loc.size(); ++i) {
        PeriodParams p;
        p.loc = loc[i];
        p.scale = scale[i];
        p.level = level[i];
        dgp.periods.push_back(p);
      }
      dgp.beta = scalar(j, "beta", 0.0);
      dgp.beta_rank = scalar(j, "beta_rank", 0.0);
      dgp.rho = scalar(j, "rho", 0.0);
      break;
    }
  }
  apply_optional(j, dgp);
  dgp.validate();
  return dgp;
}

namespace {

class TomlReader {
public:
  TomlReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  Json parse() {
    Json root = Json::object();
    Json* table = &root;
    std::string line;
    while (next_line(line)) {
      std::string s = strip(line);
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') fail("malformed table header");
        const std::string name = strip(s.substr(1, s.size() - 2));
        if (name.empty()) fail("empty table name");
        table = &root[name];
        if (!table->is_object()) *table = Json::object();
        continue;
      }
      const auto eq = s.find('=');
      if (eq == std::string::npos) fail("expected key = value");
      std::string key = strip(s.substr(0, eq));
      if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
      if (key.empty()) fail("empty key");
      std::string value = strip(s.substr(eq + 1));
      // Multi-line arrays: keep reading until brackets balance.
      while (depth(value) > 0) {
        std::string more;
        if (!next_line(more)) fail("unterminated array");
        value += " " + strip(more);
      }
      std::size_t pos = 0;
      (*table)[key] = parse_value(value, pos);
      skip_space(value, pos);
      if (pos != value.size()) fail("trailing characters after value");
    }
    return root;
  }

private:
  bool next_line(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::invalid_input, source_ + ": line " + std::to_string(line_no_) + ": " + what);
  }

  // Drops a trailing comment outside strings, then surrounding whitespace.
  static std::string strip(const std::string& s) {
    bool in_string = false;
    std::size_t end = s.size();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
      if (s[i] == '#' && !in_string) {
        end = i;
        break;
      }
    }
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos || first >= end) return {};
    const auto last = s.find_last_not_of(" \t", end - 1);
    return s.substr(first, last - first + 1);
  }

  static int depth(const std::string& s) {
    int d = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
      if (in_string) continue;
      if (s[i] == '[') ++d;
      if (s[i] == ']') --d;
    }
    return d;
  }

  static void skip_space(const std::string& s, std::size_t& pos) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  Json parse_value(const std::string& s, std::size_t& pos) {
    skip_space(s, pos);
    if (pos >= s.size()) fail("missing value");
    const char c = s[pos];
    if (c == '[') {
      ++pos;
      Json arr = Json::array();
      skip_space(s, pos);
      if (pos < s.size() && s[pos] == ']') {
        ++pos;
        return arr;
      }
      while (true) {
        arr.push_back(parse_value(s, pos));
        skip_space(s, pos);
        if (pos >= s.size()) fail("unterminated array");
        if (s[pos] == ',') {
          ++pos;
          skip_space(s, pos);
          if (pos < s.size() && s[pos] == ']') {
            ++pos;
            return arr;
          }
          continue;
        }
        if (s[pos] == ']') {
          ++pos;
          return arr;
        }
        fail("expected ',' or ']' in array");
      }
    }
    if (c == '"') {
      std::string out;
      ++pos;
      while (pos < s.size() && s[pos] != '"') {
        if (s[pos] == '\\' && pos + 1 < s.size()) ++pos;
        out += s[pos++];
      }
      if (pos >= s.size()) fail("unterminated string");
      ++pos;
      return out;
    }
    std::size_t end = pos;
    while (end < s.size() && s[end] != ',' && s[end] != ']' && s[end] != ' ' && s[end] != '\t') ++end;
    std::string token = s.substr(pos, end - pos);
    pos = end;
    if (token == "true") return true;
    if (token == "false") return false;
    std::string digits;
    for (char ch : token) {
      if (ch != '_') digits += ch;
    }
    if (!digits.empty() && digits.front() == '+') digits.erase(0, 1);
    const bool integral = digits.find_first_of(".eE") == std::string::npos &&
                          digits != "inf" && digits != "-inf" && digits != "nan";
    if (integral) {
      long long v = 0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec == std::errc() && p == digits.data() + digits.size() && !digits.empty()) return v;
    } else {
      double v = 0.0;
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
      if (ec == std::errc() && p == digits.data() + digits.size()) return v;
    }
    fail("cannot parse value '" + token + "'");
  }

  std::istream& in_;
  std::string source_;
  int line_no_ = 0;
};

}  // namespace

Json parse_toml(std::istream& in, const std::string& source) {
  return TomlReader(in, source).parse();
}

DgpSpec load_dgp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  if (path.extension() == ".toml") return dgp_from_json(parse_toml(in, path.string()));
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::invalid_input, path.string() + ": " + e.what());
  }
  return dgp_from_json(j);
}

void write_trend_csv(std::ostream& out, const TrendMap& trend) {
  out << "y_grid,g_value\n";
  for (Index i = 0; i < trend.grid().size(); ++i) {
    out << format_double(trend.grid()[i]) << ',' << format_double(trend.g_values()[i]) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<PeriodSummary>& summary) {
  out << "period,n,y_mean,y_sd,x_mean,x_sd,y_min,y_max,x_min,x_max\n";
  for (const auto& s : summary) {
    out << s.period << ',' << s.n;
    for (double v : {s.y_mean, s.y_sd, s.x_mean, s.x_sd, s.y_min, s.y_max, s.x_min, s.x_max}) {
      out << ',' << format_double(v);
    }
    out << '\n';
  }
}

void write_effects_csv(std::ostream& out, const std::vector<EffectEstimate>& effects) {
  out << "x,q_x,value,ci_lo,ci_hi\n";
  for (const auto& e : effects) {
    out << format_double(e.eval_x) << ',' << format_double(e.counterfactual_x) << ','
        << format_double(e.value) << ',';
    if (e.ci) out << format_double(e.ci->lo) << ',' << format_double(e.ci->hi);
    else out << ',';
    out << '\n';
  }
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundsResult>& bounds) {
  out << "x,lower,upper,point_identified\n";
  for (const auto& b : bounds) {
    out << format_double(b.eval_x) << ',' << format_double(b.lower) << ',' << format_double(b.upper)
        << ',' << (b.point_identified ? 1 : 0) << '\n';
  }
}

}  // namespace cdid
