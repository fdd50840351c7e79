#include "dsa/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "dsa/errors.hpp"

namespace dsa {
namespace {

constexpr const char* kKnownKeys[] = {
    "channels", "bandwidth", "p00",          "p01",
    "p10",      "p11",       "alpha",        "zeta",
    "sigma",    "snr_db",    "theta_db_set", "prior",
    "true_theta_db", "policy", "horizon",    "runs",
    "seed",     "round_robin_C", "g2_use_no_access_info"};

struct Entry {
  std::string value;
  int line = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(int line, const std::string& message) {
  std::ostringstream os;
  os << "config";
  if (line > 0) os << " line " << line;
  os << ": " << message;
  throw ConfigError(os.str());
}

double to_double(const std::string& key, std::string_view value, int line) {
  const std::string_view v = trim(value);
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
    fail(line, "invalid number for '" + key + "': '" + std::string(v) + "'");
  return out;
}

long long to_int(const std::string& key, std::string_view value, int line) {
  const std::string_view v = trim(value);
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    fail(line, "invalid integer for '" + key + "': '" + std::string(v) + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, std::string_view value, int line) {
  const std::string_view v = trim(value);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    fail(line, "invalid unsigned integer for '" + key + "': '" + std::string(v) + "'");
  return out;
}

bool to_bool(const std::string& key, std::string_view value, int line) {
  const std::string_view v = trim(value);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(line, "invalid boolean for '" + key + "' (use true/false/1/0): '" +
                 std::string(v) + "'");
}

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? value.size() : comma;
    items.emplace_back(trim(value.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

std::vector<double> to_double_list(const std::string& key, std::string_view value,
                                   int line) {
  std::vector<double> out;
  for (const std::string& item : split_list(value)) {
    if (item.empty()) fail(line, "empty element in list for '" + key + "'");
    out.push_back(to_double(key, item, line));
  }
  if (out.empty()) fail(line, "'" + key + "' must not be empty");
  return out;
}

void check_probability(const std::string& key, double value, int line) {
  if (!(value >= 0.0 && value <= 1.0)) fail(line, "'" + key + "' out of range");
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(xs[i]);
  }
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return std::string(buf, ptr);
}

ExperimentSpec parse_config_text(std::string_view text,
                                 std::vector<std::string>* warnings) {
  std::map<std::string, Entry, std::less<>> entries;

  int line_number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, end - pos);
    ++line_number;
    pos = end + 1;
    if (nl == std::string_view::npos && line.empty() && line_number > 1) break;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(line_number, "expected key = value, got '" + std::string(line) + "'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(line_number, "empty key");

    bool known = false;
    for (const char* k : kKnownKeys) known = known || key == k;
    if (!known) fail(line_number, "unknown key '" + key + "'");
    if (entries.count(key)) fail(line_number, "duplicate key '" + key + "'");
    entries[key] = Entry{value, line_number};
  }

  const auto has = [&](const char* key) { return entries.count(key) > 0; };
  const auto require = [&](const char* key) -> const Entry& {
    const auto it = entries.find(key);
    if (it == entries.end()) fail(0, std::string("missing required key '") + key + "'");
    return it->second;
  };

  ExperimentSpec spec;

  {
    const Entry& e = require("channels");
    const long long n = to_int("channels", e.value, e.line);
    if (n < 1) fail(e.line, "'channels' must be >= 1");
    spec.channels = static_cast<int>(n);
  }
  if (has("bandwidth")) {
    const Entry& e = entries["bandwidth"];
    spec.bandwidth = to_double("bandwidth", e.value, e.line);
    if (!(spec.bandwidth > 0.0)) fail(e.line, "'bandwidth' must be > 0");
  }

  const auto prob = [&](const char* key) {
    const Entry& e = require(key);
    const double v = to_double(key, e.value, e.line);
    check_probability(key, v, e.line);
    return v;
  };
  spec.transition.p00 = prob("p00");
  spec.transition.p01 = prob("p01");
  spec.transition.p10 = prob("p10");
  spec.transition.p11 = prob("p11");
  {
    const TransitionMatrix& P = spec.transition;
    if (std::abs(P.p00 + P.p01 - 1.0) > 1e-12)
      fail(entries["p01"].line, "p00 + p01 must equal 1");
    if (std::abs(P.p10 + P.p11 - 1.0) > 1e-12)
      fail(entries["p11"].line, "p10 + p11 must equal 1");
    if (!(P.p00 > 0.0 && P.p00 < 1.0))
      fail(entries["p00"].line, "'p00' out of range (need 0 < p00 < 1)");
    if (!(P.p11 > 0.0 && P.p11 < 1.0))
      fail(entries["p11"].line, "'p11' out of range (need 0 < p11 < 1)");
    if (!(P.p00 > P.p10))
      fail(entries["p00"].line, "model requires p00 > p10 (positive correlation)");
  }

  if (has("alpha")) {
    const Entry& e = entries["alpha"];
    spec.alpha = to_double("alpha", e.value, e.line);
    if (!(spec.alpha >= 0.0 && spec.alpha < 1.0))
      fail(e.line, "'alpha' out of range (need 0 <= alpha < 1)");
  }
  {
    const Entry& e = require("zeta");
    spec.zeta_list = to_double_list("zeta", e.value, e.line);
    for (double z : spec.zeta_list)
      if (!(z > 0.0 && z < 1.0)) fail(e.line, "'zeta' out of range (need 0 < zeta < 1)");
  }
  if (has("sigma")) {
    const Entry& e = entries["sigma"];
    spec.sigma = to_double("sigma", e.value, e.line);
    if (!(spec.sigma > 0.0)) fail(e.line, "'sigma' must be > 0");
  }
  {
    const Entry& e = require("snr_db");
    spec.snr_db_list = to_double_list("snr_db", e.value, e.line);
  }
  if (has("theta_db_set")) {
    const Entry& e = entries["theta_db_set"];
    spec.theta_db_set = to_double_list("theta_db_set", e.value, e.line);
    for (std::size_t i = 0; i < spec.theta_db_set.size(); ++i)
      for (std::size_t j = i + 1; j < spec.theta_db_set.size(); ++j)
        if (std::abs(spec.theta_db_set[i] - spec.theta_db_set[j]) <= 1e-9)
          fail(e.line, "'theta_db_set' entries must be distinct");
  }
  {
    const bool uniform = !has("prior") || trim(entries["prior"].value) == "uniform";
    if (uniform) {
      if (!spec.theta_db_set.empty()) {
        const double w = 1.0 / static_cast<double>(spec.theta_db_set.size());
        spec.prior.assign(spec.theta_db_set.size(), w);
      }
    } else {
      const Entry& e = entries["prior"];
      spec.prior = to_double_list("prior", e.value, e.line);
      if (spec.theta_db_set.empty())
        fail(e.line, "'prior' requires 'theta_db_set'");
      if (spec.prior.size() != spec.theta_db_set.size())
        fail(e.line, "'prior' length must match 'theta_db_set'");
      double sum = 0.0;
      for (double w : spec.prior) {
        if (!(w >= 0.0)) fail(e.line, "'prior' entries must be >= 0");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-6) fail(e.line, "'prior' must sum to 1");
    }
  }
  if (has("true_theta_db")) {
    const Entry& e = entries["true_theta_db"];
    spec.true_theta_db = to_double("true_theta_db", e.value, e.line);
    if (spec.theta_db_set.empty())
      fail(e.line, "'true_theta_db' requires 'theta_db_set'");
    bool member = false;
    for (double t : spec.theta_db_set)
      member = member || std::abs(t - *spec.true_theta_db) <= 1e-9;
    if (!member) fail(e.line, "'true_theta_db' must be a member of 'theta_db_set'");
  }
  {
    const Entry& e = require("policy");
    for (const std::string& token : split_list(e.value)) {
      if (token.empty()) fail(e.line, "empty element in list for 'policy'");
      const auto kind = policy_from_token(token);
      if (!kind)
        fail(e.line, "unknown policy '" + token + "' (valid: " + policy_token_list() + ")");
      for (PolicyKind existing : spec.policies)
        if (existing == *kind) fail(e.line, "duplicate policy '" + token + "'");
      spec.policies.push_back(*kind);
    }
    if (spec.policies.empty()) fail(e.line, "'policy' must not be empty");
  }
  if (has("horizon")) {
    const Entry& e = entries["horizon"];
    spec.horizon = to_int("horizon", e.value, e.line);
    if (spec.horizon < 1) fail(e.line, "'horizon' must be >= 1");
  }
  if (has("runs")) {
    const Entry& e = entries["runs"];
    spec.runs = to_int("runs", e.value, e.line);
    if (spec.runs < 1) fail(e.line, "'runs' must be >= 1");
  }
  if (has("seed")) {
    const Entry& e = entries["seed"];
    spec.seed = to_u64("seed", e.value, e.line);
  } else {
    spec.seed = 0;
    if (warnings) warnings->push_back("seed not specified; defaulting to 0");
  }
  if (has("round_robin_C")) {
    const Entry& e = entries["round_robin_C"];
    spec.round_robin_C = to_int("round_robin_C", e.value, e.line);
    if (spec.round_robin_C < 0) fail(e.line, "'round_robin_C' must be >= 0");
  }
  if (has("g2_use_no_access_info")) {
    const Entry& e = entries["g2_use_no_access_info"];
    spec.g2_use_no_access_info = to_bool("g2_use_no_access_info", e.value, e.line);
  }

  // Policies that hold a candidate set need one, and every swept signal level
  // must be one of the candidates so the generator and tracker agree on the
  // hypothesis space.
  for (PolicyKind kind : spec.policies) {
    if (kind != PolicyKind::Robust && kind != PolicyKind::Learning) continue;
    const std::string name = to_string(kind);
    if (spec.theta_db_set.empty())
      fail(0, "policy '" + name + "' requires 'theta_db_set'");
    for (double snr : spec.snr_db_list) {
      bool member = false;
      for (double t : spec.theta_db_set) member = member || std::abs(t - snr) <= 1e-9;
      if (!member)
        fail(0, "snr_db value " + format_double(snr) +
                    " is not in 'theta_db_set' (required by policy '" + name + "')");
    }
  }

  return spec;
}

ExperimentSpec parse_config(const std::string& path,
                            std::vector<std::string>* warnings) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config_text(buffer.str(), warnings);
}

std::string emit_config(const ExperimentSpec& spec) {
  std::ostringstream os;
  os << "channels = " << spec.channels << '\n';
  os << "bandwidth = " << format_double(spec.bandwidth) << '\n';
  os << "p00 = " << format_double(spec.transition.p00) << '\n';
  os << "p01 = " << format_double(spec.transition.p01) << '\n';
  os << "p10 = " << format_double(spec.transition.p10) << '\n';
  os << "p11 = " << format_double(spec.transition.p11) << '\n';
  os << "alpha = " << format_double(spec.alpha) << '\n';
  os << "zeta = " << join(spec.zeta_list) << '\n';
  os << "sigma = " << format_double(spec.sigma) << '\n';
  os << "snr_db = " << join(spec.snr_db_list) << '\n';
  if (!spec.theta_db_set.empty())
    os << "theta_db_set = " << join(spec.theta_db_set) << '\n';
  if (!spec.prior.empty()) os << "prior = " << join(spec.prior) << '\n';
  if (spec.true_theta_db)
    os << "true_theta_db = " << format_double(*spec.true_theta_db) << '\n';
  os << "policy = ";
  for (std::size_t i = 0; i < spec.policies.size(); ++i) {
    if (i > 0) os << ", ";
    os << to_string(spec.policies[i]);
  }
  os << '\n';
  os << "horizon = " << spec.horizon << '\n';
  os << "runs = " << spec.runs << '\n';
  os << "seed = " << spec.seed << '\n';
  os << "round_robin_C = " << spec.round_robin_C << '\n';
  os << "g2_use_no_access_info = " << (spec.g2_use_no_access_info ? "true" : "false")
     << '\n';
  return os.str();
}

}  // namespace dsa
