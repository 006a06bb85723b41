#include "schedule.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "kinkfold/errors.hpp"

namespace kinkfold::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(const KeyValue& kv, const std::string& what) {
  throw SchemaError("line " + std::to_string(kv.line) + " (" + kv.key + "): " + what);
}

std::vector<std::string> words(const KeyValue& kv) {
  std::istringstream in(kv.value);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  if (out.empty()) fail(kv, "missing value");
  return out;
}

double to_double(const KeyValue& kv, const std::string& w) {
  double v = 0.0;
  const auto res = std::from_chars(w.data(), w.data() + w.size(), v);
  if (res.ec != std::errc() || res.ptr != w.data() + w.size() || !std::isfinite(v)) {
    fail(kv, "'" + w + "' is not a number");
  }
  return v;
}

std::uint64_t to_uint(const KeyValue& kv, const std::string& w) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(w.data(), w.data() + w.size(), v);
  if (res.ec != std::errc() || res.ptr != w.data() + w.size()) {
    fail(kv, "'" + w + "' is not a non-negative integer");
  }
  return v;
}

const std::string& single(const KeyValue& kv, const std::vector<std::string>& w) {
  if (w.size() != 1) fail(kv, "expected one value");
  return w.front();
}

bool to_bool(const KeyValue& kv, const std::string& w) {
  if (w == "true" || w == "1" || w == "yes") return true;
  if (w == "false" || w == "0" || w == "no") return false;
  fail(kv, "'" + w + "' is not a boolean");
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    KeyValue kv{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line_no};
    if (kv.key.empty()) throw SchemaError("line " + std::to_string(line_no) + ": empty key");
    out.push_back(std::move(kv));
    if (end == text.size()) break;
  }
  return out;
}

MCConfig parse_mc_schedule(std::string_view text, bool* seed_set) {
  MCConfig config;
  if (seed_set) *seed_set = false;
  for (const KeyValue& kv : parse_key_values(text)) {
    const std::vector<std::string> w = words(kv);
    if (kv.key == "stage") {
      if (w.size() != 2) fail(kv, "expected '<steps> <kT>'");
      config.schedule.push_back({to_uint(kv, w[0]), to_double(kv, w[1])});
    } else if (kv.key == "ramp") {
      if (w.size() != 4) fail(kv, "expected '<kT_first> <kT_last> <stages> <steps>'");
      const auto stages = geometric_schedule(to_double(kv, w[0]), to_double(kv, w[1]),
                                             to_uint(kv, w[2]), to_uint(kv, w[3]));
      config.schedule.insert(config.schedule.end(), stages.begin(), stages.end());
    } else if (kv.key == "sigma_kappa") {
      config.sigma_kappa = to_double(kv, single(kv, w));
    } else if (kv.key == "sigma_tau") {
      config.sigma_tau = to_double(kv, single(kv, w));
    } else if (kv.key == "measure_every") {
      config.measure_every = to_uint(kv, single(kv, w));
    } else if (kv.key == "kappa_only") {
      config.kappa_only = to_bool(kv, single(kv, w));
    } else if (kv.key == "seed") {
      config.seed = to_uint(kv, single(kv, w));
      if (seed_set) *seed_set = true;
    } else {
      fail(kv, "unknown schedule key");
    }
  }
  config.validate();
  return config;
}

ThetaScanConfig parse_theta_config(std::string_view text, bool* seed_set) {
  ThetaScanConfig config;
  if (seed_set) *seed_set = false;
  for (const KeyValue& kv : parse_key_values(text)) {
    const std::vector<std::string> w = words(kv);
    if (kv.key == "lengths") {
      config.chain_lengths.clear();
      for (const auto& x : w) config.chain_lengths.push_back(to_uint(kv, x));
    } else if (kv.key == "kT") {
      config.kTs.clear();
      for (const auto& x : w) config.kTs.push_back(to_double(kv, x));
    } else if (kv.key == "kT_ramp") {
      if (w.size() != 3) fail(kv, "expected '<kT_first> <kT_last> <count>'");
      config.kTs.clear();
      for (const auto& s : geometric_schedule(to_double(kv, w[0]), to_double(kv, w[1]),
                                              to_uint(kv, w[2]), 0)) {
        config.kTs.push_back(s.kT);
      }
    } else if (kv.key == "steps_per_point") {
      config.steps_per_point = to_uint(kv, single(kv, w));
    } else if (kv.key == "measure_every") {
      config.measure_every = to_uint(kv, single(kv, w));
    } else if (kv.key == "burn_in") {
      config.burn_in_fraction = to_double(kv, single(kv, w));
    } else if (kv.key == "sigma_kappa") {
      config.sigma_kappa = to_double(kv, single(kv, w));
    } else if (kv.key == "sigma_tau") {
      config.sigma_tau = to_double(kv, single(kv, w));
    } else if (kv.key == "threads") {
      config.threads = static_cast<unsigned>(to_uint(kv, single(kv, w)));
    } else if (kv.key == "seed") {
      config.seed = to_uint(kv, single(kv, w));
      if (seed_set) *seed_set = true;
    } else {
      fail(kv, "unknown theta-scan key");
    }
  }
  return config;
}

}  // namespace kinkfold::cli
