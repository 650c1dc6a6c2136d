#include "swapsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace swapsim {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view value, const std::string& origin, int line,
                    const std::string& key) {
  const std::string text(value);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    fail(origin, line, "invalid number '" + text + "' for key '" + key + "'");
  return v;
}

std::int64_t parse_int(std::string_view value, const std::string& origin, int line,
                       const std::string& key) {
  const std::string text(value);
  char* end = nullptr;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0')
    fail(origin, line, "invalid integer '" + text + "' for key '" + key + "'");
  return v;
}

std::uint64_t parse_uint(std::string_view value, const std::string& origin, int line,
                         const std::string& key) {
  const std::string text(value);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (end == text.c_str() || *end != '\0' || text[0] == '-')
    fail(origin, line, "invalid unsigned integer '" + text + "' for key '" + key + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  // Exact integers (counts, totals) print without an exponent.
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 9.0e15) {
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char probe[40];
    std::snprintf(probe, sizeof probe, "%.*g", prec, v);
    if (std::strtod(probe, nullptr) == v) return probe;
  }
  return buf;
}

ExperimentConfig parse_config_text(std::string_view text, const std::string& origin) {
  ExperimentConfig cfg;
  std::string section;
  std::set<std::string> seen;
  bool c0_set = false, c1_set = false;

  static const std::set<std::string> kSections = {
      "run",           "source",        "analyzers",      "timing",       "channel.alice",
      "channel.bob",   "detector.bsa_e", "detector.bsa_f", "detector.alice", "detector.bob"};

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto comment = raw.find_first_of("#;");
    if (comment != std::string_view::npos) raw = raw.substr(0, comment);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, line_no, "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!kSections.count(section)) fail(origin, line_no, "unknown section '" + section + "'");
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(origin, line_no, "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail(origin, line_no, "missing key before '='");
    if (value.empty()) fail(origin, line_no, "missing value for key '" + key + "'");
    if (section.empty()) fail(origin, line_no, "key '" + key + "' appears before any section");

    const std::string qual = section + "." + key;
    if (!seen.insert(qual).second) fail(origin, line_no, "duplicate key '" + qual + "'");

    const auto unknown_key = [&]() { fail(origin, line_no, "unknown key '" + qual + "'"); };

    if (section == "run") {
      if (key == "mode") {
        if (value == "analytic")
          cfg.mode = RunMode::analytic;
        else if (value == "monte_carlo" || value == "mc")
          cfg.mode = RunMode::monte_carlo;
        else
          fail(origin, line_no, "run.mode must be 'analytic' or 'monte_carlo'");
      } else if (key == "pulses_per_point") {
        cfg.pulses_per_point = parse_int(value, origin, line_no, qual);
      } else if (key == "seed") {
        cfg.seed = parse_uint(value, origin, line_no, qual);
      } else {
        unknown_key();
      }
    } else if (section == "source") {
      if (key == "distribution") {
        if (value == "poisson")
          cfg.source.distribution = PairNumberDistribution::poisson;
        else if (value == "thermal")
          cfg.source.distribution = PairNumberDistribution::thermal;
        else if (value == "one_pair")
          cfg.source.distribution = PairNumberDistribution::one_pair;
        else
          fail(origin, line_no, "source.distribution must be poisson, thermal or one_pair");
      } else if (key == "mu") {
        cfg.source.mu = parse_double(value, origin, line_no, qual);
      } else if (key == "delta") {
        cfg.source.delta = parse_double(value, origin, line_no, qual);
      } else if (key == "c0") {
        cfg.source.c0 = parse_double(value, origin, line_no, qual);
        c0_set = true;
      } else if (key == "c1") {
        cfg.source.c1 = parse_double(value, origin, line_no, qual);
        c1_set = true;
      } else if (key == "xi") {
        cfg.source.xi = parse_double(value, origin, line_no, qual);
      } else {
        unknown_key();
      }
    } else if (section == "analyzers") {
      if (key == "alpha")
        cfg.alpha = parse_double(value, origin, line_no, qual);
      else if (key == "beta_start")
        cfg.grid.beta_start = parse_double(value, origin, line_no, qual);
      else if (key == "beta_end")
        cfg.grid.beta_end = parse_double(value, origin, line_no, qual);
      else if (key == "scan_points")
        cfg.grid.points = static_cast<int>(parse_int(value, origin, line_no, qual));
      else
        unknown_key();
    } else if (section == "timing") {
      if (key == "tau_ns")
        cfg.timing.tau_ns = parse_double(value, origin, line_no, qual);
      else if (key == "rep_rate_mhz")
        cfg.timing.rep_rate_mhz = parse_double(value, origin, line_no, qual);
      else
        unknown_key();
    } else if (section == "channel.alice" || section == "channel.bob") {
      ChannelParams& ch = section == "channel.alice" ? cfg.channel_alice : cfg.channel_bob;
      if (key == "length_km")
        ch.length_km = parse_double(value, origin, line_no, qual);
      else if (key == "transmission")
        ch.transmission = parse_double(value, origin, line_no, qual);
      else if (key == "latency_us")
        ch.latency_us = parse_double(value, origin, line_no, qual);
      else
        unknown_key();
    } else {  // detector.*
      DetectorId id = DetectorId::bsa_e;
      if (section == "detector.bsa_f")
        id = DetectorId::bsa_f;
      else if (section == "detector.alice")
        id = DetectorId::alice;
      else if (section == "detector.bob")
        id = DetectorId::bob;
      if (key == "efficiency")
        cfg.detectors[id].efficiency = parse_double(value, origin, line_no, qual);
      else if (key == "dark_prob_per_gate")
        cfg.detectors[id].dark_prob_per_gate = parse_double(value, origin, line_no, qual);
      else
        unknown_key();
    }
  }

  // A lone amplitude pins its partner through normalization.
  if (c0_set && !c1_set)
    cfg.source.c1 = std::sqrt(std::max(0.0, 1.0 - cfg.source.c0 * cfg.source.c0));
  else if (c1_set && !c0_set)
    cfg.source.c0 = std::sqrt(std::max(0.0, 1.0 - cfg.source.c1 * cfg.source.c1));

  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

std::string dump_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[run]\n";
  out << "mode = " << to_string(cfg.mode) << "\n";
  out << "pulses_per_point = " << cfg.pulses_per_point << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "\n[source]\n";
  out << "distribution = " << to_string(cfg.source.distribution) << "\n";
  out << "mu = " << format_double(cfg.source.mu) << "\n";
  out << "delta = " << format_double(cfg.source.delta) << "\n";
  out << "c0 = " << format_double(cfg.source.c0) << "\n";
  out << "c1 = " << format_double(cfg.source.c1) << "\n";
  out << "xi = " << format_double(cfg.source.xi) << "\n";
  out << "\n[analyzers]\n";
  out << "alpha = " << format_double(cfg.alpha) << "\n";
  out << "beta_start = " << format_double(cfg.grid.beta_start) << "\n";
  out << "beta_end = " << format_double(cfg.grid.beta_end) << "\n";
  out << "scan_points = " << cfg.grid.points << "\n";
  out << "\n[timing]\n";
  out << "tau_ns = " << format_double(cfg.timing.tau_ns) << "\n";
  out << "rep_rate_mhz = " << format_double(cfg.timing.rep_rate_mhz) << "\n";
  const auto dump_channel = [&out](const char* name, const ChannelParams& ch) {
    out << "\n[channel." << name << "]\n";
    out << "length_km = " << format_double(ch.length_km) << "\n";
    out << "transmission = " << format_double(ch.transmission) << "\n";
    out << "latency_us = " << format_double(ch.latency_us) << "\n";
  };
  dump_channel("alice", cfg.channel_alice);
  dump_channel("bob", cfg.channel_bob);
  for (auto id : kAllDetectors) {
    out << "\n[detector." << to_string(id) << "]\n";
    out << "efficiency = " << format_double(cfg.detectors[id].efficiency) << "\n";
    out << "dark_prob_per_gate = " << format_double(cfg.detectors[id].dark_prob_per_gate) << "\n";
  }
  return out.str();
}

}  // namespace swapsim
