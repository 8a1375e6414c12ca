#include "asyncisac/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "asyncisac/errors.hpp"

namespace asyncisac {

namespace {

int line_of(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  return m.line >= 0 ? m.line + 1 : 0;
}

[[noreturn]] void fail(const std::string& field, const YAML::Node& n, const std::string& what) {
  throw ConfigError(field, line_of(n), what);
}

void check_keys(const YAML::Node& map, const std::string& prefix, const std::set<std::string>& allowed) {
  if (!map.IsMap()) fail(prefix.empty() ? "<root>" : prefix, map, "expected a mapping");
  for (const auto& kv : map) {
    const std::string key = kv.first.as<std::string>();
    if (!allowed.contains(key)) {
      throw ConfigError(prefix.empty() ? key : prefix + "." + key, line_of(kv.first), "unknown key");
    }
  }
}

std::int64_t as_int(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail(field, n, "expected an integer");
  try {
    return n.as<std::int64_t>();
  } catch (const YAML::Exception&) {
    fail(field, n, "expected an integer, got '" + n.Scalar() + "'");
  }
}

std::uint64_t as_uint(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar() || n.Scalar().empty() || n.Scalar().front() == '-') {
    fail(field, n, "expected a non-negative integer");
  }
  try {
    return n.as<std::uint64_t>();
  } catch (const YAML::Exception&) {
    fail(field, n, "expected a non-negative integer, got '" + n.Scalar() + "'");
  }
}

double as_real(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail(field, n, "expected a number");
  double v = 0.0;
  try {
    v = n.as<double>();
  } catch (const YAML::Exception&) {
    fail(field, n, "expected a number, got '" + n.Scalar() + "'");
  }
  if (!std::isfinite(v)) fail(field, n, "must be finite");
  return v;
}

bool as_flag(const YAML::Node& n, const std::string& field) {
  if (!n.IsScalar()) fail(field, n, "expected true or false");
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    fail(field, n, "expected true or false, got '" + n.Scalar() + "'");
  }
}

YAML::Node required(const YAML::Node& map, const std::string& key, const std::string& field) {
  const YAML::Node n = map[key];
  if (!n) fail(field, map, "required key missing");
  return n;
}

CampaignMode parse_mode(const YAML::Node& n) {
  const std::string s = n.IsScalar() ? n.Scalar() : "";
  if (s == "bounds") return CampaignMode::bounds;
  if (s == "estimator") return CampaignMode::estimator;
  if (s == "verify") return CampaignMode::verify;
  fail("mode", n, "expected bounds, estimator or verify");
}

CampaignConfig parse_node(const YAML::Node& root) {
  if (!root || root.IsNull()) throw ConfigError("<root>", 0, "empty configuration");
  check_keys(root, "",
             {"array", "snapshots", "snr_db", "dynamic_power", "static_channel", "theta_d", "phase_spread",
              "trials", "bound_trials", "finite_t_bound", "seed", "output", "mode", "estimator"});
  CampaignConfig cfg;

  const YAML::Node array = required(root, "array", "array");
  check_keys(array, "array", {"antennas", "spacing"});
  const YAML::Node m = required(array, "antennas", "array.antennas");
  const std::int64_t antennas = as_int(m, "array.antennas");
  if (antennas < 2 || antennas > 4096) fail("array.antennas", m, "must be in [2, 4096]");
  cfg.antennas = static_cast<int>(antennas);
  if (const YAML::Node n = array["spacing"]) {
    cfg.spacing = as_real(n, "array.spacing");
    if (!(cfg.spacing > 0.0)) fail("array.spacing", n, "must be positive");
  }

  const YAML::Node t = required(root, "snapshots", "snapshots");
  const std::int64_t snapshots = as_int(t, "snapshots");
  if (snapshots < 2 || snapshots > 1'000'000) fail("snapshots", t, "must be in [2, 1000000]");
  cfg.snapshots = static_cast<int>(snapshots);

  const YAML::Node snr = required(root, "snr_db", "snr_db");
  if (snr.IsScalar()) {
    cfg.snr_db.push_back(as_real(snr, "snr_db"));
  } else if (snr.IsSequence()) {
    for (const auto& v : snr) cfg.snr_db.push_back(as_real(v, "snr_db"));
  } else {
    fail("snr_db", snr, "expected a number or a list of numbers");
  }
  if (cfg.snr_db.empty()) fail("snr_db", snr, "must not be empty");

  const YAML::Node trials = required(root, "trials", "trials");
  cfg.trials = as_int(trials, "trials");
  if (cfg.trials < 1) fail("trials", trials, "must be >= 1");

  if (const YAML::Node n = root["dynamic_power"]) {
    cfg.dynamic_power = as_real(n, "dynamic_power");
    if (!(cfg.dynamic_power > 0.0)) fail("dynamic_power", n, "must be positive");
  }
  if (const YAML::Node n = root["theta_d"]) {
    cfg.theta_d = as_real(n, "theta_d");
    if (std::abs(cfg.theta_d) >= 1.5707963267948966) fail("theta_d", n, "must lie in (-pi/2, pi/2)");
  }
  if (const YAML::Node n = root["phase_spread"]) {
    cfg.phase_spread = as_real(n, "phase_spread");
    if (cfg.phase_spread < 0.0 || cfg.phase_spread > 3.141592653589793) {
      fail("phase_spread", n, "must be in [0, pi]");
    }
  }
  if (const YAML::Node n = root["bound_trials"]) {
    cfg.bound_trials = as_int(n, "bound_trials");
    if (cfg.bound_trials < 1) fail("bound_trials", n, "must be >= 1");
  }
  if (const YAML::Node n = root["finite_t_bound"]) cfg.finite_t_bound = as_flag(n, "finite_t_bound");
  if (const YAML::Node n = root["seed"]) cfg.seed = as_uint(n, "seed");
  if (const YAML::Node n = root["output"]) {
    if (!n.IsScalar()) fail("output", n, "expected a path");
    cfg.output = n.Scalar();
  }
  if (const YAML::Node n = root["mode"]) cfg.mode = parse_mode(n);

  if (const YAML::Node sc = root["static_channel"]) {
    check_keys(sc, "static_channel", {"mode", "power", "values"});
    std::string mode = "random";
    if (const YAML::Node n = sc["mode"]) {
      mode = n.IsScalar() ? n.Scalar() : "";
      if (mode != "random" && mode != "fixed") fail("static_channel.mode", n, "expected random or fixed");
    }
    cfg.static_channel.fixed = mode == "fixed";
    if (const YAML::Node n = sc["power"]) {
      cfg.static_channel.power = as_real(n, "static_channel.power");
      if (!(cfg.static_channel.power > 0.0)) fail("static_channel.power", n, "must be positive");
    }
    if (const YAML::Node n = sc["values"]) {
      if (!n.IsSequence()) fail("static_channel.values", n, "expected a list of [re, im] pairs");
      for (const auto& v : n) {
        if (!v.IsSequence() || v.size() != 2) fail("static_channel.values", v, "expected [re, im]");
        cfg.static_channel.values.emplace_back(as_real(v[0], "static_channel.values"),
                                               as_real(v[1], "static_channel.values"));
      }
    }
    if (cfg.static_channel.fixed && static_cast<int>(cfg.static_channel.values.size()) != cfg.antennas) {
      fail("static_channel.values", sc, "fixed static channel needs exactly array.antennas entries");
    }
    if (!cfg.static_channel.fixed && !cfg.static_channel.values.empty()) {
      fail("static_channel.values", sc, "values are only allowed with mode: fixed");
    }
  }

  if (const YAML::Node est = root["estimator"]) {
    check_keys(est, "estimator", {"grid_points", "refine", "source_count"});
    if (const YAML::Node n = est["grid_points"]) {
      const std::int64_t g = as_int(n, "estimator.grid_points");
      if (g < 64 || g > 1'000'000) fail("estimator.grid_points", n, "must be in [64, 1000000]");
      cfg.estimator.grid_points = static_cast<int>(g);
    }
    if (const YAML::Node n = est["refine"]) cfg.estimator.refine = as_flag(n, "estimator.refine");
    if (const YAML::Node n = est["source_count"]) {
      const std::int64_t s = as_int(n, "estimator.source_count");
      if (s < 1 || s >= cfg.antennas) fail("estimator.source_count", n, "must be in [1, antennas)");
      cfg.estimator.source_count = static_cast<int>(s);
    }
  }
  return cfg;
}

}  // namespace

std::string to_string(CampaignMode m) {
  switch (m) {
    case CampaignMode::bounds:
      return "bounds";
    case CampaignMode::estimator:
      return "estimator";
    case CampaignMode::verify:
      return "verify";
  }
  return "estimator";
}

bool CampaignConfig::operator==(const CampaignConfig& o) const {
  return antennas == o.antennas && spacing == o.spacing && snapshots == o.snapshots && snr_db == o.snr_db &&
         dynamic_power == o.dynamic_power && static_channel == o.static_channel && theta_d == o.theta_d &&
         phase_spread == o.phase_spread && trials == o.trials && bound_trials == o.bound_trials &&
         finite_t_bound == o.finite_t_bound && seed == o.seed && output == o.output && mode == o.mode &&
         estimator.grid_points == o.estimator.grid_points && estimator.refine == o.estimator.refine &&
         estimator.source_count == o.estimator.source_count;
}

CampaignConfig parse_config_string(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("<root>", e.mark.line >= 0 ? e.mark.line + 1 : 0, e.msg);
  }
  return parse_node(root);
}

CampaignConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_string(buf.str());
}

std::string emit_config(const CampaignConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "array" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "antennas" << YAML::Value << cfg.antennas;
  out << YAML::Key << "spacing" << YAML::Value << cfg.spacing;
  out << YAML::EndMap;
  out << YAML::Key << "snapshots" << YAML::Value << cfg.snapshots;
  out << YAML::Key << "snr_db" << YAML::Value << YAML::Flow << cfg.snr_db;
  out << YAML::Key << "dynamic_power" << YAML::Value << cfg.dynamic_power;
  out << YAML::Key << "static_channel" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "mode" << YAML::Value << (cfg.static_channel.fixed ? "fixed" : "random");
  out << YAML::Key << "power" << YAML::Value << cfg.static_channel.power;
  if (cfg.static_channel.fixed) {
    out << YAML::Key << "values" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : cfg.static_channel.values) {
      out << YAML::Flow << YAML::BeginSeq << v.real() << v.imag() << YAML::EndSeq;
    }
    out << YAML::EndSeq;
  }
  out << YAML::EndMap;
  out << YAML::Key << "theta_d" << YAML::Value << cfg.theta_d;
  out << YAML::Key << "phase_spread" << YAML::Value << cfg.phase_spread;
  out << YAML::Key << "trials" << YAML::Value << cfg.trials;
  out << YAML::Key << "bound_trials" << YAML::Value << cfg.bound_trials;
  out << YAML::Key << "finite_t_bound" << YAML::Value << cfg.finite_t_bound;
  out << YAML::Key << "seed" << YAML::Value << cfg.seed;
  out << YAML::Key << "output" << YAML::Value << YAML::DoubleQuoted << cfg.output;
  out << YAML::Key << "mode" << YAML::Value << to_string(cfg.mode);
  out << YAML::Key << "estimator" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "grid_points" << YAML::Value << cfg.estimator.grid_points;
  out << YAML::Key << "refine" << YAML::Value << cfg.estimator.refine;
  out << YAML::Key << "source_count" << YAML::Value << cfg.estimator.source_count;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void validate_config(const CampaignConfig& cfg) {
  // Re-parsing the emitted form runs every field check in one place.
  parse_config_string(emit_config(cfg));
}

}  // namespace asyncisac
