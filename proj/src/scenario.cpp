#include "shipopt/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "shipopt/errors.hpp"

namespace shipopt {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
  throw ValidationError(path, reason);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
    }
  }
}

const json& get(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(path.empty() ? key : path + "." + key, "missing required key");
  }
  return *it;
}

double get_number(const json& obj, const char* key, const std::string& path) {
  const json& v = get(obj, key, path);
  if (!v.is_number()) {
    fail(path.empty() ? key : path + "." + key, "expected a number");
  }
  return v.get<double>();
}

int get_int(const json& obj, const char* key, const std::string& path) {
  const json& v = get(obj, key, path);
  if (!v.is_number_integer()) {
    fail(path.empty() ? key : path + "." + key, "expected an integer");
  }
  return v.get<int>();
}

bool get_bool(const json& obj, const char* key, const std::string& path) {
  const json& v = get(obj, key, path);
  if (!v.is_boolean()) {
    fail(path.empty() ? key : path + "." + key, "expected a boolean");
  }
  return v.get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& path) {
  const json& v = get(obj, key, path);
  if (!v.is_string()) {
    fail(path.empty() ? key : path + "." + key, "expected a string");
  }
  return v.get<std::string>();
}

DieselGenSpec parse_dg(const json& obj, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  reject_unknown_keys(obj,
                      {"id", "rated_power", "c_min", "c_max", "min_up_time",
                       "min_down_time", "ramp_up", "ramp_down", "alpha", "beta",
                       "startup_cost", "sfoc_points"},
                      path);
  DieselGenSpec dg;
  dg.id = get_string(obj, "id", path);
  dg.rated_power = get_number(obj, "rated_power", path);
  dg.c_min = get_number(obj, "c_min", path);
  dg.c_max = get_number(obj, "c_max", path);
  dg.min_up_time = get_number(obj, "min_up_time", path);
  dg.min_down_time = get_number(obj, "min_down_time", path);
  dg.ramp_up = get_number(obj, "ramp_up", path);
  dg.ramp_down = get_number(obj, "ramp_down", path);
  dg.alpha = get_number(obj, "alpha", path);
  dg.beta = get_number(obj, "beta", path);
  dg.startup_cost = get_number(obj, "startup_cost", path);
  const json& pts = get(obj, "sfoc_points", path);
  if (!pts.is_array()) fail(path + ".sfoc_points", "expected an array");
  for (size_t k = 0; k < pts.size(); ++k) {
    const json& p = pts[k];
    std::string ppath = path + ".sfoc_points[" + std::to_string(k) + "]";
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      fail(ppath, "expected a [power_fraction, g_per_kwh] pair");
    }
    dg.sfoc_points.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return dg;
}

BessSpec parse_bess(const json& obj) {
  const std::string path = "bess";
  if (!obj.is_object()) fail(path, "expected an object");
  reject_unknown_keys(obj,
                      {"rated_power", "rated_energy", "soc_initial", "soc_final",
                       "soc_min", "soc_max", "eta_charge", "eta_discharge",
                       "c_charge_min", "c_charge_max", "c_discharge_min",
                       "c_discharge_max", "alpha", "beta"},
                      path);
  BessSpec b;
  b.rated_power = get_number(obj, "rated_power", path);
  b.rated_energy = get_number(obj, "rated_energy", path);
  b.soc_initial = get_number(obj, "soc_initial", path);
  b.soc_final = get_number(obj, "soc_final", path);
  b.soc_min = get_number(obj, "soc_min", path);
  b.soc_max = get_number(obj, "soc_max", path);
  b.eta_charge = get_number(obj, "eta_charge", path);
  b.eta_discharge = get_number(obj, "eta_discharge", path);
  b.c_charge_min = get_number(obj, "c_charge_min", path);
  b.c_charge_max = get_number(obj, "c_charge_max", path);
  b.c_discharge_min = get_number(obj, "c_discharge_min", path);
  b.c_discharge_max = get_number(obj, "c_discharge_max", path);
  b.alpha = get_number(obj, "alpha", path);
  b.beta = obj.contains("beta") ? get_number(obj, "beta", path) : b.alpha;
  return b;
}

SecurityConfig parse_security(const json& obj) {
  const std::string path = "security";
  if (!obj.is_object()) fail(path, "expected an object");
  reject_unknown_keys(obj, {"big_m", "v_active_ocs", "min_online_units"}, path);
  SecurityConfig s;
  s.big_m = get_number(obj, "big_m", path);
  const json& ocs = get(obj, "v_active_ocs", path);
  if (!ocs.is_array()) fail(path + ".v_active_ocs", "expected an array");
  for (const auto& oc : ocs) {
    if (!oc.is_string()) fail(path + ".v_active_ocs", "expected strings");
    s.v_active_ocs.insert(oc.get<std::string>());
  }
  s.min_online_units = get_int(obj, "min_online_units", path);
  return s;
}

/// Returns k >= 1 such that value == k * unit, or 0 when no such integer
/// exists (within a relative tolerance).
int integer_multiple(double value, double unit) {
  if (unit <= 0.0 || value <= 0.0) return 0;
  double ratio = value / unit;
  double k = std::round(ratio);
  if (k < 1.0 || std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio)) return 0;
  return static_cast<int>(k);
}

}  // namespace

int ScenarioConfig::min_up_steps(int i) const {
  return integer_multiple(dgs[i].min_up_time, dt_minutes());
}

int ScenarioConfig::min_down_steps(int i) const {
  return integer_multiple(dgs[i].min_down_time, dt_minutes());
}

InitialUnitState ScenarioConfig::initial_state(int i) const {
  for (const auto& [id, state] : initial_commitment) {
    if (id == dgs[i].id) return state;
  }
  return {};
}

void validate_scenario(const ScenarioConfig& c) {
  if (c.dgs.empty()) fail("dgs", "at least one diesel generator is required");
  if (!(c.dt > 0.0)) fail("dt_hours", "must be positive");
  if (c.horizon < 1) fail("horizon_steps", "must be at least 1");
  if (c.n_segments < 1) fail("n_segments", "must be at least 1");
  if (!(c.fuel_price > 0.0)) fail("fuel_price_eur_per_kg", "must be positive");
  if (c.co2_factor < 0.0) fail("co2_kg_per_kg_fuel", "must be non-negative");

  std::set<std::string> seen_ids;
  for (size_t i = 0; i < c.dgs.size(); ++i) {
    const DieselGenSpec& dg = c.dgs[i];
    const std::string path = "dgs[" + std::to_string(i) + "]";
    if (dg.id.empty()) fail(path + ".id", "must be non-empty");
    if (!seen_ids.insert(dg.id).second) fail(path + ".id", "duplicate id");
    if (!(dg.rated_power > 0.0)) fail(path + ".rated_power", "must be positive");
    if (dg.c_min < 0.0) fail(path + ".c_min", "must be non-negative");
    if (dg.c_max < dg.c_min) fail(path + ".c_max", "must be >= c_min");
    if (dg.alpha < dg.c_max) fail(path + ".alpha", "must be >= c_max");
    if (!(dg.beta > 0.0)) fail(path + ".beta", "must be positive");
    if (dg.beta > dg.alpha) fail(path + ".beta", "must not exceed alpha");
    if (integer_multiple(dg.min_up_time, c.dt_minutes()) == 0) {
      fail(path + ".min_up_time",
           "must be a positive integer multiple of the time step (" +
               std::to_string(c.dt_minutes()) + " min)");
    }
    if (integer_multiple(dg.min_down_time, c.dt_minutes()) == 0) {
      fail(path + ".min_down_time",
           "must be a positive integer multiple of the time step (" +
               std::to_string(c.dt_minutes()) + " min)");
    }
    if (dg.ramp_up < 0.0) fail(path + ".ramp_up", "must be non-negative");
    if (dg.ramp_down < 0.0) fail(path + ".ramp_down", "must be non-negative");
    if (dg.startup_cost < 0.0) fail(path + ".startup_cost", "must be non-negative");
    if (dg.sfoc_points.size() < 3) {
      fail(path + ".sfoc_points", "needs at least 3 samples");
    }
    for (size_t k = 0; k + 1 < dg.sfoc_points.size(); ++k) {
      if (!(dg.sfoc_points[k].first < dg.sfoc_points[k + 1].first)) {
        fail(path + ".sfoc_points[" + std::to_string(k + 1) + "]",
             "power fractions must be strictly increasing");
      }
    }
  }

  if (c.bess) {
    const BessSpec& b = *c.bess;
    if (!(b.rated_power > 0.0)) fail("bess.rated_power", "must be positive");
    if (!(b.rated_energy > 0.0)) fail("bess.rated_energy", "must be positive");
    if (b.soc_min < 0.0 || b.soc_min > 1.0) fail("bess.soc_min", "must be in [0,1]");
    if (b.soc_max < 0.0 || b.soc_max > 1.0) fail("bess.soc_max", "must be in [0,1]");
    if (b.soc_min > b.soc_max) {
      fail("bess.soc_min", "must not exceed soc_max");
    }
    if (b.soc_initial < b.soc_min || b.soc_initial > b.soc_max) {
      fail("bess.soc_initial", "must lie within [soc_min, soc_max]");
    }
    if (b.soc_final < b.soc_min || b.soc_final > b.soc_max) {
      fail("bess.soc_final", "must lie within [soc_min, soc_max]");
    }
    if (!(b.eta_charge > 0.0) || b.eta_charge > 1.0) {
      fail("bess.eta_charge", "must be in (0,1]");
    }
    if (!(b.eta_discharge > 0.0) || b.eta_discharge > 1.0) {
      fail("bess.eta_discharge", "must be in (0,1]");
    }
    if (b.c_charge_min < 0.0) fail("bess.c_charge_min", "must be non-negative");
    if (b.c_charge_max < b.c_charge_min) {
      fail("bess.c_charge_max", "must be >= c_charge_min");
    }
    if (b.c_discharge_min < 0.0) fail("bess.c_discharge_min", "must be non-negative");
    if (b.c_discharge_max < b.c_discharge_min) {
      fail("bess.c_discharge_max", "must be >= c_discharge_min");
    }
    if (b.alpha < b.c_discharge_max) {
      fail("bess.alpha", "must be >= c_discharge_max");
    }
    if (!(b.beta > 0.0)) fail("bess.beta", "must be positive");
    if (b.beta > b.alpha) fail("bess.beta", "must not exceed alpha");
  }

  double max_cap = 0.0;
  for (const auto& dg : c.dgs) max_cap = std::max(max_cap, dg.rated_power);
  if (c.bess) max_cap = std::max(max_cap, c.bess->rated_power);
  double max_alpha = 0.0;
  for (const auto& dg : c.dgs) max_alpha = std::max(max_alpha, dg.alpha);
  if (c.bess) max_alpha = std::max(max_alpha, c.bess->alpha);
  if (c.security.big_m < 10.0 * max_cap * max_alpha) {
    fail("security.big_m",
         "must be at least 10x the largest rated power times the largest alpha");
  }
  if (c.security.min_online_units != 2) {
    fail("security.min_online_units", "must be 2");
  }

  for (size_t k = 0; k < c.initial_commitment.size(); ++k) {
    const auto& [id, state] = c.initial_commitment[k];
    const std::string path = "initial_commitment[" + std::to_string(k) + "]";
    if (!seen_ids.count(id)) fail(path + ".id", "unknown unit id '" + id + "'");
    if (state.power < 0.0) fail(path + ".power_mw", "must be non-negative");
    if (!state.on && state.power > 0.0) {
      fail(path + ".power_mw", "must be zero for a unit that starts off");
    }
  }
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario JSON: top level must be an object");

  reject_unknown_keys(doc,
                      {"dgs", "bess", "fuel_price_eur_per_kg", "co2_kg_per_kg_fuel",
                       "dt_hours", "horizon_steps", "n_segments", "security",
                       "initial_commitment"},
                      "");

  ScenarioConfig c;
  const json& dgs = get(doc, "dgs", "");
  if (!dgs.is_array()) fail("dgs", "expected an array");
  for (size_t i = 0; i < dgs.size(); ++i) {
    c.dgs.push_back(parse_dg(dgs[i], "dgs[" + std::to_string(i) + "]"));
  }
  if (doc.contains("bess") && !doc["bess"].is_null()) {
    c.bess = parse_bess(doc["bess"]);
  }
  c.fuel_price = get_number(doc, "fuel_price_eur_per_kg", "");
  c.co2_factor = get_number(doc, "co2_kg_per_kg_fuel", "");
  c.dt = get_number(doc, "dt_hours", "");
  c.horizon = get_int(doc, "horizon_steps", "");
  c.n_segments = get_int(doc, "n_segments", "");
  c.security = parse_security(get(doc, "security", ""));
  if (doc.contains("initial_commitment")) {
    const json& ic = doc["initial_commitment"];
    if (!ic.is_array()) fail("initial_commitment", "expected an array");
    for (size_t k = 0; k < ic.size(); ++k) {
      const json& e = ic[k];
      const std::string path = "initial_commitment[" + std::to_string(k) + "]";
      if (!e.is_object()) fail(path, "expected an object");
      reject_unknown_keys(e, {"id", "on", "power_mw"}, path);
      InitialUnitState st;
      st.on = get_bool(e, "on", path);
      st.power = e.contains("power_mw") ? get_number(e, "power_mw", path) : 0.0;
      c.initial_commitment.emplace_back(get_string(e, "id", path), st);
    }
  }

  validate_scenario(c);
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

}  // namespace shipopt
