#include "shipopt/loadgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "shipopt/errors.hpp"

namespace shipopt {

namespace {

using nlohmann::json;

/// Uniform double in [0,1) from the top 53 bits; keeps the stream
/// identical across platforms (mt19937_64 is specified bit-exactly).
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on explicit uniforms (std::normal_
/// distribution is not portable across standard libraries).
double standard_normal(std::mt19937_64& rng) {
  double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
  double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

int nearest_state(double x, const std::vector<double>& states) {
  int best = 0;
  double best_d = std::abs(x - states[0]);
  for (size_t k = 1; k < states.size(); ++k) {
    double d = std::abs(x - states[k]);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(k);
    }
  }
  return best;
}

void validate_chain(const MarkovChain& chain) {
  int n = chain.num_states();
  if (n == 0) throw ModelError("markov chain: empty state list");
  if (static_cast<int>(chain.transition.size()) != n) {
    throw ModelError("markov chain: transition matrix must be square");
  }
  for (int r = 0; r < n; ++r) {
    if (static_cast<int>(chain.transition[r].size()) != n) {
      throw ModelError("markov chain: transition matrix must be square");
    }
    double sum = 0.0;
    for (double p : chain.transition[r]) {
      if (p < 0.0) throw ModelError("markov chain: negative transition probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ModelError("markov chain: row " + std::to_string(r) +
                       " does not sum to 1");
    }
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

int LoadProfile::num_v_active() const {
  int n = 0;
  for (const auto& s : steps) n += s.v ? 1 : 0;
  return n;
}

MarkovChain estimate_chain(const std::vector<double>& sog_series,
                           const std::vector<double>& states) {
  if (states.empty()) throw ModelError("estimate_chain: empty state list");
  if (sog_series.size() < 2) {
    throw ModelError("estimate_chain: need at least two samples");
  }
  int n = static_cast<int>(states.size());
  std::vector<std::vector<long>> counts(n, std::vector<long>(n, 0));
  int prev = nearest_state(sog_series[0], states);
  for (size_t k = 1; k < sog_series.size(); ++k) {
    int cur = nearest_state(sog_series[k], states);
    ++counts[prev][cur];
    prev = cur;
  }
  MarkovChain chain;
  chain.states = states;
  chain.transition.assign(n, std::vector<double>(n, 0.0));
  for (int r = 0; r < n; ++r) {
    long total = 0;
    for (long c : counts[r]) total += c;
    if (total == 0) {
      chain.transition[r][r] = 1.0;  // unobserved state: self-loop
    } else {
      for (int c = 0; c < n; ++c) {
        chain.transition[r][c] =
            static_cast<double>(counts[r][c]) / static_cast<double>(total);
      }
    }
  }
  return chain;
}

double propulsion_power(double sog, const PropulsionCalibration& calibration) {
  if (sog < 0.0) throw ModelError("propulsion_power: negative speed");
  if (!(calibration.design_sog > 0.0) || !(calibration.design_power > 0.0)) {
    throw ModelError("propulsion_power: design point must be positive");
  }
  double ratio = sog / calibration.design_sog;
  double p = calibration.design_power * ratio * ratio * ratio;
  return std::min(p, calibration.design_power);
}

LoadProfile sample_profile(const MarkovChain& chain,
                           const std::vector<OcScheduleEntry>& ocs,
                           const ScenarioConfig& config,
                           const PropulsionCalibration& calibration,
                           std::uint64_t seed,
                           double hotel_noise_std_frac) {
  validate_chain(chain);
  if (hotel_noise_std_frac < 0.0) {
    throw ModelError("sample_profile: negative noise fraction");
  }
  int total_steps = 0;
  for (const auto& entry : ocs) {
    if (entry.steps <= 0) throw ModelError("sample_profile: non-positive OC duration");
    total_steps += entry.steps;
  }
  if (total_steps != config.horizon) {
    throw ModelError("sample_profile: OC durations sum to " +
                     std::to_string(total_steps) + " steps, scenario horizon is " +
                     std::to_string(config.horizon));
  }

  // Map every OC state onto a chain state index up front.
  std::vector<std::vector<int>> allowed(ocs.size());
  for (size_t o = 0; o < ocs.size(); ++o) {
    const OperatingCondition& oc = ocs[o].oc;
    if (oc.sog_states.empty()) {
      throw ModelError("operating condition '" + oc.name + "': no admissible speeds");
    }
    if (oc.hotel_load < 0.0) {
      throw ModelError("operating condition '" + oc.name + "': negative hotel load");
    }
    for (double s : oc.sog_states) {
      int idx = -1;
      for (int k = 0; k < chain.num_states(); ++k) {
        if (std::abs(chain.states[k] - s) <= 1e-9) {
          idx = k;
          break;
        }
      }
      if (idx < 0) {
        throw ModelError("operating condition '" + oc.name + "' references speed " +
                         std::to_string(s) + " kn that is not a chain state");
      }
      allowed[o].push_back(idx);
    }
  }

  std::mt19937_64 rng(seed);
  LoadProfile profile;
  profile.steps.reserve(total_steps);

  // The walk starts from the lowest admissible speed of the first OC.
  int state = allowed[0][0];
  for (size_t o = 0; o < ocs.size(); ++o) {
    const OperatingCondition& oc = ocs[o].oc;
    for (int k = 0; k < ocs[o].steps; ++k) {
      // Restrict the outgoing row to this OC's states and re-normalize;
      // when the restricted row has no mass, fall back to uniform.
      double mass = 0.0;
      for (int idx : allowed[o]) mass += chain.transition[state][idx];
      double u = uniform01(rng);
      int next = allowed[o].back();
      double acc = 0.0;
      for (int idx : allowed[o]) {
        double w = mass > 0.0 ? chain.transition[state][idx] / mass
                              : 1.0 / static_cast<double>(allowed[o].size());
        acc += w;
        if (u < acc) {
          next = idx;
          break;
        }
      }
      state = next;

      LoadStep step;
      step.sog = chain.states[state];
      step.oc_name = oc.name;
      step.v = oc.security_active;
      step.p_prop = propulsion_power(step.sog, calibration);
      if (hotel_noise_std_frac == 0.0 || oc.hotel_load == 0.0) {
        step.p_hotel = oc.hotel_load;
      } else {
        double sigma = hotel_noise_std_frac * oc.hotel_load;
        double zval = standard_normal(rng);
        while (std::abs(zval) > 3.0) zval = standard_normal(rng);
        step.p_hotel = std::max(0.0, oc.hotel_load + sigma * zval);
      }
      step.total_load = step.p_prop + step.p_hotel;
      if (!(step.total_load > 0.0)) {
        throw ModelError("sample_profile: zero total load at step " +
                         std::to_string(profile.steps.size() + 1));
      }
      profile.steps.push_back(std::move(step));
    }
  }
  return profile;
}

OcScheduleFile load_oc_schedule(const std::string& path,
                                const ScenarioConfig& config) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open oc-schedule file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("oc-schedule JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("oc-schedule JSON: top level must be an object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    static const std::set<std::string> allowed = {
        "propulsion", "hotel_noise_std_frac", "chain", "operating_conditions",
        "schedule"};
    if (!allowed.count(it.key())) {
      throw ParseError("oc-schedule JSON: unknown key '" + it.key() + "'");
    }
  }

  OcScheduleFile file;
  try {
    const json& prop = doc.at("propulsion");
    file.propulsion.design_sog = prop.at("design_sog_kn").get<double>();
    file.propulsion.design_power = prop.at("design_power_mw").get<double>();
    if (doc.contains("hotel_noise_std_frac")) {
      file.hotel_noise_std_frac = doc.at("hotel_noise_std_frac").get<double>();
    }

    const json& chain = doc.at("chain");
    file.chain.states = chain.at("states_kn").get<std::vector<double>>();
    if (chain.contains("transition")) {
      file.chain.transition =
          chain.at("transition").get<std::vector<std::vector<double>>>();
    } else if (chain.contains("sog_series_kn")) {
      file.chain = estimate_chain(
          chain.at("sog_series_kn").get<std::vector<double>>(), file.chain.states);
    } else {
      throw ParseError("oc-schedule JSON: chain needs 'transition' or 'sog_series_kn'");
    }

    std::vector<OperatingCondition> conditions;
    for (const json& o : doc.at("operating_conditions")) {
      OperatingCondition oc;
      oc.name = o.at("name").get<std::string>();
      if (oc.name.find(',') != std::string::npos) {
        throw ParseError("oc-schedule JSON: OC names must not contain commas");
      }
      oc.hotel_load = o.at("hotel_load_mw").get<double>();
      oc.sog_states = o.at("sog_states_kn").get<std::vector<double>>();
      oc.security_active = o.contains("security_active")
                               ? o.at("security_active").get<bool>()
                               : config.security.v_active_ocs.count(oc.name) > 0;
      conditions.push_back(std::move(oc));
    }

    for (const json& e : doc.at("schedule")) {
      std::string name = e.at("oc").get<std::string>();
      auto it = std::find_if(conditions.begin(), conditions.end(),
                             [&](const auto& oc) { return oc.name == name; });
      if (it == conditions.end()) {
        throw ParseError("oc-schedule JSON: schedule references unknown OC '" +
                         name + "'");
      }
      file.schedule.push_back({*it, e.at("steps").get<int>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("oc-schedule JSON: ") + e.what());
  }

  validate_chain(file.chain);
  return file;
}

void write_profile_csv(const LoadProfile& profile, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write profile file: " + path);
  out << "t,oc,sog_kn,p_prop_mw,p_hotel_mw,p_load_mw,v\n";
  for (int t = 0; t < profile.horizon(); ++t) {
    const LoadStep& s = profile.steps[t];
    out << (t + 1) << ',' << s.oc_name << ',' << format_double(s.sog) << ','
        << format_double(s.p_prop) << ',' << format_double(s.p_hotel) << ','
        << format_double(s.total_load) << ',' << (s.v ? 1 : 0) << '\n';
  }
  if (!out) throw IoError("failed writing profile file: " + path);
}

LoadProfile read_profile_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open profile file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("profile CSV: empty file");
  if (line != "t,oc,sog_kn,p_prop_mw,p_hotel_mw,p_load_mw,v") {
    throw ParseError("profile CSV: unexpected header '" + line + "'");
  }
  LoadProfile profile;
  int expected_t = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 7) {
      throw ParseError("profile CSV: expected 7 fields in line '" + line + "'");
    }
    LoadStep s;
    try {
      if (std::stoi(fields[0]) != expected_t) {
        throw ParseError("profile CSV: steps must be consecutive from 1");
      }
      s.oc_name = fields[1];
      s.sog = std::stod(fields[2]);
      s.p_prop = std::stod(fields[3]);
      s.p_hotel = std::stod(fields[4]);
      s.total_load = std::stod(fields[5]);
      s.v = std::stoi(fields[6]) != 0;
    } catch (const std::invalid_argument&) {
      throw ParseError("profile CSV: malformed number in line '" + line + "'");
    }
    if (!(s.total_load > 0.0)) {
      throw ParseError("profile CSV: total load must be positive at t=" +
                       fields[0]);
    }
    profile.steps.push_back(std::move(s));
    ++expected_t;
  }
  if (profile.steps.empty()) throw ParseError("profile CSV: no data rows");
  return profile;
}

}  // namespace shipopt
