#include "shipopt/milp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "shipopt/errors.hpp"

namespace shipopt {

namespace {

std::string tag_it(const char* eq, int i, int t) {
  return std::string(eq) + "_I" + std::to_string(i + 1) + "_T" + std::to_string(t + 1);
}

std::string tag_t(const char* eq, int t) {
  return std::string(eq) + "_T" + std::to_string(t + 1);
}

std::string tag_jt(const char* eq, int j, int t) {
  return std::string(eq) + "_J" + std::to_string(j + 1) + "_T" + std::to_string(t + 1);
}

std::string tag_jrt(const char* eq, int j, int r, int t) {
  return std::string(eq) + "_J" + std::to_string(j + 1) + "_R" + std::to_string(r + 1) +
         "_T" + std::to_string(t + 1);
}

}  // namespace

int MilpModel::s(int j, int t) const {
  auto it = idx_s.find({j, t});
  return it == idx_s.end() ? -1 : it->second;
}

int MilpModel::f(int j, int t) const {
  auto it = idx_f.find({j, t});
  return it == idx_f.end() ? -1 : it->second;
}

int MilpModel::num_binaries() const {
  int n = 0;
  for (const Variable& v : vars) n += v.domain == VarDomain::Binary ? 1 : 0;
  return n;
}

int MilpModel::num_integers() const {
  int n = 0;
  for (const Variable& v : vars) n += v.domain != VarDomain::Continuous ? 1 : 0;
  return n;
}

void MilpModel::check_consistency() const {
  std::set<std::string> names;
  for (const Variable& v : vars) {
    if (!names.insert(v.name).second) {
      throw ModelError("model: duplicate variable name " + v.name);
    }
    if (v.lb > v.ub) throw ModelError("model: crossed bounds on " + v.name);
    if (v.domain == VarDomain::Binary && (v.lb < 0.0 || v.ub > 1.0)) {
      throw ModelError("model: binary " + v.name + " not bounded by [0,1]");
    }
  }
  std::set<std::string> row_names;
  for (const Row& r : rows) {
    if (!row_names.insert(r.tag).second) {
      throw ModelError("model: duplicate row tag " + r.tag);
    }
    for (const RowEntry& e : r.entries) {
      if (e.col < 0 || e.col >= num_vars()) {
        throw ModelError("model: row " + r.tag + " references undeclared variable");
      }
    }
  }
}

std::vector<Combination> enumerate_combinations(const std::vector<std::string>& ids) {
  int n = static_cast<int>(ids.size());
  if (n < 2) {
    throw ModelError(
        "security requires at least 2 generating units, got " + std::to_string(n));
  }
  // Lexicographic over member positions; every prefix extends before the
  // next sibling starts, so {0,1} < {0,1,2} < {0,2} < {1,2}.
  std::vector<Combination> out;
  std::vector<int> stack;
  auto emit = [&]() {
    if (stack.size() < 2) return;
    Combination c;
    c.index = static_cast<int>(out.size()) + 1;
    c.members = stack;
    for (int pos : stack) c.ids.push_back(ids[pos]);
    out.push_back(std::move(c));
  };
  std::function<void(int)> rec = [&](int next) {
    for (int k = next; k < n; ++k) {
      stack.push_back(k);
      emit();
      rec(k + 1);
      stack.pop_back();
    }
  };
  rec(0);
  return out;
}

MilpModel build_model(const ScenarioConfig& config,
                      const std::vector<PiecewiseFuelCurve>& curves,
                      const LoadProfile& profile) {
  const int N = config.num_dgs();
  const int T = config.horizon;
  if (static_cast<int>(curves.size()) != N) {
    throw ModelError("build_model: need one fuel curve per DG");
  }
  if (profile.horizon() != T) {
    throw ModelError("build_model: profile has " + std::to_string(profile.horizon()) +
                     " steps, scenario horizon is " + std::to_string(T));
  }

  MilpModel model;
  model.num_dgs = N;
  model.horizon = T;
  model.has_bess = config.bess.has_value();
  for (int t = 0; t < T; ++t) {
    if (profile.v_active(t)) model.v_active_steps.push_back(t);
  }
  if (!model.v_active_steps.empty() && config.num_units() < 2) {
    throw ModelError("security is active but the plant has fewer than 2 units");
  }
  if (config.num_units() >= 2) {
    std::vector<std::string> ids;
    for (const auto& dg : config.dgs) ids.push_back(dg.id);
    if (config.bess) ids.push_back("bess");
    model.combinations = enumerate_combinations(ids);
  }

  const double dt = config.dt;
  const double cf = config.fuel_price;

  model.max_segments = 0;
  for (const auto& c : curves) {
    model.max_segments = std::max(model.max_segments, c.num_segments());
  }

  auto add_var = [&](const std::string& name, VarRef ref, VarDomain dom, double lb,
                     double ub, double cost) {
    model.vars.push_back(Variable{name, ref, dom, lb, ub, cost});
    return model.num_vars() - 1;
  };

  using K = VarRef::Kind;
  model.idx_delta.assign(static_cast<size_t>(N) * model.max_segments * T, -1);
  model.idx_pdg.assign(static_cast<size_t>(N) * T, -1);
  model.idx_z.assign(static_cast<size_t>(N) * T, -1);
  model.idx_u.assign(static_cast<size_t>(N) * T, -1);

  for (int i = 0; i < N; ++i) {
    const auto& curve = curves[i];
    for (int m = 0; m < curve.num_segments(); ++m) {
      for (int t = 0; t < T; ++t) {
        std::string name = "DELTA_I" + std::to_string(i + 1) + "_M" +
                           std::to_string(m + 1) + "_T" + std::to_string(t + 1);
        model.idx_delta[(static_cast<size_t>(i) * model.max_segments + m) * T + t] =
            add_var(name, {K::Delta, i, m, t, -1}, VarDomain::Continuous, 0.0,
                    curve.segment_width, curve.segment_slopes[m] * cf * dt);
      }
    }
  }
  for (int i = 0; i < N; ++i) {
    const auto& dg = config.dgs[i];
    for (int t = 0; t < T; ++t) {
      model.idx_pdg[static_cast<size_t>(i) * T + t] =
          add_var("PDG_I" + std::to_string(i + 1) + "_T" + std::to_string(t + 1),
                  {K::PDg, i, -1, t, -1}, VarDomain::Continuous, 0.0,
                  dg.c_max * dg.rated_power, 0.0);
    }
  }
  for (int i = 0; i < N; ++i) {
    for (int t = 0; t < T; ++t) {
      model.idx_z[static_cast<size_t>(i) * T + t] =
          add_var("Z_I" + std::to_string(i + 1) + "_T" + std::to_string(t + 1),
                  {K::Z, i, -1, t, -1}, VarDomain::Binary, 0.0, 1.0,
                  curves[i].intercept * cf * dt);
    }
  }
  for (int i = 0; i < N; ++i) {
    for (int t = 0; t < T; ++t) {
      model.idx_u[static_cast<size_t>(i) * T + t] =
          add_var("U_I" + std::to_string(i + 1) + "_T" + std::to_string(t + 1),
                  {K::U, i, -1, t, -1}, VarDomain::Binary, 0.0, 1.0,
                  config.dgs[i].startup_cost);
    }
  }

  if (config.bess) {
    const BessSpec& b = *config.bess;
    model.idx_pc.assign(T, -1);
    model.idx_pd.assign(T, -1);
    model.idx_soc.assign(T, -1);
    model.idx_zbc.assign(T, -1);
    model.idx_zbd.assign(T, -1);
    model.idx_zb.assign(T, -1);
    for (int t = 0; t < T; ++t) {
      model.idx_pc[t] = add_var("PBC_T" + std::to_string(t + 1),
                                {K::PCharge, -1, -1, t, -1}, VarDomain::Continuous,
                                0.0, b.c_charge_max * b.rated_power, 0.0);
    }
    for (int t = 0; t < T; ++t) {
      model.idx_pd[t] = add_var("PBD_T" + std::to_string(t + 1),
                                {K::PDischarge, -1, -1, t, -1}, VarDomain::Continuous,
                                0.0, b.c_discharge_max * b.rated_power, 0.0);
    }
    for (int t = 0; t < T; ++t) {
      double lo = t == T - 1 ? b.soc_final : b.soc_min;
      double hi = t == T - 1 ? b.soc_final : b.soc_max;
      model.idx_soc[t] = add_var("SOC_T" + std::to_string(t + 1),
                                 {K::Soc, -1, -1, t, -1}, VarDomain::Continuous,
                                 lo, hi, 0.0);
    }
    for (int t = 0; t < T; ++t) {
      model.idx_zbc[t] = add_var("ZBC_T" + std::to_string(t + 1),
                                 {K::ZbC, -1, -1, t, -1}, VarDomain::Binary, 0, 1, 0);
    }
    for (int t = 0; t < T; ++t) {
      model.idx_zbd[t] = add_var("ZBD_T" + std::to_string(t + 1),
                                 {K::ZbD, -1, -1, t, -1}, VarDomain::Binary, 0, 1, 0);
    }
    for (int t = 0; t < T; ++t) {
      model.idx_zb[t] = add_var("ZB_T" + std::to_string(t + 1),
                                {K::Zb, -1, -1, t, -1}, VarDomain::Binary, 0, 1, 0);
    }
  }

  for (int t : model.v_active_steps) {
    for (size_t j = 0; j < model.combinations.size(); ++j) {
      model.idx_s[{static_cast<int>(j), t}] =
          add_var(tag_jt("S", static_cast<int>(j), t),
                  {K::S, -1, -1, t, static_cast<int>(j)}, VarDomain::Binary, 0, 1, 0);
    }
    for (size_t j = 0; j < model.combinations.size(); ++j) {
      model.idx_f[{static_cast<int>(j), t}] = add_var(
          tag_jt("F", static_cast<int>(j), t),
          {K::F, -1, -1, t, static_cast<int>(j)}, VarDomain::Integer, 0.0,
          static_cast<double>(model.combinations[j].size()), 0.0);
    }
  }

  auto add_row = [&](std::string tag, RowSense sense, double rhs,
                     std::vector<RowEntry> entries) {
    // Zero coefficients are dropped so the sparse pattern is canonical.
    std::vector<RowEntry> kept;
    kept.reserve(entries.size());
    for (const RowEntry& e : entries) {
      if (e.coef != 0.0) kept.push_back(e);
    }
    model.rows.push_back(Row{std::move(tag), sense, rhs, std::move(kept)});
  };

  // Segment aggregation and the commitment-gated dispatch window.
  for (int i = 0; i < N; ++i) {
    const auto& dg = config.dgs[i];
    for (int t = 0; t < T; ++t) {
      std::vector<RowEntry> e{{model.pdg(i, t), 1.0}};
      for (int m = 0; m < curves[i].num_segments(); ++m) {
        e.push_back({model.delta(i, m, t), -1.0});
      }
      add_row(tag_it("E2", i, t), RowSense::EQ, 0.0, std::move(e));
    }
    for (int t = 0; t < T; ++t) {
      add_row(tag_it("E4", i, t), RowSense::LE, 0.0,
              {{model.pdg(i, t), 1.0}, {model.z(i, t), -dg.c_max * dg.rated_power}});
    }
    for (int t = 0; t < T; ++t) {
      add_row(tag_it("E5", i, t), RowSense::GE, 0.0,
              {{model.pdg(i, t), 1.0}, {model.z(i, t), -dg.c_min * dg.rated_power}});
    }
  }

  // Start-up linking; z(0) comes from the initial commitment.
  for (int i = 0; i < N; ++i) {
    const double z0 = config.initial_state(i).on ? 1.0 : 0.0;
    for (int t = 0; t < T; ++t) {
      if (t == 0) {
        add_row(tag_it("E6", i, t), RowSense::LE, z0,
                {{model.z(i, t), 1.0}, {model.u(i, t), -1.0}});
      } else {
        add_row(tag_it("E6", i, t), RowSense::LE, 0.0,
                {{model.z(i, t), 1.0}, {model.z(i, t - 1), -1.0},
                 {model.u(i, t), -1.0}});
      }
    }
  }

  // Minimum up/down windows, truncated at the horizon with the divisor
  // taken over the surviving terms.
  for (int i = 0; i < N; ++i) {
    const int up_steps = config.min_up_steps(i);
    const int down_steps = config.min_down_steps(i);
    for (int t = 0; t < T; ++t) {
      int wlen = std::min(up_steps, T - 1 - t);
      if (wlen <= 0) continue;
      std::vector<RowEntry> e{{model.u(i, t), 1.0}};
      for (int k = 1; k <= wlen; ++k) {
        e.push_back({model.z(i, t + k), -1.0 / wlen});
      }
      add_row(tag_it("E7", i, t), RowSense::LE, 0.0, std::move(e));
    }
    for (int t = 0; t < T; ++t) {
      int wlen = std::min(down_steps, t);
      if (wlen <= 0) continue;
      std::vector<RowEntry> e{{model.u(i, t), 1.0}};
      for (int k = 1; k <= wlen; ++k) {
        e.push_back({model.z(i, t - k), 1.0 / wlen});
      }
      add_row(tag_it("E8", i, t), RowSense::LE, 1.0, std::move(e));
    }
  }

  // Ramps (per-step limits; rows referencing the pre-horizon state are
  // relaxed away).
  for (int i = 0; i < N; ++i) {
    const auto& dg = config.dgs[i];
    const double up = dg.ramp_up * config.dt_minutes();
    const double down = dg.ramp_down * config.dt_minutes();
    for (int t = 1; t < T; ++t) {
      add_row(tag_it("E9", i, t), RowSense::LE, up,
              {{model.pdg(i, t), 1.0}, {model.pdg(i, t - 1), -1.0}});
    }
    for (int t = 1; t < T; ++t) {
      add_row(tag_it("E10", i, t), RowSense::LE, down,
              {{model.pdg(i, t), -1.0}, {model.pdg(i, t - 1), 1.0}});
    }
  }

  // SOC ledger (corrected signs: charging raises the state of charge) and
  // BESS power gating with charge/discharge exclusivity.
  if (config.bess) {
    const BessSpec& b = *config.bess;
    const double kc = b.eta_charge * dt / b.rated_energy;
    const double kd = dt / (b.eta_discharge * b.rated_energy);
    for (int t = 0; t < T; ++t) {
      std::vector<RowEntry> e{{model.soc(t), 1.0},
                              {model.pc(t), -kc},
                              {model.pd(t), kd}};
      double rhs = 0.0;
      if (t == 0) {
        rhs = b.soc_initial;
      } else {
        e.push_back({model.soc(t - 1), -1.0});
      }
      add_row(tag_t("E1", t), RowSense::EQ, rhs, std::move(e));
    }
    for (int t = 0; t < T; ++t) {
      add_row(tag_t("E12", t), RowSense::LE, 0.0,
              {{model.pc(t), 1.0}, {model.zbc(t), -b.c_charge_max * b.rated_power}});
    }
    for (int t = 0; t < T; ++t) {
      add_row(tag_t("E13", t), RowSense::GE, 0.0,
              {{model.pc(t), 1.0}, {model.zbc(t), -b.c_charge_min * b.rated_power}});
    }
    for (int t = 0; t < T; ++t) {
      add_row(tag_t("E14", t), RowSense::LE, 0.0,
              {{model.pd(t), 1.0}, {model.zbd(t), -b.c_discharge_max * b.rated_power}});
    }
    for (int t = 0; t < T; ++t) {
      add_row(tag_t("E15", t), RowSense::GE, 0.0,
              {{model.pd(t), 1.0}, {model.zbd(t), -b.c_discharge_min * b.rated_power}});
    }
    for (int t = 0; t < T; ++t) {
      add_row(tag_t("E16", t), RowSense::EQ, 0.0,
              {{model.zbd(t), 1.0}, {model.zbc(t), 1.0}, {model.zb(t), -1.0}});
    }
  }

  // Security family, only on v-active steps. Unit position N is the BESS.
  const double M = config.security.big_m;
  auto unit_status = [&](int pos, int t) {
    return pos < N ? model.z(pos, t) : model.zb(t);
  };
  auto unit_rated = [&](int pos) {
    return pos < N ? config.dgs[pos].rated_power : config.bess->rated_power;
  };
  auto unit_alpha = [&](int pos) {
    return pos < N ? config.dgs[pos].alpha : config.bess->alpha;
  };
  auto unit_beta = [&](int pos) {
    return pos < N ? config.dgs[pos].beta : config.bess->beta;
  };
  auto unit_power = [&](int pos, int t) {
    return pos < N ? model.pdg(pos, t) : model.pd(t);
  };

  for (int t : model.v_active_steps) {
    const double load = profile.load(t);
    const int nc = static_cast<int>(model.combinations.size());
    {
      std::vector<RowEntry> e;
      for (int j = 0; j < nc; ++j) e.push_back({model.s(j, t), 1.0});
      add_row(tag_t("E18", t), RowSense::EQ, 1.0, std::move(e));
    }
    for (int j = 0; j < nc; ++j) {
      std::vector<RowEntry> e{{model.f(j, t), 1.0}};
      for (int pos : model.combinations[j].members) {
        e.push_back({unit_status(pos, t), -1.0});
      }
      add_row(tag_jt("E19", j, t), RowSense::EQ, 0.0, std::move(e));
    }
    for (int j = 0; j < nc; ++j) {
      add_row(tag_jt("E20", j, t), RowSense::GE, 0.0,
              {{model.f(j, t), 1.0},
               {model.s(j, t), -static_cast<double>(model.combinations[j].size())}});
    }
    // Post-contingency capacity: if combination j is designated and unit r
    // fails, the remaining members must carry the load plus any charging.
    for (int j = 0; j < nc; ++j) {
      const auto& members = model.combinations[j].members;
      for (size_t r = 0; r < members.size(); ++r) {
        std::vector<RowEntry> e{{model.s(j, t), load + M}};
        if (config.bess) e.push_back({model.pc(t), 1.0});
        for (size_t h = 0; h < members.size(); ++h) {
          if (h == r) continue;
          e.push_back({unit_status(members[h], t),
                       -unit_alpha(members[h]) * unit_rated(members[h])});
        }
        add_row(tag_jrt("E21", j, static_cast<int>(r), t), RowSense::LE, M,
                std::move(e));
      }
    }
    // The failed unit's output must fit in the others' instantaneous step
    // capability.
    for (int j = 0; j < nc; ++j) {
      const auto& members = model.combinations[j].members;
      for (size_t r = 0; r < members.size(); ++r) {
        double step_cap = 0.0;
        for (size_t h = 0; h < members.size(); ++h) {
          if (h == r) continue;
          step_cap += unit_beta(members[h]) * unit_rated(members[h]);
        }
        add_row(tag_jrt("E22", j, static_cast<int>(r), t), RowSense::LE,
                M + step_cap,
                {{unit_power(members[r], t), 1.0}, {model.s(j, t), M}});
      }
    }
    // Every designated unit keeps headroom for its own maximum step.
    for (int j = 0; j < nc; ++j) {
      const auto& members = model.combinations[j].members;
      for (size_t r = 0; r < members.size(); ++r) {
        int pos = members[r];
        double headroom = (unit_alpha(pos) - unit_beta(pos)) * unit_rated(pos);
        add_row(tag_jrt("E23", j, static_cast<int>(r), t), RowSense::LE,
                M + headroom, {{unit_power(pos, t), 1.0}, {model.s(j, t), M}});
      }
    }
  }

  // Load balance: generation covers ship load plus battery charging.
  for (int t = 0; t < T; ++t) {
    std::vector<RowEntry> e;
    for (int i = 0; i < N; ++i) e.push_back({model.pdg(i, t), 1.0});
    if (config.bess) {
      e.push_back({model.pd(t), 1.0});
      e.push_back({model.pc(t), -1.0});
    }
    add_row(tag_t("BAL", t), RowSense::EQ, profile.load(t), std::move(e));
  }

  model.check_consistency();
  return model;
}

ModelCounts expected_model_counts(const ScenarioConfig& config,
                                  const LoadProfile& profile) {
  const int N = config.num_dgs();
  const int T = config.horizon;
  const bool bess = config.bess.has_value();
  int act = profile.num_v_active();
  int ng = config.num_units();
  long nc = 0;
  long sum_nj = 0;
  if (ng >= 2) {
    // sum over k>=2 of C(ng, k), and the matching sum of k*C(ng, k)
    long pow2 = 1L << ng;
    nc = pow2 - 1 - ng;
    sum_nj = static_cast<long>(ng) * (1L << (ng - 1)) - ng;
  }

  ModelCounts c;
  c.variables = N * config.n_segments * T + 3 * N * T + (bess ? 6 * T : 0) +
                act * static_cast<int>(2 * nc);
  c.binaries = 2 * N * T + (bess ? 3 * T : 0) + act * static_cast<int>(nc);
  c.rows = N * T          // aggregation
           + 2 * N * T    // dispatch window
           + N * T        // start-up linking
           + 2 * N * (T - 1)  // min up/down windows
           + 2 * N * (T - 1)  // ramps
           + (bess ? 6 * T : 0)  // SOC ledger + power gating + exclusivity
           + act * static_cast<int>(1 + 2 * nc + 3 * sum_nj)  // security family
           + T;           // balance
  return c;
}

Schedule extract_schedule(const MilpModel& model, const std::vector<double>& solution,
                          const ScenarioConfig& config, double integrality_tol,
                          double soc_tol) {
  if (static_cast<int>(solution.size()) != model.num_vars()) {
    throw ModelError("extract_schedule: assignment does not cover all variables");
  }
  for (const Variable& v : model.vars) {
    if (v.domain == VarDomain::Continuous) continue;
    double val = solution[&v - model.vars.data()];
    if (std::abs(val - std::round(val)) > integrality_tol) {
      throw ModelError("extract_schedule: integrality violation at " + v.name +
                       " = " + std::to_string(val));
    }
  }

  const int N = model.num_dgs;
  const int T = model.horizon;
  Schedule sched;
  sched.num_dgs = N;
  sched.horizon = T;
  sched.has_bess = model.has_bess;
  sched.p_dg.assign(N, std::vector<double>(T, 0.0));
  sched.z.assign(N, std::vector<int>(T, 0));
  sched.u.assign(N, std::vector<int>(T, 0));
  for (int i = 0; i < N; ++i) {
    for (int t = 0; t < T; ++t) {
      sched.p_dg[i][t] = solution[model.pdg(i, t)];
      sched.z[i][t] = static_cast<int>(std::round(solution[model.z(i, t)]));
      sched.u[i][t] = static_cast<int>(std::round(solution[model.u(i, t)]));
    }
  }
  if (model.has_bess) {
    sched.p_charge.assign(T, 0.0);
    sched.p_discharge.assign(T, 0.0);
    sched.soc.assign(T, 0.0);
    const BessSpec& b = *config.bess;
    double prev = b.soc_initial;
    for (int t = 0; t < T; ++t) {
      sched.p_charge[t] = solution[model.pc(t)];
      sched.p_discharge[t] = solution[model.pd(t)];
      double recomputed = prev + (b.eta_charge * sched.p_charge[t] -
                                  sched.p_discharge[t] / b.eta_discharge) *
                                     config.dt / b.rated_energy;
      double solver_soc = solution[model.soc(t)];
      if (std::abs(recomputed - solver_soc) > soc_tol) {
        throw ModelError("extract_schedule: SOC drift at step " +
                         std::to_string(t + 1));
      }
      sched.soc[t] = recomputed;
      prev = recomputed;
    }
  }
  for (int t : model.v_active_steps) {
    int chosen = -1;
    for (size_t j = 0; j < model.combinations.size(); ++j) {
      if (solution[model.s(static_cast<int>(j), t)] > 0.5) {
        if (chosen >= 0) {
          throw ModelError("extract_schedule: multiple active combinations at step " +
                           std::to_string(t + 1));
        }
        chosen = static_cast<int>(j);
      }
    }
    if (chosen < 0) {
      throw ModelError("extract_schedule: no active combination at step " +
                       std::to_string(t + 1));
    }
    sched.active_combination.emplace_back(t, chosen + 1);
  }

  double obj = model.objective_constant;
  for (int k = 0; k < model.num_vars(); ++k) obj += model.vars[k].cost * solution[k];
  sched.objective = obj;
  return sched;
}

}  // namespace shipopt
