#ifndef BESSLIN_PROBLEMS_HPP_
#define BESSLIN_PROBLEMS_HPP_

/**
 * @file
 * @brief Assembly of complete set-point-tracking and transmission-expansion
 *        optimization problems from generated instances, for any ModelKind.
 *
 * SPT: minimize the squared deviation of the fleet's net discharge from a
 * 24-hour target signal.
 *
 * TEP: choose candidate lines (binary per line) minimizing amortized CAPEX
 * plus generation and load-shedding OPEX over decoupled typical days.
 * Network flows are transportation flows (capacity limits only, no angles);
 * renewables enter nodal balance as available output minus an explicit
 * spill variable; shedding is a penalized slack at each demand node.
 */

#include <array>
#include <string>
#include <vector>

#include "besslin/bess.hpp"
#include "besslin/instances.hpp"

namespace besslin {

struct SptAssembly {
  Problem problem;
  std::vector<BessVars> bess_vars;  // one block per fleet unit
  std::array<double, kHours> signal{};
};

inline SptAssembly assemble_spt(const SptInstance& inst, ModelKind kind) {
  if (inst.fleet.empty()) throw ModelError("spt assembly: empty fleet");
  SptAssembly a;
  a.signal = inst.signal;
  for (std::size_t n = 0; n < inst.fleet.size(); ++n) {
    const auto& [params, init] = inst.fleet[n];
    a.bess_vars.push_back(build(kind, params, init, kHours, a.problem,
                                "b" + std::to_string(n + 1), {}, false,
                                /*exc_hull_cuts=*/true));
  }
  std::vector<LinearExpr> residuals;
  for (std::size_t t = 0; t < kHours; ++t) {
    LinearExpr r;
    for (const auto& unit : a.bess_vars) r.add(unit.p_d[t], 1.0).add(unit.p_c[t], -1.0);
    r.add_constant(-inst.signal[t]);
    residuals.push_back(std::move(r));
  }
  a.problem.add_sum_of_squares(residuals);
  return a;
}

/// Objective of an SPT solution recomputed directly from the power values.
inline double spt_tracking_error_sq(const SptAssembly& a, const std::vector<double>& x) {
  double total = 0.0;
  for (std::size_t t = 0; t < kHours; ++t) {
    double net = -a.signal[t];
    for (const auto& unit : a.bess_vars)
      net += x[unit.p_d[t].index] - x[unit.p_c[t].index];
    total += net * net;
  }
  return total;
}

using HourVars = std::array<VarRef, kHours>;

struct TepAssembly {
  Problem problem;
  std::vector<std::vector<VarRef>> build_vars;          // [corridor][candidate]
  std::vector<std::vector<HourVars>> flow;              // [corridor][day], from -> to
  std::vector<std::vector<HourVars>> generation;        // [generator][day]
  std::vector<std::vector<HourVars>> shed;              // [node][day]
  std::vector<std::vector<HourVars>> spill;             // [node][day]
  std::vector<std::vector<BessVars>> bess_vars;         // [unit][day]
  std::vector<std::vector<std::array<double, kHours>>> res_avail;  // [node][day]
  std::size_t days = 0;
};

inline TepAssembly assemble_tep(const TepInstance& inst, ModelKind kind) {
  const TepDataset& ds = inst.dataset;
  ds.validate();
  if (inst.days < 1) throw ModelError("tep assembly: no days");
  if (inst.res_profiles.size() != static_cast<std::size_t>(ds.nodes) ||
      inst.demand.size() != static_cast<std::size_t>(ds.nodes))
    throw ModelError("tep assembly: instance/dataset node mismatch");

  TepAssembly a;
  a.days = inst.days;
  Problem& p = a.problem;

  for (std::size_t c = 0; c < ds.corridors.size(); ++c) {
    std::vector<VarRef> cand;
    for (int k = 0; k < ds.corridors[c].candidate_count; ++k)
      cand.push_back(p.add_variable({0.0, 1.0, VarKind::Binary,
                                     "line" + std::to_string(c + 1) + "." +
                                         std::to_string(k + 1)}));
    a.build_vars.push_back(std::move(cand));
  }

  const auto day_vars = [&](const std::string& name, double lo, double hi) {
    HourVars vars;
    for (std::size_t h = 0; h < kHours; ++h)
      vars[h] = p.add_variable({lo, hi, VarKind::Continuous, name + "." + std::to_string(h + 1)});
    return vars;
  };

  a.res_avail.assign(ds.nodes, {});
  for (int node = 0; node < ds.nodes; ++node)
    for (std::size_t d = 0; d < inst.days; ++d) {
      std::array<double, kHours> avail{};
      for (std::size_t h = 0; h < kHours; ++h)
        avail[h] = ds.res_capacity[node] * inst.res_profiles[node][d].values[h];
      a.res_avail[node].push_back(avail);
    }

  for (std::size_t c = 0; c < ds.corridors.size(); ++c) {
    const double cap_max = ds.corridors[c].existing_capacity +
                           ds.corridors[c].candidate_count * ds.corridors[c].candidate_capacity;
    std::vector<HourVars> per_day;
    for (std::size_t d = 0; d < inst.days; ++d)
      per_day.push_back(day_vars("f" + std::to_string(c + 1) + ".d" + std::to_string(d + 1),
                                 -cap_max, cap_max));
    a.flow.push_back(std::move(per_day));
  }
  for (std::size_t g = 0; g < ds.generators.size(); ++g) {
    std::vector<HourVars> per_day;
    for (std::size_t d = 0; d < inst.days; ++d)
      per_day.push_back(day_vars("g" + std::to_string(g + 1) + ".d" + std::to_string(d + 1),
                                 0.0, ds.generators[g].capacity));
    a.generation.push_back(std::move(per_day));
  }
  a.shed.assign(ds.nodes, {});
  a.spill.assign(ds.nodes, {});
  for (int node = 0; node < ds.nodes; ++node)
    for (std::size_t d = 0; d < inst.days; ++d) {
      HourVars sh, sp;
      for (std::size_t h = 0; h < kHours; ++h) {
        const std::string suffix = std::to_string(node + 1) + ".d" + std::to_string(d + 1) +
                                   "." + std::to_string(h + 1);
        sh[h] = p.add_variable(
            {0.0, inst.demand[node][h], VarKind::Continuous, "shed" + suffix});
        sp[h] = p.add_variable(
            {0.0, a.res_avail[node][d][h], VarKind::Continuous, "spill" + suffix});
      }
      a.shed[node].push_back(sh);
      a.spill[node].push_back(sp);
    }

  for (std::size_t n = 0; n < inst.fleet.size(); ++n) {
    const auto& [params, init] = inst.fleet[n];
    std::vector<BessVars> per_day;
    for (std::size_t d = 0; d < inst.days; ++d)
      per_day.push_back(build(kind, params, init, kHours, p,
                              "b" + std::to_string(n + 1) + ".d" + std::to_string(d + 1), {},
                              false, /*exc_hull_cuts=*/true));
    a.bess_vars.push_back(std::move(per_day));
  }

  // flow capacity vs built lines: |f| <= existing + sum built * candidate_cap
  for (std::size_t c = 0; c < ds.corridors.size(); ++c)
    for (std::size_t d = 0; d < inst.days; ++d)
      for (std::size_t h = 0; h < kHours; ++h)
        for (const double sign : {1.0, -1.0}) {
          LinearExpr cap;
          cap.add(a.flow[c][d][h], sign);
          for (const VarRef b : a.build_vars[c])
            cap.add(b, -ds.corridors[c].candidate_capacity);
          p.add_constraint(std::move(cap), Sense::Le, ds.corridors[c].existing_capacity);
        }

  // nodal balance: gen + inflow - outflow + discharge - charge + shed
  //                + (avail - spill) = demand
  const int storage_node = ds.nodes - 1;
  for (int node = 0; node < ds.nodes; ++node)
    for (std::size_t d = 0; d < inst.days; ++d)
      for (std::size_t h = 0; h < kHours; ++h) {
        LinearExpr bal;
        for (std::size_t g = 0; g < ds.generators.size(); ++g)
          if (ds.generators[g].node == node) bal.add(a.generation[g][d][h], 1.0);
        for (std::size_t c = 0; c < ds.corridors.size(); ++c) {
          if (ds.corridors[c].to == node) bal.add(a.flow[c][d][h], 1.0);
          if (ds.corridors[c].from == node) bal.add(a.flow[c][d][h], -1.0);
        }
        if (node == storage_node)
          for (const auto& unit : a.bess_vars)
            bal.add(unit[d].p_d[h], 1.0).add(unit[d].p_c[h], -1.0);
        bal.add(a.shed[node][d][h], 1.0);
        bal.add(a.spill[node][d][h], -1.0);
        p.add_constraint(std::move(bal), Sense::Eq,
                         inst.demand[node][h] - a.res_avail[node][d][h]);
      }

  // amortized CAPEX plus generation and shedding OPEX
  LinearExpr obj;
  for (std::size_t c = 0; c < ds.corridors.size(); ++c)
    for (const VarRef b : a.build_vars[c])
      obj.add(b, ds.corridors[c].capex_per_line * static_cast<double>(inst.days));
  for (std::size_t g = 0; g < ds.generators.size(); ++g)
    for (std::size_t d = 0; d < inst.days; ++d)
      for (std::size_t h = 0; h < kHours; ++h)
        obj.add(a.generation[g][d][h], ds.generators[g].marginal_cost);
  for (int node = 0; node < ds.nodes; ++node)
    for (std::size_t d = 0; d < inst.days; ++d)
      for (std::size_t h = 0; h < kHours; ++h)
        obj.add(a.shed[node][d][h], ds.shed_penalty);
  p.set_linear_objective(std::move(obj));

  return a;
}

/// Largest nodal-balance violation of a TEP solution (diagnostic).
inline double tep_balance_violation(const TepAssembly& a, const TepInstance& inst,
                                    const std::vector<double>& x) {
  const TepDataset& ds = inst.dataset;
  const int storage_node = ds.nodes - 1;
  double worst = 0.0;
  for (int node = 0; node < ds.nodes; ++node)
    for (std::size_t d = 0; d < a.days; ++d)
      for (std::size_t h = 0; h < kHours; ++h) {
        double lhs = a.res_avail[node][d][h] - x[a.spill[node][d][h].index] +
                     x[a.shed[node][d][h].index];
        for (std::size_t g = 0; g < ds.generators.size(); ++g)
          if (ds.generators[g].node == node) lhs += x[a.generation[g][d][h].index];
        for (std::size_t c = 0; c < ds.corridors.size(); ++c) {
          if (ds.corridors[c].to == node) lhs += x[a.flow[c][d][h].index];
          if (ds.corridors[c].from == node) lhs -= x[a.flow[c][d][h].index];
        }
        if (node == storage_node)
          for (const auto& unit : a.bess_vars)
            lhs += x[unit[d].p_d[h].index] - x[unit[d].p_c[h].index];
        worst = std::max(worst, std::abs(lhs - inst.demand[node][h]));
      }
  return worst;
}

}  // namespace besslin

#endif  // BESSLIN_PROBLEMS_HPP_
