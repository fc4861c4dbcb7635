#ifndef BESSLIN_METRICS_HPP_
#define BESSLIN_METRICS_HPP_

/**
 * @file
 * @brief Reported quantities computed from solved instances: simultaneous
 *        charge/discharge rates, tracking RMSE, expansion-planning sums, and
 *        runtime performance curves.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "besslin/problems.hpp"
#include "besslin/solve.hpp"

namespace besslin {

struct SptMetrics {
  double simult_pct = 0.0;  // % of (unit, hour) slots charging and discharging
  double rmse = 0.0;
  double rmse_rel = 1.0;  // ratio vs the exact model on the same instance
  double runtime_ms = 0.0;
};

struct TepMetrics {
  double simult_pct = 0.0;
  double total_cost = 0.0;
  double total_cost_rel = 1.0;  // ratio vs the exact model on the same instance
  double load_shed = 0.0;
  double curtailment = 0.0;
  double capacity_invested = 0.0;
  double runtime_ms = 0.0;
};

struct PerfCurve {
  std::vector<double> runtime_ms;   // sorted runtimes of solved instances
  std::vector<double> frac_solved;  // cumulative fraction of all instances
};

constexpr double kSimultTol = 1e-4;  // |pc * pd| above this counts as simultaneous

/// Percent of (unit, hour) slots with simultaneous charging and discharging.
inline double simultaneity_rate(const std::vector<double>& x,
                                const std::vector<BessVars>& units) {
  std::size_t slots = 0, hits = 0;
  for (const auto& u : units) {
    for (std::size_t t = 0; t < u.p_c.size(); ++t) {
      ++slots;
      const double prod = x[u.p_c[t].index] * x[u.p_d[t].index];
      if (std::abs(prod) > kSimultTol) ++hits;
    }
  }
  if (slots == 0) return 0.0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(slots);
}

/// RMSE of the fleet-aggregate tracking error over the horizon.
inline double rmse_of(double tracking_error_sq, std::size_t horizon) {
  if (horizon == 0) return 0.0;
  return std::sqrt(std::max(0.0, tracking_error_sq) / static_cast<double>(horizon));
}

inline SptMetrics spt_metrics(const Solution& sol, const SptAssembly& a) {
  SptMetrics m;
  m.simult_pct = simultaneity_rate(sol.values, a.bess_vars);
  m.rmse = rmse_of(spt_tracking_error_sq(a, sol.values), kHours);
  m.runtime_ms = sol.runtime_ms;
  return m;
}

/// Sums of shed, spilled, and invested quantities; cost ratio is filled by
/// the caller once the exact model's cost for the instance is known.
inline TepMetrics tep_metrics(const Solution& sol, const TepAssembly& a,
                              const TepDataset& ds) {
  TepMetrics m;
  m.total_cost = sol.objective;
  m.runtime_ms = sol.runtime_ms;
  std::vector<BessVars> flat;
  for (const auto& unit : a.bess_vars)
    for (const auto& day : unit) flat.push_back(day);
  m.simult_pct = simultaneity_rate(sol.values, flat);
  for (const auto& node : a.shed)
    for (const auto& day : node)
      for (const VarRef v : day) m.load_shed += sol.values[v.index];
  for (const auto& node : a.spill)
    for (const auto& day : node)
      for (const VarRef v : day) m.curtailment += sol.values[v.index];
  for (std::size_t c = 0; c < a.build_vars.size(); ++c)
    for (const VarRef b : a.build_vars[c])
      if (sol.values[b.index] >= 0.5) m.capacity_invested += ds.corridors[c].candidate_capacity;
  return m;
}

/// Cumulative solved-fraction curve over runtimes; the fraction denominator
/// is the full instance count, so unsolved instances cap the final height.
inline PerfCurve perf_curve(const std::vector<double>& runtimes,
                            const std::vector<SolveStatus>& statuses) {
  PerfCurve c;
  const std::size_t total = runtimes.size();
  if (total == 0 || statuses.size() != total) return c;
  std::vector<double> solved;
  for (std::size_t i = 0; i < total; ++i)
    if (statuses[i] == SolveStatus::Optimal) solved.push_back(runtimes[i]);
  std::sort(solved.begin(), solved.end());
  c.runtime_ms = solved;
  c.frac_solved.resize(solved.size());
  for (std::size_t i = 0; i < solved.size(); ++i)
    c.frac_solved[i] = static_cast<double>(i + 1) / static_cast<double>(total);
  return c;
}

}  // namespace besslin

#endif  // BESSLIN_METRICS_HPP_
