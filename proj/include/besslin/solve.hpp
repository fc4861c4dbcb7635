#ifndef BESSLIN_SOLVE_HPP_
#define BESSLIN_SOLVE_HPP_

/**
 * @file
 * @brief Public solve entry points: solve_lp, solve_qp and shared types.
 */

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "besslin/optmodel.hpp"
#include "besslin/qp_admm.hpp"
#include "besslin/simplex.hpp"
#include "besslin/simplex_rev.hpp"

namespace besslin {

struct SolveConfig {
  double mip_rel_gap = 1e-3;
  double lp_feas_tol = 1e-8;
  double qp_primal_tol = 1e-8;
  double qp_dual_tol = 1e-8;
  std::int64_t max_iterations = 200000;
  std::optional<double> time_limit_s;
  bool verbose = false;
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, LimitReached };

struct Solution {
  SolveStatus status = SolveStatus::LimitReached;
  double objective = 0.0;
  std::vector<double> values;
  double runtime_ms = 0.0;
  std::optional<double> gap;  // MILP only

  double value(VarRef v) const { return values.at(static_cast<size_t>(v.index)); }
};

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::LimitReached: return "limit-reached";
  }
  return "?";
}

namespace detail {

class Stopwatch {
public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point t0_;
};

/// Lower the Problem IR to (P, q, A, l, u); A holds the constraint rows
/// followed by one identity row per variable (its bounds).
inline QpData lower_to_qp(const Problem& p) {
  const Eigen::Index n = static_cast<Eigen::Index>(p.num_variables());
  const Eigen::Index mc = static_cast<Eigen::Index>(p.num_constraints());
  QpData d;

  {
    std::vector<Eigen::Triplet<double>> trips;
    for (const auto& [i, j, c] : p.objective().quadratic) {
      if (i == j) {
        trips.emplace_back(i.index, j.index, 2.0 * c);
      } else {
        trips.emplace_back(i.index, j.index, c);
        trips.emplace_back(j.index, i.index, c);
      }
    }
    d.P.resize(n, n);
    d.P.setFromTriplets(trips.begin(), trips.end());
  }

  d.q = Eigen::VectorXd::Zero(n);
  for (const auto& [v, c] : p.objective().linear.terms()) d.q(v.index) += c;

  d.l.resize(mc + n);
  d.u.resize(mc + n);
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index r = 0; r < mc; ++r) {
    const auto& c = p.constraints()[static_cast<size_t>(r)];
    for (const auto& [v, coef] : c.expr.terms()) trips.emplace_back(r, v.index, coef);
    const double b = c.rhs - c.expr.constant();
    switch (c.sense) {
      case Sense::Le: d.l(r) = -kInf; d.u(r) = b; break;
      case Sense::Ge: d.l(r) = b; d.u(r) = kInf; break;
      case Sense::Eq: d.l(r) = b; d.u(r) = b; break;
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    trips.emplace_back(mc + j, j, 1.0);
    d.l(mc + j) = p.variables()[static_cast<size_t>(j)].lower;
    d.u(mc + j) = p.variables()[static_cast<size_t>(j)].upper;
  }
  d.A.resize(mc + n, n);
  d.A.setFromTriplets(trips.begin(), trips.end());
  return d;
}

inline AdmmParams admm_params_from(const SolveConfig& cfg) {
  AdmmParams prm;
  prm.eps_abs = cfg.qp_primal_tol;
  prm.eps_rel = cfg.qp_dual_tol;
  prm.max_iter = cfg.max_iterations;
  return prm;
}

}  // namespace detail

inline Solution solve_lp(const Problem& p, const SolveConfig& cfg = {}) {
  if (p.num_binaries() > 0) throw ModelError("solve_lp: problem has binary variables");
  if (p.objective().is_quadratic()) throw ModelError("solve_lp: problem has quadratic objective");

  detail::Stopwatch sw;
  LpResult r;
  // the revised solver is much faster on large instances; the dense tableau
  // remains the fallback for unboxed problems and numerical trouble
  bool solved = false;
  if (detail::RevisedSimplex::suitable(p)) {
    detail::RevisedSimplex rs(p, cfg.max_iterations);
    r = rs.solve();
    solved = r.status == LpStatus::Infeasible ||
             (r.status == LpStatus::Optimal &&
              p.max_violation(r.values) <= cfg.lp_feas_tol * 100 + 1e-9);
  }
  if (!solved) r = simplex_solve(p, cfg.max_iterations);
  Solution s;
  s.values = r.values;
  s.objective = r.objective;
  switch (r.status) {
    case LpStatus::Optimal:
      s.status = (p.max_violation(r.values) <= cfg.lp_feas_tol * 100 + 1e-9)
                     ? SolveStatus::Optimal
                     : SolveStatus::LimitReached;
      break;
    case LpStatus::Infeasible: s.status = SolveStatus::Infeasible; break;
    case LpStatus::Unbounded: s.status = SolveStatus::Unbounded; break;
    case LpStatus::IterationLimit: s.status = SolveStatus::LimitReached; break;
  }
  s.runtime_ms = sw.ms();
  return s;
}

inline Solution solve_qp(const Problem& p, const SolveConfig& cfg = {}) {
  if (p.num_binaries() > 0) throw ModelError("solve_qp: problem has binary variables");

  detail::Stopwatch sw;
  AdmmResult r = admm_solve(detail::lower_to_qp(p), detail::admm_params_from(cfg));
  Solution s;
  s.values.assign(r.x.data(), r.x.data() + r.x.size());
  s.objective = r.objective + p.objective().linear.constant();
  switch (r.status) {
    case AdmmStatus::Optimal: s.status = SolveStatus::Optimal; break;
    case AdmmStatus::PrimalInfeasible: s.status = SolveStatus::Infeasible; break;
    case AdmmStatus::DualInfeasible: s.status = SolveStatus::Unbounded; break;
    default: s.status = SolveStatus::LimitReached; break;
  }
  s.runtime_ms = sw.ms();
  return s;
}

}  // namespace besslin

#endif  // BESSLIN_SOLVE_HPP_
