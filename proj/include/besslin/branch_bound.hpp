#ifndef BESSLIN_BRANCH_BOUND_HPP_
#define BESSLIN_BRANCH_BOUND_HPP_

/**
 * @file
 * @brief Branch and bound over binary variables.
 *
 * Best-bound node selection, most-fractional branching (ties to the
 * lowest variable index), no cutting planes.  Relaxations of small
 * linear-objective problems go through the simplex; everything else uses
 * the operator-splitting solver, whose KKT factorization is set up once
 * and shared by all nodes (only variable bounds change between nodes).
 * A rounding heuristic fixes all binaries to their nearest integer and
 * re-solves the continuous problem to produce incumbents early.
 */

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <queue>
#include <vector>

#include "besslin/solve.hpp"

namespace besslin {

namespace detail {

constexpr double kIntTol = 1e-6;  // binary integrality tolerance

struct BnbNode {
  double bound;                // valid lower bound inherited or computed
  std::vector<int8_t> fixes;   // per binary: -1 free, 0, 1
  std::int64_t seq;

  bool operator>(const BnbNode& o) const {
    if (bound != o.bound) return bound > o.bound;
    return seq > o.seq;
  }
};

/// Continuous-relaxation solver shared by all nodes of one MILP search.
class NodeSolver {
public:
  NodeSolver(const Problem& p, const SolveConfig& cfg, const std::vector<int>& binaries)
      : prob_(p), cfg_(cfg), binaries_(binaries) {
    if (!p.objective().is_quadratic() && RevisedSimplex::suitable(p)) {
      // exact node relaxations with a dual-simplex warm start: bound changes
      // keep the parent basis dual feasible, so children re-solve in a few
      // pivots
      rev_ = std::make_unique<RevisedSimplex>(p, cfg.max_iterations);
      return;
    }
    use_simplex_ = !p.objective().is_quadratic() && p.num_variables() <= 300 &&
                   p.num_constraints() <= 300;
    if (!use_simplex_) {
      AdmmParams prm = admm_params_from(cfg);
      prm.eps_abs = std::max(prm.eps_abs, 1e-5);  // node accuracy; final resolve is tighter
      prm.eps_rel = std::max(prm.eps_rel, 1e-5);
      prm.max_iter = std::min<std::int64_t>(cfg.max_iterations, 12000);
      prm.warm_start = true;
      prm.polish_every = 2000;  // crossover attempts close most nodes early
      admm_ = std::make_unique<AdmmSolver>(lower_to_qp(p), prm);
      nrows_ = static_cast<Eigen::Index>(p.num_constraints());
    }
  }

  struct NodeResult {
    enum class Kind { Solved, Infeasible, Unresolved } kind = Kind::Unresolved;
    double objective = 0.0;       // includes objective constant
    double safe_bound = -kInf;    // objective minus solver slack
    std::vector<double> values;
  };

  NodeResult solve(const std::vector<int8_t>& fixes) {
    if (rev_) return solve_revised(fixes);
    if (use_simplex_) return solve_simplex(fixes);
    return solve_admm(fixes);
  }

  bool via_simplex() const { return use_simplex_ || rev_ != nullptr; }

private:
  NodeResult solve_revised(const std::vector<int8_t>& fixes) {
    for (size_t k = 0; k < binaries_.size(); ++k)
      if (fixes[k] >= 0)
        rev_->set_variable_bounds(binaries_[k], fixes[k], fixes[k]);
    const LpResult r = rev_->solve();
    for (size_t k = 0; k < binaries_.size(); ++k)
      if (fixes[k] >= 0) {
        const auto& v = prob_.variables()[static_cast<size_t>(binaries_[k])];
        rev_->set_variable_bounds(binaries_[k], v.lower, v.upper);
      }
    NodeResult out;
    if (r.status == LpStatus::Optimal) {
      out.kind = NodeResult::Kind::Solved;
      out.objective = r.objective;
      out.safe_bound = r.objective - 1e-9 * (1.0 + std::abs(r.objective));
      out.values = r.values;
    } else if (r.status == LpStatus::Infeasible) {
      out.kind = NodeResult::Kind::Infeasible;
    }
    return out;
  }

  NodeResult solve_simplex(const std::vector<int8_t>& fixes) {
    Problem rebuilt;
    for (size_t j = 0; j < prob_.num_variables(); ++j) {
      Variable v = prob_.variables()[j];
      v.kind = VarKind::Continuous;
      rebuilt.add_variable(v);
    }
    for (const auto& c : prob_.constraints()) rebuilt.add_constraint(c);
    rebuilt.set_linear_objective(prob_.objective().linear);
    for (size_t k = 0; k < binaries_.size(); ++k) {
      if (fixes[k] >= 0) {
        // emulate a fixed variable with an equality row
        LinearExpr e;
        e.add(VarRef{binaries_[k]}, 1.0);
        rebuilt.add_constraint(std::move(e), Sense::Eq, static_cast<double>(fixes[k]));
      }
    }
    const LpResult r = simplex_solve(rebuilt, cfg_.max_iterations);
    NodeResult out;
    if (r.status == LpStatus::Optimal) {
      out.kind = NodeResult::Kind::Solved;
      out.objective = r.objective;
      out.safe_bound = r.objective - 1e-9 * (1.0 + std::abs(r.objective));
      out.values = r.values;
    } else if (r.status == LpStatus::Infeasible) {
      out.kind = NodeResult::Kind::Infeasible;
    } else if (r.status == LpStatus::Unbounded) {
      out.kind = NodeResult::Kind::Solved;
      out.objective = -kInf;
      out.safe_bound = -kInf;
      out.values = r.values;
    }
    return out;
  }

  NodeResult solve_admm(const std::vector<int8_t>& fixes) {
    auto& l = admm_->mutable_l();
    auto& u = admm_->mutable_u();
    std::vector<std::pair<Eigen::Index, std::pair<double, double>>> saved;
    saved.reserve(binaries_.size());
    for (size_t k = 0; k < binaries_.size(); ++k) {
      if (fixes[k] >= 0) {
        const Eigen::Index row = nrows_ + binaries_[k];
        saved.emplace_back(row, std::pair(l(row), u(row)));
        l(row) = u(row) = static_cast<double>(fixes[k]);
      }
    }
    AdmmResult r = admm_->solve();
    if (r.status == AdmmStatus::MaxIterations) {
      // a stalled warm start is usually rescued by a cold, longer run
      admm_->reset(1.0);
      admm_->set_max_iter(std::min<std::int64_t>(cfg_.max_iterations, 40000));
      r = admm_->solve();
      admm_->set_max_iter(std::min<std::int64_t>(cfg_.max_iterations, 12000));
    }
    // rigorous LP bound must be taken while the node fixes are applied
    const double rigorous =
        prob_.objective().is_quadratic() ? -kInf : admm_->dual_bound(r);
    for (const auto& [row, lu] : saved) {
      l(row) = lu.first;
      u(row) = lu.second;
    }

    NodeResult out;
    const double c0 = prob_.objective().linear.constant();
    if (r.status == AdmmStatus::Optimal) {
      out.kind = NodeResult::Kind::Solved;
      out.objective = r.objective + c0;
      out.safe_bound = rigorous > -kInf
                           ? rigorous + c0
                           : out.objective - 1e-4 * (1.0 + std::abs(out.objective));
      out.values.assign(r.x.data(), r.x.data() + r.x.size());
    } else if (r.status == AdmmStatus::PrimalInfeasible) {
      out.kind = NodeResult::Kind::Infeasible;
    } else if (r.status == AdmmStatus::DualInfeasible) {
      out.kind = NodeResult::Kind::Solved;
      out.objective = -kInf;
      out.safe_bound = -kInf;
      out.values.assign(static_cast<size_t>(r.x.size()), 0.0);
    }
    return out;
  }

  const Problem& prob_;
  SolveConfig cfg_;
  const std::vector<int>& binaries_;
  bool use_simplex_ = false;
  std::unique_ptr<RevisedSimplex> rev_;
  std::unique_ptr<AdmmSolver> admm_;
  Eigen::Index nrows_ = 0;
};

}  // namespace detail

inline Solution solve_milp(const Problem& p, const SolveConfig& cfg = {},
                           std::ostream* trace = nullptr) {
  std::vector<int> binaries;
  for (size_t j = 0; j < p.num_variables(); ++j)
    if (p.variables()[j].kind == VarKind::Binary) binaries.push_back(static_cast<int>(j));

  if (binaries.empty())
    return p.objective().is_quadratic() ? solve_qp(p, cfg) : solve_lp(p, cfg);

  detail::Stopwatch sw;
  detail::NodeSolver nodes(p, cfg, binaries);

  using detail::BnbNode;
  using NR = detail::NodeSolver::NodeResult;

  std::priority_queue<BnbNode, std::vector<BnbNode>, std::greater<BnbNode>> open;
  std::int64_t seq = 0;
  open.push(BnbNode{-kInf, std::vector<int8_t>(binaries.size(), -1), seq++});

  double incumbent_obj = kInf;
  std::vector<double> incumbent_values;
  std::vector<int8_t> incumbent_fixes;
  double global_bound = -kInf;
  bool any_unresolved = false;
  bool limit_hit = false;
  std::int64_t processed = 0;

  // absolute floor keeps the relative gap meaningful near zero objectives
  const auto gap_of = [&](double inc, double bound) {
    return (inc - bound) / std::max(std::abs(inc), 1.0);
  };
  const auto rounded_fixes = [&](const std::vector<double>& x) {
    std::vector<int8_t> f(binaries.size());
    for (size_t k = 0; k < binaries.size(); ++k)
      f[k] = x[static_cast<size_t>(binaries[k])] >= 0.5 ? 1 : 0;
    return f;
  };

  // Branching priority: binaries touching many rows (line-building style
  // decisions) move the relaxation bound far more than indicator binaries
  // gating a single variable, so constraint degree is the primary key and
  // fractionality only breaks ties within a degree class.
  std::vector<int> degree(binaries.size(), 0);

  // Relaxations leave indicator-style binaries wherever the solver's
  // degeneracy drops them, so their raw values say little.  The smallest
  // feasible value of each binary given the rest of the node solution is
  // what drives integrality, branching, and the snap-to-ceiling repair.
  std::vector<int> bin_pos(p.num_variables(), -1);
  for (size_t k = 0; k < binaries.size(); ++k) bin_pos[static_cast<size_t>(binaries[k])] = static_cast<int>(k);

  for (const auto& c : p.constraints())
    for (const auto& [v, coef] : c.expr.terms())
      if (coef != 0.0 && bin_pos[static_cast<size_t>(v.index)] >= 0)
        ++degree[static_cast<size_t>(bin_pos[static_cast<size_t>(v.index)])];

  const auto implied_mins = [&](const std::vector<double>& x, const std::vector<int8_t>& fixes) {
    std::vector<double> m(binaries.size(), 0.0);
    for (const auto& c : p.constraints()) {
      bool has_bin = false;
      double act = c.expr.constant();
      for (const auto& [v, coef] : c.expr.terms()) {
        act += coef * x[static_cast<size_t>(v.index)];
        has_bin |= bin_pos[static_cast<size_t>(v.index)] >= 0;
      }
      if (!has_bin) continue;
      for (const auto& [v, coef] : c.expr.terms()) {
        const int k = bin_pos[static_cast<size_t>(v.index)];
        if (k < 0 || coef == 0.0) continue;
        const double rest = act - coef * x[static_cast<size_t>(v.index)];
        const double ratio = (c.rhs - rest) / coef;
        if ((c.sense != Sense::Ge && coef < 0.0) || (c.sense != Sense::Le && coef > 0.0))
          m[static_cast<size_t>(k)] = std::max(m[static_cast<size_t>(k)], ratio);
      }
    }
    for (size_t k = 0; k < binaries.size(); ++k) {
      if (fixes[k] >= 0) m[k] = static_cast<double>(fixes[k]);
      m[k] = std::clamp(m[k], 0.0, 1.0);
    }
    return m;
  };

  // Dive fixes: round each binary up from its implied minimum, then repair
  // constraint rows made of binaries alone (such as exclusivity pairs) by
  // flipping the entries with the weakest implied support.  The repaired
  // vector seeds a fix-all-and-resolve heuristic that produces feasible
  // incumbents even when the relaxation is fully degenerate.
  const auto dive_fixes = [&](const std::vector<double>& mins) {
    std::vector<int8_t> f(binaries.size());
    for (size_t k = 0; k < binaries.size(); ++k) f[k] = mins[k] > 10 * detail::kIntTol ? 1 : 0;
    for (const auto& c : p.constraints()) {
      bool all_bin = !c.expr.terms().empty();
      for (const auto& [v, coef] : c.expr.terms())
        all_bin &= bin_pos[static_cast<size_t>(v.index)] >= 0;
      if (!all_bin) continue;
      double act = c.expr.constant();
      for (const auto& [v, coef] : c.expr.terms())
        act += coef * f[static_cast<size_t>(bin_pos[static_cast<size_t>(v.index)])];
      while (c.sense != Sense::Ge && act > c.rhs + detail::kIntTol) {
        // flip the set binary with the smallest implied minimum
        int flip = -1;
        double flip_min = kInf, flip_coef = 0.0;
        for (const auto& [v, coef] : c.expr.terms()) {
          const int k = bin_pos[static_cast<size_t>(v.index)];
          if (coef > 0.0 && f[static_cast<size_t>(k)] == 1 && mins[static_cast<size_t>(k)] < flip_min) {
            flip_min = mins[static_cast<size_t>(k)];
            flip = k;
            flip_coef = coef;
          }
        }
        if (flip < 0) break;
        f[static_cast<size_t>(flip)] = 0;
        act -= flip_coef;
      }
    }
    return f;
  };

  // snap every binary up to 1 if its implied minimum is positive; a feasible
  // snap turns the node solution into an incumbent at its own objective
  const auto try_snap_repair = [&](const std::vector<double>& x, const std::vector<double>& mins) {
    std::vector<double> snapped = x;
    std::vector<int8_t> f(binaries.size());
    for (size_t k = 0; k < binaries.size(); ++k) {
      f[k] = mins[k] > 10 * detail::kIntTol ? 1 : 0;
      snapped[static_cast<size_t>(binaries[k])] = static_cast<double>(f[k]);
    }
    const double viol = p.max_violation(snapped);
    if (viol > 1e-5) return false;
    const double obj = p.objective().evaluate(snapped);
    if (obj < incumbent_obj) {
      incumbent_obj = obj;
      incumbent_values = std::move(snapped);
      incumbent_fixes = std::move(f);
      if (trace) *trace << "snap incumbent " << obj << " after " << processed << " nodes\n";
    }
    return true;
  };
  const auto try_incumbent = [&](double obj, const std::vector<double>& vals,
                                 const std::vector<int8_t>& fixes) {
    if (obj < incumbent_obj) {
      incumbent_obj = obj;
      incumbent_values = vals;
      incumbent_fixes = fixes;
      if (trace) *trace << "incumbent " << obj << " after " << processed << " nodes\n";
    }
  };

  while (!open.empty()) {
    if (processed >= cfg.max_iterations ||
        (cfg.time_limit_s && sw.ms() > *cfg.time_limit_s * 1000.0)) {
      limit_hit = true;
      break;
    }

    BnbNode node = std::move(const_cast<BnbNode&>(open.top()));
    open.pop();
    global_bound = std::max(global_bound, node.bound);

    if (incumbent_obj < kInf &&
        (node.bound >= incumbent_obj ||
         gap_of(incumbent_obj, std::max(global_bound, node.bound)) <= cfg.mip_rel_gap))
      break;  // best-bound order: nothing better remains

    ++processed;
    const NR r = nodes.solve(node.fixes);
    if (r.kind == NR::Kind::Infeasible) continue;
    if (r.kind == NR::Kind::Unresolved) {
      // relaxation did not converge; branching on any free binary keeps the
      // search exact (children inherit the parent bound) and yields easier
      // subproblems, so only a fully fixed unresolved node is abandoned
      int free_bin = -1;
      for (size_t k = 0; k < binaries.size(); ++k)
        if (node.fixes[k] < 0) {
          free_bin = static_cast<int>(k);
          break;
        }
      if (free_bin < 0) {
        any_unresolved = true;
        continue;
      }
      BnbNode child0{node.bound, node.fixes, seq++};
      child0.fixes[static_cast<size_t>(free_bin)] = 0;
      BnbNode child1{node.bound, node.fixes, seq++};
      child1.fixes[static_cast<size_t>(free_bin)] = 1;
      if (trace) *trace << "split unresolved node " << processed << " var "
                        << binaries[static_cast<size_t>(free_bin)] << '\n';
      open.push(std::move(child0));
      open.push(std::move(child1));
      continue;
    }
    if (r.objective == -kInf) {
      // unbounded relaxation: propagate as unbounded MILP
      Solution s;
      s.status = SolveStatus::Unbounded;
      s.runtime_ms = sw.ms();
      return s;
    }

    const double bound = std::max(node.bound, r.safe_bound);
    if (incumbent_obj < kInf && gap_of(incumbent_obj, bound) <= cfg.mip_rel_gap) continue;

    const std::vector<double> mins = implied_mins(r.values, node.fixes);
    const bool snapped_ok = try_snap_repair(r.values, mins);
    if (snapped_ok && gap_of(incumbent_obj, bound) <= cfg.mip_rel_gap) continue;

    // fractional implied minimum closest to 1/2 within the highest constraint
    // degree present, ties to lowest index
    int branch = -1;
    double best_frac = detail::kIntTol;
    int best_deg = -1;
    for (size_t k = 0; k < binaries.size(); ++k) {
      const double frac = std::min(mins[k], 1.0 - mins[k]);
      if (frac <= detail::kIntTol) continue;
      if (degree[k] > best_deg || (degree[k] == best_deg && frac > best_frac + 1e-12)) {
        best_deg = degree[k];
        best_frac = frac;
        branch = static_cast<int>(k);
      }
    }
    if (branch < 0) {
      // implied minima are integral, but that alone cannot close the node:
      // the raw relaxation values decide whether an integral point at the
      // node bound exists
      best_frac = detail::kIntTol;
      for (size_t k = 0; k < binaries.size(); ++k) {
        const double v = r.values[static_cast<size_t>(binaries[k])];
        const double frac = std::min(v, 1.0 - v);
        if (frac <= detail::kIntTol) continue;
        if (degree[k] > best_deg || (degree[k] == best_deg && frac > best_frac + 1e-12)) {
          best_deg = degree[k];
          best_frac = frac;
          branch = static_cast<int>(k);
        }
      }
      if (branch < 0) {
        try_incumbent(r.objective, r.values, rounded_fixes(r.values));
        continue;
      }
    }

    // dive heuristic: fix all binaries from the repaired implied minima and
    // resolve; runs while the incumbent is missing or far from the bound
    if ((incumbent_obj == kInf ||
         gap_of(incumbent_obj, bound) > 10.0 * cfg.mip_rel_gap) &&
        (processed == 1 || processed % 5 == 0)) {
      const auto f = dive_fixes(mins);
      const NR h = nodes.solve(f);
      if (h.kind == NR::Kind::Solved && h.objective > -kInf) try_incumbent(h.objective, h.values, f);
    }

    BnbNode child0{bound, node.fixes, seq++};
    child0.fixes[static_cast<size_t>(branch)] = 0;
    BnbNode child1{bound, node.fixes, seq++};
    child1.fixes[static_cast<size_t>(branch)] = 1;
    if (trace)
      *trace << "branch node " << processed << " bound " << bound << " var "
             << binaries[static_cast<size_t>(branch)] << " frac " << best_frac << '\n';
    open.push(std::move(child0));
    open.push(std::move(child1));
  }

  Solution s;
  if (incumbent_obj == kInf) {
    if (limit_hit || any_unresolved) {
      s.status = SolveStatus::LimitReached;
    } else {
      s.status = SolveStatus::Infeasible;
    }
    s.runtime_ms = sw.ms();
    return s;
  }

  if (open.empty() && !limit_hit && !any_unresolved) global_bound = incumbent_obj;

  // final resolve with incumbent binaries pinned: exact 0/1 values and a
  // tightly converged continuous part, solved fresh at full accuracy
  {
    Problem fixed = p.relax();
    for (size_t k = 0; k < binaries.size(); ++k) {
      LinearExpr e;
      e.add(VarRef{binaries[k]}, 1.0);
      fixed.add_constraint(std::move(e), Sense::Eq, static_cast<double>(incumbent_fixes[k]));
    }
    const Solution fin =
        !p.objective().is_quadratic() ? solve_lp(fixed, cfg) : solve_qp(fixed, cfg);
    if (fin.status == SolveStatus::Optimal) {
      incumbent_obj = fin.objective;
      incumbent_values = fin.values;
    }
    for (size_t k = 0; k < binaries.size(); ++k)
      incumbent_values[static_cast<size_t>(binaries[k])] = static_cast<double>(incumbent_fixes[k]);
  }

  s.objective = incumbent_obj;
  s.values = std::move(incumbent_values);
  s.gap = std::max(0.0, gap_of(incumbent_obj, std::min(global_bound, incumbent_obj) == -kInf
                                                  ? incumbent_obj
                                                  : std::min(global_bound, incumbent_obj)));
  if (global_bound == -kInf) s.gap = 0.0;
  const bool gap_ok = *s.gap <= cfg.mip_rel_gap || (open.empty() && !limit_hit && !any_unresolved);
  s.status = (limit_hit && !gap_ok) ? SolveStatus::LimitReached
             : gap_ok               ? SolveStatus::Optimal
                                    : SolveStatus::LimitReached;
  s.runtime_ms = sw.ms();
  return s;
}

}  // namespace besslin

#endif  // BESSLIN_BRANCH_BOUND_HPP_
