#ifndef BESSLIN_SIMPLEX_HPP_
#define BESSLIN_SIMPLEX_HPP_

/**
 * @file
 * @brief Dense two-phase primal simplex for LPs in the Problem IR.
 *
 * The problem is brought to standard form (shifted/split variables, slack
 * and artificial columns, nonnegative rhs).  Phase 1 minimizes the sum of
 * artificials; phase 2 the original cost.  Dantzig pricing with a
 * permanent switch to Bland's rule once a degeneracy-cycle heuristic
 * triggers.  Intended for desk-scale instances; no sparse engineering.
 */

#include <cmath>
#include <cstdint>
#include <vector>

#include "besslin/optmodel.hpp"

namespace besslin {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpResult {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;       // original space, includes objective constant
  double dual_objective = 0.0;  // weak-duality bound in original space
  std::vector<double> values;   // original variables
  std::vector<double> row_duals;  // per original constraint, original orientation
  std::int64_t iterations = 0;
};

namespace detail {

class SimplexSolver {
public:
  SimplexSolver(const Problem& p, std::int64_t max_iter) : prob_(p), max_iter_(max_iter) {}

  LpResult solve() {
    build_standard_form();
    LpResult res;
    res.values.assign(prob_.num_variables(), 0.0);

    // Phase 1
    if (num_art_ > 0) {
      phase_ = 1;
      const LpStatus s1 = iterate();
      if (s1 == LpStatus::IterationLimit) {
        res.status = s1;
        res.iterations = iters_;
        extract_primal(res);
        return res;
      }
      if (obj_row_[ncols_] < -feas_eps_ * 10.0) {  // leftover artificial mass
        res.status = LpStatus::Infeasible;
        res.iterations = iters_;
        return res;
      }
      drive_out_artificials();
    }

    phase_ = 2;
    load_phase2_costs();
    const LpStatus s2 = iterate();
    res.status = s2;
    res.iterations = iters_;
    extract_primal(res);
    if (s2 == LpStatus::Optimal || s2 == LpStatus::IterationLimit) {
      res.objective = prob_.objective().evaluate(res.values);
      extract_duals(res);
    }
    return res;
  }

private:
  static constexpr double pivot_eps_ = 1e-9;
  static constexpr double feas_eps_ = 1e-9;

  // Mapping from original variable j to standard-form columns.
  struct VarMap {
    int col_pos = -1;   // column of positive part
    int col_neg = -1;   // column of negative part (free variables)
    double shift = 0.0; // x = shift + sign * x'
    double sign = 1.0;
  };

  void build_standard_form() {
    const auto& vars = prob_.variables();
    const size_t nv = vars.size();
    vmap_.resize(nv);

    // structural columns
    int col = 0;
    std::vector<std::pair<int, double>> ub_rows;  // (column, upper bound in shifted space)
    for (size_t j = 0; j < nv; ++j) {
      const auto& v = vars[j];
      auto& m = vmap_[j];
      if (v.lower > -kInf) {
        m.col_pos = col++;
        m.shift = v.lower;
        m.sign = 1.0;
        if (v.upper < kInf && v.upper > v.lower)
          ub_rows.emplace_back(m.col_pos, v.upper - v.lower);
        else if (v.upper == v.lower)
          ub_rows.emplace_back(m.col_pos, 0.0);
      } else if (v.upper < kInf) {
        m.col_pos = col++;  // x = upper - x'
        m.shift = v.upper;
        m.sign = -1.0;
      } else {
        m.col_pos = col++;
        m.col_neg = col++;
      }
    }
    nstruct_ = col;

    // rows: original constraints then upper-bound rows
    struct Row {
      std::vector<std::pair<int, double>> a;
      double b;
      Sense sense;
      double orient = 1.0;  // -1 when the row was negated for rhs >= 0
    };
    std::vector<Row> rows;
    for (const auto& c : prob_.constraints()) {
      Row r;
      r.sense = c.sense;
      double b = c.rhs - c.expr.constant();
      for (const auto& [v, coef] : c.expr.terms()) {
        const auto& m = vmap_[static_cast<size_t>(v.index)];
        b -= coef * m.shift;
        r.a.emplace_back(m.col_pos, coef * m.sign);
        if (m.col_neg >= 0) r.a.emplace_back(m.col_neg, -coef);
      }
      r.b = b;
      rows.push_back(std::move(r));
    }
    num_orig_rows_ = rows.size();
    for (const auto& [c, ub] : ub_rows) {
      Row r;
      r.sense = Sense::Le;
      r.a.emplace_back(c, 1.0);
      r.b = ub;
      rows.push_back(std::move(r));
    }

    // normalize rhs sign
    for (auto& r : rows) {
      if (r.b < 0.0) {
        r.b = -r.b;
        r.orient = -1.0;
        for (auto& [c, v] : r.a) v = -v;
        if (r.sense == Sense::Le) r.sense = Sense::Ge;
        else if (r.sense == Sense::Ge) r.sense = Sense::Le;
      }
    }

    nrows_ = rows.size();
    // columns: structural | slack/surplus | artificial | rhs
    int extra = 0;
    for (const auto& r : rows) extra += (r.sense == Sense::Eq) ? 1 : (r.sense == Sense::Ge ? 2 : 1);
    ncols_ = nstruct_ + extra;

    tab_.assign(nrows_, std::vector<double>(ncols_ + 1, 0.0));
    basis_.assign(nrows_, -1);
    slack_col_.assign(nrows_, -1);
    art_col_.assign(nrows_, -1);
    row_orient_.assign(nrows_, 1.0);
    is_artificial_.assign(ncols_, false);

    int next = nstruct_;
    num_art_ = 0;
    for (size_t i = 0; i < nrows_; ++i) {
      auto& r = rows[i];
      row_orient_[i] = r.orient;
      for (const auto& [c, v] : r.a) tab_[i][c] += v;
      tab_[i][ncols_] = r.b;
      if (r.sense == Sense::Le) {
        slack_col_[i] = next;
        tab_[i][next] = 1.0;
        basis_[i] = next;
        ++next;
      } else if (r.sense == Sense::Ge) {
        slack_col_[i] = next;
        tab_[i][next] = -1.0;
        ++next;
        art_col_[i] = next;
        is_artificial_[next] = true;
        tab_[i][next] = 1.0;
        basis_[i] = next;
        ++next;
        ++num_art_;
      } else {
        art_col_[i] = next;
        is_artificial_[next] = true;
        tab_[i][next] = 1.0;
        basis_[i] = next;
        ++next;
        ++num_art_;
      }
    }

    // phase-1 reduced costs: minimize sum of artificials
    obj_row_.assign(ncols_ + 1, 0.0);
    if (num_art_ > 0) {
      for (size_t c = 0; c < ncols_; ++c)
        if (is_artificial_[c]) obj_row_[c] = 1.0;
      for (size_t i = 0; i < nrows_; ++i) {
        if (art_col_[i] >= 0 && basis_[i] == art_col_[i]) {
          for (size_t c = 0; c <= ncols_; ++c) obj_row_[c] -= tab_[i][c];
        }
      }
    }

    // original costs in standard-form space (for phase 2)
    cost2_.assign(ncols_, 0.0);
    const auto& lin = prob_.objective().linear;
    for (const auto& [v, coef] : lin.terms()) {
      const auto& m = vmap_[static_cast<size_t>(v.index)];
      cost2_[m.col_pos] += coef * m.sign;
      if (m.col_neg >= 0) cost2_[m.col_neg] -= coef;
    }
  }

  void load_phase2_costs() {
    obj_row_.assign(ncols_ + 1, 0.0);
    for (size_t c = 0; c < ncols_; ++c) obj_row_[c] = cost2_[c];
    // make reduced costs of basic columns zero
    for (size_t i = 0; i < nrows_; ++i) {
      const int b = basis_[i];
      const double cb = obj_row_[b];
      if (cb != 0.0)
        for (size_t c = 0; c <= ncols_; ++c) obj_row_[c] -= cb * tab_[i][c];
    }
  }

  // After phase 1, pivot remaining basic artificials out where possible.
  void drive_out_artificials() {
    for (size_t i = 0; i < nrows_; ++i) {
      if (basis_[i] >= 0 && is_artificial_[basis_[i]]) {
        int enter = -1;
        for (size_t c = 0; c < ncols_; ++c) {
          if (!is_artificial_[c] && std::abs(tab_[i][c]) > pivot_eps_) {
            enter = static_cast<int>(c);
            break;
          }
        }
        if (enter >= 0) pivot(i, enter);
        // else: redundant row, artificial stays basic at zero
      }
    }
  }

  LpStatus iterate() {
    bool bland = false;
    std::int64_t stall = 0;
    double last_obj = -obj_row_[ncols_];
    const std::int64_t stall_limit = 2 * static_cast<std::int64_t>(nrows_ + ncols_) + 16;

    while (true) {
      if (iters_ >= max_iter_) return LpStatus::IterationLimit;

      // pricing
      int enter = -1;
      if (!bland) {
        double best = -1e-9;
        for (size_t c = 0; c < ncols_; ++c) {
          if (phase_ == 2 && is_artificial_[c]) continue;
          if (obj_row_[c] < best) {
            best = obj_row_[c];
            enter = static_cast<int>(c);
          }
        }
      } else {
        for (size_t c = 0; c < ncols_; ++c) {
          if (phase_ == 2 && is_artificial_[c]) continue;
          if (obj_row_[c] < -1e-9) {
            enter = static_cast<int>(c);
            break;
          }
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      // ratio test (Bland tie-break on lowest basis column when active)
      int leave = -1;
      double best_ratio = kInf;
      for (size_t i = 0; i < nrows_; ++i) {
        const double a = tab_[i][enter];
        if (a > pivot_eps_) {
          const double ratio = tab_[i][ncols_] / a;
          if (ratio < best_ratio - 1e-12 ||
              (ratio < best_ratio + 1e-12 && leave >= 0 &&
               (bland ? basis_[i] < basis_[leave] : a > tab_[leave][enter]))) {
            best_ratio = ratio;
            leave = static_cast<int>(i);
          }
        }
      }
      if (leave < 0) return phase_ == 1 ? LpStatus::IterationLimit : LpStatus::Unbounded;

      pivot(static_cast<size_t>(leave), enter);
      ++iters_;

      const double obj = -obj_row_[ncols_];
      if (obj < last_obj - 1e-12) {
        last_obj = obj;
        stall = 0;
      } else if (++stall > stall_limit && !bland) {
        bland = true;  // degeneracy-cycle heuristic triggered
        stall = 0;
      }
    }
  }

  void pivot(size_t r, int c) {
    auto& prow = tab_[r];
    const double inv = 1.0 / prow[c];
    for (size_t j = 0; j <= ncols_; ++j) prow[j] *= inv;
    prow[c] = 1.0;
    for (size_t i = 0; i < nrows_; ++i) {
      if (i == r) continue;
      const double f = tab_[i][c];
      if (f != 0.0) {
        auto& row = tab_[i];
        for (size_t j = 0; j <= ncols_; ++j) row[j] -= f * prow[j];
        row[c] = 0.0;
      }
    }
    const double f = obj_row_[c];
    if (f != 0.0) {
      for (size_t j = 0; j <= ncols_; ++j) obj_row_[j] -= f * prow[j];
      obj_row_[c] = 0.0;
    }
    basis_[r] = c;
  }

  void extract_primal(LpResult& res) const {
    std::vector<double> xs(ncols_, 0.0);
    for (size_t i = 0; i < nrows_; ++i)
      if (basis_[i] >= 0) xs[basis_[i]] = tab_[i][ncols_];
    for (size_t j = 0; j < vmap_.size(); ++j) {
      const auto& m = vmap_[j];
      double v = m.shift + m.sign * xs[m.col_pos];
      if (m.col_neg >= 0) v -= xs[m.col_neg];
      res.values[j] = v;
    }
  }

  void extract_duals(LpResult& res) {
    // Duals read off the logical columns: y_i = -redcost(artificial) for
    // rows carrying one (cost 0 in phase 2), else -redcost(slack).
    res.row_duals.assign(num_orig_rows_, 0.0);
    rebuild_rhs();
    double dual_obj = 0.0;
    for (size_t i = 0; i < nrows_; ++i) {
      const double y = (art_col_[i] >= 0) ? -obj_row_[art_col_[i]] : -obj_row_[slack_col_[i]];
      dual_obj += y * rhs0_[i];
      if (i < num_orig_rows_) res.row_duals[i] = y * row_orient_[i];
    }
    res.dual_objective = dual_obj + objective_constant_offset();
  }

  // Standard-form rhs is destroyed by pivoting; replay its construction.
  void rebuild_rhs() {
    rhs0_.assign(nrows_, 0.0);
    size_t i = 0;
    for (const auto& c : prob_.constraints()) {
      double b = c.rhs - c.expr.constant();
      for (const auto& [v, coef] : c.expr.terms())
        b -= coef * vmap_[static_cast<size_t>(v.index)].shift;
      rhs0_[i++] = std::abs(b);
    }
    for (const auto& v : prob_.variables())
      if (v.lower > -kInf && v.upper < kInf) rhs0_[i++] = v.upper - v.lower;
  }

  double objective_constant_offset() const {
    // objective in shifted space differs from original by c . shift + const
    double off = prob_.objective().linear.constant();
    for (const auto& [v, coef] : prob_.objective().linear.terms())
      off += coef * vmap_[static_cast<size_t>(v.index)].shift;
    return off;
  }

  const Problem& prob_;
  std::int64_t max_iter_;
  std::int64_t iters_ = 0;
  int phase_ = 1;

  std::vector<VarMap> vmap_;
  size_t nstruct_ = 0, nrows_ = 0, ncols_ = 0, num_orig_rows_ = 0;
  size_t num_art_ = 0;
  std::vector<std::vector<double>> tab_;
  std::vector<double> obj_row_, cost2_, rhs0_;
  std::vector<int> basis_, slack_col_, art_col_;
  std::vector<double> row_orient_;
  std::vector<bool> is_artificial_;
};

}  // namespace detail

inline LpResult simplex_solve(const Problem& p, std::int64_t max_iter = 200000) {
  detail::SimplexSolver s(p, max_iter);
  return s.solve();
}

}  // namespace besslin

#endif  // BESSLIN_SIMPLEX_HPP_
