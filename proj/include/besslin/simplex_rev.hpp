#ifndef BESSLIN_SIMPLEX_REV_HPP_
#define BESSLIN_SIMPLEX_REV_HPP_

/**
 * @file
 * @brief Sparse revised dual simplex for bounded-variable LPs.
 *
 * Works on the computational form  min c'x  s.t.  Ax - s = 0  with box
 * bounds on both the structural variables x and the logicals s (the row
 * activity ranges).  Every column with a cost gets a dual-feasible
 * starting bound, so the all-logical basis is dual feasible and a single
 * dual-simplex pass reaches the optimum; after bound changes (as in
 * branch and bound) the same basis stays dual feasible and re-solves in
 * a few pivots.  The basis inverse is kept as a sparse LU factorization
 * plus product-form eta updates, refreshed periodically.
 */

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdint>
#include <vector>

#include "besslin/simplex.hpp"

namespace besslin {
namespace detail {

class RevisedSimplex {
public:
  explicit RevisedSimplex(const Problem& p, std::int64_t max_iter = 200000)
      : prob_(p), max_iter_(max_iter) {
    n_ = static_cast<int>(p.num_variables());
    m_ = static_cast<int>(p.num_constraints());
    nn_ = n_ + m_;
    build_columns();
    cold_start();
  }

  /// A dual-feasible starting bound must exist for every structural column.
  static bool suitable(const Problem& p) {
    std::vector<double> c(p.num_variables(), 0.0);
    for (const auto& [v, coef] : p.objective().linear.terms())
      c[static_cast<size_t>(v.index)] += coef;
    for (size_t j = 0; j < p.num_variables(); ++j) {
      const auto& v = p.variables()[j];
      if (c[j] > 0.0 && !(v.lower > -kInf)) return false;
      if (c[j] < 0.0 && !(v.upper < kInf)) return false;
    }
    return true;
  }

  /// Structural bound update between solves; the basis is kept.
  void set_variable_bounds(int j, double lower, double upper) {
    lo_[j] = lower;
    up_[j] = upper;
    if (status_[j] == kLower && !(lower > -kInf)) status_[j] = kUpper;
    else if (status_[j] == kUpper && !(upper < kInf)) status_[j] = kLower;
  }

  LpResult solve() {
    LpResult res;
    res.values.assign(static_cast<size_t>(n_), 0.0);
    for (int j = 0; j < nn_; ++j)
      if (status_[j] != kBasic && lo_[j] > up_[j] + 1e-12) {
        res.status = LpStatus::Infeasible;
        return res;
      }

    if (!refactorize()) {
      cold_start();
      if (!refactorize()) return res;  // IterationLimit: basis unusable
    }
    compute_basics();
    compute_duals();

    bool bland = false;
    std::int64_t stall = 0;
    double last_inf = kInf;
    const std::int64_t stall_limit = 4 * (m_ + n_) + 64;
    std::int64_t iters = 0;

    while (true) {
      if (iters >= max_iter_) {
        res.status = LpStatus::IterationLimit;
        res.iterations = iters;
        return res;
      }

      // leaving variable: most infeasible basic row (lowest row under Bland)
      int r = -1;
      double worst = feas_tol_;
      double total_inf = 0.0;
      for (int i = 0; i < m_; ++i) {
        const int j = basis_[i];
        const double v = xb_(i);
        const double below = lo_[j] - v, above = v - up_[j];
        const double viol = std::max(below, above);
        if (viol > feas_tol_) {
          total_inf += viol;
          if (bland ? r < 0 : viol > worst) {
            worst = viol;
            r = i;
          }
        }
      }
      if (r < 0) break;  // primal feasible and dual feasible: optimal

      if (total_inf < last_inf - 1e-12) {
        last_inf = total_inf;
        stall = 0;
      } else if (++stall > stall_limit) {
        bland = true;
      }

      const int jl = basis_[r];
      const double e = xb_(r) > up_[jl] ? 1.0 : -1.0;  // above upper / below lower

      // row r of B^-1 N
      Eigen::VectorXd rho = btran_unit(r);
      alpha_row(rho);

      // bounded dual ratio test: keep every nonbasic reduced cost on its side
      int q = -1;
      double best_ratio = kInf, best_alpha = 0.0;
      for (int j = 0; j < nn_; ++j) {
        if (status_[j] == kBasic) continue;
        const double a = e * alpha_[j];
        if (status_[j] == kLower && !(a > pivot_tol_)) continue;
        if (status_[j] == kUpper && !(a < -pivot_tol_)) continue;
        if (status_[j] == kFree && std::abs(a) <= pivot_tol_) continue;
        const double ratio = std::max(0.0, d_[j] / a);
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 &&
             (bland ? (q >= 0 && j < q) : std::abs(alpha_[j]) > std::abs(best_alpha)))) {
          best_ratio = ratio;
          best_alpha = alpha_[j];
          q = j;
        }
      }
      if (q < 0) {
        res.status = LpStatus::Infeasible;  // dual unbounded
        res.iterations = iters;
        return res;
      }

      // primal step: drive the leaving basic exactly onto its violated bound
      const double target = e > 0 ? up_[jl] : lo_[jl];
      const double delta = target - xb_(r);
      Eigen::VectorXd w = ftran_col(q);
      const double aq = w(r);
      if (std::abs(aq) < 1e-11) {
        if (!force_refactor()) {
          res.status = LpStatus::IterationLimit;
          res.iterations = iters;
          return res;
        }
        continue;  // recompute with a fresh factorization
      }
      const double step = delta / (-aq);

      // dual update
      const double theta = d_[q] / aq;
      for (int j = 0; j < nn_; ++j)
        if (status_[j] != kBasic) d_[j] -= theta * alpha_[j];
      d_[jl] = -theta;
      d_[q] = 0.0;

      // primal update
      xb_ -= step * w;
      xb_(r) = nonbasic_value(q) + step;
      status_[jl] = e > 0 ? kUpper : kLower;
      status_[q] = kBasic;
      basis_[r] = q;
      basic_pos_[jl] = -1;
      basic_pos_[q] = r;

      push_eta(r, std::move(w));
      ++iters;
      if (static_cast<int>(etas_.size()) >= refactor_every_) {
        if (!refactorize()) {
          res.status = LpStatus::IterationLimit;
          res.iterations = iters;
          return res;
        }
        compute_basics();
        compute_duals();
      }
    }

    extract(res);
    res.iterations = iters;
    res.status = LpStatus::Optimal;
    return res;
  }

private:
  static constexpr double feas_tol_ = 1e-9;
  static constexpr double pivot_tol_ = 1e-10;
  enum Status : int8_t { kLower, kUpper, kBasic, kFree };

  void build_columns() {
    cols_.assign(static_cast<size_t>(n_), {});
    lo_.assign(static_cast<size_t>(nn_), 0.0);
    up_.assign(static_cast<size_t>(nn_), 0.0);
    c_.assign(static_cast<size_t>(nn_), 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = prob_.variables()[static_cast<size_t>(j)].lower;
      up_[j] = prob_.variables()[static_cast<size_t>(j)].upper;
    }
    for (const auto& [v, coef] : prob_.objective().linear.terms()) c_[v.index] += coef;
    for (int i = 0; i < m_; ++i) {
      const auto& con = prob_.constraints()[static_cast<size_t>(i)];
      for (const auto& [v, coef] : con.expr.terms())
        cols_[static_cast<size_t>(v.index)].emplace_back(i, coef);
      const double b = con.rhs - con.expr.constant();
      switch (con.sense) {
        case Sense::Le: lo_[n_ + i] = -kInf; up_[n_ + i] = b; break;
        case Sense::Ge: lo_[n_ + i] = b; up_[n_ + i] = kInf; break;
        case Sense::Eq: lo_[n_ + i] = up_[n_ + i] = b; break;
      }
    }
  }

  void cold_start() {
    status_.assign(static_cast<size_t>(nn_), kLower);
    basis_.assign(static_cast<size_t>(m_), -1);
    basic_pos_.assign(static_cast<size_t>(nn_), -1);
    for (int j = 0; j < n_; ++j) {
      if (c_[j] > 0.0) status_[j] = kLower;
      else if (c_[j] < 0.0) status_[j] = kUpper;
      else if (lo_[j] > -kInf) status_[j] = kLower;
      else if (up_[j] < kInf) status_[j] = kUpper;
      else status_[j] = kFree;
    }
    for (int i = 0; i < m_; ++i) {
      basis_[i] = n_ + i;
      status_[n_ + i] = kBasic;
      basic_pos_[n_ + i] = i;
    }
  }

  double nonbasic_value(int j) const {
    switch (status_[static_cast<size_t>(j)]) {
      case kLower: return lo_[static_cast<size_t>(j)];
      case kUpper: return up_[static_cast<size_t>(j)];
      default: return 0.0;
    }
  }

  // column j of [A -I]
  template <typename F>
  void for_col(int j, F&& f) const {
    if (j < n_)
      for (const auto& [i, v] : cols_[static_cast<size_t>(j)]) f(i, v);
    else
      f(j - n_, -1.0);
  }

  bool refactorize() {
    if (m_ == 0) return true;
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < m_; ++i)
      for_col(basis_[i], [&](int row, double v) { trips.emplace_back(row, i, v); });
    Eigen::SparseMatrix<double> B(m_, m_), Bt;
    B.setFromTriplets(trips.begin(), trips.end());
    Bt = B.transpose();
    lu_.compute(B);
    lut_.compute(Bt);
    etas_.clear();
    return lu_.info() == Eigen::Success && lut_.info() == Eigen::Success;
  }

  bool force_refactor() {
    if (!refactorize()) return false;
    compute_basics();
    compute_duals();
    return true;
  }

  Eigen::VectorXd ftran(Eigen::VectorXd v) const {
    if (m_ == 0) return v;
    v = lu_.solve(v);
    for (const auto& [r, w] : etas_) {
      const double t = v(r) / w(r);
      v -= t * w;
      v(r) = t;
    }
    return v;
  }

  Eigen::VectorXd btran(Eigen::VectorXd v) const {
    if (m_ == 0) return v;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const auto& [r, w] = *it;
      double s = w.dot(v) - w(r) * v(r);
      v(r) = (v(r) - s) / w(r);
    }
    return lut_.solve(v);
  }

  Eigen::VectorXd ftran_col(int j) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
    for_col(j, [&](int row, double val) { v(row) += val; });
    return ftran(std::move(v));
  }

  Eigen::VectorXd btran_unit(int r) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
    v(r) = 1.0;
    return btran(std::move(v));
  }

  void push_eta(int r, Eigen::VectorXd w) { etas_.emplace_back(r, std::move(w)); }

  void compute_basics() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < nn_; ++j) {
      if (status_[j] == kBasic) continue;
      const double v = nonbasic_value(j);
      if (v != 0.0) for_col(j, [&](int row, double a) { rhs(row) -= a * v; });
    }
    xb_ = ftran(std::move(rhs));
  }

  void compute_duals() {
    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = c_[static_cast<size_t>(basis_[i])];
    y_ = btran(std::move(cb));
    d_.assign(static_cast<size_t>(nn_), 0.0);
    for (int j = 0; j < nn_; ++j) {
      if (status_[j] == kBasic) continue;
      double dj = c_[static_cast<size_t>(j)];
      for_col(j, [&](int row, double a) { dj -= y_(row) * a; });
      d_[static_cast<size_t>(j)] = dj;
    }
  }

  void alpha_row(const Eigen::VectorXd& rho) {
    alpha_.assign(static_cast<size_t>(nn_), 0.0);
    for (int j = 0; j < nn_; ++j) {
      if (status_[j] == kBasic) continue;
      double a = 0.0;
      for_col(j, [&](int row, double v) { a += rho(row) * v; });
      alpha_[static_cast<size_t>(j)] = a;
    }
  }

  void extract(LpResult& res) {
    std::vector<double> x(static_cast<size_t>(nn_), 0.0);
    for (int j = 0; j < nn_; ++j)
      if (status_[j] != kBasic) x[static_cast<size_t>(j)] = nonbasic_value(j);
    for (int i = 0; i < m_; ++i) x[static_cast<size_t>(basis_[i])] = xb_(i);
    for (int j = 0; j < n_; ++j) res.values[static_cast<size_t>(j)] = x[static_cast<size_t>(j)];
    res.objective = prob_.objective().evaluate(res.values);
    res.dual_objective = res.objective;
    // d on a logical column equals the row dual; duals follow the convention
    // c + A'y_row = 0 on basic structural columns
    compute_duals();
    res.row_duals.assign(static_cast<size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i)
      res.row_duals[static_cast<size_t>(i)] =
          status_[n_ + i] == kBasic ? 0.0 : d_[static_cast<size_t>(n_ + i)];
  }

  const Problem& prob_;
  std::int64_t max_iter_;
  int n_ = 0, m_ = 0, nn_ = 0;
  int refactor_every_ = 100;

  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lo_, up_, c_, d_, alpha_;
  std::vector<int8_t> status_;
  std::vector<int> basis_, basic_pos_;
  Eigen::VectorXd xb_, y_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_, lut_;
  std::vector<std::pair<int, Eigen::VectorXd>> etas_;
};

}  // namespace detail
}  // namespace besslin

#endif  // BESSLIN_SIMPLEX_REV_HPP_
