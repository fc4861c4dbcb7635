#ifndef BESSLIN_QP_ADMM_HPP_
#define BESSLIN_QP_ADMM_HPP_

/**
 * @file
 * @brief Operator-splitting solver for convex QPs (and LPs with P = 0).
 *
 * Solves  min 0.5 x'Px + q'x  s.t.  l <= Ax <= u  with the ADMM scheme of
 * OSQP (Stellato et al., Math. Prog. Comp. 12, 2020): a sparse LDLT
 * factorization of the KKT matrix, Ruiz equilibration, residual-balancing
 * rho adaptation (with refactorization), and an active-set polish step at
 * the end.  The factorization depends only on the matrix pattern and rho,
 * so repeated solves with different l/u (as in branch and bound) reuse it.
 */

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace besslin {

enum class AdmmStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIterations, NumericalError };

struct AdmmParams {
  double rho = 1.0;          // fixed penalty; equality rows get rho * 1e3
  double sigma = 1e-6;
  double alpha = 1.6;        // over-relaxation
  double eps_abs = 1e-8;
  double eps_rel = 1e-8;
  double eps_inf = 1e-9;     // infeasibility certificate threshold
  std::int64_t max_iter = 50000;
  int check_every = 25;
  bool scaling = true;
  int scaling_iters = 10;
  bool polish = true;
  double polish_delta = 1e-8;
  int polish_refine_iters = 6;
  bool warm_start = false;   // reuse the previous solve's iterates
  bool adaptive_rho = true;  // rebalance rho from the residual ratio
  double adaptive_rho_trigger = 5.0;  // refactorize when rho moves this much
  std::int64_t polish_every = 0;      // mid-run crossover attempt period (0 = off)
};

struct AdmmResult {
  AdmmStatus status = AdmmStatus::NumericalError;
  Eigen::VectorXd x;   // primal
  Eigen::VectorXd y;   // row duals (sign: Px + q + A'y = 0 at optimum)
  double objective = 0.0;  // 0.5 x'Px + q'x (no constant offset)
  double prim_res = kInf;
  double dual_res = kInf;
  double comp_res = kInf;
  std::int64_t iterations = 0;
  bool polished = false;
};

struct QpData {
  Eigen::SparseMatrix<double> P;  // n x n symmetric (full storage)
  Eigen::VectorXd q;
  Eigen::SparseMatrix<double> A;  // m x n
  Eigen::VectorXd l, u;
};

class AdmmSolver {
public:
  AdmmSolver(QpData data, AdmmParams prm = {}) : d_(std::move(data)), prm_(prm), rho_base_(prm.rho) {
    n_ = d_.A.cols();
    m_ = d_.A.rows();
    if (prm_.scaling) scale();
    else {
      sx_ = Eigen::VectorXd::Ones(n_);
      sy_ = Eigen::VectorXd::Ones(m_);
      c_ = 1.0;
      Ps_ = d_.P;
      As_ = d_.A;
      qs_ = d_.q;
    }
    setup_rho();
    factorize();
  }

  const QpData& data() const { return d_; }
  double rho() const { return rho_base_; }
  void set_max_iter(std::int64_t it) { prm_.max_iter = it; }

  /// Drop warm-start state and restore the penalty; a stalled warm-started
  /// resolve is often rescued by a cold run from the default rho.
  void reset(double rho_value) {
    rho_base_ = rho_value;
    warm_x_.resize(0);
    warm_z_.resize(0);
    warm_y_.resize(0);
    setup_rho();
    factorize();
  }
  Eigen::VectorXd& mutable_l() { return d_.l; }
  Eigen::VectorXd& mutable_u() { return d_.u; }

  /// Solve with the current l/u vectors (bounds may be edited between calls).
  AdmmResult solve() {
    AdmmResult res;
    res.x = Eigen::VectorXd::Zero(n_);
    res.y = Eigen::VectorXd::Zero(m_);
    if (!ok_) return res;

    for (Eigen::Index i = 0; i < m_; ++i) {
      if (d_.l(i) > d_.u(i)) {  // trivially empty
        res.status = AdmmStatus::PrimalInfeasible;
        return res;
      }
    }

    const Eigen::VectorXd ls = sy_.cwiseProduct(clamp_finite(d_.l));
    const Eigen::VectorXd us = sy_.cwiseProduct(clamp_finite(d_.u));

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(m_);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m_);
    if (prm_.warm_start && warm_x_.size() == n_) {
      x = warm_x_;
      z = warm_z_.cwiseMax(ls).cwiseMin(us);
      y = warm_y_;
    }
    Eigen::VectorXd p(n_ + m_), x_prev(n_), y_prev(m_), z_next(m_);

    std::optional<AdmmResult> early;  // successful mid-run crossover
    std::optional<AdmmStatus> code;
    std::int64_t iter = 0;
    for (; iter < prm_.max_iter && !code; ++iter) {
      p.head(n_) = prm_.sigma * x - qs_;
      p.tail(m_) = z - rho_inv_.cwiseProduct(y);
      p = ldlt_.solve(p);

      const bool check = (iter % prm_.check_every == prm_.check_every - 1);
      if (check) {
        x_prev = x;
        y_prev = y;
      }

      x = prm_.alpha * p.head(n_) + (1.0 - prm_.alpha) * x;
      z_next = (prm_.alpha * rho_inv_.cwiseProduct(p.tail(m_)) +
                (1.0 - prm_.alpha) * rho_inv_.cwiseProduct(y) + z)
                   .cwiseMax(ls)
                   .cwiseMin(us);
      y = (1.0 - prm_.alpha) * y + prm_.alpha * p.tail(m_) + rho_.cwiseProduct(z - z_next);
      z.swap(z_next);

      if (check) {
        double ratio = 1.0;
        code = check_stopping(x, y, z, x - x_prev, y - y_prev, &ratio);
        if (!code && prm_.polish && prm_.polish_every > 0 &&
            (iter + 1) % prm_.polish_every < prm_.check_every) {
          AdmmResult mid;
          mid.x = sx_.cwiseProduct(x);
          mid.y = sy_.cwiseProduct(y) / c_;
          if (polish(mid)) {
            early = std::move(mid);
            code = AdmmStatus::Optimal;
          }
        }
        if (!code && prm_.adaptive_rho && std::isfinite(ratio) && ratio > 0.0) {
          const double step = std::sqrt(ratio);
          if (step > prm_.adaptive_rho_trigger || step < 1.0 / prm_.adaptive_rho_trigger) {
            rho_base_ = std::clamp(rho_base_ * step, 1e-6, 1e6);
            setup_rho();
            factorize();
            if (!ok_) {
              code = AdmmStatus::NumericalError;
              break;
            }
          }
        }
      }
    }

    res.iterations = iter;
    res.status = code.value_or(AdmmStatus::MaxIterations);

    if (prm_.warm_start) {
      warm_x_ = x;
      warm_z_ = z;
      warm_y_ = y;
    }

    // unscale
    res.x = sx_.cwiseProduct(x);
    res.y = sy_.cwiseProduct(y) / c_;

    if (early) {
      res.x = early->x;
      res.y = early->y;
      res.polished = true;
    } else if ((res.status == AdmmStatus::Optimal || res.status == AdmmStatus::MaxIterations) &&
               prm_.polish) {
      res.polished = polish(res);
    }
    if (res.status == AdmmStatus::Optimal || res.status == AdmmStatus::MaxIterations) {
      compute_residuals(res);
      // the unscaled residual check is authoritative
      if (res.prim_res <= prm_.eps_abs * 10 + prm_.eps_rel * res_scale_prim_ &&
          res.dual_res <= prm_.eps_abs * 10 + prm_.eps_rel * res_scale_dual_)
        res.status = AdmmStatus::Optimal;
      else if (res.status == AdmmStatus::Optimal)
        res.status = AdmmStatus::MaxIterations;
      res.objective = 0.5 * res.x.dot(d_.P * res.x) + d_.q.dot(res.x);
    }
    return res;
  }

  /// Rigorous LP lower bound from the final duals (only valid when P = 0 and
  /// the last n rows of A are the identity box rows, as built by lower_to_qp):
  /// wrong-signed duals on one-sided rows are dropped and the stationarity
  /// residual is absorbed into the box rows, yielding an exactly dual-feasible
  /// point whose dual objective bounds the LP optimum from below.
  double dual_bound(const AdmmResult& res) const {
    if (d_.P.nonZeros() > 0 || m_ < n_) return -kInf;
    Eigen::VectorXd y = res.y;
    for (Eigen::Index i = 0; i < m_ - n_; ++i) {
      if (y(i) > 0.0 && !std::isfinite(d_.u(i))) y(i) = 0.0;
      else if (y(i) < 0.0 && !std::isfinite(d_.l(i))) y(i) = 0.0;
    }
    const Eigen::VectorXd r = d_.q + d_.A.transpose() * y;
    for (Eigen::Index j = 0; j < n_; ++j) y(m_ - n_ + j) -= r(j);
    double g = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (y(i) == 0.0) continue;
      const double bnd = y(i) > 0.0 ? d_.u(i) : d_.l(i);
      if (!std::isfinite(bnd)) return -kInf;
      g -= y(i) * bnd;
    }
    return g;
  }

private:
  static Eigen::VectorXd clamp_finite(const Eigen::VectorXd& v) {
    // keep infinities; scaling multiplies them harmlessly
    return v;
  }

  void scale() {
    sx_ = Eigen::VectorXd::Ones(n_);
    sy_ = Eigen::VectorXd::Ones(m_);

    Eigen::VectorXd dx(n_), dy(m_);
    Ps_ = d_.P;
    As_ = d_.A;
    for (int it = 0; it < prm_.scaling_iters; ++it) {
      dx.setZero();
      dy.setZero();
      for (int k = 0; k < Ps_.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator i(Ps_, k); i; ++i)
          dx(i.col()) = std::max(dx(i.col()), std::abs(i.value()));
      for (int k = 0; k < As_.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator i(As_, k); i; ++i) {
          dx(i.col()) = std::max(dx(i.col()), std::abs(i.value()));
          dy(i.row()) = std::max(dy(i.row()), std::abs(i.value()));
        }
      for (Eigen::Index i = 0; i < n_; ++i) dx(i) = dx(i) > 1e-12 ? 1.0 / std::sqrt(dx(i)) : 1.0;
      for (Eigen::Index i = 0; i < m_; ++i) dy(i) = dy(i) > 1e-12 ? 1.0 / std::sqrt(dy(i)) : 1.0;
      sx_ = sx_.cwiseProduct(dx);
      sy_ = sy_.cwiseProduct(dy);
      Ps_ = dx.asDiagonal() * Ps_ * dx.asDiagonal();
      As_ = dy.asDiagonal() * As_ * dx.asDiagonal();
    }
    // cost scaling
    Eigen::VectorXd qsv = sx_.cwiseProduct(d_.q);
    double pmean = 0.0;
    if (Ps_.nonZeros() > 0) {
      Eigen::VectorXd pcol = Eigen::VectorXd::Zero(n_);
      for (int k = 0; k < Ps_.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator i(Ps_, k); i; ++i)
          pcol(i.col()) = std::max(pcol(i.col()), std::abs(i.value()));
      pmean = pcol.mean();
    }
    c_ = 1.0 / std::max({1e-6, pmean, qsv.lpNorm<Eigen::Infinity>()});
    Ps_ *= c_;
    qs_ = c_ * qsv;
  }

  void setup_rho() {
    rho_ = Eigen::VectorXd::Constant(m_, rho_base_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      const bool lo = std::isfinite(d_.l(i)), hi = std::isfinite(d_.u(i));
      if (!lo && !hi)
        rho_(i) = 1e-6;
      else if (lo && hi && d_.u(i) - d_.l(i) < 1e-10)
        rho_(i) = rho_base_ * 1e3;  // equality row
    }
    rho_inv_ = rho_.cwiseInverse();
  }

  void factorize() {
    typedef Eigen::Triplet<double> T;
    std::vector<T> trips;
    trips.reserve(Ps_.nonZeros() + As_.nonZeros() + n_ + m_);
    for (int k = 0; k < Ps_.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator i(Ps_, k); i; ++i)
        if (i.row() <= i.col()) trips.emplace_back(i.row(), i.col(), i.value());
    for (Eigen::Index i = 0; i < n_; ++i) trips.emplace_back(i, i, prm_.sigma);
    for (int k = 0; k < As_.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator i(As_, k); i; ++i)
        trips.emplace_back(i.col(), n_ + i.row(), i.value());
    for (Eigen::Index i = 0; i < m_; ++i) trips.emplace_back(n_ + i, n_ + i, -rho_inv_(i));

    Eigen::SparseMatrix<double> kkt(n_ + m_, n_ + m_);
    kkt.setFromTriplets(trips.begin(), trips.end());
    ldlt_.compute(kkt.selfadjointView<Eigen::Upper>());
    ok_ = (ldlt_.info() == Eigen::Success);

    res_scale_prim_ = 1.0;
    res_scale_dual_ = 1.0;
  }

  std::optional<AdmmStatus> check_stopping(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                           const Eigen::VectorXd& z, const Eigen::VectorXd& dx,
                                           const Eigen::VectorXd& dy, double* ratio) {
    // unscaled iterates
    const Eigen::VectorXd xu = sx_.cwiseProduct(x);
    const Eigen::VectorXd yu = sy_.cwiseProduct(y) / c_;
    const Eigen::VectorXd zu = z.cwiseQuotient(sy_);

    const Eigen::VectorXd Ax = d_.A * xu;
    const double prim = (Ax - zu).lpNorm<Eigen::Infinity>();
    const double prim_scale =
        std::max(Ax.lpNorm<Eigen::Infinity>(), zu.lpNorm<Eigen::Infinity>());

    const Eigen::VectorXd Px = d_.P * xu;
    const Eigen::VectorXd Aty = d_.A.transpose() * yu;
    const double dual = (Px + d_.q + Aty).lpNorm<Eigen::Infinity>();
    const double dual_scale = std::max({Px.lpNorm<Eigen::Infinity>(),
                                        d_.q.lpNorm<Eigen::Infinity>(),
                                        Aty.lpNorm<Eigen::Infinity>()});
    res_scale_prim_ = prim_scale;
    res_scale_dual_ = dual_scale;
    if (ratio) {
      const double pr = prim / std::max(prim_scale, 1e-10);
      const double dr = dual / std::max(dual_scale, 1e-10);
      *ratio = pr / std::max(dr, 1e-16);
    }
    if (prim <= prm_.eps_abs + prm_.eps_rel * prim_scale &&
        dual <= prm_.eps_abs + prm_.eps_rel * dual_scale)
      return AdmmStatus::Optimal;

    // primal infeasibility certificate
    {
      const Eigen::VectorXd dyu = sy_.cwiseProduct(dy) / c_;
      const double dy_norm = dyu.lpNorm<Eigen::Infinity>();
      if (dy_norm > prm_.eps_inf) {
        double support = 0.0;
        bool cert = true;
        for (Eigen::Index i = 0; i < m_ && cert; ++i) {
          const double dpos = std::max(dyu(i), 0.0), dneg = std::min(dyu(i), 0.0);
          if (dpos > prm_.eps_inf * dy_norm && !std::isfinite(d_.u(i))) cert = false;
          else if (std::isfinite(d_.u(i))) support += d_.u(i) * dpos;
          if (dneg < -prm_.eps_inf * dy_norm && !std::isfinite(d_.l(i))) cert = false;
          else if (std::isfinite(d_.l(i))) support += d_.l(i) * dneg;
        }
        if (cert) {
          const double atdy = (d_.A.transpose() * dyu).lpNorm<Eigen::Infinity>();
          if (atdy <= prm_.eps_inf * dy_norm && support <= -prm_.eps_inf * dy_norm)
            return AdmmStatus::PrimalInfeasible;
        }
      }
    }

    // dual infeasibility certificate
    {
      const Eigen::VectorXd dxu = sx_.cwiseProduct(dx);
      const double dx_norm = dxu.lpNorm<Eigen::Infinity>();
      if (dx_norm > prm_.eps_inf) {
        const Eigen::VectorXd Pdx = d_.P * dxu;
        const Eigen::VectorXd Adx = d_.A * dxu;
        bool cert = Pdx.lpNorm<Eigen::Infinity>() <= prm_.eps_inf * dx_norm &&
                    d_.q.dot(dxu) <= -prm_.eps_inf * dx_norm;
        for (Eigen::Index i = 0; i < m_ && cert; ++i) {
          if (!std::isfinite(d_.u(i)) && !std::isfinite(d_.l(i))) continue;
          if (!std::isfinite(d_.u(i))) cert = Adx(i) >= -prm_.eps_inf * dx_norm;
          else if (!std::isfinite(d_.l(i))) cert = Adx(i) <= prm_.eps_inf * dx_norm;
          else cert = std::abs(Adx(i)) <= prm_.eps_inf * dx_norm;
        }
        if (cert) return AdmmStatus::DualInfeasible;
      }
    }

    return std::nullopt;
  }

  /// Equality-constrained KKT solve on a guessed active set.  The guess from
  /// dual signs works when the duals are accurate; primal proximity at a few
  /// widening tolerances rescues sloppy iterates (a crossover for LPs, where
  /// plain ADMM has a long degenerate tail).
  bool polish(AdmmResult& res) const {
    compute_residuals(res);
    {
      const double eps = 1e-9;
      std::vector<Eigen::Index> low, upp;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (res.y(i) < -eps && std::isfinite(d_.l(i))) low.push_back(i);
        else if (res.y(i) > eps && std::isfinite(d_.u(i))) upp.push_back(i);
      }
      if (try_active_set(low, upp, res)) return true;
    }
    const Eigen::VectorXd Ax = d_.A * res.x;
    for (const double tol : {1e-7, 1e-5, 1e-3}) {
      std::vector<Eigen::Index> low, upp;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const bool lo = std::isfinite(d_.l(i)) &&
                        Ax(i) - d_.l(i) <= tol * (1.0 + std::abs(d_.l(i)));
        const bool hi = std::isfinite(d_.u(i)) &&
                        d_.u(i) - Ax(i) <= tol * (1.0 + std::abs(d_.u(i)));
        if (lo && (!hi || res.y(i) <= 0.0)) low.push_back(i);
        else if (hi) upp.push_back(i);
      }
      if (try_active_set(low, upp, res)) return true;
    }
    return false;
  }

  bool try_active_set(const std::vector<Eigen::Index>& low,
                      const std::vector<Eigen::Index>& upp, AdmmResult& res) const {
    const Eigen::Index na = static_cast<Eigen::Index>(low.size() + upp.size());
    const Eigen::Index k = n_ + na;

    typedef Eigen::Triplet<double> T;
    // active rows of A become columns n_..n_+na-1 of the KKT matrix;
    // A is column-major, so iterate rows via a row-major copy
    std::vector<T> act;
    Eigen::SparseMatrix<double, Eigen::RowMajor> Ar(d_.A);
    Eigen::Index pos = 0;
    for (auto i : low) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Ar, i); it; ++it)
        act.emplace_back(it.col(), n_ + pos, it.value());
      ++pos;
    }
    for (auto i : upp) {
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Ar, i); it; ++it)
        act.emplace_back(it.col(), n_ + pos, it.value());
      ++pos;
    }
    Eigen::VectorXd b(na);
    pos = 0;
    for (auto i : low) b(pos++) = d_.l(i);
    for (auto i : upp) b(pos++) = d_.u(i);

    AdmmResult cand = res;
    cand.y.setZero(m_);

    if (d_.P.nonZeros() > 0) {
      // QP: equality-constrained solve on the active set, with iterative
      // refinement against the unregularized saddle matrix
      std::vector<T> trips = act, trips_reg;
      for (int c = 0; c < d_.P.outerSize(); ++c)
        for (Eigen::SparseMatrix<double>::InnerIterator it(d_.P, c); it; ++it)
          if (it.row() <= it.col()) trips.emplace_back(it.row(), it.col(), it.value());
      trips_reg = trips;
      for (Eigen::Index i = 0; i < n_; ++i) trips_reg.emplace_back(i, i, prm_.polish_delta);
      for (Eigen::Index i = 0; i < na; ++i)
        trips_reg.emplace_back(n_ + i, n_ + i, -prm_.polish_delta);

      Eigen::SparseMatrix<double> H(k, k), Hreg(k, k);
      H.setFromTriplets(trips.begin(), trips.end());
      Hreg.setFromTriplets(trips_reg.begin(), trips_reg.end());

      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt(
          Hreg.selfadjointView<Eigen::Upper>());
      if (ldlt.info() != Eigen::Success) return false;

      Eigen::VectorXd h(k);
      h.head(n_) = -d_.q;
      h.tail(na) = b;
      Eigen::VectorXd t = Eigen::VectorXd::Zero(k);
      const auto Hsym = H.selfadjointView<Eigen::Upper>();
      for (int it = 0; it < prm_.polish_refine_iters; ++it) t += ldlt.solve(h - Hsym * t);
      cand.x = t.head(n_);
      pos = 0;
      for (auto i : low) cand.y(i) = t(n_ + pos++);
      for (auto i : upp) cand.y(i) = t(n_ + pos++);
    } else {
      // LP: the saddle system is singular whenever the active set does not
      // pin all of x, so split the crossover into a primal projection onto
      // the active face and least-squares duals supported on it; both reuse
      // one quasi-definite factorization of [I A_act'; A_act -delta I]
      std::vector<T> trips = act;
      for (Eigen::Index i = 0; i < n_; ++i) trips.emplace_back(i, i, 1.0);
      for (Eigen::Index i = 0; i < na; ++i)
        trips.emplace_back(n_ + i, n_ + i, -prm_.polish_delta);
      Eigen::SparseMatrix<double> K(k, k);
      K.setFromTriplets(trips.begin(), trips.end());
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt(
          K.selfadjointView<Eigen::Upper>());
      if (ldlt.info() != Eigen::Success) return false;

      Eigen::VectorXd h(k);
      h.head(n_) = res.x;
      h.tail(na) = b;
      cand.x = ldlt.solve(h).head(n_);

      // r + A_act'y = -q, A_act r = delta y  =>  y = -(A A' + delta)^-1 A q
      h.head(n_) = -d_.q;
      h.tail(na).setZero();
      const Eigen::VectorXd t = ldlt.solve(h);
      pos = 0;
      for (auto i : low) cand.y(i) = t(n_ + pos++);
      for (auto i : upp) cand.y(i) = t(n_ + pos++);
    }
    compute_residuals(cand);
    // dual sign feasibility guards against accepting the wrong vertex
    const double stol = 1e-6 * (1.0 + cand.y.lpNorm<Eigen::Infinity>());
    for (auto i : low)
      if (cand.y(i) > stol && d_.u(i) - d_.l(i) > 1e-10) return false;
    for (auto i : upp)
      if (cand.y(i) < -stol && d_.u(i) - d_.l(i) > 1e-10) return false;
    const bool converged =
        cand.prim_res <= prm_.eps_abs * 10 + prm_.eps_rel * res_scale_prim_ &&
        cand.dual_res <= prm_.eps_abs * 10 + prm_.eps_rel * res_scale_dual_;
    // primal + dual feasibility + complementarity (duals only on pinned rows)
    // are sufficient for optimality, so no comparison against res is needed
    if (converged) {
      res.x = cand.x;
      res.y = cand.y;
      res.prim_res = cand.prim_res;
      res.dual_res = cand.dual_res;
      res.comp_res = cand.comp_res;
      return true;
    }
    return false;
  }

  void compute_residuals(AdmmResult& r) const {
    const Eigen::VectorXd Ax = d_.A * r.x;
    double prim = 0.0, comp = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (std::isfinite(d_.l(i))) prim = std::max(prim, d_.l(i) - Ax(i));
      if (std::isfinite(d_.u(i))) prim = std::max(prim, Ax(i) - d_.u(i));
      if (r.y(i) > 0.0 && std::isfinite(d_.u(i)))
        comp = std::max(comp, r.y(i) * std::max(0.0, d_.u(i) - Ax(i)));
      if (r.y(i) < 0.0 && std::isfinite(d_.l(i)))
        comp = std::max(comp, -r.y(i) * std::max(0.0, Ax(i) - d_.l(i)));
    }
    r.prim_res = prim;
    r.dual_res = (d_.P * r.x + d_.q + d_.A.transpose() * r.y).lpNorm<Eigen::Infinity>();
    r.comp_res = comp;
  }

  QpData d_;
  AdmmParams prm_;
  double rho_base_ = 1.0;
  Eigen::Index n_ = 0, m_ = 0;
  bool ok_ = false;

  double c_ = 1.0;
  Eigen::VectorXd sx_, sy_;
  Eigen::SparseMatrix<double> Ps_, As_;
  Eigen::VectorXd qs_;
  Eigen::VectorXd rho_, rho_inv_;
  Eigen::VectorXd warm_x_, warm_z_, warm_y_;  // scaled iterates
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt_;
  double res_scale_prim_ = 1.0, res_scale_dual_ = 1.0;
};

inline AdmmResult admm_solve(QpData data, const AdmmParams& prm = {}) {
  AdmmSolver s(std::move(data), prm);
  return s.solve();
}

}  // namespace besslin

#endif  // BESSLIN_QP_ADMM_HPP_
