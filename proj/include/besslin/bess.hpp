#ifndef BESSLIN_BESS_HPP_
#define BESSLIN_BESS_HPP_

/**
 * @file
 * @brief Five linear battery-storage formulations and single-period
 *        feasible-region geometry in the (charge, discharge) power plane.
 *
 * All formulations share the state-of-energy recursion
 *   e[t] = e[t-1] + eta_c * p_c[t] - p_d[t] / eta_d
 * anchored at the initial energy e0, with a one-hour time step.
 *
 * - Exc:   exact MILP; binaries z/y forbid simultaneous charge/discharge.
 * - Lp:    the common simplification without binaries.
 * - Na:    single-efficiency window formulation with the p_c + p_d cut
 *          (no state-of-energy variable; windows accumulate over time).
 * - RelYz: LP relaxation of Exc (z, y in [0,1]).
 * - ExtLp: Lp plus headroom cuts using the actual charge/discharge limits
 *          and the capacity cross cut; the tightest LP of the family.
 */

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "besslin/optmodel.hpp"

namespace besslin {

struct BessParams {
  double e_min = 0.0;
  double e_max = 0.0;
  double p_c_max = 0.0;
  double p_d_max = 0.0;
  double eta_c = 1.0;
  double eta_d = 1.0;

  void validate() const {
    if (!(0.0 <= e_min && e_min < e_max)) throw ModelError("bess: need 0 <= e_min < e_max");
    if (!(p_c_max > 0.0 && p_d_max > 0.0)) throw ModelError("bess: power ratings must be > 0");
    if (!(eta_c > 0.0 && eta_c <= 1.0 && eta_d > 0.0 && eta_d <= 1.0))
      throw ModelError("bess: efficiencies must be in (0,1]");
  }
};

struct BessInitial {
  double e0 = 0.0;

  void validate(const BessParams& p) const {
    if (!(p.e_min <= e0 && e0 <= p.e_max)) throw ModelError("bess: e0 outside energy window");
  }
};

enum class ModelKind { Exc, Lp, Na, RelYz, ExtLp };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Exc: return "exc";
    case ModelKind::Lp: return "lp";
    case ModelKind::Na: return "na";
    case ModelKind::RelYz: return "relyz";
    case ModelKind::ExtLp: return "extlp";
  }
  return "?";
}

inline ModelKind model_kind_from(const std::string& s) {
  if (s == "exc") return ModelKind::Exc;
  if (s == "lp") return ModelKind::Lp;
  if (s == "na") return ModelKind::Na;
  if (s == "relyz") return ModelKind::RelYz;
  if (s == "extlp") return ModelKind::ExtLp;
  throw ModelError("unknown model kind: " + s);
}

inline const std::vector<ModelKind>& all_model_kinds() {
  static const std::vector<ModelKind> k = {ModelKind::Exc, ModelKind::Lp, ModelKind::Na,
                                           ModelKind::RelYz, ModelKind::ExtLp};
  return k;
}

/// Derived single-efficiency parameters of the Na formulation.
struct NaDerived {
  double eta_single;    // (1/eta_d + eta_c) / 2; may exceed 1
  double p_max_single;  // max(p_c_max, p_d_max) unless overridden
};

inline NaDerived na_derived(const BessParams& p, std::optional<double> override_pmax = {}) {
  NaDerived d;
  d.eta_single = 0.5 * (1.0 / p.eta_d + p.eta_c);
  d.p_max_single = override_pmax.value_or(std::max(p.p_c_max, p.p_d_max));
  return d;
}

/// Variable handles of one battery block.
struct BessVars {
  std::vector<VarRef> p_c, p_d;
  std::vector<VarRef> e;     // empty for Na
  std::vector<VarRef> z, y;  // Exc / RelYz only
  size_t horizon = 0;
};

/// Actual maximum charging power (point A): rated power capped by the
/// remaining energy headroom.
inline double actual_charge_limit(const BessParams& p, const BessInitial& init) {
  return std::min(p.p_c_max, (p.e_max - init.e0) / p.eta_c);
}

/// Actual maximum discharging power (point B).
inline double actual_discharge_limit(const BessParams& p, const BessInitial& init) {
  return std::min(p.p_d_max, (init.e0 - p.e_min) * p.eta_d);
}

/// Facet p_d <= B - (B/A) p_c of the single-period convex hull.
struct HullFacet {
  double a = 0.0;  // point A
  double b = 0.0;  // point B
  bool degenerate = false;  // region collapses to an axis segment

  double max_pd_at(double pc) const { return b - (b / a) * pc; }
};

inline HullFacet hull_facet(const BessParams& p, const BessInitial& init) {
  HullFacet f;
  f.a = actual_charge_limit(p, init);
  f.b = actual_discharge_limit(p, init);
  f.degenerate = !(f.a > 0.0 && f.b > 0.0);
  return f;
}

/// Append the constraints of one model over `horizon` periods.
///
/// `exc_hull_cuts` additionally emits the ExtLp headroom and cross cuts for
/// the Exc model. They are satisfied by every point with non-simultaneous
/// charging, so the mixed-integer feasible set is unchanged, but the
/// continuous relaxation seen by branch and bound is much tighter.
inline BessVars build(ModelKind kind, const BessParams& params, const BessInitial& init,
                      size_t horizon, Problem& p, const std::string& tag = "b",
                      std::optional<double> na_pmax_override = {},
                      bool terminal_soe_at_least_e0 = false, bool exc_hull_cuts = false) {
  params.validate();
  init.validate(params);
  if (horizon == 0) throw ModelError("bess build: empty horizon");
  if (kind == ModelKind::ExtLp && params.p_c_max == 0.0)
    throw ModelError("bess build: p_c_max = 0 would divide the cross cut");

  BessVars vars;
  vars.horizon = horizon;
  const bool has_e = kind != ModelKind::Na;
  const bool has_zy = kind == ModelKind::Exc || kind == ModelKind::RelYz;

  for (size_t t = 0; t < horizon; ++t) {
    const std::string ts = std::to_string(t + 1);
    vars.p_c.push_back(
        p.add_variable({0.0, params.p_c_max, VarKind::Continuous, tag + ".pc" + ts}));
    vars.p_d.push_back(
        p.add_variable({0.0, params.p_d_max, VarKind::Continuous, tag + ".pd" + ts}));
    if (has_e)
      vars.e.push_back(
          p.add_variable({params.e_min, params.e_max, VarKind::Continuous, tag + ".e" + ts}));
    if (has_zy) {
      const VarKind bk = kind == ModelKind::Exc ? VarKind::Binary : VarKind::Continuous;
      vars.z.push_back(p.add_variable({0.0, 1.0, bk, tag + ".z" + ts}));
      vars.y.push_back(p.add_variable({0.0, 1.0, bk, tag + ".y" + ts}));
    }
  }

  if (has_e) {
    for (size_t t = 0; t < horizon; ++t) {
      // e[t] - e[t-1] - eta_c pc[t] + pd[t]/eta_d = (t==0 ? e0 : 0)
      LinearExpr soe;
      soe.add(vars.e[t], 1.0);
      soe.add(vars.p_c[t], -params.eta_c);
      soe.add(vars.p_d[t], 1.0 / params.eta_d);
      if (t > 0) soe.add(vars.e[t - 1], -1.0);
      p.add_constraint(std::move(soe), Sense::Eq, t == 0 ? init.e0 : 0.0);
    }
  }

  switch (kind) {
    case ModelKind::Exc:
    case ModelKind::RelYz:
      for (size_t t = 0; t < horizon; ++t) {
        LinearExpr cz;
        cz.add(vars.p_c[t], 1.0).add(vars.z[t], -params.p_c_max);
        p.add_constraint(std::move(cz), Sense::Le, 0.0);
        LinearExpr dy;
        dy.add(vars.p_d[t], 1.0).add(vars.y[t], -params.p_d_max);
        p.add_constraint(std::move(dy), Sense::Le, 0.0);
        LinearExpr zy;
        zy.add(vars.z[t], 1.0).add(vars.y[t], 1.0);
        p.add_constraint(std::move(zy), Sense::Le, 1.0);
      }
      break;
    case ModelKind::Lp:
      break;  // bounds plus the shared recursion are the whole model
    case ModelKind::Na: {
      const NaDerived d = na_derived(params, na_pmax_override);
      for (size_t t = 0; t < horizon; ++t) {
        // upper window with the single efficiency on accumulated net charge
        LinearExpr up;
        for (size_t s = 0; s <= t; ++s) {
          up.add(vars.p_c[s], d.eta_single);
          up.add(vars.p_d[s], -d.eta_single);
        }
        p.add_constraint(std::move(up), Sense::Le, params.e_max - init.e0);
        // lower window with the split efficiencies
        LinearExpr lo;
        for (size_t s = 0; s <= t; ++s) {
          lo.add(vars.p_c[s], params.eta_c);
          lo.add(vars.p_d[s], -1.0 / params.eta_d);
        }
        p.add_constraint(std::move(lo), Sense::Ge, params.e_min - init.e0);
        LinearExpr cut;
        cut.add(vars.p_c[t], 1.0).add(vars.p_d[t], 1.0);
        p.add_constraint(std::move(cut), Sense::Le, d.p_max_single);
      }
      break;
    }
    case ModelKind::ExtLp:
      break;  // cuts emitted below
  }

  if (kind == ModelKind::ExtLp || (kind == ModelKind::Exc && exc_hull_cuts)) {
    for (size_t t = 0; t < horizon; ++t) {
      // charge headroom: eta_c pc[t] + e[t-1] <= e_max
      LinearExpr ch;
      ch.add(vars.p_c[t], params.eta_c);
      if (t > 0) ch.add(vars.e[t - 1], 1.0);
      p.add_constraint(std::move(ch), Sense::Le, params.e_max - (t == 0 ? init.e0 : 0.0));
      // discharge headroom: pd[t] - eta_d e[t-1] <= -eta_d e_min
      LinearExpr dh;
      dh.add(vars.p_d[t], 1.0);
      if (t > 0) dh.add(vars.e[t - 1], -params.eta_d);
      p.add_constraint(std::move(dh), Sense::Le,
                       -params.eta_d * params.e_min + (t == 0 ? params.eta_d * init.e0 : 0.0));
      // capacity cross cut: pd <= p_d_max - (p_d_max/p_c_max) pc
      LinearExpr cc;
      cc.add(vars.p_d[t], 1.0).add(vars.p_c[t], params.p_d_max / params.p_c_max);
      p.add_constraint(std::move(cc), Sense::Le, params.p_d_max);
    }
  }

  if (terminal_soe_at_least_e0 && has_e) {
    LinearExpr term;
    term.add(vars.e[horizon - 1], 1.0);
    p.add_constraint(std::move(term), Sense::Ge, init.e0);
  }

  return vars;
}

/// Exact single-period membership test in the (pc, pd) plane, tolerance 1e-9.
/// For Exc, membership means some binary assignment satisfies everything.
inline bool region_contains(ModelKind kind, const BessParams& params, const BessInitial& init,
                            double pc, double pd) {
  if (pc < 0.0 || pd < 0.0) throw ModelError("region_contains: negative power");
  params.validate();
  init.validate(params);
  constexpr double tol = 1e-9;

  if (pc > params.p_c_max + tol || pd > params.p_d_max + tol) return false;

  const double e = init.e0 + params.eta_c * pc - pd / params.eta_d;
  const bool soe_ok = e >= params.e_min - tol && e <= params.e_max + tol;

  switch (kind) {
    case ModelKind::Lp:
      return soe_ok;
    case ModelKind::Exc:
      return soe_ok && (pc <= tol || pd <= tol);
    case ModelKind::RelYz:
      // minimal z = pc/Pc and y = pd/Pd must fit under z + y <= 1
      return soe_ok && pc / params.p_c_max + pd / params.p_d_max <= 1.0 + tol;
    case ModelKind::ExtLp:
      return soe_ok && pc <= (params.e_max - init.e0) / params.eta_c + tol &&
             pd <= (init.e0 - params.e_min) * params.eta_d + tol &&
             pd + (params.p_d_max / params.p_c_max) * pc <= params.p_d_max + tol;
    case ModelKind::Na: {
      const NaDerived d = na_derived(params);
      return init.e0 + d.eta_single * (pc - pd) <= params.e_max + tol &&
             init.e0 + params.eta_c * pc - pd / params.eta_d >= params.e_min - tol &&
             pc + pd <= d.p_max_single + tol;
    }
  }
  return false;
}

/// Emit `model,pc,pd,feasible` rows on a (grid_n+1)^2 grid over the power box.
inline void emit_region_csv(ModelKind kind, const BessParams& params, const BessInitial& init,
                            int grid_n, std::ostream& os, bool header = true) {
  if (header) os << "model,pc,pd,feasible\n";
  os.precision(10);
  for (int i = 0; i <= grid_n; ++i) {
    for (int j = 0; j <= grid_n; ++j) {
      const double pc = params.p_c_max * i / grid_n;
      const double pd = params.p_d_max * j / grid_n;
      os << to_string(kind) << ',' << pc << ',' << pd << ','
         << (region_contains(kind, params, init, pc, pd) ? 1 : 0) << '\n';
    }
  }
}

/// Table-style illustrative parameters used throughout the docs and tests.
inline BessParams example_params() {
  return BessParams{0.7, 2.0, 0.8, 1.0, 0.85, 0.9};
}
inline BessInitial example_initial() { return BessInitial{1.5}; }

}  // namespace besslin

#endif  // BESSLIN_BESS_HPP_
