#ifndef BESSLIN_OPTMODEL_HPP_
#define BESSLIN_OPTMODEL_HPP_

/**
 * @file
 * @brief Minimal optimization-problem intermediate representation.
 *
 * A Problem is a variable table plus linear constraints and a
 * linear-or-convex-quadratic objective (minimization only).  Quadratic
 * terms can only be added as sums of squares of linear expressions, so
 * the quadratic part is positive semidefinite by construction.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace besslin {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Opaque handle into a Problem's variable table.
struct VarRef {
  std::int32_t index = -1;

  friend bool operator==(VarRef a, VarRef b) { return a.index == b.index; }
  friend bool operator<(VarRef a, VarRef b) { return a.index < b.index; }
};

enum class VarKind { Continuous, Binary };

struct Variable {
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::Continuous;
  std::string name;
};

/// Sum of (variable, coefficient) terms plus a constant.
class LinearExpr {
public:
  LinearExpr() = default;
  explicit LinearExpr(double constant) : constant_(constant) {}

  LinearExpr& add(VarRef v, double coef) {
    if (!std::isfinite(coef)) throw ModelError("non-finite coefficient");
    terms_.emplace_back(v, coef);
    return *this;
  }
  LinearExpr& add_constant(double c) {
    constant_ += c;
    return *this;
  }

  /// Merge duplicate variables and sort terms by index.
  void normalize() {
    std::sort(terms_.begin(), terms_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<VarRef, double>> merged;
    for (const auto& [v, c] : terms_) {
      if (!merged.empty() && merged.back().first == v)
        merged.back().second += c;
      else
        merged.emplace_back(v, c);
    }
    std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
    terms_ = std::move(merged);
  }

  double evaluate(const std::vector<double>& x) const {
    double r = constant_;
    for (const auto& [v, c] : terms_) r += c * x.at(static_cast<size_t>(v.index));
    return r;
  }

  const std::vector<std::pair<VarRef, double>>& terms() const { return terms_; }
  double constant() const { return constant_; }

private:
  std::vector<std::pair<VarRef, double>> terms_;
  double constant_ = 0.0;
};

enum class Sense { Le, Eq, Ge };

struct Constraint {
  LinearExpr expr;
  Sense sense = Sense::Le;
  double rhs = 0.0;
};

/// Minimization objective: linear part plus symmetric PSD quadratic triples.
struct Objective {
  LinearExpr linear;
  // (i, j, c) with i <= j; contributes c * x_i * x_j to the objective.
  std::vector<std::tuple<VarRef, VarRef, double>> quadratic;

  bool is_quadratic() const { return !quadratic.empty(); }

  double evaluate(const std::vector<double>& x) const {
    double r = linear.evaluate(x);
    for (const auto& [i, j, c] : quadratic)
      r += c * x.at(static_cast<size_t>(i.index)) * x.at(static_cast<size_t>(j.index));
    return r;
  }
};

class Problem {
public:
  VarRef add_variable(Variable v) {
    if (v.kind == VarKind::Binary) {
      if (v.lower == 0.0 && v.upper == kInf) {
        v.upper = 1.0;  // default binary bounds
      }
      if (v.lower < 0.0 || v.upper > 1.0)
        throw ModelError("binary variable bounds must lie within [0,1]: " + v.name);
    }
    if (!(v.lower <= v.upper))
      throw ModelError("malformed variable (lower > upper): " + v.name);
    if (frozen_) throw ModelError("problem is frozen");
    variables_.push_back(std::move(v));
    return VarRef{static_cast<std::int32_t>(variables_.size() - 1)};
  }

  void add_constraint(Constraint c) {
    if (frozen_) throw ModelError("problem is frozen");
    if (!std::isfinite(c.rhs)) throw ModelError("non-finite constraint rhs");
    check_expr(c.expr);
    c.expr.normalize();
    constraints_.push_back(std::move(c));
  }
  void add_constraint(LinearExpr expr, Sense sense, double rhs) {
    add_constraint(Constraint{std::move(expr), sense, rhs});
  }

  /// Add Σᵢ exprᵢ² to the objective, expanded into quadratic triples plus
  /// linear and constant contributions.
  void add_sum_of_squares(const std::vector<LinearExpr>& exprs) {
    if (frozen_) throw ModelError("problem is frozen");
    for (const auto& e : exprs) check_expr(e);
    for (LinearExpr e : exprs) {
      e.normalize();
      const auto& t = e.terms();
      for (size_t a = 0; a < t.size(); ++a) {
        for (size_t b = a; b < t.size(); ++b) {
          double c = t[a].second * t[b].second;
          if (a != b) c *= 2.0;  // symmetric off-diagonal pair stored once
          add_quad_term(t[a].first, t[b].first, c);
        }
        objective_.linear.add(t[a].first, 2.0 * e.constant() * t[a].second);
      }
      objective_.linear.add_constant(e.constant() * e.constant());
    }
    objective_.linear.normalize();
    normalize_quadratic();
  }

  void set_linear_objective(LinearExpr expr) {
    if (frozen_) throw ModelError("problem is frozen");
    check_expr(expr);
    expr.normalize();
    objective_.linear = std::move(expr);
  }

  void add_linear_objective(const LinearExpr& expr) {
    check_expr(expr);
    for (const auto& [v, c] : expr.terms()) objective_.linear.add(v, c);
    objective_.linear.add_constant(expr.constant());
    objective_.linear.normalize();
  }

  /// Freeze the problem: no further mutation, safe to share read-only.
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  size_t num_variables() const { return variables_.size(); }
  size_t num_constraints() const { return constraints_.size(); }
  size_t num_binaries() const {
    size_t n = 0;
    for (const auto& v : variables_)
      if (v.kind == VarKind::Binary) ++n;
    return n;
  }

  const Variable& variable(VarRef v) const { return variables_.at(static_cast<size_t>(v.index)); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const Objective& objective() const { return objective_; }

  /// Worst violation of constraints and bounds at a point.
  double max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (size_t i = 0; i < variables_.size(); ++i) {
      worst = std::max(worst, variables_[i].lower - x[i]);
      worst = std::max(worst, x[i] - variables_[i].upper);
    }
    for (const auto& c : constraints_) {
      const double lhs = c.expr.evaluate(x);
      switch (c.sense) {
        case Sense::Le: worst = std::max(worst, lhs - c.rhs); break;
        case Sense::Ge: worst = std::max(worst, c.rhs - lhs); break;
        case Sense::Eq: worst = std::max(worst, std::abs(lhs - c.rhs)); break;
      }
    }
    return worst;
  }

  /// Continuous relaxation: binaries become continuous in [0,1].
  Problem relax() const {
    Problem r = *this;
    r.frozen_ = false;
    for (auto& v : r.variables_) v.kind = VarKind::Continuous;
    return r;
  }

  // Fixed-order text serialization; stable across runs, documented in
  // docs/problem_format.md.
  void serialize(std::ostream& os) const {
    os.precision(17);
    os << "problem v1 " << variables_.size() << ' ' << constraints_.size() << '\n';
    for (const auto& v : variables_) {
      os << "var " << v.lower << ' ' << v.upper << ' '
         << (v.kind == VarKind::Binary ? "bin" : "cont") << ' '
         << (v.name.empty() ? "_" : v.name) << '\n';
    }
    for (const auto& c : constraints_) {
      os << "con " << sense_char(c.sense) << ' ' << c.rhs << ' ' << c.expr.constant() << ' '
         << c.expr.terms().size();
      for (const auto& [v, coef] : c.expr.terms()) os << ' ' << v.index << ' ' << coef;
      os << '\n';
    }
    os << "objlin " << objective_.linear.constant() << ' ' << objective_.linear.terms().size();
    for (const auto& [v, coef] : objective_.linear.terms()) os << ' ' << v.index << ' ' << coef;
    os << '\n';
    os << "objquad " << objective_.quadratic.size();
    for (const auto& [i, j, c] : objective_.quadratic)
      os << ' ' << i.index << ' ' << j.index << ' ' << c;
    os << '\n';
  }

  std::string serialize() const {
    std::ostringstream ss;
    serialize(ss);
    return ss.str();
  }

  static Problem deserialize(std::istream& is) {
    Problem p;
    std::string tag, ver;
    size_t nvar = 0, ncon = 0;
    is >> tag >> ver >> nvar >> ncon;
    if (tag != "problem" || ver != "v1") throw ModelError("bad problem header");
    for (size_t i = 0; i < nvar; ++i) {
      Variable v;
      std::string kind;
      is >> tag >> v.lower >> v.upper >> kind >> v.name;
      if (tag != "var") throw ModelError("expected var record");
      v.kind = kind == "bin" ? VarKind::Binary : VarKind::Continuous;
      if (v.name == "_") v.name.clear();
      p.variables_.push_back(std::move(v));
    }
    for (size_t i = 0; i < ncon; ++i) {
      Constraint c;
      char s;
      double cst;
      size_t nt;
      is >> tag >> s >> c.rhs >> cst >> nt;
      if (tag != "con") throw ModelError("expected con record");
      c.sense = sense_from_char(s);
      c.expr.add_constant(cst);
      for (size_t k = 0; k < nt; ++k) {
        std::int32_t idx;
        double coef;
        is >> idx >> coef;
        c.expr.add(VarRef{idx}, coef);
      }
      p.constraints_.push_back(std::move(c));
    }
    {
      double cst;
      size_t nt;
      is >> tag >> cst >> nt;
      if (tag != "objlin") throw ModelError("expected objlin record");
      p.objective_.linear.add_constant(cst);
      for (size_t k = 0; k < nt; ++k) {
        std::int32_t idx;
        double coef;
        is >> idx >> coef;
        p.objective_.linear.add(VarRef{idx}, coef);
      }
    }
    {
      size_t nq;
      is >> tag >> nq;
      if (tag != "objquad") throw ModelError("expected objquad record");
      for (size_t k = 0; k < nq; ++k) {
        std::int32_t i, j;
        double c;
        is >> i >> j >> c;
        p.objective_.quadratic.emplace_back(VarRef{i}, VarRef{j}, c);
      }
    }
    if (!is) throw ModelError("truncated problem stream");
    return p;
  }

  static Problem deserialize(const std::string& text) {
    std::istringstream ss(text);
    return deserialize(ss);
  }

private:
  void check_expr(const LinearExpr& e) const {
    for (const auto& [v, c] : e.terms()) {
      if (v.index < 0 || static_cast<size_t>(v.index) >= variables_.size())
        throw ModelError("foreign or invalid variable handle");
      (void)c;
    }
  }

  void add_quad_term(VarRef a, VarRef b, double c) {
    if (b < a) std::swap(a, b);
    objective_.quadratic.emplace_back(a, b, c);
  }

  void normalize_quadratic() {
    auto& q = objective_.quadratic;
    std::sort(q.begin(), q.end(), [](const auto& x, const auto& y) {
      return std::pair(std::get<0>(x), std::get<1>(x)) < std::pair(std::get<0>(y), std::get<1>(y));
    });
    std::vector<std::tuple<VarRef, VarRef, double>> merged;
    for (const auto& [i, j, c] : q) {
      if (!merged.empty() && std::get<0>(merged.back()) == i && std::get<1>(merged.back()) == j)
        std::get<2>(merged.back()) += c;
      else
        merged.emplace_back(i, j, c);
    }
    std::erase_if(merged, [](const auto& t) { return std::get<2>(t) == 0.0; });
    q = std::move(merged);
  }

  static char sense_char(Sense s) {
    switch (s) {
      case Sense::Le: return 'L';
      case Sense::Eq: return 'E';
      case Sense::Ge: return 'G';
    }
    return '?';
  }
  static Sense sense_from_char(char c) {
    switch (c) {
      case 'L': return Sense::Le;
      case 'E': return Sense::Eq;
      case 'G': return Sense::Ge;
    }
    throw ModelError("bad sense char");
  }

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  Objective objective_;
  bool frozen_ = false;
};

}  // namespace besslin

#endif  // BESSLIN_OPTMODEL_HPP_
