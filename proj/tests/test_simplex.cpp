#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <random>

#include "besslin/simplex.hpp"
#include "besslin/solve.hpp"

using namespace besslin;

namespace {

// Independent oracle: enumerate every choice of n active constraints
// (rows treated at equality, variable bounds), solve the square system,
// keep the best feasible point.
struct VertexOracle {
  struct Hyperplane {
    std::vector<double> a;
    double b;
  };

  static std::optional<double> best_objective(const Problem& p) {
    const size_t n = p.num_variables();
    std::vector<Hyperplane> planes;
    for (const auto& c : p.constraints()) {
      Hyperplane h{std::vector<double>(n, 0.0), c.rhs - c.expr.constant()};
      for (const auto& [v, coef] : c.expr.terms()) h.a[v.index] += coef;
      planes.push_back(std::move(h));
    }
    for (size_t j = 0; j < n; ++j) {
      const auto& v = p.variables()[j];
      if (v.lower > -kInf) {
        Hyperplane h{std::vector<double>(n, 0.0), v.lower};
        h.a[j] = 1.0;
        planes.push_back(std::move(h));
      }
      if (v.upper < kInf) {
        Hyperplane h{std::vector<double>(n, 0.0), v.upper};
        h.a[j] = 1.0;
        planes.push_back(std::move(h));
      }
    }

    std::optional<double> best;
    std::vector<size_t> pick(n);
    enumerate(planes, p, pick, 0, 0, best);
    return best;
  }

private:
  static void enumerate(const std::vector<Hyperplane>& planes, const Problem& p,
                        std::vector<size_t>& pick, size_t depth, size_t start,
                        std::optional<double>& best) {
    const size_t n = p.num_variables();
    if (depth == n) {
      Eigen::MatrixXd A(n, n);
      Eigen::VectorXd b(n);
      for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) A(i, j) = planes[pick[i]].a[j];
        b(i) = planes[pick[i]].b;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd x = lu.solve(b);
      std::vector<double> xv(x.data(), x.data() + x.size());
      if (p.max_violation(xv) > 1e-7) return;
      const double obj = p.objective().evaluate(xv);
      if (!best || obj < *best) best = obj;
      return;
    }
    for (size_t i = start; i < planes.size(); ++i) {
      pick[depth] = i;
      enumerate(planes, p, pick, depth + 1, i + 1, best);
    }
  }
};

}  // namespace

TEST_CASE("single active bound") {
  Problem p;
  const VarRef x = p.add_variable({0.0, 3.0, VarKind::Continuous, "x"});
  LinearExpr obj;
  obj.add(x, -1.0);
  p.set_linear_objective(obj);
  const Solution s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK_THAT(s.value(x), Catch::Matchers::WithinAbs(3.0, 1e-9));
  CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(-3.0, 1e-9));
}

TEST_CASE("symmetric optimum value") {
  Problem p;
  const VarRef x = p.add_variable({0.0, kInf, VarKind::Continuous, "x"});
  const VarRef y = p.add_variable({0.0, kInf, VarKind::Continuous, "y"});
  LinearExpr row;
  row.add(x, 1.0).add(y, 1.0);
  p.add_constraint(row, Sense::Ge, 2.0);
  LinearExpr obj;
  obj.add(x, 1.0).add(y, 1.0);
  p.set_linear_objective(obj);
  const Solution s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(2.0, 1e-9));
}

TEST_CASE("unbounded and infeasible detection") {
  {
    Problem p;
    const VarRef x = p.add_variable({0.0, kInf, VarKind::Continuous, "x"});
    LinearExpr obj;
    obj.add(x, -1.0);
    p.set_linear_objective(obj);
    CHECK(solve_lp(p).status == SolveStatus::Unbounded);
  }
  {
    Problem p;
    const VarRef x = p.add_variable({0.0, kInf, VarKind::Continuous, "x"});
    LinearExpr a;
    a.add(x, 1.0);
    p.add_constraint(a, Sense::Ge, 2.0);
    LinearExpr b;
    b.add(x, 1.0);
    p.add_constraint(b, Sense::Le, 1.0);
    CHECK(solve_lp(p).status == SolveStatus::Infeasible);
  }
}

TEST_CASE("equality rows and negative ranges") {
  Problem p;
  const VarRef x = p.add_variable({-4.0, 4.0, VarKind::Continuous, "x"});
  const VarRef y = p.add_variable({-kInf, kInf, VarKind::Continuous, "y"});
  LinearExpr eq;
  eq.add(x, 1.0).add(y, 2.0);
  p.add_constraint(eq, Sense::Eq, 1.0);
  LinearExpr obj;
  obj.add(x, 1.0).add(y, 1.0);
  p.set_linear_objective(obj);
  const Solution s = solve_lp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  // x = -4, y = 2.5
  CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(-1.5, 1e-8));
}

TEST_CASE("random LPs match the vertex-enumeration oracle") {
  std::mt19937 gen(123);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::uniform_real_distribution<double> Upos(0.2, 3.0);

  int solved = 0;
  for (int rep = 0; rep < 60; ++rep) {
    Problem p;
    const int n = 5;
    std::vector<VarRef> vs;
    for (int j = 0; j < n; ++j)
      vs.push_back(p.add_variable({0.0, Upos(gen), VarKind::Continuous, ""}));
    for (int i = 0; i < 5; ++i) {
      LinearExpr e;
      for (int j = 0; j < n; ++j) e.add(vs[j], U(gen));
      const double rhs = U(gen) + 1.0;  // origin stays feasible for Le rows
      p.add_constraint(e, rep % 3 == 0 && i == 0 ? Sense::Ge : Sense::Le,
                       rep % 3 == 0 && i == 0 ? -std::abs(rhs) : std::abs(rhs));
    }
    LinearExpr obj;
    for (int j = 0; j < n; ++j) obj.add(vs[j], U(gen));
    p.set_linear_objective(obj);

    const Solution s = solve_lp(p);
    const auto oracle = VertexOracle::best_objective(p);
    REQUIRE(oracle.has_value());
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(*oracle, 1e-8));
    ++solved;
  }
  CHECK(solved == 60);
}

TEST_CASE("weak duality holds at the final basis") {
  std::mt19937 gen(99);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    Problem p;
    std::vector<VarRef> vs;
    for (int j = 0; j < 4; ++j) vs.push_back(p.add_variable({0.0, 2.0, VarKind::Continuous, ""}));
    for (int i = 0; i < 4; ++i) {
      LinearExpr e;
      for (int j = 0; j < 4; ++j) e.add(vs[j], U(gen));
      p.add_constraint(e, Sense::Le, 1.0 + std::abs(U(gen)));
    }
    LinearExpr obj;
    for (int j = 0; j < 4; ++j) obj.add(vs[j], U(gen));
    p.set_linear_objective(obj);

    const LpResult r = simplex_solve(p);
    REQUIRE(r.status == LpStatus::Optimal);
    CHECK(r.dual_objective <= r.objective + 1e-8);
    CHECK_THAT(r.dual_objective, Catch::Matchers::WithinAbs(r.objective, 1e-6));
  }
}

TEST_CASE("solve_lp rejects binaries and quadratics") {
  Problem p;
  p.add_variable({0, 1, VarKind::Binary, "z"});
  CHECK_THROWS_AS(solve_lp(p), ModelError);
}
