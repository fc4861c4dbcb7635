#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "besslin/bess.hpp"
#include "besslin/branch_bound.hpp"

using namespace besslin;

namespace {

// Exhaustive oracle: try every binary assignment, solve the continuous rest.
std::optional<double> enumeration_oracle(const Problem& p) {
  std::vector<int> bins;
  for (size_t j = 0; j < p.num_variables(); ++j)
    if (p.variables()[j].kind == VarKind::Binary) bins.push_back(static_cast<int>(j));
  std::optional<double> best;
  for (unsigned mask = 0; mask < (1u << bins.size()); ++mask) {
    Problem fixed;
    for (size_t j = 0; j < p.num_variables(); ++j) {
      Variable v = p.variables()[j];
      v.kind = VarKind::Continuous;
      fixed.add_variable(v);
    }
    for (const auto& c : p.constraints()) fixed.add_constraint(c);
    fixed.set_linear_objective(p.objective().linear);
    for (size_t k = 0; k < bins.size(); ++k) {
      LinearExpr e;
      e.add(VarRef{bins[k]}, 1.0);
      fixed.add_constraint(e, Sense::Eq, (mask >> k) & 1u ? 1.0 : 0.0);
    }
    const Solution s = solve_lp(fixed);
    if (s.status == SolveStatus::Optimal && (!best || s.objective < *best))
      best = s.objective;
  }
  return best;
}

Problem random_milp(std::mt19937& gen, int n_bin, int n_cont) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Problem p;
  std::vector<VarRef> vs;
  for (int j = 0; j < n_bin; ++j) vs.push_back(p.add_variable({0, 1, VarKind::Binary, ""}));
  for (int j = 0; j < n_cont; ++j)
    vs.push_back(p.add_variable({0.0, 2.0, VarKind::Continuous, ""}));
  for (int i = 0; i < 4; ++i) {
    LinearExpr e;
    for (const auto& v : vs) e.add(v, U(gen));
    p.add_constraint(e, Sense::Le, 0.5 + std::abs(U(gen)));
  }
  LinearExpr obj;
  for (const auto& v : vs) obj.add(v, U(gen));
  p.set_linear_objective(obj);
  return p;
}

}  // namespace

TEST_CASE("packing constraint") {
  Problem p;
  const VarRef x1 = p.add_variable({0, 1, VarKind::Binary, "x1"});
  const VarRef x2 = p.add_variable({0, 1, VarKind::Binary, "x2"});
  LinearExpr row;
  row.add(x1, 1.0).add(x2, 1.0);
  p.add_constraint(row, Sense::Le, 1.0);
  LinearExpr obj;
  obj.add(x1, -1.0).add(x2, -1.0);  // maximize x1 + x2
  p.set_linear_objective(obj);
  const Solution s = solve_milp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK_THAT(-s.objective, Catch::Matchers::WithinAbs(1.0, 1e-6));
}

TEST_CASE("single-period exact model discharges to point B") {
  Problem p;
  const BessVars v = build(ModelKind::Exc, example_params(), example_initial(), 1, p);
  LinearExpr obj;
  obj.add(v.p_d[0], -1.0);
  p.set_linear_objective(obj);
  const Solution s = solve_milp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK_THAT(s.value(v.p_d[0]), Catch::Matchers::WithinAbs(0.72, 1e-6));
  CHECK_THAT(s.value(v.p_c[0]), Catch::Matchers::WithinAbs(0.0, 1e-6));
}

TEST_CASE("random MILPs match exhaustive enumeration") {
  std::mt19937 gen(2024);
  for (int rep = 0; rep < 40; ++rep) {
    const Problem p = random_milp(gen, 8, 2);
    const Solution s = solve_milp(p);
    const auto oracle = enumeration_oracle(p);
    if (!oracle) {
      CHECK(s.status == SolveStatus::Infeasible);
      continue;
    }
    REQUIRE(s.status == SolveStatus::Optimal);
    // the optimality-gap target is relative with an absolute floor of 1
    CHECK(s.objective <= *oracle + 1e-6 + 1e-3 * std::max(1.0, std::abs(*oracle)));
    CHECK(s.objective >= *oracle - 1e-6);
    for (size_t j = 0; j < 8; ++j) {
      const double x = s.values[j];
      CHECK(std::min(x, 1.0 - x) <= 1e-6);
    }
  }
}

TEST_CASE("relaxation dominance") {
  std::mt19937 gen(31);
  for (int rep = 0; rep < 20; ++rep) {
    const Problem p = random_milp(gen, 6, 2);
    const Solution mip = solve_milp(p);
    if (mip.status != SolveStatus::Optimal) continue;
    const Solution rel = solve_lp(p.relax());
    REQUIRE(rel.status == SolveStatus::Optimal);
    CHECK(rel.objective <= mip.objective + 1e-6);
  }
}

TEST_CASE("deterministic resolves") {
  std::mt19937 gen(77);
  const Problem p = random_milp(gen, 8, 3);
  const Solution a = solve_milp(p);
  const Solution b = solve_milp(p);
  REQUIRE(a.status == b.status);
  CHECK(a.objective == b.objective);
  CHECK(a.values == b.values);
}

TEST_CASE("infeasible root is reported") {
  Problem p;
  const VarRef z = p.add_variable({0, 1, VarKind::Binary, "z"});
  LinearExpr e;
  e.add(z, 1.0);
  p.add_constraint(e, Sense::Ge, 2.0);
  CHECK(solve_milp(p).status == SolveStatus::Infeasible);
}

TEST_CASE("quadratic objective over binaries") {
  Problem p;
  const VarRef x1 = p.add_variable({0, 1, VarKind::Binary, "x1"});
  const VarRef x2 = p.add_variable({0, 1, VarKind::Binary, "x2"});
  LinearExpr e;
  e.add(x1, 1.0).add(x2, 1.0).add_constant(-1.5);
  p.add_sum_of_squares({e});
  const Solution s = solve_milp(p);
  REQUIRE(s.status == SolveStatus::Optimal);
  CHECK_THAT(s.objective, Catch::Matchers::WithinAbs(0.25, 1e-5));
  // x1 + x2 = 1 and x1 + x2 = 2 are both optimal
  CHECK_THAT(std::abs(s.values[0] + s.values[1] - 1.5), Catch::Matchers::WithinAbs(0.5, 1e-6));
}
