#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "besslin/branch_bound.hpp"
#include "besslin/metrics.hpp"

using namespace besslin;

namespace {

// one fleet unit over `horizon` hours with pc at even and pd at odd indices
BessVars fake_unit(int horizon, int base) {
  BessVars v;
  v.horizon = static_cast<size_t>(horizon);
  for (int t = 0; t < horizon; ++t) {
    v.p_c.push_back(VarRef{base + 2 * t});
    v.p_d.push_back(VarRef{base + 2 * t + 1});
  }
  return v;
}

}  // namespace

TEST_CASE("simultaneity of all-zero powers is zero") {
  const BessVars u = fake_unit(24, 0);
  const std::vector<double> x(48, 0.0);
  CHECK(simultaneity_rate(x, {u}) == 0.0);
}

TEST_CASE("one simultaneous period out of 24") {
  const BessVars u = fake_unit(24, 0);
  std::vector<double> x(48, 0.0);
  x[0] = 0.5;  // pc[0]
  x[1] = 0.5;  // pd[0]
  CHECK_THAT(simultaneity_rate(x, {u}), Catch::Matchers::WithinAbs(100.0 / 24.0, 1e-4));
  CHECK_THAT(simultaneity_rate(x, {u}), Catch::Matchers::WithinAbs(4.1667, 1e-3));
}

TEST_CASE("product at the threshold is not counted") {
  const BessVars u = fake_unit(1, 0);
  std::vector<double> x = {1e-3, 1e-2};  // product 1e-5 <= 1e-4
  CHECK(simultaneity_rate(x, {u}) == 0.0);
  x = {1e-1, 1e-2};  // product 1e-3 > 1e-4
  CHECK(simultaneity_rate(x, {u}) == 100.0);
}

TEST_CASE("simultaneity averages over the fleet") {
  const BessVars a = fake_unit(2, 0), b = fake_unit(2, 4);
  std::vector<double> x(8, 0.0);
  x[4] = x[5] = 1.0;  // unit b, hour 0
  CHECK_THAT(simultaneity_rate(x, {a, b}), Catch::Matchers::WithinAbs(25.0, 1e-12));
}

TEST_CASE("rmse basics") {
  CHECK(rmse_of(0.0, 24) == 0.0);
  // constant offset c in every period: error^2 = T c^2, rmse = |c|
  const double c = 0.37;
  CHECK_THAT(rmse_of(24 * c * c, 24), Catch::Matchers::WithinAbs(c, 1e-12));
  CHECK(rmse_of(1.0, 0) == 0.0);
}

TEST_CASE("spt metrics recompute the objective") {
  auto pool = synth_profile_pool(11, 4, ProfileKind::Wind);
  Rng rng(12);
  const SptInstance inst = make_spt_instance(rng, 2, pool);
  const SptAssembly a = assemble_spt(inst, ModelKind::Lp);
  const Solution s = solve_qp(a.problem);
  REQUIRE(s.status == SolveStatus::Optimal);
  const SptMetrics m = spt_metrics(s, a);
  CHECK_THAT(m.rmse, Catch::Matchers::WithinAbs(
                         std::sqrt(spt_tracking_error_sq(a, s.values) / 24.0), 1e-8));
  CHECK(m.rmse >= 0.0);
  CHECK(m.simult_pct >= 0.0);
  CHECK(m.simult_pct <= 100.0);
}

TEST_CASE("tep metrics sums") {
  auto pool = synth_profile_pool(7, 6, ProfileKind::Wind);
  Rng rng(9);
  const TepInstance inst = make_tep_instance(rng, 1, 2, pool);
  const TepAssembly a = assemble_tep(inst, ModelKind::Lp);

  SECTION("hand-built solution") {
    Solution s;
    s.values.assign(a.problem.num_variables(), 0.0);
    SECTION("nothing built") {
      const TepMetrics m = tep_metrics(s, a, inst.dataset);
      CHECK(m.capacity_invested == 0.0);
      CHECK(m.load_shed == 0.0);
      CHECK(m.curtailment == 0.0);
    }
    SECTION("all candidates built") {
      for (const auto& cand : a.build_vars)
        for (const VarRef b : cand) s.values[b.index] = 1.0;
      const TepMetrics m = tep_metrics(s, a, inst.dataset);
      CHECK_THAT(m.capacity_invested, Catch::Matchers::WithinAbs(270.0, 1e-12));
    }
  }

  SECTION("solved instance curtailment recompute") {
    const Solution s = solve_milp(a.problem);
    REQUIRE(s.status == SolveStatus::Optimal);
    const TepMetrics m = tep_metrics(s, a, inst.dataset);
    // available minus injected renewable energy, straight from the balance
    double avail_minus_used = 0.0;
    for (size_t node = 0; node < a.res_avail.size(); ++node)
      for (size_t d = 0; d < a.days; ++d)
        for (size_t h = 0; h < kHours; ++h) {
          const double avail = a.res_avail[node][d][h];
          const double used = avail - s.values[a.spill[node][d][h].index];
          avail_minus_used += avail - used;
        }
    CHECK_THAT(m.curtailment, Catch::Matchers::WithinAbs(avail_minus_used, 1e-6));
    CHECK(m.load_shed >= -1e-9);
    CHECK(m.capacity_invested >= 0.0);
  }
}

TEST_CASE("perf curve basics") {
  SECTION("empty input") {
    const PerfCurve c = perf_curve({}, {});
    CHECK(c.runtime_ms.empty());
    CHECK(c.frac_solved.empty());
  }
  SECTION("all solved at equal time") {
    const std::vector<double> rt(5, 2.5);
    const std::vector<SolveStatus> st(5, SolveStatus::Optimal);
    const PerfCurve c = perf_curve(rt, st);
    REQUIRE(c.runtime_ms.size() == 5);
    CHECK(c.runtime_ms.front() == 2.5);
    CHECK(c.frac_solved.back() == 1.0);
  }
  SECTION("unsolved instances cap the curve") {
    const std::vector<double> rt = {1.0, 2.0, 3.0, 4.0};
    const std::vector<SolveStatus> st = {SolveStatus::Optimal, SolveStatus::LimitReached,
                                         SolveStatus::Optimal, SolveStatus::Infeasible};
    const PerfCurve c = perf_curve(rt, st);
    REQUIRE(c.runtime_ms.size() == 2);
    CHECK(c.runtime_ms == std::vector<double>{1.0, 3.0});
    CHECK(c.frac_solved == std::vector<double>{0.25, 0.5});
  }
}

TEST_CASE("perf curve matches sorted cumulative oracle and is permutation invariant") {
  std::mt19937 gen(314);
  std::uniform_real_distribution<double> U(0.1, 50.0);
  std::vector<double> rt(100);
  for (auto& r : rt) r = U(gen);
  const std::vector<SolveStatus> st(100, SolveStatus::Optimal);

  const PerfCurve c = perf_curve(rt, st);
  std::vector<double> sorted = rt;
  std::sort(sorted.begin(), sorted.end());
  REQUIRE(c.runtime_ms == sorted);
  for (size_t i = 0; i < 100; ++i) {
    CHECK_THAT(c.frac_solved[i],
               Catch::Matchers::WithinAbs(static_cast<double>(i + 1) / 100.0, 1e-15));
    if (i > 0) {
      CHECK(c.runtime_ms[i] >= c.runtime_ms[i - 1]);
      CHECK(c.frac_solved[i] >= c.frac_solved[i - 1]);
    }
  }

  std::shuffle(rt.begin(), rt.end(), gen);
  const PerfCurve c2 = perf_curve(rt, st);
  CHECK(c2.runtime_ms == c.runtime_ms);
  CHECK(c2.frac_solved == c.frac_solved);
}
