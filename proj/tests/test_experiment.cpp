#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "besslin/experiment.hpp"

using namespace besslin;

namespace {

RunConfig small_spt_config() {
  RunConfig cfg;
  cfg.seed = 99;
  cfg.n_instances = 2;
  cfg.bess_counts = {1, 2};
  cfg.models = all_model_kinds();
  return cfg;
}

// report serialization with runtimes zeroed, for determinism comparisons
std::string stable_csv(ExperimentReport rep) {
  for (auto& r : rep.rows) r.runtime_ms = 0.0;
  std::ostringstream os;
  write_report_csv(rep, os);
  return os.str();
}

}  // namespace

TEST_CASE("spt run shape and cross-model identity") {
  const RunConfig cfg = small_spt_config();
  const ExperimentReport rep = run_spt(cfg);

  REQUIRE(rep.rows.size() == cfg.models.size() * cfg.bess_counts.size() *
                                 static_cast<std::size_t>(cfg.n_instances));

  // canonical order and identical instance data across models
  std::size_t i = 0;
  for (const int n : cfg.bess_counts)
    for (int inst = 0; inst < cfg.n_instances; ++inst) {
      const std::string& digest = rep.rows[i].instance_digest;
      CHECK(!digest.empty());
      for (const ModelKind kind : cfg.models) {
        const ReportRow& r = rep.rows[i++];
        CHECK(r.problem == "spt");
        CHECK(r.model == kind);
        CHECK(r.n_bess == n);
        CHECK(r.instance == inst);
        CHECK(r.instance_digest == digest);
      }
    }

  for (const ReportRow& r : rep.rows) {
    REQUIRE(r.status == SolveStatus::Optimal);
    if (r.model == ModelKind::Exc) {
      CHECK(r.simult_pct == 0.0);
      CHECK_THAT(r.rmse_rel, Catch::Matchers::WithinAbs(1.0, 1e-9));
    }
    if (r.model == ModelKind::Lp || r.model == ModelKind::RelYz ||
        r.model == ModelKind::ExtLp)
      CHECK(r.rmse_rel <= 1.0 + 1e-6);
  }
}

TEST_CASE("spt run is deterministic for a fixed seed") {
  const RunConfig cfg = small_spt_config();
  const std::string a = stable_csv(run_spt(cfg));
  const std::string b = stable_csv(run_spt(cfg));
  CHECK(a == b);
}

TEST_CASE("worker count does not change the report") {
  RunConfig cfg = small_spt_config();
  cfg.models = {ModelKind::Exc, ModelKind::Lp};
  const std::string serial = stable_csv(run_spt(cfg));
  cfg.workers = 3;
  const std::string parallel = stable_csv(run_spt(cfg));
  CHECK(serial == parallel);
}

TEST_CASE("single-model single-instance run") {
  RunConfig cfg;
  cfg.seed = 5;
  cfg.n_instances = 1;
  cfg.bess_counts = {1};
  cfg.models = {ModelKind::Exc};
  const ExperimentReport rep = run_spt(cfg);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].simult_pct == 0.0);
}

TEST_CASE("tep run shape and metrics") {
  RunConfig cfg;
  cfg.seed = 4;
  cfg.n_instances = 2;
  cfg.bess_counts = {1};
  cfg.models = {ModelKind::Exc, ModelKind::Lp};
  cfg.days = 2;
  const ExperimentReport rep = run_tep(cfg);

  REQUIRE(rep.rows.size() == 4);
  for (const ReportRow& r : rep.rows) {
    CHECK(r.problem == "tep");
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.load_shed <= 1e-6);
    CHECK(r.curtailment >= -1e-9);
    CHECK(r.capacity_invested >= 0.0);
    if (r.model == ModelKind::Exc) {
      CHECK(r.simult_pct == 0.0);
      CHECK_THAT(r.total_cost_rel, Catch::Matchers::WithinAbs(1.0, 1e-9));
    } else {
      // larger feasible set, so no costlier than the exact model (up to gap)
      CHECK(r.total_cost_rel <= 1.0 + 2e-3);
    }
  }
  // both models saw the same instance
  CHECK(rep.rows[0].instance_digest == rep.rows[1].instance_digest);
}

TEST_CASE("report csv round trip") {
  RunConfig cfg = small_spt_config();
  cfg.n_instances = 1;
  cfg.bess_counts = {1};
  cfg.models = {ModelKind::Exc, ModelKind::Na};
  const ExperimentReport rep = run_spt(cfg);

  std::ostringstream os;
  write_report_csv(rep, os);
  std::istringstream is(os.str());
  const ExperimentReport back = read_report_csv(is);
  REQUIRE(back.rows.size() == rep.rows.size());
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(back.rows[i].model == rep.rows[i].model);
    CHECK(back.rows[i].status == rep.rows[i].status);
    CHECK_THAT(back.rows[i].objective,
               Catch::Matchers::WithinRel(rep.rows[i].objective, 1e-9));
  }
}

TEST_CASE("summarize averages equal arithmetic means") {
  RunConfig cfg = small_spt_config();
  cfg.models = {ModelKind::Lp};
  cfg.bess_counts = {1};
  cfg.n_instances = 3;
  const ExperimentReport rep = run_spt(cfg);
  const std::vector<SummaryRow> sum = summarize(rep);
  REQUIRE(sum.size() == 1);
  CHECK(sum[0].count == 3);
  CHECK(sum[0].solved == 3);
  double mean_rmse = 0.0;
  for (const ReportRow& r : rep.rows) mean_rmse += r.rmse;
  mean_rmse /= 3.0;
  CHECK_THAT(sum[0].rmse, Catch::Matchers::WithinAbs(mean_rmse, 1e-12));
}

TEST_CASE("config validation") {
  RunConfig cfg;
  cfg.n_instances = 0;
  CHECK_THROWS_AS(run_spt(cfg), ModelError);
  cfg = RunConfig{};
  cfg.models.clear();
  CHECK_THROWS_AS(run_spt(cfg), ModelError);
  cfg = RunConfig{};
  cfg.bess_counts = {0};
  CHECK_THROWS_AS(run_spt(cfg), ModelError);
  cfg = RunConfig{};
  cfg.workers = 0;
  CHECK_THROWS_AS(run_tep(cfg), ModelError);
}
