// Command-line front end: experiment runs, region grids, performance
// curves and report summaries.

#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "besslin/experiment.hpp"

namespace {

using namespace besslin;

std::vector<ModelKind> parse_models(const std::vector<std::string>& items) {
  std::vector<ModelKind> kinds;
  for (const std::string& item : items) {
    std::stringstream ss(item);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) kinds.push_back(model_kind_from(tok));
  }
  return kinds.empty() ? all_model_kinds() : kinds;
}

/// Opens --out for writing, or returns std::cout when no path was given.
class OutputSink {
public:
  explicit OutputSink(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ModelError("cannot open output file: " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

ExperimentReport read_report_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open report file: " + path);
  return read_report_csv(in);
}

int write_report(const ExperimentReport& rep, const std::string& out_path) {
  OutputSink sink(out_path);
  write_report_csv(rep, sink.stream());
  for (const ReportRow& r : rep.rows)
    if (r.status != SolveStatus::Optimal) return 2;
  return 0;
}

/// Battery parameters from a JSON file: keys e_min, e_max, p_c_max, p_d_max,
/// eta_c, eta_d, e0; missing keys fall back to the built-in example battery.
void load_region_params(const std::string& path, BessParams& p, BessInitial& init) {
  p = example_params();
  init = example_initial();
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open params file: " + path);
  nlohmann::json j;
  in >> j;
  p.e_min = j.value("e_min", p.e_min);
  p.e_max = j.value("e_max", p.e_max);
  p.p_c_max = j.value("p_c_max", p.p_c_max);
  p.p_d_max = j.value("p_d_max", p.p_d_max);
  p.eta_c = j.value("eta_c", p.eta_c);
  p.eta_d = j.value("eta_d", p.eta_d);
  init.e0 = j.value("e0", init.e0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear battery storage formulations: experiments and reports"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::vector<std::string> model_items;
  std::string out_path;
  std::string report_path;
  std::string params_path;
  int grid_n = 100;

  const auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "Base random seed");
    sub->add_option("--instances", cfg.n_instances, "Instances per fleet size");
    sub->add_option("--bess-count", cfg.bess_counts, "Fleet sizes to run (repeatable)");
    sub->add_option("--models", model_items, "Models: exc, lp, na, relyz, extlp");
    sub->add_option("--profiles", cfg.profiles, "Profile CSV path, or 'synthetic'");
    sub->add_option("--out", out_path, "Output CSV path (default: stdout)");
    sub->add_option("--workers", cfg.workers, "Worker thread count");
    sub->add_option("--mip-gap", cfg.solve.mip_rel_gap, "Relative MILP gap target");
  };

  CLI::App* spt = app.add_subcommand("run-spt", "Run the set-point tracking experiment");
  add_run_flags(spt);

  CLI::App* tep = app.add_subcommand("run-tep", "Run the expansion planning experiment");
  add_run_flags(tep);
  tep->add_option("--days", cfg.days, "Typical days in the planning horizon");
  tep->add_option("--dataset", cfg.tep_dataset_path, "Network dataset JSON (default: built-in)");

  CLI::App* region = app.add_subcommand("region", "Emit single-period feasible-region grids");
  region->add_option("--params", params_path, "Battery parameter JSON (default: example battery)");
  region->add_option("--models", model_items, "Models: exc, lp, na, relyz, extlp");
  region->add_option("--grid", grid_n, "Grid resolution per axis")->check(CLI::PositiveNumber);
  region->add_option("--out", out_path, "Output CSV path (default: stdout)");

  CLI::App* curve = app.add_subcommand("perf-curve", "Cumulative solved-fraction curve of a report");
  curve->add_option("report", report_path, "Report CSV path")->required();
  curve->add_option("--out", out_path, "Output CSV path (default: stdout)");

  CLI::App* summ = app.add_subcommand("summarize", "Per-(model, fleet size) report averages");
  summ->add_option("report", report_path, "Report CSV path")->required();
  summ->add_option("--out", out_path, "Output CSV path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    cfg.models = parse_models(model_items);

    if (spt->parsed()) return write_report(run_spt(cfg), out_path);
    if (tep->parsed()) return write_report(run_tep(cfg), out_path);

    if (region->parsed()) {
      BessParams p;
      BessInitial init;
      load_region_params(params_path, p, init);
      OutputSink sink(out_path);
      bool header = true;
      for (const ModelKind kind : cfg.models) {
        emit_region_csv(kind, p, init, grid_n, sink.stream(), header);
        header = false;
      }
      return 0;
    }

    if (curve->parsed()) {
      const ExperimentReport rep = read_report_file(report_path);
      std::vector<double> runtimes;
      std::vector<SolveStatus> statuses;
      for (const ReportRow& r : rep.rows) {
        runtimes.push_back(r.runtime_ms);
        statuses.push_back(r.status);
      }
      OutputSink sink(out_path);
      write_perf_curve_csv(perf_curve(runtimes, statuses), sink.stream());
      return 0;
    }

    if (summ->parsed()) {
      const ExperimentReport rep = read_report_file(report_path);
      OutputSink sink(out_path);
      write_summary(summarize(rep), sink.stream());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
