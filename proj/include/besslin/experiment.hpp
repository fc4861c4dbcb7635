#ifndef BESSLIN_EXPERIMENT_HPP_
#define BESSLIN_EXPERIMENT_HPP_

/**
 * @file
 * @brief End-to-end experiment runs: generate instances, assemble and solve
 *        every requested model on each, compute metrics, and emit reports.
 *
 * Each (n_bess, instance) pair is one task: all models share the identical
 * instance, and the relative metrics are anchored to the exact model's solve
 * of that instance.  Tasks are independent, so a worker pool runs them in
 * any order; rows are sorted canonically afterwards, which makes the report
 * identical for any worker count.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "besslin/branch_bound.hpp"
#include "besslin/metrics.hpp"

namespace besslin {

struct RunConfig {
  std::uint64_t seed = 1;
  int n_instances = 100;
  std::vector<int> bess_counts = {1, 2, 3, 4, 5};
  std::vector<ModelKind> models = all_model_kinds();
  std::size_t days = 50;               // TEP horizon in typical days
  std::string profiles = "synthetic";  // or a profile CSV path
  std::string tep_dataset_path;        // empty: built-in default dataset
  int workers = 1;
  SolveConfig solve;

  void validate() const {
    if (n_instances < 1) throw ModelError("run config: n_instances must be >= 1");
    if (models.empty()) throw ModelError("run config: models must be nonempty");
    if (bess_counts.empty()) throw ModelError("run config: bess_counts must be nonempty");
    for (const int n : bess_counts)
      if (n < 1) throw ModelError("run config: bess counts must be >= 1");
    if (days < 1) throw ModelError("run config: days must be >= 1");
    if (workers < 1) throw ModelError("run config: workers must be >= 1");
  }
};

struct ReportRow {
  std::string problem;  // "spt" or "tep"
  ModelKind model = ModelKind::Exc;
  int n_bess = 0;
  int instance = 0;
  SolveStatus status = SolveStatus::LimitReached;
  double objective = 0.0;
  double runtime_ms = 0.0;
  double gap = 0.0;
  double simult_pct = 0.0;
  double rmse = 0.0;
  double rmse_rel = 0.0;
  double total_cost_rel = 0.0;   // TEP only
  double load_shed = 0.0;        // TEP only
  double curtailment = 0.0;      // TEP only
  double capacity_invested = 0.0;  // TEP only
  std::string instance_digest;   // not emitted; cross-model identity checks
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
};

namespace detail {

inline std::vector<Profile> experiment_pool(const RunConfig& cfg) {
  if (cfg.profiles == "synthetic")
    return synth_profile_pool(child_seed(cfg.seed, 0, "pool"), 60, ProfileKind::Wind);
  return load_profiles(cfg.profiles);
}

inline std::uint64_t task_seed(const RunConfig& cfg, const char* tag, int n_bess,
                               int instance) {
  return child_seed(cfg.seed,
                    static_cast<std::uint64_t>(n_bess) * 1000003ull +
                        static_cast<std::uint64_t>(instance),
                    tag);
}

/// Runs tasks 0..count-1 on cfg.workers threads; f must be thread-safe for
/// distinct task indices.
template <typename F>
void run_pool(int workers, int count, F&& f) {
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> threads;
  const int n_threads = std::min(workers, count);
  threads.reserve(static_cast<std::size_t>(n_threads));
  for (int w = 0; w < n_threads; ++w)
    threads.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) f(i);
    });
  for (auto& t : threads) t.join();
}

inline void sort_canonically(ExperimentReport& rep, const std::vector<ModelKind>& models) {
  std::map<ModelKind, std::size_t> order;
  for (std::size_t i = 0; i < models.size(); ++i) order[models[i]] = i;
  std::sort(rep.rows.begin(), rep.rows.end(), [&](const ReportRow& a, const ReportRow& b) {
    if (a.n_bess != b.n_bess) return a.n_bess < b.n_bess;
    if (a.instance != b.instance) return a.instance < b.instance;
    return order.at(a.model) < order.at(b.model);
  });
}

}  // namespace detail

inline ExperimentReport run_spt(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<Profile> pool = detail::experiment_pool(cfg);

  struct Task {
    int n_bess, instance;
  };
  std::vector<Task> tasks;
  for (const int n : cfg.bess_counts)
    for (int i = 0; i < cfg.n_instances; ++i) tasks.push_back({n, i});

  std::vector<std::vector<ReportRow>> results(tasks.size());
  detail::run_pool(cfg.workers, static_cast<int>(tasks.size()), [&](int t) {
    const Task& task = tasks[static_cast<std::size_t>(t)];
    Rng rng(detail::task_seed(cfg, "spt", task.n_bess, task.instance));
    const SptInstance inst =
        make_spt_instance(rng, static_cast<std::size_t>(task.n_bess), pool);
    const std::string digest = inst.digest();

    double exc_rmse = std::numeric_limits<double>::quiet_NaN();
    std::vector<ReportRow>& rows = results[static_cast<std::size_t>(t)];
    for (const ModelKind kind : cfg.models) {
      const SptAssembly a = assemble_spt(inst, kind);
      const Solution sol = solve_milp(a.problem, cfg.solve);
      ReportRow row;
      row.problem = "spt";
      row.model = kind;
      row.n_bess = task.n_bess;
      row.instance = task.instance;
      row.status = sol.status;
      row.objective = sol.objective;
      row.runtime_ms = sol.runtime_ms;
      row.gap = sol.gap.value_or(0.0);
      row.instance_digest = digest;
      if (sol.status == SolveStatus::Optimal) {
        const SptMetrics m = spt_metrics(sol, a);
        row.simult_pct = m.simult_pct;
        row.rmse = m.rmse;
        if (kind == ModelKind::Exc) exc_rmse = m.rmse;
      }
      rows.push_back(std::move(row));
    }
    for (ReportRow& row : rows) {
      if (row.status != SolveStatus::Optimal) continue;
      if (std::isnan(exc_rmse))
        row.rmse_rel = std::numeric_limits<double>::quiet_NaN();
      else if (exc_rmse <= 1e-12)
        row.rmse_rel = row.rmse <= 1e-12 ? 1.0 : std::numeric_limits<double>::infinity();
      else
        row.rmse_rel = row.rmse / exc_rmse;
    }
  });

  ExperimentReport rep;
  for (auto& rows : results)
    for (auto& row : rows) rep.rows.push_back(std::move(row));
  detail::sort_canonically(rep, cfg.models);
  return rep;
}

inline ExperimentReport run_tep(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<Profile> pool = detail::experiment_pool(cfg);
  const TepDataset dataset = cfg.tep_dataset_path.empty()
                                 ? default_tep_dataset()
                                 : load_tep_dataset(cfg.tep_dataset_path);

  struct Task {
    int n_bess, instance;
  };
  std::vector<Task> tasks;
  for (const int n : cfg.bess_counts)
    for (int i = 0; i < cfg.n_instances; ++i) tasks.push_back({n, i});

  std::vector<std::vector<ReportRow>> results(tasks.size());
  detail::run_pool(cfg.workers, static_cast<int>(tasks.size()), [&](int t) {
    const Task& task = tasks[static_cast<std::size_t>(t)];
    Rng rng(detail::task_seed(cfg, "tep", task.n_bess, task.instance));
    const TepInstance inst = make_tep_instance(
        rng, static_cast<std::size_t>(task.n_bess), cfg.days, pool, dataset);
    const std::string digest = inst.digest();

    double exc_cost = std::numeric_limits<double>::quiet_NaN();
    std::vector<ReportRow>& rows = results[static_cast<std::size_t>(t)];
    for (const ModelKind kind : cfg.models) {
      const TepAssembly a = assemble_tep(inst, kind);
      const Solution sol = solve_milp(a.problem, cfg.solve);
      ReportRow row;
      row.problem = "tep";
      row.model = kind;
      row.n_bess = task.n_bess;
      row.instance = task.instance;
      row.status = sol.status;
      row.objective = sol.objective;
      row.runtime_ms = sol.runtime_ms;
      row.gap = sol.gap.value_or(0.0);
      row.instance_digest = digest;
      if (sol.status == SolveStatus::Optimal) {
        const TepMetrics m = tep_metrics(sol, a, inst.dataset);
        row.simult_pct = m.simult_pct;
        row.load_shed = m.load_shed;
        row.curtailment = m.curtailment;
        row.capacity_invested = m.capacity_invested;
        if (kind == ModelKind::Exc) exc_cost = sol.objective;
      }
      rows.push_back(std::move(row));
    }
    for (ReportRow& row : rows) {
      if (row.status != SolveStatus::Optimal) continue;
      row.total_cost_rel = std::isnan(exc_cost) || exc_cost == 0.0
                               ? std::numeric_limits<double>::quiet_NaN()
                               : row.objective / exc_cost;
    }
  });

  ExperimentReport rep;
  for (auto& rows : results)
    for (auto& row : rows) rep.rows.push_back(std::move(row));
  detail::sort_canonically(rep, cfg.models);
  return rep;
}

// --- report serialization ---------------------------------------------------

inline std::string spt_csv_header() {
  return "problem,model,n_bess,instance,status,objective,runtime_ms,gap,"
         "simult_pct,rmse,rmse_rel";
}

inline std::string tep_csv_header() {
  return spt_csv_header() + ",total_cost_rel,load_shed,curtailment,capacity_invested";
}

namespace detail {

inline std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace detail

inline void write_report_csv(const ExperimentReport& rep, std::ostream& out) {
  const bool tep = !rep.rows.empty() && rep.rows.front().problem == "tep";
  out << (tep ? tep_csv_header() : spt_csv_header()) << '\n';
  for (const ReportRow& r : rep.rows) {
    out << r.problem << ',' << to_string(r.model) << ',' << r.n_bess << ',' << r.instance
        << ',' << to_string(r.status) << ',' << detail::fmt_num(r.objective) << ','
        << detail::fmt_num(r.runtime_ms) << ',' << detail::fmt_num(r.gap) << ','
        << detail::fmt_num(r.simult_pct) << ',' << detail::fmt_num(r.rmse) << ','
        << detail::fmt_num(r.rmse_rel);
    if (tep)
      out << ',' << detail::fmt_num(r.total_cost_rel) << ',' << detail::fmt_num(r.load_shed)
          << ',' << detail::fmt_num(r.curtailment) << ','
          << detail::fmt_num(r.capacity_invested);
    out << '\n';
  }
}

inline SolveStatus status_from(const std::string& s) {
  if (s == "optimal") return SolveStatus::Optimal;
  if (s == "infeasible") return SolveStatus::Infeasible;
  if (s == "unbounded") return SolveStatus::Unbounded;
  if (s == "limit-reached") return SolveStatus::LimitReached;
  throw ModelError("report csv: unknown status " + s);
}

inline ExperimentReport read_report_csv(std::istream& in) {
  ExperimentReport rep;
  std::string line;
  if (!std::getline(in, line)) throw ModelError("report csv: empty file");
  const bool tep = line == tep_csv_header();
  if (!tep && line != spt_csv_header()) throw ModelError("report csv: unknown header");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    const std::size_t expect = tep ? 15 : 11;
    if (f.size() != expect)
      throw ModelError("report csv: bad field count on line " + std::to_string(line_no));
    ReportRow r;
    r.problem = f[0];
    r.model = model_kind_from(f[1]);
    r.n_bess = std::stoi(f[2]);
    r.instance = std::stoi(f[3]);
    r.status = status_from(f[4]);
    r.objective = std::stod(f[5]);
    r.runtime_ms = std::stod(f[6]);
    r.gap = std::stod(f[7]);
    r.simult_pct = std::stod(f[8]);
    r.rmse = std::stod(f[9]);
    r.rmse_rel = std::stod(f[10]);
    if (tep) {
      r.total_cost_rel = std::stod(f[11]);
      r.load_shed = std::stod(f[12]);
      r.curtailment = std::stod(f[13]);
      r.capacity_invested = std::stod(f[14]);
    }
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

// --- summaries --------------------------------------------------------------

struct SummaryRow {
  std::string problem;
  ModelKind model = ModelKind::Exc;
  int n_bess = 0;
  int count = 0;   // rows in the group
  int solved = 0;  // optimal rows (averages are over these)
  double objective = 0.0;
  double runtime_ms = 0.0;
  double simult_pct = 0.0;
  double rmse = 0.0;
  double rmse_rel = 0.0;
  double total_cost_rel = 0.0;
  double load_shed = 0.0;
  double curtailment = 0.0;
  double capacity_invested = 0.0;
};

/// Per-(model, n_bess) arithmetic means over the optimal rows.
inline std::vector<SummaryRow> summarize(const ExperimentReport& rep) {
  std::map<std::pair<int, int>, SummaryRow> groups;  // (n_bess, model index)
  for (const ReportRow& r : rep.rows) {
    const int mi = static_cast<int>(r.model);
    SummaryRow& g = groups[{r.n_bess, mi}];
    if (g.count == 0) {
      g.problem = r.problem;
      g.model = r.model;
      g.n_bess = r.n_bess;
    }
    ++g.count;
    if (r.status != SolveStatus::Optimal) continue;
    ++g.solved;
    g.objective += r.objective;
    g.runtime_ms += r.runtime_ms;
    g.simult_pct += r.simult_pct;
    g.rmse += r.rmse;
    g.rmse_rel += r.rmse_rel;
    g.total_cost_rel += r.total_cost_rel;
    g.load_shed += r.load_shed;
    g.curtailment += r.curtailment;
    g.capacity_invested += r.capacity_invested;
  }
  std::vector<SummaryRow> out;
  for (auto& [key, g] : groups) {
    if (g.solved > 0) {
      const double inv = 1.0 / g.solved;
      g.objective *= inv;
      g.runtime_ms *= inv;
      g.simult_pct *= inv;
      g.rmse *= inv;
      g.rmse_rel *= inv;
      g.total_cost_rel *= inv;
      g.load_shed *= inv;
      g.curtailment *= inv;
      g.capacity_invested *= inv;
    }
    out.push_back(std::move(g));
  }
  return out;
}

inline void write_summary(const std::vector<SummaryRow>& rows, std::ostream& out) {
  const bool tep = !rows.empty() && rows.front().problem == "tep";
  out << "problem,model,n_bess,count,solved,objective,runtime_ms,simult_pct";
  out << (tep ? ",total_cost_rel,load_shed,curtailment,capacity_invested" : ",rmse,rmse_rel");
  out << '\n';
  for (const SummaryRow& r : rows) {
    out << r.problem << ',' << to_string(r.model) << ',' << r.n_bess << ',' << r.count << ','
        << r.solved << ',' << detail::fmt_num(r.objective) << ','
        << detail::fmt_num(r.runtime_ms) << ',' << detail::fmt_num(r.simult_pct);
    if (tep)
      out << ',' << detail::fmt_num(r.total_cost_rel) << ',' << detail::fmt_num(r.load_shed)
          << ',' << detail::fmt_num(r.curtailment) << ','
          << detail::fmt_num(r.capacity_invested);
    else
      out << ',' << detail::fmt_num(r.rmse) << ',' << detail::fmt_num(r.rmse_rel);
    out << '\n';
  }
}

inline void write_perf_curve_csv(const PerfCurve& c, std::ostream& out) {
  out << "runtime_ms,frac_solved\n";
  for (std::size_t i = 0; i < c.runtime_ms.size(); ++i)
    out << detail::fmt_num(c.runtime_ms[i]) << ',' << detail::fmt_num(c.frac_solved[i])
        << '\n';
}

}  // namespace besslin

#endif  // BESSLIN_EXPERIMENT_HPP_
