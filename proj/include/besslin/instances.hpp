#ifndef BESSLIN_INSTANCES_HPP_
#define BESSLIN_INSTANCES_HPP_

/**
 * @file
 * @brief Deterministic generation of battery fleets, daily renewable and
 *        demand profiles, and complete set-point-tracking (SPT) and
 *        transmission-expansion (TEP) instance bundles.
 *
 * Everything is driven by an explicit Rng so that (seed, instance index)
 * fully determines an instance regardless of generation order. Profiles can
 * also be loaded from CSV (`day,h1,...,h24`, values in [0,1]).
 */

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "besslin/bess.hpp"

namespace besslin {

// ---------------------------------------------------------------------------
// Seeded generator: xoshiro256++ with splitmix64 seeding. Chosen over the
// standard-library engines because their distributions are not guaranteed to
// produce identical streams across implementations, and reports here must be
// byte-reproducible.

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = detail::splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    if (n == 0) throw ModelError("rng: index over empty range");
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<std::uint64_t, 4> state_{};
};

/// Deterministic sub-seed for instance `index` under `tag`, so parallel or
/// reordered generation cannot change any instance.
inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index,
                                std::string_view tag) {
  std::uint64_t s = master;
  detail::splitmix64(s);
  s ^= 0x517cc1b727220a95ULL * (index + 1);
  detail::splitmix64(s);
  for (const char c : tag) {
    s ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
    detail::splitmix64(s);
  }
  return detail::splitmix64(s);
}

// ---------------------------------------------------------------------------
// Profiles

constexpr std::size_t kHours = 24;

/// Normalized unit-capacity output per hour of one day.
struct Profile {
  std::array<double, kHours> values{};

  void validate() const {
    for (std::size_t h = 0; h < kHours; ++h)
      if (!(values[h] >= 0.0 && values[h] <= 1.0))
        throw ModelError("profile: hour " + std::to_string(h + 1) + " value outside [0,1]");
  }
};

/// Parse `day,h1,...,h24` CSV rows into validated profiles.
inline std::vector<Profile> load_profiles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("profiles: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ModelError("profiles: empty file " + path);

  std::vector<Profile> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != kHours + 1)
      throw ModelError("profiles: row " + std::to_string(row) + " has " +
                       std::to_string(cells.size()) + " columns, expected 25");
    Profile p;
    for (std::size_t h = 0; h < kHours; ++h) {
      double v;
      try {
        v = std::stod(cells[h + 1]);
      } catch (const std::exception&) {
        throw ModelError("profiles: row " + std::to_string(row) + " column h" +
                         std::to_string(h + 1) + " is not a number");
      }
      if (!(v >= 0.0 && v <= 1.0))
        throw ModelError("profiles: row " + std::to_string(row) + " column h" +
                         std::to_string(h + 1) + " value outside [0,1]");
      p.values[h] = v;
    }
    out.push_back(p);
  }
  return out;
}

enum class ProfileKind { Solar, Wind };

/// Synthetic stand-in for the external profile dataset.
inline Profile synth_profile(Rng& rng, ProfileKind kind) {
  Profile p;
  if (kind == ProfileKind::Solar) {
    // daylight window hours 6..21; raised sine with multiplicative noise
    constexpr int first = 5, last = 20;  // zero-based
    for (int h = first; h <= last; ++h) {
      const double phase = (h - first + 0.5) / (last - first + 1.0);
      const double base = std::sin(phase * 3.14159265358979323846);
      p.values[h] = std::clamp(base * (0.7 + 0.5 * rng.uniform()), 0.0, 1.0);
    }
  } else {
    // random-phase diurnal swing plus a small noise walk; clamping is
    // 1-Lipschitz, so per-hour steps stay within 0.118 + 0.06 < 0.15
    const double phase = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    double noise = rng.uniform(-0.1, 0.1);
    for (std::size_t h = 0; h < kHours; ++h) {
      const double base =
          0.5 + 0.45 * std::sin(2.0 * 3.14159265358979323846 * h / kHours + phase);
      p.values[h] = std::clamp(base + noise, 0.0, 1.0);
      noise = std::clamp(noise + 0.03 * (2.0 * rng.uniform() - 1.0), -0.1, 0.1);
    }
  }
  p.validate();
  return p;
}

/// Pool of `n` synthetic profiles (used when no CSV is given).
inline std::vector<Profile> synth_profile_pool(std::uint64_t seed, std::size_t n,
                                               ProfileKind kind) {
  std::vector<Profile> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(child_seed(seed, i, kind == ProfileKind::Solar ? "solar" : "wind"));
    out.push_back(synth_profile(rng, kind));
  }
  return out;
}

/// Deterministic double-peak daily demand shape, normalized to max 1.
inline const std::array<double, kHours>& demand_shape() {
  static const std::array<double, kHours> shape = {
      0.55, 0.50, 0.47, 0.45, 0.45, 0.50, 0.62, 0.75, 0.85, 0.88, 0.87, 0.85,
      0.83, 0.82, 0.80, 0.80, 0.85, 0.92, 1.00, 0.98, 0.92, 0.80, 0.68, 0.60};
  return shape;
}

// ---------------------------------------------------------------------------
// Fleet sampling

/// One random battery: energy window U(0,30)..U(40,80), power ratings
/// U(10,20), efficiencies U(0.75,1), initial energy at the window midpoint.
inline std::pair<BessParams, BessInitial> sample_bess(Rng& rng) {
  BessParams p;
  p.e_min = rng.uniform(0.0, 30.0);
  p.e_max = rng.uniform(40.0, 80.0);
  p.p_c_max = rng.uniform(10.0, 20.0);
  p.p_d_max = rng.uniform(10.0, 20.0);
  p.eta_c = rng.uniform(0.75, 1.0);
  p.eta_d = rng.uniform(0.75, 1.0);
  p.validate();
  const BessInitial init{0.5 * (p.e_min + p.e_max)};
  init.validate(p);
  return {p, init};
}

// ---------------------------------------------------------------------------
// SPT instances

struct SptInstance {
  std::array<double, kHours> signal{};  // pu, may be negative
  std::vector<std::pair<BessParams, BessInitial>> fleet;

  /// Canonical JSON digest for golden tests and cross-model identity checks.
  std::string digest() const {
    nlohmann::ordered_json j;
    j["signal"] = signal;
    auto& f = j["fleet"] = nlohmann::ordered_json::array();
    for (const auto& [p, init] : fleet)
      f.push_back({{"e_min", p.e_min},
                   {"e_max", p.e_max},
                   {"p_c_max", p.p_c_max},
                   {"p_d_max", p.p_d_max},
                   {"eta_c", p.eta_c},
                   {"eta_d", p.eta_d},
                   {"e0", init.e0}});
    return j.dump();
  }
};

/// Tracking signal = demand_scale-scaled deterministic shape minus a randomly
/// drawn renewable profile scaled so surplus periods occur.
inline SptInstance make_spt_instance(Rng& rng, std::size_t n_bess,
                                     const std::vector<Profile>& pool,
                                     double demand_factor = 1.2, double res_factor = 1.5) {
  if (pool.empty()) throw ModelError("spt instance: empty profile pool");
  if (n_bess == 0) throw ModelError("spt instance: empty fleet");

  SptInstance inst;
  double mean_pd = 0.0;
  for (std::size_t n = 0; n < n_bess; ++n) {
    inst.fleet.push_back(sample_bess(rng));
    mean_pd += inst.fleet.back().first.p_d_max;
  }
  mean_pd /= static_cast<double>(n_bess);

  const double demand_scale = demand_factor * mean_pd;
  const double res_scale = res_factor * demand_scale;
  const Profile& res = pool[rng.index(pool.size())];
  for (std::size_t h = 0; h < kHours; ++h)
    inst.signal[h] = demand_shape()[h] * demand_scale - res.values[h] * res_scale;
  return inst;
}

// ---------------------------------------------------------------------------
// TEP instances

struct Corridor {
  int from = 0, to = 0;              // zero-based node ids
  double existing_capacity = 0.0;    // pu
  double candidate_capacity = 0.0;   // pu per candidate line
  int candidate_count = 0;
  double capex_per_line = 0.0;       // cost per line per day of the horizon
};

struct Generator {
  int node = 0;
  double capacity = 0.0;       // pu
  double marginal_cost = 0.0;  // cost per pu-hour
};

/// Static system data of the three-node test network.
struct TepDataset {
  int nodes = 3;
  std::vector<Corridor> corridors;
  std::vector<Generator> generators;
  std::vector<double> demand_peak;    // per node, pu; shaped by demand_shape()
  std::vector<double> res_capacity;   // per node, pu of installed wind
  double shed_penalty = 0.0;          // cost per pu-hour

  void validate() const {
    if (nodes < 2) throw ModelError("tep dataset: need at least 2 nodes");
    if (static_cast<int>(demand_peak.size()) != nodes ||
        static_cast<int>(res_capacity.size()) != nodes)
      throw ModelError("tep dataset: per-node arrays must have `nodes` entries");
    for (const auto& c : corridors) {
      if (c.from == c.to || c.from < 0 || c.to < 0 || c.from >= nodes || c.to >= nodes)
        throw ModelError("tep dataset: corridor endpoints must be distinct valid nodes");
      if (c.existing_capacity < 0 || c.candidate_capacity < 0 || c.candidate_count < 0)
        throw ModelError("tep dataset: negative corridor data");
    }
    for (const auto& g : generators)
      if (g.node < 0 || g.node >= nodes || g.capacity < 0)
        throw ModelError("tep dataset: bad generator");
    for (const double d : demand_peak)
      if (d < 0) throw ModelError("tep dataset: negative demand");
    if (shed_penalty <= 0) throw ModelError("tep dataset: shed penalty must be positive");
  }
};

/// Built-in dataset: cheap generation at node 1, expensive at node 2, all
/// demand and storage at node 3 behind corridors that congest at peak.
inline TepDataset default_tep_dataset() {
  TepDataset d;
  d.nodes = 3;
  d.corridors = {{0, 1, 30.0, 30.0, 3, 40.0},
                 {0, 2, 20.0, 30.0, 3, 40.0},
                 {1, 2, 20.0, 30.0, 3, 40.0}};
  d.generators = {{0, 120.0, 10.0}, {1, 80.0, 30.0}};
  d.demand_peak = {0.0, 0.0, 60.0};
  d.res_capacity = {10.0, 10.0, 20.0};
  // high enough that building a candidate line (amortized capex 40/day) always
  // beats shedding; optimal plans on this dataset shed nothing
  d.shed_penalty = 10000.0;
  return d;
}

inline TepDataset tep_dataset_from_json(const nlohmann::json& j) {
  TepDataset d;
  d.nodes = j.at("nodes").get<int>();
  for (const auto& c : j.at("corridors"))
    d.corridors.push_back({c.at("from").get<int>(), c.at("to").get<int>(),
                           c.at("existing_capacity").get<double>(),
                           c.at("candidate_capacity").get<double>(),
                           c.at("candidate_count").get<int>(),
                           c.at("capex_per_line").get<double>()});
  for (const auto& g : j.at("generators"))
    d.generators.push_back({g.at("node").get<int>(), g.at("capacity").get<double>(),
                            g.at("marginal_cost").get<double>()});
  d.demand_peak = j.at("demand_peak").get<std::vector<double>>();
  d.res_capacity = j.at("res_capacity").get<std::vector<double>>();
  d.shed_penalty = j.at("shed_penalty").get<double>();
  d.validate();
  return d;
}

inline nlohmann::ordered_json tep_dataset_to_json(const TepDataset& d) {
  nlohmann::ordered_json j;
  j["nodes"] = d.nodes;
  auto& cs = j["corridors"] = nlohmann::ordered_json::array();
  for (const auto& c : d.corridors)
    cs.push_back({{"from", c.from},
                  {"to", c.to},
                  {"existing_capacity", c.existing_capacity},
                  {"candidate_capacity", c.candidate_capacity},
                  {"candidate_count", c.candidate_count},
                  {"capex_per_line", c.capex_per_line}});
  auto& gs = j["generators"] = nlohmann::ordered_json::array();
  for (const auto& g : d.generators)
    gs.push_back(
        {{"node", g.node}, {"capacity", g.capacity}, {"marginal_cost", g.marginal_cost}});
  j["demand_peak"] = d.demand_peak;
  j["res_capacity"] = d.res_capacity;
  j["shed_penalty"] = d.shed_penalty;
  return j;
}

inline TepDataset load_tep_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("tep dataset: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return tep_dataset_from_json(j);
}

struct TepInstance {
  TepDataset dataset;
  std::size_t days = 0;
  std::vector<std::vector<Profile>> res_profiles;  // [node][day]
  std::vector<std::pair<BessParams, BessInitial>> fleet;  // at node `nodes - 1`
  std::vector<std::array<double, kHours>> demand;         // [node][hour], pu

  std::string digest() const {
    nlohmann::ordered_json j;
    j["dataset"] = tep_dataset_to_json(dataset);
    j["days"] = days;
    auto& rp = j["res_profiles"] = nlohmann::ordered_json::array();
    for (const auto& per_node : res_profiles) {
      nlohmann::ordered_json node = nlohmann::ordered_json::array();
      for (const auto& p : per_node) node.push_back(p.values);
      rp.push_back(std::move(node));
    }
    auto& f = j["fleet"] = nlohmann::ordered_json::array();
    for (const auto& [p, init] : fleet)
      f.push_back({{"e_min", p.e_min},
                   {"e_max", p.e_max},
                   {"p_c_max", p.p_c_max},
                   {"p_d_max", p.p_d_max},
                   {"eta_c", p.eta_c},
                   {"eta_d", p.eta_d},
                   {"e0", init.e0}});
    auto& dm = j["demand"] = nlohmann::ordered_json::array();
    for (const auto& row : demand) dm.push_back(row);
    return j.dump();
  }
};

inline TepInstance make_tep_instance(Rng& rng, std::size_t n_bess, std::size_t days,
                                     const std::vector<Profile>& pool,
                                     TepDataset dataset = default_tep_dataset()) {
  if (pool.empty()) throw ModelError("tep instance: empty profile pool");
  if (days < 1) throw ModelError("tep instance: need at least one day");
  dataset.validate();

  TepInstance inst;
  inst.dataset = std::move(dataset);
  inst.days = days;
  inst.res_profiles.resize(inst.dataset.nodes);
  for (auto& per_node : inst.res_profiles)
    for (std::size_t d = 0; d < days; ++d) per_node.push_back(pool[rng.index(pool.size())]);
  for (std::size_t n = 0; n < n_bess; ++n) inst.fleet.push_back(sample_bess(rng));
  for (int node = 0; node < inst.dataset.nodes; ++node) {
    std::array<double, kHours> row{};
    for (std::size_t h = 0; h < kHours; ++h)
      row[h] = inst.dataset.demand_peak[node] * demand_shape()[h];
    inst.demand.push_back(row);
  }
  return inst;
}

}  // namespace besslin

#endif  // BESSLIN_INSTANCES_HPP_
