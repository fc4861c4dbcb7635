#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "besslin/instances.hpp"

using namespace besslin;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& content) {
    path = std::string("/tmp/besslin_test_") + std::to_string(::getpid()) + "_" +
           std::to_string(counter()++) + ".csv";
    std::ofstream(path) << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string csv_header() {
  std::string h = "day";
  for (int i = 1; i <= 24; ++i) h += ",h" + std::to_string(i);
  return h + "\n";
}

}  // namespace

TEST_CASE("sampled batteries stay inside the declared ranges") {
  Rng rng(7);
  double sums[7] = {};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const auto [p, init] = sample_bess(rng);
    CHECK(p.e_min >= 0.0);
    CHECK(p.e_min < 30.0);
    CHECK(p.e_max > 40.0);
    CHECK(p.e_max < 80.0);
    CHECK((p.p_c_max > 10.0 && p.p_c_max < 20.0));
    CHECK((p.p_d_max > 10.0 && p.p_d_max < 20.0));
    CHECK((p.eta_c > 0.75 && p.eta_c < 1.0));
    CHECK((p.eta_d > 0.75 && p.eta_d < 1.0));
    CHECK(init.e0 == 0.5 * (p.e_min + p.e_max));
    const double vals[7] = {p.e_min, p.e_max,  p.p_c_max, p.p_d_max,
                            p.eta_c, p.eta_d, init.e0};
    for (int k = 0; k < 7; ++k) sums[k] += vals[k];
  }
  const double mids[7] = {15.0, 60.0, 15.0, 15.0, 0.875, 0.875, 37.5};
  for (int k = 0; k < 7; ++k)
    CHECK_THAT(sums[k] / n, Catch::Matchers::WithinRel(mids[k], 0.02));
}

TEST_CASE("battery sampling is a pure function of the seed") {
  Rng a(42), b(42);
  for (int i = 0; i < 3; ++i) {
    const auto [pa, ia] = sample_bess(a);
    const auto [pb, ib] = sample_bess(b);
    CHECK(pa.e_min == pb.e_min);
    CHECK(pa.eta_d == pb.eta_d);
    CHECK(ia.e0 == ib.e0);
  }
}

TEST_CASE("golden draws for seed 42") {
  // frozen from the first implementation; any change here breaks
  // reproducibility of all published reports
  Rng rng(42);
  const double expected[3][7] = {
      {24.429154353687295, 52.752841602466447, 19.838941681774887, 17.011355981347556,
       0.94837612242293223, 0.89702461661688992, 38.590997978076871},
      {3.7605732618822629, 64.204897946286906, 12.077171716233217, 19.333471176448306,
       0.88988486817153367, 0.96250745656861558, 33.982735604084581},
      {20.400194118234396, 42.781218841786462, 14.030733008256139, 15.460038391905188,
       0.80320256049146233, 0.76258213695511756, 31.590706480010429}};
  for (int i = 0; i < 3; ++i) {
    const auto [p, init] = sample_bess(rng);
    CHECK(p.e_min == expected[i][0]);
    CHECK(p.e_max == expected[i][1]);
    CHECK(p.p_c_max == expected[i][2]);
    CHECK(p.p_d_max == expected[i][3]);
    CHECK(p.eta_c == expected[i][4]);
    CHECK(p.eta_d == expected[i][5]);
    CHECK(init.e0 == expected[i][6]);
  }
}

TEST_CASE("golden profiles and instance digests") {
  Rng rs(7);
  const Profile solar = synth_profile(rs, ProfileKind::Solar);
  CHECK(solar.values[5] == 0.071325134066193674);
  CHECK(solar.values[11] == 1.0);
  CHECK(solar.values[20] == 0.07337936790394621);

  Rng rw(7);
  const Profile wind = synth_profile(rw, ProfileKind::Wind);
  CHECK(wind.values[0] == 0.58781370440819702);
  CHECK(wind.values[5] == 0.93064190598506458);
  CHECK(wind.values[23] == 0.5015819281417413);

  const auto pool = synth_profile_pool(6, 4, ProfileKind::Wind);
  Rng rt(99);
  const TepInstance tep = make_tep_instance(rt, 1, 2, pool);
  CHECK(fnv1a64(tep.digest()) == 1820478624612467352ull);
  Rng rp(99);
  const SptInstance spt = make_spt_instance(rp, 1, pool);
  CHECK(fnv1a64(spt.digest()) == 11851147875208135481ull);
  CHECK(spt.signal[0] == -8.7638220268585201);
  CHECK(spt.signal[12] == 10.38896630549913);
}

TEST_CASE("profile csv loading") {
  SECTION("all-zero row") {
    std::string body = csv_header() + "1";
    for (int i = 0; i < 24; ++i) body += ",0";
    const TempFile f(body + "\n");
    const auto ps = load_profiles(f.path);
    REQUIRE(ps.size() == 1);
    for (const double v : ps[0].values) CHECK(v == 0.0);
  }

  SECTION("out-of-range value names row and column") {
    std::string body = csv_header() + "1";
    for (int i = 0; i < 24; ++i) body += i == 4 ? ",1.2" : ",0.5";
    const TempFile f(body + "\n");
    CHECK_THROWS_WITH(load_profiles(f.path),
                      Catch::Matchers::ContainsSubstring("row 2") &&
                          Catch::Matchers::ContainsSubstring("h5"));
  }

  SECTION("wrong column count") {
    const TempFile f(csv_header() + "1,0.5,0.5\n");
    CHECK_THROWS_WITH(load_profiles(f.path),
                      Catch::Matchers::ContainsSubstring("columns"));
  }

  SECTION("1450 rows give 1450 profiles") {
    std::string body = csv_header();
    for (int r = 1; r <= 1450; ++r) {
      body += std::to_string(r);
      for (int i = 0; i < 24; ++i) body += ",0.25";
      body += "\n";
    }
    const TempFile f(body);
    CHECK(load_profiles(f.path).size() == 1450);
  }

  SECTION("missing file") {
    CHECK_THROWS_AS(load_profiles("/nonexistent/p.csv"), ModelError);
  }
}

TEST_CASE("synthetic profiles") {
  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    Rng rs(seed);
    const Profile solar = synth_profile(rs, ProfileKind::Solar);
    for (int h : {0, 1, 2, 3, 4, 21, 22, 23}) CHECK(solar.values[h] == 0.0);
    double peak = 0.0;
    for (const double v : solar.values) {
      CHECK((v >= 0.0 && v <= 1.0));
      peak = std::max(peak, v);
    }
    CHECK(peak > 0.3);

    Rng rw(seed);
    const Profile wind = synth_profile(rw, ProfileKind::Wind);
    for (std::size_t h = 1; h < kHours; ++h)
      CHECK(std::abs(wind.values[h] - wind.values[h - 1]) <= 0.15 + 1e-12);
  }
}

TEST_CASE("spt instances") {
  const auto pool = synth_profile_pool(5, 16, ProfileKind::Wind);

  SECTION("fleet size and determinism") {
    Rng a(11), b(11);
    const SptInstance ia = make_spt_instance(a, 3, pool);
    const SptInstance ib = make_spt_instance(b, 3, pool);
    CHECK(ia.fleet.size() == 3);
    CHECK(ia.digest() == ib.digest());
  }

  SECTION("no renewables leaves the scaled demand shape") {
    Rng rng(12);
    const SptInstance inst = make_spt_instance(rng, 2, pool, 1.2, 0.0);
    double mean_pd = 0.0;
    for (const auto& [p, init] : inst.fleet) mean_pd += p.p_d_max;
    mean_pd /= 2.0;
    for (std::size_t h = 0; h < kHours; ++h) {
      CHECK(inst.signal[h] >= 0.0);
      CHECK_THAT(inst.signal[h],
                 Catch::Matchers::WithinRel(demand_shape()[h] * 1.2 * mean_pd, 1e-12));
    }
  }

  SECTION("default scaling produces sign changes") {
    int with_both_signs = 0;
    for (int i = 0; i < 100; ++i) {
      Rng rng(child_seed(77, i, "spt"));
      const SptInstance inst = make_spt_instance(rng, 1, pool);
      bool pos = false, neg = false;
      for (const double s : inst.signal) (s > 0 ? pos : neg) = true;
      with_both_signs += pos && neg;
    }
    CHECK(with_both_signs == 100);
  }

  SECTION("empty pool rejected") {
    Rng rng(1);
    CHECK_THROWS_AS(make_spt_instance(rng, 1, {}), ModelError);
  }
}

TEST_CASE("tep instances") {
  const auto pool = synth_profile_pool(6, 16, ProfileKind::Wind);

  SECTION("shape") {
    Rng rng(21);
    const TepInstance inst = make_tep_instance(rng, 2, 5, pool);
    CHECK(inst.fleet.size() == 2);
    REQUIRE(inst.res_profiles.size() == 3);
    for (const auto& per_node : inst.res_profiles) CHECK(per_node.size() == 5);
    REQUIRE(inst.demand.size() == 3);
    CHECK(inst.demand[2][18] == 60.0);  // peak hour at the load node
    CHECK(inst.demand[0][18] == 0.0);
  }

  SECTION("single day") {
    Rng rng(22);
    CHECK(make_tep_instance(rng, 1, 1, pool).res_profiles[0].size() == 1);
  }

  SECTION("determinism") {
    Rng a(23), b(23);
    CHECK(make_tep_instance(a, 1, 2, pool).digest() ==
          make_tep_instance(b, 1, 2, pool).digest());
  }

  SECTION("bad inputs") {
    Rng rng(24);
    CHECK_THROWS_AS(make_tep_instance(rng, 1, 0, pool), ModelError);
    CHECK_THROWS_AS(make_tep_instance(rng, 1, 1, {}), ModelError);
  }
}

TEST_CASE("checked-in dataset file matches the built-in defaults") {
  const TepDataset file = load_tep_dataset("data/tep_default.json");
  const TepDataset code = default_tep_dataset();
  CHECK(tep_dataset_to_json(file).dump() == tep_dataset_to_json(code).dump());
}

TEST_CASE("child seeds are order independent") {
  std::vector<std::string> forward, backward;
  const auto pool = synth_profile_pool(9, 8, ProfileKind::Solar);
  for (int i = 0; i < 5; ++i) {
    Rng rng(child_seed(123, i, "spt"));
    forward.push_back(make_spt_instance(rng, 2, pool).digest());
  }
  for (int i = 4; i >= 0; --i) {
    Rng rng(child_seed(123, i, "spt"));
    backward.push_back(make_spt_instance(rng, 2, pool).digest());
  }
  for (int i = 0; i < 5; ++i) CHECK(forward[i] == backward[4 - i]);
  CHECK(child_seed(1, 0, "spt") != child_seed(1, 0, "tep"));
  CHECK(child_seed(1, 0, "spt") != child_seed(2, 0, "spt"));
  CHECK(child_seed(1, 0, "spt") != child_seed(1, 1, "spt"));
}
