#include <gtest/gtest.h>

#include <filesystem>

#include "hwassure/psc_estimation.hpp"
#include "hwassure/rng.hpp"
#include "support.hpp"

using namespace hwassure;

namespace {

IpAttributes attrs(std::size_t in, std::size_t out, std::size_t dff, std::size_t inv, std::size_t a, std::size_t na,
                   std::size_t o, std::size_t no) {
  return {in, out, dff, inv, a + na + o + no, a, na, o, no};
}

BenchmarkProfile entry(std::string name, IpAttributes a) {
  BenchmarkProfile p;
  p.source_name = std::move(name);
  p.attributes = a;
  p.profile.granularity = Granularity::PerCycle;
  p.profile.samples = {1};
  return p;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hwassure_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(Attributes, SingleGate) {
  CircuitBuilder b("one");
  b.add_input("a");
  b.add_input("b");
  b.add_output("y");
  b.add_gate(GateKind::Nor, "y", {"a", "b"});
  const auto a = extract_ip_attributes(std::move(b).build());
  EXPECT_EQ(a, attrs(2, 1, 0, 0, 0, 0, 0, 1));
}

TEST(Attributes, KeyInputsAndXorsIgnored) {
  CircuitBuilder b("k");
  b.add_input("a");
  b.add_input("keyinput0");
  b.add_output("y");
  b.add_gate(GateKind::Xor, "y", {"a", "keyinput0"});
  const auto a = extract_ip_attributes(std::move(b).build());
  EXPECT_EQ(a.num_inputs, 1u);
  EXPECT_EQ(a.num_gates, 0u);
}

TEST(Attributes, ReferenceRows) {
  EXPECT_EQ(reference_ip_attributes().size(), 19u);
  EXPECT_EQ(reference_ip_attributes("s953"), attrs(16, 23, 29, 84, 49, 114, 36, 112));
  EXPECT_EQ(reference_ip_attributes("s953").num_gates, 311u);
  // Gates is the four-kind total, which the published s420 row does not follow.
  EXPECT_EQ(reference_ip_attributes("s420").num_gates, 120u);
  EXPECT_THROW(reference_ip_attributes("s9234"), Error);
}

TEST(ProfileCircuit, MatchesEveryReferenceRow) {
  for (const auto& row : reference_ip_attributes()) {
    const auto c = generate_profile_circuit(row.attributes, 4, row.name + "_syn");
    ASSERT_EQ(extract_ip_attributes(c), row.attributes) << row.name;
    std::vector<int> fanout(c.num_nets(), 0);
    for (const auto& g : c.gates())
      for (auto n : g.inputs) ++fanout[n];
    for (auto n : c.primary_inputs()) EXPECT_GT(fanout[n], 0) << row.name;
    for (auto ff : c.flip_flops()) EXPECT_GT(fanout[c.gate(ff).output], 0) << row.name;
  }
}

TEST(ProfileCircuit, Deterministic) {
  const auto& a = reference_ip_attributes("s298");
  EXPECT_TRUE(structurally_equal(generate_profile_circuit(a, 3, "x"), generate_profile_circuit(a, 3, "x")));
  EXPECT_FALSE(structurally_equal(generate_profile_circuit(a, 3, "x"), generate_profile_circuit(a, 4, "x")));
  auto bad = a;
  bad.num_gates += 1;
  EXPECT_THROW(generate_profile_circuit(bad, 1, "x"), Error);
}

TEST(ProfileDb, BuildSaveLoad) {
  std::vector<Circuit> cs{generate_profile_circuit(reference_ip_attributes("s953"), 1, "s953_syn"),
                          generate_profile_circuit(reference_ip_attributes("s298"), 1, "s298_syn")};
  const auto db = build_profile_db(cs, 220, 9);
  ASSERT_EQ(db.entries.size(), 2u);
  EXPECT_EQ(db.find("s953_syn").attributes, reference_ip_attributes("s953"));
  EXPECT_EQ(db.entries[1].stimulus_seed, derive_seed(9, 1));
  EXPECT_EQ(db.entries[0].profile.samples, simulate_circuit_toggles(cs[0], derive_seed(9, 0), 220).per_cycle);
  const auto again = build_profile_db(cs, 220, 9);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(again.entries[i].profile.samples, db.entries[i].profile.samples);

  const auto dir = scratch("db");
  save_profile_db(db, dir.string());
  const auto loaded = load_profile_db(dir.string());
  ASSERT_EQ(loaded.entries.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(loaded.entries[i].source_name, db.entries[i].source_name);
    EXPECT_EQ(loaded.entries[i].attributes, db.entries[i].attributes);
    EXPECT_EQ(loaded.entries[i].stimulus_seed, db.entries[i].stimulus_seed);
    EXPECT_EQ(loaded.entries[i].profile.samples, db.entries[i].profile.samples);
  }
  const auto index = testsupport::load_text((dir / "index.csv").string());
  EXPECT_EQ(index.substr(0, index.find('\n')), profile_db_index_header());
  EXPECT_THROW(db.find("nope"), Error);
  EXPECT_THROW(build_profile_db(std::span<const Circuit>{}, 10, 1), Error);
  std::filesystem::remove_all(dir);
}

TEST(ProfileDb, LoadRejectsBadIndex) {
  const auto dir = scratch("baddb");
  std::filesystem::create_directories(dir);
  testsupport::save_text((dir / "index.csv").string(), "name,inputs\nx,1\n");
  EXPECT_THROW(load_profile_db(dir.string()), ParseError);
  std::filesystem::remove_all(dir);
}

TEST(MapIp, ExactRowWins) {
  ProfileDb db;
  for (const auto& row : reference_ip_attributes()) db.entries.push_back(entry(row.name, row.attributes));
  const auto m = map_ip(reference_ip_attributes("s953"), db);
  EXPECT_EQ(db.entries[m.index].source_name, "s953");
  EXPECT_NEAR(m.similarity, 1.0, 1e-12);
}

TEST(MapIp, TieGoesToName) {
  ProfileDb db;
  const auto a = attrs(3, 2, 1, 4, 1, 2, 3, 4);
  db.entries = {entry("zeta", a), entry("alpha", a)};
  EXPECT_EQ(db.entries[map_ip(a, db).index].source_name, "alpha");
}

TEST(MapIp, HandComputedWinner) {
  // Two non-zero features after normalization; the rest are zero everywhere.
  ProfileDb db;
  db.entries = {entry("a", attrs(4, 0, 0, 0, 0, 0, 0, 0)), entry("b", attrs(0, 4, 0, 0, 0, 0, 0, 0)),
                entry("c", attrs(2, 4, 0, 0, 0, 0, 0, 0))};
  // Scaled query (3/4, 1/4): cos with a = 0.949, b = 0.316, c = (3/8 + 1/4)/(0.791 * 1.118) = 0.707.
  const auto q = attrs(3, 1, 0, 0, 0, 0, 0, 0);
  const auto m = map_ip(q, db);
  EXPECT_EQ(db.entries[m.index].source_name, "a");
  EXPECT_NEAR(m.similarity, 0.75 / std::sqrt(0.625), 1e-12);
  // Query (1/4, 1): cos with c = (1/8 + 1)/(1.031 * 1.118) = 0.976 beats b = 0.970.
  const auto m2 = map_ip(attrs(1, 4, 0, 0, 0, 0, 0, 0), db);
  EXPECT_EQ(db.entries[m2.index].source_name, "c");
}

TEST(MapIp, ScaleInvariant) {
  ProfileDb db, scaled;
  for (const auto& row : reference_ip_attributes()) {
    db.entries.push_back(entry(row.name, row.attributes));
    auto a = row.attributes;
    for (auto* f : {&a.num_inputs, &a.num_outputs, &a.num_dff, &a.num_inverters, &a.num_gates, &a.num_and,
                    &a.num_nand, &a.num_or, &a.num_nor})
      *f *= 3;
    scaled.entries.push_back(entry(row.name, a));
  }
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto q = attrs(rng.below(40), rng.below(50), rng.below(200), rng.below(300), rng.below(300),
                         rng.below(200), rng.below(200), rng.below(800));
    auto q3 = q;
    for (auto* f : {&q3.num_inputs, &q3.num_outputs, &q3.num_dff, &q3.num_inverters, &q3.num_gates, &q3.num_and,
                    &q3.num_nand, &q3.num_or, &q3.num_nor})
      *f *= 3;
    if (q.num_inputs + q.num_outputs + q.num_dff + q.num_inverters + q.num_gates == 0) continue;
    ASSERT_EQ(map_ip(q, db).index, map_ip(q3, scaled).index);
  }
}

class Estimation : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto pts = random_plaintexts(300, 4);
    cfg.granularity = Granularity::PerEncryption;
    a1 = simulate_subsystem(cfg, k1, pts).aes;
    a2 = simulate_subsystem(cfg, k2, pts).aes;
  }
  SubsystemConfig cfg;
  AesBlock k1 = parse_block("00000000000000000000000000000000");
  AesBlock k2 = parse_block("ffffffffffffffffffffffffffffffff");
  SwitchingProfile a1, a2;
};

TEST_F(Estimation, NoMappedIpsIsAesAlone) {
  const auto e = estimate_subsystem_score(a1, a2, {}, EstimateOptions{});
  EXPECT_EQ(e.js, js_divergence(a1.samples, a2.samples));
  EXPECT_EQ(e.score, security_score(e.js));
}

TEST_F(Estimation, ConstantNoiseLeavesJsUnchanged) {
  BenchmarkProfile flat = entry("flat", attrs(1, 1, 0, 0, 1, 0, 0, 0));
  flat.profile.samples.assign(300 * kAesCycles, 37);
  const BenchmarkProfile* mapped[] = {&flat};
  const auto e = estimate_subsystem_score(a1, a2, mapped, EstimateOptions{});
  EXPECT_EQ(e.js, js_divergence(a1.samples, a2.samples));
  // Short constant profile goes through resampling and still adds a constant.
  flat.profile.samples.assign(2 * kAesCycles, 5);
  EXPECT_EQ(estimate_subsystem_score(a1, a2, mapped, EstimateOptions{}).js, js_divergence(a1.samples, a2.samples));
}

TEST_F(Estimation, ExactDbMembersMatchMeasurement) {
  std::vector<Circuit> cs{generate_profile_circuit(reference_ip_attributes("s832"), 1, "s832_syn"),
                          generate_profile_circuit(reference_ip_attributes("s953"), 1, "s953_syn")};
  const auto db = build_profile_db(cs, 300 * kAesCycles, 17);
  auto noisy = cfg;
  for (const auto& e : db.entries) noisy.noise_ips.push_back({e.source_name, cs[&e - db.entries.data()], e.stimulus_seed, {}});
  PscMeasureOptions mo;
  mo.plaintexts = 300;
  mo.plaintext_seed = 4;
  const auto measured = measure_psc(noisy, k1, k2, mo);
  std::vector<const BenchmarkProfile*> mapped;
  for (const auto& e : db.entries) mapped.push_back(&db.entries[map_ip(e.attributes, db).index]);
  const auto est = estimate_subsystem_score(a1, a2, mapped, EstimateOptions{});
  EXPECT_NEAR(est.js, measured.js, 1e-12);
  EXPECT_LT(est.js, js_divergence(a1.samples, a2.samples));
}

TEST_F(Estimation, ResamplingIsSeeded) {
  BenchmarkProfile p = entry("p", attrs(1, 1, 0, 0, 1, 0, 0, 0));
  Rng rng(8);
  for (int i = 0; i < 50 * 11; ++i) p.profile.samples.push_back(rng.below(400));
  const BenchmarkProfile* mapped[] = {&p};
  EstimateOptions o;
  const auto x = estimate_subsystem_score(a1, a2, mapped, o);
  EXPECT_EQ(x.js, estimate_subsystem_score(a1, a2, mapped, o).js);
  o.seed = 99;
  EXPECT_NE(x.js, estimate_subsystem_score(a1, a2, mapped, o).js);
}
