#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "hwassure/experiment.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace hwassure;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("hwassure_exp_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json attack_config(const fs::path& out) {
  return {{"name", "grid"},
          {"seed", 7},
          {"output_dir", out.string()},
          {"tasks",
           {{{"name", "atk"},
             {"kind", "attack"},
             {"benchmarks", {testsupport::bench_path("c17")}},
             {"key_lengths", {4}},
             {"crs", {1, 2}}}}}};
}

std::string config_error(const json& j) {
  try {
    parse_experiment_config(j, testsupport::data_dir());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(PrepareAttack, CombinationalDirect) {
  const auto a = prepare_attack(testsupport::load("c17"), 4, 3, 1);
  EXPECT_FALSE(a.topology);
  EXPECT_EQ(a.model.key_length(), 4u);
  EXPECT_EQ(a.metadata.num_flip_flop_io, 0u);
  auto oracle = a.make_oracle();
  const auto r = sat_attack(a.model, *oracle);
  EXPECT_TRUE(verify_key(a.model, *oracle, r.recovered_key).equivalent);
}

TEST(PrepareAttack, WrappedGoesThroughScan) {
  const auto c = testsupport::load("c17");
  const auto a = prepare_attack(c, 4, 3, 2, 4, true);
  ASSERT_TRUE(a.topology);
  EXPECT_EQ(a.metadata.num_flip_flop_io, c.primary_inputs().size() + c.primary_outputs().size());
  auto oracle = a.make_oracle();
  const auto r = sat_attack(a.model, *oracle);
  ASSERT_EQ(r.status, AttackStatus::Success);
  auto check = a.make_oracle();
  EXPECT_TRUE(verify_key(a.model, *check, r.recovered_key).equivalent);
}

TEST(Config, ParsesAttackGrid) {
  const auto c = parse_experiment_config(attack_config("out"), testsupport::data_dir());
  ASSERT_EQ(c.tasks.size(), 1u);
  const auto& t = std::get<AttackTask>(c.tasks[0].body);
  EXPECT_EQ(t.crs, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(t.chains, 16u);
  EXPECT_DOUBLE_EQ(t.timeout_s, 3600.0);
}

TEST(Config, RejectsBadInput) {
  auto j = attack_config("out");
  j["bogus"] = 1;
  EXPECT_NE(config_error(j).find("unknown key 'bogus'"), std::string::npos);

  j = attack_config("out");
  j.erase("seed");
  EXPECT_NE(config_error(j).find("seed"), std::string::npos);

  j = attack_config("out");
  j["tasks"][0]["benchmarks"] = {"nope.bench"};
  EXPECT_NE(config_error(j).find("not found"), std::string::npos);

  j = attack_config("out");
  j["tasks"][0]["crs"] = {3};
  EXPECT_NE(config_error(j).find("does not divide"), std::string::npos);

  j = attack_config("out");
  j["tasks"][0]["key_lengths"] = {-1};
  EXPECT_FALSE(config_error(j).empty());

  j = attack_config("out");
  j["tasks"][0]["kind"] = "dance";
  EXPECT_NE(config_error(j).find("unknown kind"), std::string::npos);

  j = attack_config("out");
  j["tasks"].push_back({{"name", "fit"}, {"kind", "sat-fit"}, {"dataset", "@later"}});
  EXPECT_NE(config_error(j).find("unknown or later task"), std::string::npos);

  j = attack_config("out");
  j["tasks"].push_back({{"name", "atk"}, {"kind", "sat-fit"}, {"dataset", "@atk"}});
  EXPECT_NE(config_error(j).find("duplicate"), std::string::npos);

  j = attack_config("out");
  j["tasks"].push_back({{"name", "est"}, {"kind", "psc-estimate"}, {"db", "@atk"}, {"queries", json::array()},
                        {"key1", "00"}, {"key2", "01"}});
  EXPECT_NE(config_error(j).find("not a psc-db task"), std::string::npos);

  j = attack_config("out");
  j["tasks"][0] = {{"name", "m"}, {"kind", "psc-measure"}, {"key1", "zz"}, {"key2", "00"}};
  EXPECT_FALSE(config_error(j).empty());

  j = attack_config("out");
  j["tasks"][0] = {{"name", "m"}, {"kind", "psc-measure"}, {"key1", std::string(32, '0')},
                   {"key2", std::string(32, '1')}, {"thresholds", {0.3, 0.2, 0.1, 0.05}}};
  EXPECT_FALSE(config_error(j).empty());
}

TEST(Batch, GridArityAndRollup) {
  const auto dir = scratch("grid");
  const auto res = run_batch(parse_experiment_config(attack_config(dir), testsupport::data_dir()));
  EXPECT_EQ(res.exit_code(), 0);
  EXPECT_EQ(res.runs, 2u);
  EXPECT_TRUE(fs::exists(dir / "atk/runs/c17_k4_cr1_s7.json"));
  EXPECT_TRUE(fs::exists(dir / "atk/runs/c17_k4_cr2_s7.json"));
  const auto records = load_records(dir);
  ASSERT_EQ(records.size(), 2u);
  for (const auto& r : records) {
    EXPECT_EQ(r["status"], "success");
    EXPECT_TRUE(r["verified"].get<bool>());
  }
  std::istringstream rollup(testsupport::load_text((dir / "atk/rollup.csv").string()));
  std::string line;
  int lines = 0;
  while (std::getline(rollup, line)) ++lines;
  EXPECT_EQ(lines, 3);
  const auto dataset = read_dataset_csv((dir / "atk/dataset.csv").string());
  EXPECT_EQ(dataset.size(), 2u);
}

TEST(Batch, RerunIsCanonicallyIdentical) {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  BatchOverrides wide;
  wide.workers = 3;
  const auto cfg_a = parse_experiment_config(attack_config(a), testsupport::data_dir());
  const auto cfg_b = parse_experiment_config(attack_config(b), testsupport::data_dir());
  run_batch(cfg_a);
  run_batch(cfg_b, wide);
  EXPECT_EQ(canonical_outputs(a), canonical_outputs(b));
}

TEST(Batch, SeedOverrideChangesRunIds) {
  const auto dir = scratch("seed");
  BatchOverrides o;
  o.seed = 11;
  run_batch(parse_experiment_config(attack_config(dir), testsupport::data_dir()), o);
  EXPECT_TRUE(fs::exists(dir / "atk/runs/c17_k4_cr1_s11.json"));
}

TEST(Batch, IterationCapIsAFailure) {
  const auto dir = scratch("cap");
  auto j = attack_config(dir);
  j["tasks"][0]["benchmarks"] = {testsupport::bench_path("c432")};
  j["tasks"][0]["key_lengths"] = {16};
  j["tasks"][0]["crs"] = {1};
  j["tasks"][0]["max_iterations"] = 1;
  const auto res = run_batch(parse_experiment_config(j, testsupport::data_dir()));
  EXPECT_EQ(res.exit_code(), 1);
  ASSERT_EQ(res.failures.size(), 1u);
  const auto summary = json::parse(testsupport::load_text((dir / "summary.json").string()));
  EXPECT_EQ(summary["exit_code"], 1);
}

TEST(Report, EmptyGivesHeadersOnly) {
  for (auto kind : {RecordKind::Sat, RecordKind::Psc, RecordKind::Metrics}) {
    const auto r = make_report(kind, {});
    ASSERT_FALSE(r.tables.empty());
    const auto& csv = r.tables.front().second;
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1) << to_string(kind);
  }
}

TEST(Report, CrSeriesGivesOneRowPerCr) {
  std::vector<json> records;
  for (int cr : {1, 2, 4, 8, 16})
    for (int s = 0; s < 3; ++s)
      records.push_back({{"kind", "sat"},
                         {"design", "c499"},
                         {"key_length", 32},
                         {"cr", cr},
                         {"status", "success"},
                         {"iterations", cr + s},
                         {"elapsed_s", 0.5}});
  const auto r = make_report(RecordKind::Sat, records);
  const auto& csv = r.tables.front().second;
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_NE(csv.find("c499,32,16,3,3,17,"), std::string::npos);
}

TEST(Report, MixedKindsRejected) {
  std::vector<json> records{{{"kind", "sat"}}, {{"kind", "psc"}}};
  EXPECT_THROW(make_report(RecordKind::Sat, records), Error);
  EXPECT_THROW(record_kind_from_string("power"), Error);
}

TEST(Report, PscMatrixTableIsCyclesByBlocks) {
  json rec{{"kind", "psc"},  {"mode", "measure"}, {"id", "n1_s1"}, {"noise_count", 1}, {"js", 0.2}, {"score", 3},
           {"matrix", {{"blocks", {"subsystem", "aes", "ip0"}}, {"values", std::vector<std::vector<double>>(11, {0.1, 0.2, 0.3})}}}};
  const auto r = make_report(RecordKind::Psc, {rec});
  ASSERT_EQ(r.tables.size(), 2u);
  const auto& m = r.tables[1].second;
  EXPECT_EQ(std::count(m.begin(), m.end(), '\n'), 12);
  EXPECT_EQ(m.substr(0, m.find('\n')), "cycle,subsystem,aes,ip0");
}

TEST(Canonical, DropsWallClockFields) {
  const auto a = scratch("canon_a");
  const auto b = scratch("canon_b");
  testsupport::save_text((a / "r.json").string(), R"({"x":1,"elapsed_s":0.3,"nested":{"wall_start":5}})");
  testsupport::save_text((b / "r.json").string(), R"({"x":1,"elapsed_s":9.1,"nested":{"wall_start":6}})");
  testsupport::save_text((a / "t.csv").string(), "id,elapsed_s,it\na,0.1,3\n");
  testsupport::save_text((b / "t.csv").string(), "id,elapsed_s,it\na,0.7,3\n");
  EXPECT_EQ(canonical_outputs(a), canonical_outputs(b));
  testsupport::save_text((b / "t.csv").string(), "id,elapsed_s,it\na,0.7,4\n");
  EXPECT_NE(canonical_outputs(a), canonical_outputs(b));
}

TEST(Batch, PscAndMetricsTasks) {
  const auto dir = scratch("psc");
  const auto data = testsupport::data_dir();
  json j{{"name", "psc"},
         {"seed", 3},
         {"output_dir", dir.string()},
         {"tasks",
          {{{"name", "measure"},
            {"kind", "psc-measure"},
            {"key1", std::string(32, '0')},
            {"key2", std::string(32, 'f')},
            {"noise_ips", {{{"bench", "benchmarks/c17.bench"}}, {{"bench", "benchmarks/s27.bench"}, {"schedule", "10"}}}},
            {"noise_counts", {0, 2}},
            {"plaintexts", 50}},
           {{"name", "db"}, {"kind", "psc-db"}, {"benchmarks", {"benchmarks/c17.bench", "benchmarks/s27.bench"}}, {"cycles", 600}},
           {{"name", "est"},
            {"kind", "psc-estimate"},
            {"db", "@db"},
            {"queries", {"benchmarks/s27.bench"}},
            {"key1", std::string(32, '0')},
            {"key2", std::string(32, 'f')},
            {"plaintexts", 50}},
           {{"name", "scoap"}, {"kind", "metrics"}, {"metric", "scoap"}, {"bench", "benchmarks/c17.bench"}}}}};
  const auto res = run_batch(parse_experiment_config(j, data));
  EXPECT_EQ(res.exit_code(), 0) << (res.failures.empty() ? "" : res.failures[0]);
  EXPECT_TRUE(fs::exists(dir / "measure/runs/n2_s3_matrix.csv"));
  EXPECT_TRUE(fs::exists(dir / "db/db/index.csv"));
  EXPECT_TRUE(fs::exists(dir / "scoap/nets.csv"));
  const auto est = json::parse(testsupport::load_text((dir / "est/runs/n1_s3.json").string()));
  EXPECT_EQ(est["mapped"][0]["profile"], "s27");
  EXPECT_GE(est["js"].get<double>(), 0.0);
  EXPECT_LE(est["js"].get<double>(), 1.0);
}
