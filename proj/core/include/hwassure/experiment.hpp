#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "hwassure/locking.hpp"
#include "hwassure/oracle.hpp"
#include "hwassure/psc_estimation.hpp"
#include "hwassure/sat_attack.hpp"
#include "hwassure/sat_estimation.hpp"

namespace hwassure {

/// Invalid experiment configuration; maps to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// ------------------------------------------------------------ attack setup

/// A locked design prepared for the attack at one compression ratio.
struct AttackInstance {
  LockedCircuit locked;      // IP-level locked netlist
  LockedCircuit access;      // what the oracle simulates (scan-wrapped when requested)
  LockedCircuit model;       // what the attacker solves over
  std::optional<ScanTopology> topology;  // set when access goes through scan
  CircuitMetadata metadata;  // features recorded in the dataset
  std::unique_ptr<Oracle> make_oracle() const;
};

/// Locks `circuit` with k random key gates (seeded). Sequential circuits are
/// accessed through scan with `chains` chains at ratio `cr`; combinational
/// circuits are used directly, or through a scan wrapper when `wrap_io`.
AttackInstance prepare_attack(const Circuit& circuit, std::size_t key_length, std::uint64_t seed, std::size_t cr,
                              std::size_t chains = 16, bool wrap_io = false);

// ------------------------------------------------------------ config

struct AttackTask {
  std::vector<std::filesystem::path> benchmarks;
  std::vector<std::size_t> key_lengths;
  std::vector<std::size_t> crs{1};
  std::vector<std::uint64_t> seeds;
  std::size_t chains = 16;
  bool wrap_io = false;
  double timeout_s = 3600.0;
  std::uint64_t max_iterations = 0;
  std::string solver = "builtin";
  bool verify = true;
};

struct SatFitTask {
  std::string dataset;  // path or @task
  CostMetric metric = CostMetric::ElapsedSeconds;
  std::size_t max_submodels = 20;
};

struct SatEstimateTask {
  std::string model;  // path or @task
  CircuitMetadata metadata;
  std::vector<double> crs;
  double ip_time_s = 1.0;
};

struct NoiseIpSpec {
  std::filesystem::path bench;
  std::optional<std::uint64_t> seed;  // derived from the run seed when absent
  std::vector<bool> schedule;
};

struct PscMeasureTask {
  AesBlock key1{};
  AesBlock key2{};
  bool aes_enabled = true;
  std::vector<NoiseIpSpec> noise_ips;
  std::vector<std::size_t> noise_counts;  // prefixes of noise_ips; default all
  std::size_t plaintexts = 1000;
  std::vector<std::uint64_t> seeds;
  std::size_t bins = kDefaultJsBins;
  ScoreThresholds thresholds;
};

struct PscDbTask {
  std::vector<std::filesystem::path> benchmarks;
  std::size_t cycles = 11000;
  std::optional<std::uint64_t> seed;  // config seed when absent
};

struct PscEstimateTask {
  std::string db;  // directory or @task
  std::vector<std::filesystem::path> queries;
  AesBlock key1{};
  AesBlock key2{};
  std::vector<std::size_t> noise_counts;
  std::size_t plaintexts = 1000;
  std::vector<std::uint64_t> seeds;
  std::size_t bins = kDefaultJsBins;
  ScoreThresholds thresholds;
};

struct MetricsTask {
  std::string metric;  // scoap | oh | fsm-fi | puf | cdc
  nlohmann::json params;
};

using TaskBody =
    std::variant<AttackTask, SatFitTask, SatEstimateTask, PscMeasureTask, PscDbTask, PscEstimateTask, MetricsTask>;

struct TaskSpec {
  std::string name;
  std::string kind;
  TaskBody body;
};

struct ExperimentConfig {
  std::string name;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::filesystem::path output_dir;  // relative paths resolve at run time
  std::vector<TaskSpec> tasks;
};

/// Relative paths inside the config resolve against `base_dir`. Throws
/// ConfigError on anything invalid, including missing input files.
ExperimentConfig parse_experiment_config(const nlohmann::json& config, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// ------------------------------------------------------------ batch

struct BatchOverrides {
  std::optional<std::size_t> workers;
  std::optional<double> timeout_s;
  std::optional<std::string> solver;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
};

struct BatchResult {
  std::filesystem::path output_dir;
  std::size_t runs = 0;
  std::vector<std::string> failures;
  int exit_code() const { return failures.empty() ? 0 : 1; }
};

/// Executes every task in order. Each task writes under <out>/<task name>/;
/// runs within a task execute on up to `workers` threads and are written in
/// grid order. <out>/summary.json lists every run and failure.
BatchResult run_batch(const ExperimentConfig& config, const BatchOverrides& overrides = {},
                      std::ostream* log = nullptr);

// ------------------------------------------------------------ reports

enum class RecordKind { Sat, Psc, Metrics };
std::string_view to_string(RecordKind kind);
RecordKind record_kind_from_string(std::string_view s);

struct Report {
  std::string summary;
  /// (file name, CSV text); the first entry is the main table.
  std::vector<std::pair<std::string, std::string>> tables;
};

/// Records must all carry "kind" equal to `kind`.
Report make_report(RecordKind kind, const std::vector<nlohmann::json>& records);

/// Reads every run record (*.json with a "kind" field) under `directory`.
std::vector<nlohmann::json> load_records(const std::filesystem::path& directory);

// ------------------------------------------------------------ determinism

/// Per-file canonical text for every regular file under `directory`, keyed by
/// relative path. JSON drops "*elapsed_s" and "wall_*" keys; CSV drops
/// columns with those names.
std::map<std::string, std::string> canonical_outputs(const std::filesystem::path& directory);

}  // namespace hwassure
