#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hwassure/psc_metrics.hpp"

namespace hwassure {

/// Structural IP attributes in reference-table column order. num_gates is
/// the AND + NAND + OR + NOR total.
struct IpAttributes {
  std::size_t num_inputs = 0;
  std::size_t num_outputs = 0;
  std::size_t num_dff = 0;
  std::size_t num_inverters = 0;
  std::size_t num_gates = 0;
  std::size_t num_and = 0;
  std::size_t num_nand = 0;
  std::size_t num_or = 0;
  std::size_t num_nor = 0;

  std::array<double, 9> vector() const;
  bool operator==(const IpAttributes&) const = default;
};

/// Key inputs (keyinput<N>) are not counted. XOR, XNOR and BUF gates are not
/// part of any column.
IpAttributes extract_ip_attributes(const Circuit& circuit);

struct NamedAttributes {
  std::string name;
  IpAttributes attributes;
};

/// Published attribute rows of the sequential benchmarks used as subsystem
/// noise IPs.
std::span<const NamedAttributes> reference_ip_attributes();
const IpAttributes& reference_ip_attributes(std::string_view name);

/// Seeded random sequential netlist with exactly the requested attribute
/// counts. Every primary input and flop output has fanout.
Circuit generate_profile_circuit(const IpAttributes& attributes, std::uint64_t seed, const std::string& name);

struct BenchmarkProfile {
  std::string source_name;
  IpAttributes attributes;
  std::uint64_t stimulus_seed = 0;
  /// Per-cycle toggle trace under uniform random stimulus.
  SwitchingProfile profile;
};

struct ProfileDb {
  std::vector<BenchmarkProfile> entries;
  const BenchmarkProfile& find(std::string_view name) const;
};

/// Stimulus seed for circuit i is derive_seed(seed, i).
ProfileDb build_profile_db(std::span<const Circuit> circuits, std::size_t cycles, std::uint64_t seed);

/// Writes index.csv plus profiles/<name>.csv under `directory`.
void save_profile_db(const ProfileDb& db, const std::string& directory);
ProfileDb load_profile_db(const std::string& directory);
std::string profile_db_index_header();

struct IpMapping {
  std::size_t index = 0;
  double similarity = 0.0;
};

/// Cosine similarity of per-feature max-normalized attribute vectors. Ties
/// within 1e-12 go to the closest num_gates, then the smaller name.
IpMapping map_ip(const IpAttributes& query, const ProfileDb& db);

struct EstimateOptions {
  std::uint64_t seed = 1;
  std::size_t bins = kDefaultJsBins;
  std::size_t cycles_per_encryption = kAesCycles;
  ScoreThresholds thresholds;
};

struct PscEstimate {
  double js = 0.0;
  int score = 0;
};

/// Composite sample i = AES sample i + the mapped profiles' samples at i,
/// converted to the AES profile granularity. A mapped profile shorter than
/// the AES profile is resampled with replacement (seeded). The same noise
/// draw is added under both keys.
PscEstimate estimate_subsystem_score(const SwitchingProfile& aes_key1, const SwitchingProfile& aes_key2,
                                     std::span<const BenchmarkProfile* const> mapped, const EstimateOptions& options);

}  // namespace hwassure
