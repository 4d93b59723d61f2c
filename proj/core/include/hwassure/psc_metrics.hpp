#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hwassure/powersim.hpp"

namespace hwassure {

/// Exact empirical mass function over integer support, sorted ascending.
struct EmpiricalDistribution {
  std::vector<std::int64_t> support;
  std::vector<double> probabilities;
  std::size_t sample_count = 0;
};

EmpiricalDistribution build_distribution(std::span<const std::uint64_t> samples);
EmpiricalDistribution build_distribution(std::span<const std::int64_t> samples);

inline constexpr double kKlEpsilon = 1e-9;

/// Sum of p log2(p / q~) with q~ = (q + eps) / (1 + eps |support|) over the
/// union support.
double kl_divergence(const EmpiricalDistribution& p, const EmpiricalDistribution& q);

/// Jensen-Shannon divergence, log base 2, in [0, 1].
double js_divergence(const EmpiricalDistribution& p, const EmpiricalDistribution& q);

inline constexpr std::size_t kDefaultJsBins = 32;

struct DistributionPair {
  EmpiricalDistribution first;
  EmpiricalDistribution second;
};

/// Histograms of two sample sets on shared equal-width bins spanning their
/// pooled range. bins == 0 keeps the exact integer support.
DistributionPair binned_distributions(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                      std::size_t bins);

double js_divergence(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                     std::size_t bins = kDefaultJsBins);

/// Welch's t statistic (mu_r - mu_f) / sqrt(s_r^2/n_r + s_f^2/n_f) with
/// unbiased sample variances.
double tvla(std::span<const double> fixed_samples, std::span<const double> random_samples);

/// Var(signal) / Var(noise), population variances.
double snr(std::span<const double> signal, std::span<const double> noise);

double scv(double mean_power_hi, double mean_power_hj, double noise_power);

/// 1 / (snr rho0^2). Proportional to the number of traces; no absolute constant.
double mtd_relative(double snr, double rho0);

double success_rate(std::uint64_t successes, std::uint64_t attempts);

/// js < cuts[0] scores 5, js < cuts[1] scores 4, ... , otherwise 1.
/// The default cut points are a calibration choice, not measured data.
struct ScoreThresholds {
  std::array<double, 4> cuts{0.05, 0.12, 0.20, 0.30};
  std::string profile = "default";
  void validate() const;
};

int security_score(double js, const ScoreThresholds& thresholds = {});

/// Per-cycle JS between the two key runs: values[cycle][block], blocks are
/// subsystem, aes, then the noise IPs.
struct JsMatrix {
  std::vector<std::string> blocks;
  std::vector<std::vector<double>> values;
  /// Maximum subsystem entry over cycles.
  double headline() const;
};

JsMatrix per_cycle_js_matrix(const SubsystemProfiles& key1, const SubsystemProfiles& key2,
                             std::size_t cycles_per_encryption, std::size_t bins = kDefaultJsBins);

/// Rows are cycles, columns are blocks.
std::string to_csv(const JsMatrix& matrix);

nlohmann::json metric_report(const std::string& metric, double value, const nlohmann::json& params,
                             const ScoreThresholds& thresholds);

struct PscMeasurement {
  double js = 0.0;             // per-encryption subsystem JS
  double js_aes_only = 0.0;    // AES block alone, same plaintexts
  double js_cycle_max = 0.0;   // headline of the per-cycle matrix
  int score = 0;
  JsMatrix matrix;
  SubsystemProfiles key1;      // per-encryption profiles
  SubsystemProfiles key2;
};

struct PscMeasureOptions {
  std::size_t plaintexts = 1000;
  std::uint64_t plaintext_seed = 1;
  std::size_t bins = kDefaultJsBins;
  ScoreThresholds thresholds;
};

/// Simulates the subsystem under both keys over the same plaintexts and
/// reports JS at both granularities.
PscMeasurement measure_psc(const SubsystemConfig& config, const AesBlock& key1, const AesBlock& key2,
                           const PscMeasureOptions& options);

}  // namespace hwassure
