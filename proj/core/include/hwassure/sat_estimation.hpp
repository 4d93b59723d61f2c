#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hwassure/netlist.hpp"

namespace hwassure {

struct ExperimentRecord {
  CircuitMetadata metadata;
  double cr = 1.0;
  double elapsed_seconds = 0.0;
  std::uint64_t iterations = 0;
};

/// a0 + a1 x + a2 x^2
struct Quadratic {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;
  double operator()(double x) const { return a0 + x * (a1 + x * a2); }
};

/// Least-squares quadratic through (cr, multiplier) points.
Quadratic fit_quadratic(std::span<const std::pair<double, double>> points);

double cosine_similarity(std::span<const double> u, std::span<const double> v);

inline constexpr std::size_t kNumFeatures = 5;
using FeatureVector = std::array<double, kNumFeatures>;

/// (keyLength, numGates, numPI, numPO, numFFIO)
FeatureVector features(const CircuitMetadata& metadata);

struct SubModel {
  CircuitMetadata metadata;
  Quadratic coefficients;
  std::vector<std::pair<double, double>> points;
};

struct EstimationModel {
  std::vector<SubModel> sub_models;
  FeatureVector feature_scales{1, 1, 1, 1, 1};
};

/// Which record field drives the multiplier. Iteration counts give a
/// machine-independent model.
enum class CostMetric { ElapsedSeconds, Iterations };

/// Groups records per design (name, key length), turns each group with at
/// least three distinct ratios including 1 into a submodel, and keeps up to
/// `max_submodels` chosen by greedy farthest-point selection in scaled
/// feature space, starting from the first group.
EstimationModel build_estimation_model(std::span<const ExperimentRecord> records, std::size_t max_submodels = 20,
                                       CostMetric metric = CostMetric::ElapsedSeconds);

struct Selection {
  std::size_t index = 0;
  double similarity = 0.0;
};

/// Highest cosine similarity of scaled features; ties go to the smallest gate
/// count difference, then the lowest index.
Selection select_submodel(const EstimationModel& model, const CircuitMetadata& metadata);

inline constexpr double kMultiplierFloor = 0.01;

double estimate_attack_time(const EstimationModel& model, const CircuitMetadata& metadata, double cr,
                            double ip_level_seconds);

nlohmann::json to_json(const EstimationModel& model);
EstimationModel estimation_model_from_json(const nlohmann::json& j);

std::string dataset_csv_header();
std::string to_dataset_csv_row(const ExperimentRecord& record);
std::vector<ExperimentRecord> parse_dataset_csv(std::string_view text);
std::vector<ExperimentRecord> read_dataset_csv(const std::string& path);

}  // namespace hwassure
