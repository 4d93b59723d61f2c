#include "hwassure/sat_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "text_util.hpp"

namespace hwassure {

Quadratic fit_quadratic(std::span<const std::pair<double, double>> points) {
  std::set<double> distinct;
  for (const auto& [x, y] : points) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw Error("non-finite fit point");
    distinct.insert(x);
  }
  if (distinct.size() < 3)
    throw Error("quadratic fit needs at least 3 distinct CR values, got " + std::to_string(distinct.size()));
  Eigen::MatrixXd a(points.size(), 3);
  Eigen::VectorXd b(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i].first;
    a(static_cast<Eigen::Index>(i), 0) = 1.0;
    a(static_cast<Eigen::Index>(i), 1) = x;
    a(static_cast<Eigen::Index>(i), 2) = x * x;
    b(static_cast<Eigen::Index>(i)) = points[i].second;
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  return Quadratic{c(0), c(1), c(2)};
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error("cosine similarity needs vectors of equal dimension");
  double dot = 0, nu = 0, nv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0 || nv == 0) throw Error("cosine similarity of a zero vector");
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), 0.0, 1.0);
}

FeatureVector features(const CircuitMetadata& m) {
  return {static_cast<double>(m.key_length), static_cast<double>(m.num_gates),
          static_cast<double>(m.num_primary_inputs), static_cast<double>(m.num_primary_outputs),
          static_cast<double>(m.num_flip_flop_io)};
}

namespace {

FeatureVector scaled(const CircuitMetadata& m, const FeatureVector& scales) {
  auto f = features(m);
  for (std::size_t i = 0; i < kNumFeatures; ++i) f[i] /= scales[i];
  return f;
}

double distance2(const FeatureVector& a, const FeatureVector& b) {
  double d = 0;
  for (std::size_t i = 0; i < kNumFeatures; ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
  return d;
}

}  // namespace

EstimationModel build_estimation_model(std::span<const ExperimentRecord> records, std::size_t max_submodels,
                                       CostMetric metric) {
  if (max_submodels == 0) throw Error("model needs at least one submodel");
  // Groups in first-appearance order.
  std::vector<std::pair<std::string, std::size_t>> order;
  std::map<std::pair<std::string, std::size_t>, std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records) {
    if (r.cr < 1) throw Error("record for '" + r.metadata.name + "' has CR below 1");
    const auto key = std::make_pair(r.metadata.name, r.metadata.key_length);
    auto& g = groups[key];
    if (g.empty()) order.push_back(key);
    g.push_back(&r);
  }

  std::vector<SubModel> candidates;
  for (const auto& key : order) {
    std::map<double, std::pair<double, std::size_t>> per_cr;  // cr -> (sum, count)
    for (const auto* r : groups[key]) {
      const double cost = metric == CostMetric::Iterations ? static_cast<double>(r->iterations) : r->elapsed_seconds;
      auto& slot = per_cr[r->cr];
      slot.first += cost;
      ++slot.second;
    }
    if (per_cr.size() < 3 || !per_cr.count(1.0)) continue;
    const double base = per_cr[1.0].first / static_cast<double>(per_cr[1.0].second);
    if (!(base > 0)) continue;
    SubModel s;
    s.metadata = groups[key].front()->metadata;
    for (const auto& [cr, acc] : per_cr) s.points.emplace_back(cr, acc.first / static_cast<double>(acc.second) / base);
    s.coefficients = fit_quadratic(s.points);
    candidates.push_back(std::move(s));
  }
  if (candidates.empty()) throw Error("no design has at least 3 distinct CR values including CR=1");

  EstimationModel model;
  for (std::size_t i = 0; i < kNumFeatures; ++i) {
    double mx = 0;
    for (const auto& r : records) mx = std::max(mx, features(r.metadata)[i]);
    model.feature_scales[i] = mx > 0 ? mx : 1.0;
  }

  std::vector<FeatureVector> pts;
  for (const auto& s : candidates) pts.push_back(scaled(s.metadata, model.feature_scales));
  std::vector<bool> taken(candidates.size(), false);
  std::vector<double> nearest(candidates.size(), std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  for (std::size_t round = 0; round < std::min(max_submodels, candidates.size()); ++round) {
    taken[next] = true;
    model.sub_models.push_back(candidates[next]);
    for (std::size_t i = 0; i < candidates.size(); ++i) nearest[i] = std::min(nearest[i], distance2(pts[i], pts[next]));
    double best = -1;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (!taken[i] && nearest[i] > best) {
        best = nearest[i];
        next = i;
      }
  }
  return model;
}

Selection select_submodel(const EstimationModel& model, const CircuitMetadata& metadata) {
  if (model.sub_models.empty()) throw Error("estimation model has no submodels");
  const auto q = scaled(metadata, model.feature_scales);
  Selection best{0, -1.0};
  std::size_t best_gap = 0;
  for (std::size_t i = 0; i < model.sub_models.size(); ++i) {
    const auto& m = model.sub_models[i].metadata;
    const double s = cosine_similarity(q, scaled(m, model.feature_scales));
    const auto gap = m.num_gates > metadata.num_gates ? m.num_gates - metadata.num_gates
                                                      : metadata.num_gates - m.num_gates;
    const bool tie = std::abs(s - best.similarity) <= 1e-12;
    if ((!tie && s > best.similarity) || (tie && gap < best_gap)) {
      best = {i, s};
      best_gap = gap;
    }
  }
  return best;
}

double estimate_attack_time(const EstimationModel& model, const CircuitMetadata& metadata, double cr,
                            double ip_level_seconds) {
  if (cr < 1) throw Error("CR must be at least 1");
  if (!(ip_level_seconds > 0)) throw Error("IP-level attack time must be positive");
  const auto& sub = model.sub_models[select_submodel(model, metadata).index];
  return ip_level_seconds * std::max(sub.coefficients(cr), kMultiplierFloor);
}

// ---------------------------------------------------------------- I/O

namespace {

nlohmann::json metadata_json(const CircuitMetadata& m) {
  return {{"name", m.name},
          {"key_length", m.key_length},
          {"num_gates", m.num_gates},
          {"num_pi", m.num_primary_inputs},
          {"num_po", m.num_primary_outputs},
          {"num_ffio", m.num_flip_flop_io}};
}

CircuitMetadata metadata_from(const nlohmann::json& j) {
  CircuitMetadata m;
  m.name = j.at("name").get<std::string>();
  m.key_length = j.at("key_length").get<std::size_t>();
  m.num_gates = j.at("num_gates").get<std::size_t>();
  m.num_primary_inputs = j.at("num_pi").get<std::size_t>();
  m.num_primary_outputs = j.at("num_po").get<std::size_t>();
  m.num_flip_flop_io = j.at("num_ffio").get<std::size_t>();
  return m;
}

}  // namespace

nlohmann::json to_json(const EstimationModel& model) {
  nlohmann::json subs = nlohmann::json::array();
  for (const auto& s : model.sub_models) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& [x, y] : s.points) pts.push_back({x, y});
    subs.push_back({{"metadata", metadata_json(s.metadata)},
                    {"coefficients", {s.coefficients.a0, s.coefficients.a1, s.coefficients.a2}},
                    {"points", pts}});
  }
  return {{"featureScales", model.feature_scales}, {"subModels", subs}};
}

EstimationModel estimation_model_from_json(const nlohmann::json& j) {
  EstimationModel model;
  try {
    const auto scales = j.at("featureScales").get<std::vector<double>>();
    if (scales.size() != kNumFeatures) throw Error("featureScales needs 5 entries");
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
      if (!(scales[i] > 0)) throw Error("featureScales must be positive");
      model.feature_scales[i] = scales[i];
    }
    for (const auto& s : j.at("subModels")) {
      SubModel sub;
      sub.metadata = metadata_from(s.at("metadata"));
      const auto c = s.at("coefficients").get<std::vector<double>>();
      if (c.size() != 3) throw Error("submodel needs 3 coefficients");
      sub.coefficients = {c[0], c[1], c[2]};
      if (s.contains("points"))
        for (const auto& p : s.at("points")) sub.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
      model.sub_models.push_back(std::move(sub));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad estimation model: ") + e.what());
  }
  if (model.sub_models.empty()) throw Error("estimation model has no submodels");
  return model;
}

std::string dataset_csv_header() { return "name,key_length,num_gates,num_pi,num_po,num_ffio,cr,elapsed_s,iterations"; }

std::string to_dataset_csv_row(const ExperimentRecord& r) {
  const auto& m = r.metadata;
  std::ostringstream out;
  out << m.name << ',' << m.key_length << ',' << m.num_gates << ',' << m.num_primary_inputs << ','
      << m.num_primary_outputs << ',' << m.num_flip_flop_io << ',' << format_double(r.cr) << ','
      << format_double(r.elapsed_seconds) << ',' << r.iterations;
  return out.str();
}

std::vector<ExperimentRecord> parse_dataset_csv(std::string_view text) {
  std::vector<ExperimentRecord> out;
  const auto rows = parse_csv(text);
  if (rows.empty()) return out;
  const auto& header = rows.front();
  const std::vector<std::string> want = split_csv_line(dataset_csv_header());
  if (header != want) throw ParseError(1, "dataset header must be '" + dataset_csv_header() + "'");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    const auto line = i + 1;
    if (f.size() != want.size()) throw ParseError(line, "expected " + std::to_string(want.size()) + " fields");
    ExperimentRecord r;
    r.metadata.name = f[0];
    r.metadata.key_length = parse_count(f[1], line);
    r.metadata.num_gates = parse_count(f[2], line);
    r.metadata.num_primary_inputs = parse_count(f[3], line);
    r.metadata.num_primary_outputs = parse_count(f[4], line);
    r.metadata.num_flip_flop_io = parse_count(f[5], line);
    r.cr = parse_number(f[6], line);
    r.elapsed_seconds = parse_number(f[7], line);
    r.iterations = parse_count(f[8], line);
    if (r.cr < 1) throw ParseError(line, "cr must be at least 1");
    if (!(r.elapsed_seconds > 0)) throw ParseError(line, "elapsed_s must be positive");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentRecord> read_dataset_csv(const std::string& path) { return parse_dataset_csv(read_text_file(path)); }

}  // namespace hwassure
