#include "hwassure/psc_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "text_util.hpp"

namespace hwassure {

namespace {

template <typename T>
EmpiricalDistribution distribution_of(std::span<const T> samples) {
  if (samples.empty()) throw Error("distribution needs at least one sample");
  std::map<std::int64_t, std::size_t> counts;
  for (auto s : samples) ++counts[static_cast<std::int64_t>(s)];
  EmpiricalDistribution d;
  d.sample_count = samples.size();
  const auto n = static_cast<double>(samples.size());
  for (const auto& [v, c] : counts) {
    d.support.push_back(v);
    d.probabilities.push_back(static_cast<double>(c) / n);
  }
  return d;
}

// Walks the union of two supports in order.
template <typename F>
void merge_supports(const EmpiricalDistribution& p, const EmpiricalDistribution& q, F&& visit) {
  std::size_t i = 0, j = 0;
  while (i < p.support.size() || j < q.support.size()) {
    if (j == q.support.size() || (i < p.support.size() && p.support[i] < q.support[j])) {
      visit(p.probabilities[i++], 0.0);
    } else if (i == p.support.size() || q.support[j] < p.support[i]) {
      visit(0.0, q.probabilities[j++]);
    } else {
      visit(p.probabilities[i++], q.probabilities[j++]);
    }
  }
}

void check_distribution(const EmpiricalDistribution& d) {
  if (d.support.empty() || d.support.size() != d.probabilities.size())
    throw Error("distribution support and probabilities must be non-empty and aligned");
}

struct Moments {
  double mean = 0.0;
  double sq = 0.0;  // sum of squared deviations
  std::size_t n = 0;
};

Moments moments(std::span<const double> xs) {
  Moments m;
  m.n = xs.size();
  if (m.n == 0) return m;
  for (auto x : xs) m.mean += x;
  m.mean /= static_cast<double>(m.n);
  for (auto x : xs) m.sq += (x - m.mean) * (x - m.mean);
  return m;
}

}  // namespace

EmpiricalDistribution build_distribution(std::span<const std::uint64_t> samples) { return distribution_of(samples); }
EmpiricalDistribution build_distribution(std::span<const std::int64_t> samples) { return distribution_of(samples); }

double kl_divergence(const EmpiricalDistribution& p, const EmpiricalDistribution& q) {
  check_distribution(p);
  check_distribution(q);
  std::size_t support = 0;
  merge_supports(p, q, [&](double, double) { ++support; });
  const double norm = 1.0 + kKlEpsilon * static_cast<double>(support);
  double kl = 0.0;
  merge_supports(p, q, [&](double pv, double qv) {
    if (pv > 0.0) kl += pv * std::log2(pv / ((qv + kKlEpsilon) / norm));
  });
  return std::max(kl, 0.0);
}

double js_divergence(const EmpiricalDistribution& p, const EmpiricalDistribution& q) {
  check_distribution(p);
  check_distribution(q);
  double js = 0.0;
  merge_supports(p, q, [&](double pv, double qv) {
    const double m = 0.5 * (pv + qv);
    if (pv > 0.0) js += 0.5 * pv * std::log2(pv / m);
    if (qv > 0.0) js += 0.5 * qv * std::log2(qv / m);
  });
  return std::clamp(js, 0.0, 1.0);
}

DistributionPair binned_distributions(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b,
                                      std::size_t bins) {
  if (a.empty() || b.empty()) throw Error("distribution needs at least one sample");
  if (bins == 0) return {build_distribution(a), build_distribution(b)};
  auto [amin, amax] = std::minmax_element(a.begin(), a.end());
  auto [bmin, bmax] = std::minmax_element(b.begin(), b.end());
  const auto lo = std::min(*amin, *bmin);
  const auto span = std::max(*amax, *bmax) - lo + 1;
  auto bin = [&](std::span<const std::uint64_t> xs) {
    std::vector<std::int64_t> out;
    out.reserve(xs.size());
    for (auto x : xs)
      out.push_back(static_cast<std::int64_t>(static_cast<unsigned __int128>(x - lo) * bins / span));
    return build_distribution(std::span<const std::int64_t>(out));
  };
  return {bin(a), bin(b)};
}

double js_divergence(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b, std::size_t bins) {
  const auto pair = binned_distributions(a, b, bins);
  return js_divergence(pair.first, pair.second);
}

double tvla(std::span<const double> fixed_samples, std::span<const double> random_samples) {
  if (fixed_samples.size() < 2 || random_samples.size() < 2) throw Error("TVLA needs at least two samples per set");
  const auto f = moments(fixed_samples);
  const auto r = moments(random_samples);
  const double vf = f.sq / static_cast<double>(f.n - 1);
  const double vr = r.sq / static_cast<double>(r.n - 1);
  const double denom = std::sqrt(vr / static_cast<double>(r.n) + vf / static_cast<double>(f.n));
  if (denom == 0.0) throw Error("TVLA undefined: both sample sets have zero variance");
  return (r.mean - f.mean) / denom;
}

double snr(std::span<const double> signal, std::span<const double> noise) {
  if (signal.empty() || noise.empty()) throw Error("SNR needs non-empty signal and noise sets");
  const auto s = moments(signal);
  const auto n = moments(noise);
  if (n.sq == 0.0) throw Error("SNR undefined: noise variance is zero");
  return (s.sq / static_cast<double>(s.n)) / (n.sq / static_cast<double>(n.n));
}

double scv(double mean_power_hi, double mean_power_hj, double noise_power) {
  if (!(noise_power > 0.0)) throw Error("SCV needs positive noise power");
  return (mean_power_hi - mean_power_hj) / noise_power;
}

double mtd_relative(double snr_value, double rho0) {
  if (!(snr_value > 0.0)) throw Error("MTD needs positive SNR");
  if (!(std::abs(rho0) > 0.0 && std::abs(rho0) <= 1.0)) throw Error("MTD needs 0 < |rho0| <= 1");
  return 1.0 / (snr_value * rho0 * rho0);
}

double success_rate(std::uint64_t successes, std::uint64_t attempts) {
  if (attempts == 0) throw Error("success rate needs at least one attempt");
  if (successes > attempts) throw Error("more successes than attempts");
  return static_cast<double>(successes) / static_cast<double>(attempts);
}

void ScoreThresholds::validate() const {
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (!(cuts[i] > 0.0 && cuts[i] < 1.0)) throw Error("score thresholds must lie in (0, 1)");
    if (i > 0 && !(cuts[i] > cuts[i - 1])) throw Error("score thresholds must be strictly increasing");
  }
}

int security_score(double js, const ScoreThresholds& thresholds) {
  thresholds.validate();
  int score = 5;
  for (auto cut : thresholds.cuts) {
    if (js < cut) return score;
    --score;
  }
  return 1;
}

double JsMatrix::headline() const {
  double best = 0.0;
  for (const auto& row : values) best = std::max(best, row.at(0));
  return best;
}

JsMatrix per_cycle_js_matrix(const SubsystemProfiles& key1, const SubsystemProfiles& key2,
                             std::size_t cycles_per_encryption, std::size_t bins) {
  if (cycles_per_encryption == 0) throw Error("cycles per encryption must be positive");
  std::vector<std::pair<const SwitchingProfile*, const SwitchingProfile*>> cols{{&key1.subsystem, &key2.subsystem},
                                                                               {&key1.aes, &key2.aes}};
  if (key1.ips.size() != key2.ips.size()) throw Error("key runs have different noise IP sets");
  for (std::size_t i = 0; i < key1.ips.size(); ++i) cols.emplace_back(&key1.ips[i], &key2.ips[i]);
  JsMatrix m;
  for (const auto& [a, b] : cols) {
    if (a->granularity != Granularity::PerCycle || b->granularity != Granularity::PerCycle)
      throw Error("per-cycle JS needs per-cycle profiles");
    m.blocks.push_back(a->block);
  }
  m.values.assign(cycles_per_encryption, std::vector<double>(cols.size(), 0.0));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const auto& sa = cols[k].first->samples;
    const auto& sb = cols[k].second->samples;
    for (std::size_t c = 0; c < cycles_per_encryption; ++c) {
      std::vector<std::uint64_t> xa, xb;
      for (std::size_t i = c; i < sa.size(); i += cycles_per_encryption) xa.push_back(sa[i]);
      for (std::size_t i = c; i < sb.size(); i += cycles_per_encryption) xb.push_back(sb[i]);
      if (xa.empty() || xb.empty()) throw Error("profiles are shorter than one encryption");
      m.values[c][k] = js_divergence(xa, xb, bins);
    }
  }
  return m;
}

std::string to_csv(const JsMatrix& matrix) {
  std::ostringstream out;
  out << "cycle";
  for (const auto& b : matrix.blocks) out << ',' << b;
  out << '\n';
  for (std::size_t c = 0; c < matrix.values.size(); ++c) {
    out << c;
    for (auto v : matrix.values[c]) out << ',' << format_double(v);
    out << '\n';
  }
  return out.str();
}

nlohmann::json metric_report(const std::string& metric, double value, const nlohmann::json& params,
                             const ScoreThresholds& thresholds) {
  return {{"metric", metric},
          {"value", value},
          {"params", params},
          {"threshold_profile", {{"name", thresholds.profile}, {"cuts", thresholds.cuts}}}};
}

PscMeasurement measure_psc(const SubsystemConfig& config, const AesBlock& key1, const AesBlock& key2,
                           const PscMeasureOptions& options) {
  const auto pts = random_plaintexts(options.plaintexts, options.plaintext_seed);
  auto cyc = config;
  cyc.granularity = Granularity::PerCycle;
  const auto c1 = simulate_subsystem(cyc, key1, pts);
  const auto c2 = simulate_subsystem(cyc, key2, pts);

  auto per_encryption = [&](const SubsystemProfiles& p) {
    auto to_enc = [&](SwitchingProfile s) {
      s.samples = window_sums(s.samples, cyc.cycles_per_encryption);
      s.granularity = Granularity::PerEncryption;
      return s;
    };
    SubsystemProfiles out{to_enc(p.subsystem), to_enc(p.aes), {}};
    for (const auto& ip : p.ips) out.ips.push_back(to_enc(ip));
    return out;
  };

  PscMeasurement m;
  m.matrix = per_cycle_js_matrix(c1, c2, cyc.cycles_per_encryption, options.bins);
  m.js_cycle_max = m.matrix.headline();
  m.key1 = per_encryption(c1);
  m.key2 = per_encryption(c2);
  m.js = js_divergence(m.key1.subsystem.samples, m.key2.subsystem.samples, options.bins);
  m.js_aes_only = js_divergence(m.key1.aes.samples, m.key2.aes.samples, options.bins);
  m.score = security_score(m.js, options.thresholds);
  return m;
}

}  // namespace hwassure
