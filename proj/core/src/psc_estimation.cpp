#include "hwassure/psc_estimation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "hwassure/rng.hpp"
#include "hwassure/sat_estimation.hpp"
#include "text_util.hpp"

namespace hwassure {

std::array<double, 9> IpAttributes::vector() const {
  auto d = [](std::size_t v) { return static_cast<double>(v); };
  return {d(num_inputs), d(num_outputs), d(num_dff), d(num_inverters), d(num_gates),
          d(num_and),    d(num_nand),    d(num_or),  d(num_nor)};
}

IpAttributes extract_ip_attributes(const Circuit& circuit) {
  IpAttributes a;
  for (auto n : circuit.primary_inputs())
    if (!is_key_input_name(circuit.net_name(n))) ++a.num_inputs;
  a.num_outputs = circuit.primary_outputs().size();
  for (const auto& g : circuit.gates()) {
    switch (g.kind) {
      case GateKind::Dff: ++a.num_dff; break;
      case GateKind::Not: ++a.num_inverters; break;
      case GateKind::And: ++a.num_and; break;
      case GateKind::Nand: ++a.num_nand; break;
      case GateKind::Or: ++a.num_or; break;
      case GateKind::Nor: ++a.num_nor; break;
      default: break;
    }
  }
  a.num_gates = a.num_and + a.num_nand + a.num_or + a.num_nor;
  return a;
}

namespace {

NamedAttributes row(const char* name, std::size_t in, std::size_t out, std::size_t dff, std::size_t inv,
                              std::size_t a, std::size_t na, std::size_t o, std::size_t no) {
  return {name, {in, out, dff, inv, a + na + o + no, a, na, o, no}};
}

const std::vector<NamedAttributes>& reference_rows() {
  static const std::vector<NamedAttributes> rows{
      row("s298", 3, 6, 14, 44, 31, 9, 16, 19),         row("s344", 9, 11, 15, 59, 44, 18, 9, 30),
      row("s386", 7, 7, 6, 41, 83, 0, 35, 0),           row("s400", 3, 6, 21, 58, 11, 36, 25, 34),
      row("s420", 18, 1, 16, 78, 49, 19, 18, 34),       row("s444", 3, 6, 21, 62, 13, 58, 14, 34),
      row("s510", 19, 7, 6, 32, 34, 61, 29, 55),        row("s526", 3, 6, 21, 52, 56, 22, 28, 35),
      row("s641", 35, 24, 19, 272, 90, 4, 13, 0),       row("s713", 35, 23, 19, 254, 94, 28, 17, 0),
      row("s820", 18, 19, 5, 33, 76, 54, 60, 66),       row("s832", 18, 19, 5, 25, 78, 54, 64, 66),
      row("s838", 34, 1, 32, 158, 105, 57, 56, 70),     row("s953", 16, 23, 29, 84, 49, 114, 36, 112),
      row("s1196", 14, 14, 18, 141, 118, 119, 101, 50), row("s1238", 14, 14, 18, 80, 134, 125, 112, 57),
      row("s1423", 17, 5, 74, 167, 197, 64, 137, 92),   row("s1488", 8, 19, 6, 103, 350, 0, 200, 0),
      row("s5378", 35, 49, 179, 1775, 0, 0, 239, 765),
  };
  return rows;
}

}  // namespace

std::span<const NamedAttributes> reference_ip_attributes() { return reference_rows(); }

const IpAttributes& reference_ip_attributes(std::string_view name) {
  for (const auto& r : reference_rows())
    if (r.name == name) return r.attributes;
  throw Error("no reference attributes for '" + std::string(name) + "'");
}

Circuit generate_profile_circuit(const IpAttributes& a, std::uint64_t seed, const std::string& name) {
  if (a.num_gates != a.num_and + a.num_nand + a.num_or + a.num_nor)
    throw Error("num_gates must equal the AND + NAND + OR + NOR total");
  const auto logic = a.num_gates + a.num_inverters;
  if (a.num_inputs + a.num_dff == 0) throw Error("profile circuit needs an input or a flop");
  if (logic == 0 && (a.num_outputs > 0 || a.num_dff > 0)) throw Error("profile circuit needs logic to drive outputs");

  Rng rng(seed);
  CircuitBuilder b(name);
  std::vector<std::string> sources;
  for (std::size_t i = 0; i < a.num_inputs; ++i) {
    sources.push_back("i" + std::to_string(i));
    b.add_input(sources.back());
  }
  for (std::size_t i = 0; i < a.num_dff; ++i) sources.push_back("q" + std::to_string(i));

  std::vector<GateKind> kinds;
  kinds.insert(kinds.end(), a.num_inverters, GateKind::Not);
  kinds.insert(kinds.end(), a.num_and, GateKind::And);
  kinds.insert(kinds.end(), a.num_nand, GateKind::Nand);
  kinds.insert(kinds.end(), a.num_or, GateKind::Or);
  kinds.insert(kinds.end(), a.num_nor, GateKind::Nor);
  for (std::size_t i = kinds.size(); i > 1; --i) std::swap(kinds[i - 1], kinds[rng.below(i)]);

  // Unused sources are consumed first so every input and flop has fanout.
  std::vector<std::string> unused = sources;
  for (std::size_t i = unused.size(); i > 1; --i) std::swap(unused[i - 1], unused[rng.below(i)]);
  std::vector<std::string> pool = sources;
  std::vector<std::size_t> fanout_count;
  std::vector<std::string> gate_nets;
  const std::size_t window = 32;
  auto pick = [&]() -> const std::string& {
    // Half the picks come from recent nets to build depth.
    if (pool.size() > window && rng.bit()) return pool[pool.size() - 1 - rng.below(window)];
    return pool[rng.below(pool.size())];
  };
  for (std::size_t g = 0; g < kinds.size(); ++g) {
    const auto kind = kinds[g];
    const std::size_t arity = kind == GateKind::Not ? 1 : (rng.below(5) == 0 ? 3 : 2);
    std::vector<std::string> ins;
    if (!unused.empty()) {
      ins.push_back(unused.back());
      unused.pop_back();
    }
    for (std::size_t tries = 0; ins.size() < arity && tries < 8 * arity; ++tries) {
      const auto& n = pick();
      if (std::find(ins.begin(), ins.end(), n) == ins.end()) ins.push_back(n);
    }
    while (ins.size() < arity) ins.push_back(pick());
    auto out = "n" + std::to_string(g);
    b.add_gate(kind, out, ins);
    pool.push_back(out);
    gate_nets.push_back(std::move(out));
  }
  if (!unused.empty()) throw Error("profile circuit has fewer gates than inputs and flops");

  // Flop D pins and outputs come from gate nets, distinct while they last.
  std::vector<std::string> order = gate_nets;
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::size_t next = 0;
  auto take = [&]() -> const std::string& { return order[next++ % order.size()]; };
  for (std::size_t i = 0; i < a.num_dff; ++i) b.add_gate(GateKind::Dff, "q" + std::to_string(i), {take()});
  std::vector<std::string> outs;
  for (std::size_t i = 0; i < a.num_outputs; ++i) {
    const auto& n = take();
    if (std::find(outs.begin(), outs.end(), n) != outs.end()) {
      // More outputs than gates: buffer-free duplicates are not allowed, so
      // fall back to any net not yet exported.
      auto it = std::find_if(pool.begin(), pool.end(),
                             [&](const std::string& p) { return std::find(outs.begin(), outs.end(), p) == outs.end() && p[0] != 'q'; });
      if (it == pool.end()) throw Error("profile circuit has too few nets for its outputs");
      outs.push_back(*it);
    } else {
      outs.push_back(n);
    }
    b.add_output(outs.back());
  }
  return std::move(b).build();
}

const BenchmarkProfile& ProfileDb::find(std::string_view name) const {
  for (const auto& e : entries)
    if (e.source_name == name) return e;
  throw Error("profile database has no entry '" + std::string(name) + "'");
}

ProfileDb build_profile_db(std::span<const Circuit> circuits, std::size_t cycles, std::uint64_t seed) {
  if (circuits.empty()) throw Error("profile database needs at least one circuit");
  ProfileDb db;
  for (std::size_t i = 0; i < circuits.size(); ++i) {
    const auto& c = circuits[i];
    for (const auto& e : db.entries)
      if (e.source_name == c.name()) throw Error("duplicate circuit name '" + c.name() + "' in profile database");
    BenchmarkProfile p;
    p.source_name = c.name();
    p.attributes = extract_ip_attributes(c);
    p.stimulus_seed = derive_seed(seed, i);
    p.profile.block = c.name();
    p.profile.granularity = Granularity::PerCycle;
    p.profile.samples = simulate_circuit_toggles(c, p.stimulus_seed, cycles).per_cycle;
    db.entries.push_back(std::move(p));
  }
  return db;
}

std::string profile_db_index_header() {
  return "name,inputs,outputs,dff,inverters,gates,and,nand,or,nor,stimulus_seed,cycles";
}

void save_profile_db(const ProfileDb& db, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(directory) / "profiles");
  std::ostringstream index;
  index << profile_db_index_header() << '\n';
  for (const auto& e : db.entries) {
    const auto& a = e.attributes;
    index << e.source_name << ',' << a.num_inputs << ',' << a.num_outputs << ',' << a.num_dff << ','
          << a.num_inverters << ',' << a.num_gates << ',' << a.num_and << ',' << a.num_nand << ',' << a.num_or
          << ',' << a.num_nor << ',' << e.stimulus_seed << ',' << e.profile.samples.size() << '\n';
    std::ostringstream prof;
    prof << "cycle,toggles\n";
    for (std::size_t i = 0; i < e.profile.samples.size(); ++i) prof << i << ',' << e.profile.samples[i] << '\n';
    write_text_file((fs::path(directory) / "profiles" / (e.source_name + ".csv")).string(), prof.str());
  }
  write_text_file((fs::path(directory) / "index.csv").string(), index.str());
}

ProfileDb load_profile_db(const std::string& directory) {
  namespace fs = std::filesystem;
  const auto rows = parse_csv(read_text_file((fs::path(directory) / "index.csv").string()));
  if (rows.empty() || rows.front() != split_csv_line(profile_db_index_header()))
    throw ParseError(1, "profile index header must be '" + profile_db_index_header() + "'");
  ProfileDb db;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    const auto line = r + 1;
    if (f.size() != 12) throw ParseError(line, "expected 12 fields");
    BenchmarkProfile p;
    p.source_name = f[0];
    auto& a = p.attributes;
    std::size_t* cols[] = {&a.num_inputs, &a.num_outputs, &a.num_dff, &a.num_inverters, &a.num_gates,
                           &a.num_and,    &a.num_nand,    &a.num_or,  &a.num_nor};
    for (std::size_t k = 0; k < 9; ++k) *cols[k] = parse_count(f[k + 1], line);
    if (a.num_gates != a.num_and + a.num_nand + a.num_or + a.num_nor)
      throw ParseError(line, "gates must equal the AND + NAND + OR + NOR total");
    p.stimulus_seed = std::stoull(f[10]);
    const auto cycles = parse_count(f[11], line);
    p.profile.block = p.source_name;
    p.profile.granularity = Granularity::PerCycle;
    const auto prof = parse_csv(read_text_file((fs::path(directory) / "profiles" / (p.source_name + ".csv")).string()));
    if (prof.empty() || prof.front() != std::vector<std::string>{"cycle", "toggles"})
      throw ParseError(1, "profile " + p.source_name + " needs a 'cycle,toggles' header");
    for (std::size_t i = 1; i < prof.size(); ++i) {
      if (prof[i].size() != 2) throw ParseError(i + 1, "profile " + p.source_name + ": expected 2 fields");
      p.profile.samples.push_back(parse_count(prof[i][1], i + 1));
    }
    if (p.profile.samples.size() != cycles || cycles == 0)
      throw ParseError(line, "profile " + p.source_name + " length does not match the index");
    db.entries.push_back(std::move(p));
  }
  if (db.entries.empty()) throw Error("profile database at " + directory + " is empty");
  return db;
}

IpMapping map_ip(const IpAttributes& query, const ProfileDb& db) {
  if (db.entries.empty()) throw Error("profile database is empty");
  auto scale = query.vector();
  for (const auto& e : db.entries) {
    const auto v = e.attributes.vector();
    for (std::size_t k = 0; k < scale.size(); ++k) scale[k] = std::max(scale[k], v[k]);
  }
  auto normalize = [&](std::array<double, 9> v) {
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = scale[k] > 0 ? v[k] / scale[k] : 0.0;
    return v;
  };
  const auto q = normalize(query.vector());
  auto gate_gap = [&](const IpAttributes& a) {
    return a.num_gates > query.num_gates ? a.num_gates - query.num_gates : query.num_gates - a.num_gates;
  };
  IpMapping best{0, -1.0};
  for (std::size_t i = 0; i < db.entries.size(); ++i) {
    const auto& e = db.entries[i];
    const auto v = normalize(e.attributes.vector());
    const double s = cosine_similarity(q, v);
    bool better = s > best.similarity + 1e-12;
    if (!better && std::abs(s - best.similarity) <= 1e-12) {
      const auto& cur = db.entries[best.index];
      const auto gi = gate_gap(e.attributes), gc = gate_gap(cur.attributes);
      better = gi < gc || (gi == gc && e.source_name < cur.source_name);
    }
    if (better) best = {i, s};
  }
  return best;
}

PscEstimate estimate_subsystem_score(const SwitchingProfile& aes_key1, const SwitchingProfile& aes_key2,
                                     std::span<const BenchmarkProfile* const> mapped, const EstimateOptions& options) {
  if (aes_key1.granularity != aes_key2.granularity) throw Error("AES profiles differ in granularity");
  const auto n = std::min(aes_key1.samples.size(), aes_key2.samples.size());
  if (n == 0) throw Error("AES profiles are empty");
  std::vector<std::uint64_t> noise(n, 0);
  for (std::size_t j = 0; j < mapped.size(); ++j) {
    const auto& p = mapped[j]->profile;
    if (p.granularity != Granularity::PerCycle) throw Error("database profiles must be per-cycle traces");
    const auto draws = aes_key1.granularity == Granularity::PerCycle
                           ? p.samples
                           : window_sums(p.samples, options.cycles_per_encryption);
    if (draws.empty()) throw Error("profile " + mapped[j]->source_name + " is shorter than one encryption");
    if (draws.size() >= n) {
      for (std::size_t i = 0; i < n; ++i) noise[i] += draws[i];
    } else {
      Rng rng(derive_seed(options.seed, j));
      for (std::size_t i = 0; i < n; ++i) noise[i] += draws[rng.below(draws.size())];
    }
  }
  std::vector<std::uint64_t> c1(n), c2(n);
  for (std::size_t i = 0; i < n; ++i) {
    c1[i] = aes_key1.samples[i] + noise[i];
    c2[i] = aes_key2.samples[i] + noise[i];
  }
  PscEstimate e;
  e.js = js_divergence(c1, c2, options.bins);
  e.score = security_score(e.js, options.thresholds);
  return e;
}

}  // namespace hwassure
