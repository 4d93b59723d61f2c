#include "hwassure/assurance.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "hwassure/rng.hpp"
#include "text_util.hpp"

namespace hwassure {

namespace {

void check_fanin(std::size_t fanin) {
  if (fanin == 0 || fanin > kMaxTruthTableFanin)
    throw Error("truth-table transfer functions need fan-in 1.." + std::to_string(kMaxTruthTableFanin) + ", got " +
                std::to_string(fanin));
}

bool gate_value(GateKind kind, std::uint32_t pattern, std::size_t fanin) {
  bool buf[kMaxTruthTableFanin];
  for (std::size_t i = 0; i < fanin; ++i) buf[i] = (pattern >> i) & 1u;
  return eval_gate(kind, std::span<const bool>(buf, fanin));
}

void require_combinational(const Circuit& c) {
  if (!c.is_combinational()) throw Error("testability metrics need a combinational circuit; frame it first");
}

}  // namespace

double controllability_transfer(GateKind kind, std::size_t fanin, CtfForm form) {
  check_fanin(fanin);
  const std::uint32_t total = 1u << fanin;
  std::uint32_t ones = 0;
  for (std::uint32_t p = 0; p < total; ++p) ones += gate_value(kind, p, fanin);
  const double n1 = static_cast<double>(ones) / total, n0 = 1.0 - n1;
  return 1.0 - std::abs(n0 - n1) / (form == CtfForm::Halved ? 2.0 : n0 + n1);
}

double observability_transfer(GateKind kind, std::size_t fanin) {
  check_fanin(fanin);
  const std::uint32_t total = 1u << fanin;
  double sum = 0.0;
  for (std::size_t i = 0; i < fanin; ++i) {
    std::uint32_t ns = 0;
    for (std::uint32_t p = 0; p < total; ++p) ns += gate_value(kind, p, fanin) != gate_value(kind, p ^ (1u << i), fanin);
    sum += static_cast<double>(ns) / total;
  }
  return sum / static_cast<double>(fanin);
}

std::vector<double> controllability(const Circuit& circuit, CtfForm form) {
  require_combinational(circuit);
  std::vector<double> cy(circuit.num_nets(), 0.0);
  for (auto n : circuit.primary_inputs()) cy[n] = 1.0;
  for (auto id : circuit.topo_order()) {
    const auto& g = circuit.gate(id);
    double mean = 0.0;
    for (auto n : g.inputs) mean += cy[n];
    mean /= static_cast<double>(g.inputs.size());
    cy[g.output] = controllability_transfer(g.kind, g.inputs.size(), form) * mean;
  }
  return cy;
}

std::vector<double> observability(const Circuit& circuit) {
  require_combinational(circuit);
  std::vector<double> oy(circuit.num_nets(), 0.0);
  std::vector<char> is_po(circuit.num_nets(), 0);
  for (auto n : circuit.primary_outputs()) is_po[n] = 1;
  std::vector<double> otf(circuit.gates().size(), 0.0);
  for (std::size_t i = 0; i < otf.size(); ++i)
    otf[i] = observability_transfer(circuit.gates()[i].kind, circuit.gates()[i].inputs.size());
  auto settle = [&](NetId n) {
    if (is_po[n]) {
      oy[n] = 1.0;
      return;
    }
    const auto fo = circuit.fanout(n);
    if (fo.empty()) return;
    double sum = 0.0;
    for (auto g : fo) sum += otf[g] * oy[circuit.gate(g).output];
    oy[n] = sum / static_cast<double>(fo.size());
  };
  const auto order = circuit.topo_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) settle(circuit.gate(*it).output);
  for (auto n : circuit.primary_inputs()) settle(n);
  return oy;
}

OhResult observation_hardness(const Circuit& circuit, NetId node, const OhOptions& options) {
  require_combinational(circuit);
  if (node >= circuit.num_nets()) throw Error("unknown node " + std::to_string(node));
  const auto pis = circuit.primary_inputs();
  const auto npi = pis.size();
  OhResult r;
  r.injected = 2 * npi;
  if (npi == 0) return r;

  std::uint64_t total;
  if (options.exhaustive) {
    if (npi > 24) throw Error("exhaustive observation hardness is limited to 24 primary inputs");
    total = std::uint64_t{1} << npi;
  } else {
    if (options.patterns == 0) throw Error("observation hardness needs at least one pattern");
    total = options.patterns;
  }
  r.patterns = total;

  Rng rng(options.seed);
  std::vector<char> detected(2 * npi, 0);
  std::vector<std::uint64_t> words(npi);
  for (std::uint64_t base = 0; base < total; base += 64) {
    const auto lanes = std::min<std::uint64_t>(64, total - base);
    const std::uint64_t mask = lanes == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << lanes) - 1;
    for (std::size_t i = 0; i < npi; ++i) {
      if (options.exhaustive) {
        std::uint64_t w = 0;
        for (std::uint64_t l = 0; l < lanes; ++l) w |= (((base + l) >> i) & 1u) << l;
        words[i] = w;
      } else {
        words[i] = rng.next();
      }
    }
    const auto good = evaluate_words(circuit, words)[node];
    for (std::size_t i = 0; i < npi; ++i) {
      for (int v = 0; v < 2; ++v) {
        auto& hit = detected[2 * i + v];
        if (hit) continue;
        auto faulty_in = words;
        faulty_in[i] = v ? ~std::uint64_t{0} : 0;
        hit = ((evaluate_words(circuit, faulty_in)[node] ^ good) & mask) != 0;
      }
    }
  }
  r.detected = static_cast<std::size_t>(std::count(detected.begin(), detected.end(), 1));
  r.value = static_cast<double>(r.detected) / static_cast<double>(r.injected);
  return r;
}

FsmFiResult fsm_fi_vulnerability(const FsmSpec& spec) {
  if (spec.transitions.empty()) throw Error("FSM needs at least one transition");
  auto positive = [](const std::vector<double>& ds, const char* what) {
    for (auto d : ds)
      if (!(d > 0)) throw Error(std::string(what) + " delays must be positive");
  };
  positive(spec.p_fs, "P_FS");
  FsmFiResult r;
  std::size_t vt = 0;
  double sf_sum = 0.0;
  for (std::size_t i = 0; i < spec.transitions.size(); ++i) {
    const auto& t = spec.transitions[i];
    positive(t.pv, "PV");
    positive(t.po, "PO");
    if (!t.vulnerable) continue;
    if (t.pv.empty()) throw Error("vulnerable transition " + t.from + "->" + t.to + " has no violated paths");
    if (spec.p_fs.empty()) throw Error("P_FS is needed when a transition is vulnerable");
    ++vt;
    const double min_pv = *std::min_element(t.pv.begin(), t.pv.end());
    const double max_po = t.po.empty() ? 0.0 : *std::max_element(t.po.begin(), t.po.end());
    const double avg_fs = std::accumulate(spec.p_fs.begin(), spec.p_fs.end(), 0.0) / static_cast<double>(spec.p_fs.size());
    r.sf.push_back({i, (min_pv - max_po) / avg_fs});
    sf_sum += r.sf.back().sf;
  }
  r.pvt_percent = 100.0 * static_cast<double>(vt) / static_cast<double>(spec.transitions.size());
  if (vt > 0) r.asf = sf_sum / static_cast<double>(vt);
  return r;
}

namespace {

std::vector<double> parse_delays(const std::string& field, std::size_t line) {
  std::vector<double> out;
  if (field.empty()) return out;
  std::size_t start = 0;
  while (start <= field.size()) {
    const auto end = std::min(field.find(';', start), field.size());
    std::string item = field.substr(start, end - start);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    out.push_back(parse_number(item, line));
    start = end + 1;
  }
  return out;
}

}  // namespace

FsmSpec parse_fsm_csv(std::string_view text) {
  FsmSpec spec;
  std::size_t line = 0;
  for (const auto& f : parse_csv(text)) {
    ++line;
    if (f.empty()) continue;
    if (f[0] == "transition") {
      if (f.size() != 6) throw ParseError(line, "transition rows need from,to,vulnerable,pv,po");
      if (f[3] != "0" && f[3] != "1") throw ParseError(line, "vulnerable must be 0 or 1");
      spec.transitions.push_back({f[1], f[2], f[3] == "1", parse_delays(f[4], line), parse_delays(f[5], line)});
    } else if (f[0] == "pfs") {
      if (f.size() != 2) throw ParseError(line, "pfs rows need one delay list");
      const auto d = parse_delays(f[1], line);
      spec.p_fs.insert(spec.p_fs.end(), d.begin(), d.end());
    } else if (f[0] == "state") {
      if (f.size() != 2) throw ParseError(line, "state rows need a name");
      spec.states.push_back(f[1]);
    } else {
      throw ParseError(line, "unknown FSM record '" + f[0] + "'");
    }
  }
  if (spec.states.empty())
    for (const auto& t : spec.transitions)
      for (const auto* s : {&t.from, &t.to})
        if (std::find(spec.states.begin(), spec.states.end(), *s) == spec.states.end()) spec.states.push_back(*s);
  return spec;
}

namespace {

std::size_t hamming(const Bits& a, const Bits& b) {
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

}  // namespace

double puf_inter_hd(const std::vector<Bits>& responses) {
  if (responses.size() < 2) throw Error("inter-HD needs at least two responses");
  const auto k = responses[0].size();
  if (k == 0) throw Error("PUF responses are empty");
  for (const auto& r : responses)
    if (r.size() != k) throw Error("PUF responses differ in length");
  const auto n = responses.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) sum += static_cast<double>(hamming(responses[i], responses[j])) / k;
  return 2.0 / (static_cast<double>(n) * static_cast<double>(n - 1)) * sum * 100.0;
}

double puf_intra_hd(const Bits& reference, const std::vector<Bits>& samples) {
  if (samples.empty()) throw Error("intra-HD needs at least one sample");
  if (reference.empty()) throw Error("PUF reference response is empty");
  double sum = 0.0;
  for (const auto& s : samples) {
    if (s.size() != reference.size()) throw Error("PUF sample length differs from the reference");
    sum += static_cast<double>(hamming(reference, s)) / reference.size();
  }
  return sum / static_cast<double>(samples.size()) * 100.0;
}

Bits parse_response(std::string_view text) {
  Bits b;
  if (text.substr(0, 2) == "0b") {
    for (auto c : text.substr(2)) {
      if (c != '0' && c != '1') throw Error("bad bit '" + std::string(1, c) + "' in PUF response");
      b.push_back(c == '1');
    }
  } else {
    if (text.substr(0, 2) == "0x") text.remove_prefix(2);
    for (auto c : text) {
      int v;
      if (c >= '0' && c <= '9') v = c - '0';
      else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
      else throw Error("bad hex digit '" + std::string(1, c) + "' in PUF response");
      for (int i = 3; i >= 0; --i) b.push_back((v >> i) & 1);
    }
  }
  if (b.empty()) throw Error("empty PUF response");
  return b;
}

std::vector<Bits> parse_puf_responses(std::string_view text) {
  std::vector<Bits> out;
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    ++line;
    auto s = text.substr(pos, end - pos);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    if (!s.empty() && s[0] != '#') {
      try {
        out.push_back(parse_response(s));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        throw ParseError(line, e.what());
      }
    }
    pos = end + 1;
  }
  return out;
}

double cdc(const std::vector<Defect>& defects) {
  double num = 0.0, den = 0.0;
  for (const auto& d : defects) {
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) throw Error("defect confidence must lie in [0, 1]");
    if (!(d.frequency >= 0.0)) throw Error("defect frequency must be non-negative");
    num += d.confidence * d.frequency;
    den += d.frequency;
  }
  if (!(den > 0.0)) throw Error("CDC needs at least one defect with positive frequency");
  return num / den * 100.0;
}

std::vector<Defect> parse_defect_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0] != std::vector<std::string>{"defect", "confidence", "frequency"})
    throw ParseError(1, "defect table header must be 'defect,confidence,frequency'");
  std::vector<Defect> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != 3) throw ParseError(i + 1, "expected 3 fields");
    out.push_back({rows[i][0], parse_number(rows[i][1], i + 1), parse_number(rows[i][2], i + 1)});
  }
  return out;
}

}  // namespace hwassure
