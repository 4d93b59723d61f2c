#include "hwassure/netlist.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace hwassure {

namespace {

constexpr std::array<std::pair<std::string_view, GateKind>, 10> kKindNames{{
    {"AND", GateKind::And},
    {"NAND", GateKind::Nand},
    {"OR", GateKind::Or},
    {"NOR", GateKind::Nor},
    {"XOR", GateKind::Xor},
    {"XNOR", GateKind::Xnor},
    {"NOT", GateKind::Not},
    {"BUF", GateKind::Buf},
    {"BUFF", GateKind::Buf},
    {"DFF", GateKind::Dff},
}};

}  // namespace

std::string_view to_string(GateKind kind) {
  for (const auto& [name, k] : kKindNames)
    if (k == kind) return name;
  return "?";
}

std::optional<GateKind> gate_kind_from_string(std::string_view name) {
  std::string upper(name);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const auto& [n, k] : kKindNames)
    if (n == upper) return k;
  return std::nullopt;
}

bool is_single_input(GateKind kind) {
  return kind == GateKind::Not || kind == GateKind::Buf || kind == GateKind::Dff;
}

std::uint64_t eval_gate_word(GateKind kind, std::span<const std::uint64_t> in) {
  std::uint64_t acc = 0;
  switch (kind) {
    case GateKind::And:
    case GateKind::Nand:
      acc = ~std::uint64_t{0};
      for (auto w : in) acc &= w;
      return kind == GateKind::And ? acc : ~acc;
    case GateKind::Or:
    case GateKind::Nor:
      for (auto w : in) acc |= w;
      return kind == GateKind::Or ? acc : ~acc;
    case GateKind::Xor:
    case GateKind::Xnor:
      for (auto w : in) acc ^= w;
      return kind == GateKind::Xor ? acc : ~acc;
    case GateKind::Not:
      return ~in[0];
    case GateKind::Buf:
    case GateKind::Dff:
      return in[0];
  }
  return 0;
}

bool eval_gate(GateKind kind, std::span<const bool> inputs) {
  std::array<std::uint64_t, 32> small{};
  std::vector<std::uint64_t> big;
  std::span<std::uint64_t> words;
  if (inputs.size() <= small.size()) {
    words = std::span<std::uint64_t>(small.data(), inputs.size());
  } else {
    big.resize(inputs.size());
    words = big;
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) words[i] = inputs[i] ? 1 : 0;
  return eval_gate_word(kind, words) & 1;
}

// ---------------------------------------------------------------- Circuit

std::optional<NetId> Circuit::find_net(std::string_view name) const {
  auto it = net_index_.find(std::string(name));
  if (it == net_index_.end()) return std::nullopt;
  return it->second;
}

NetId Circuit::net(std::string_view name) const {
  auto id = find_net(name);
  if (!id) throw Error("unknown net '" + std::string(name) + "' in " + name_);
  return *id;
}

std::span<const GateId> Circuit::fanout(NetId net) const {
  return std::span<const GateId>(fanout_gates_.data() + fanout_offsets_.at(net),
                                 fanout_offsets_.at(net + 1) - fanout_offsets_.at(net));
}

// ---------------------------------------------------------------- Builder

CircuitBuilder::CircuitBuilder(std::string name) : name_(std::move(name)) {}

NetId CircuitBuilder::net(std::string_view name) {
  auto [it, inserted] = index_.try_emplace(std::string(name), static_cast<NetId>(names_.size()));
  if (inserted) names_.emplace_back(name);
  return it->second;
}

bool CircuitBuilder::has_net(std::string_view name) const {
  return index_.count(std::string(name)) != 0;
}

std::string CircuitBuilder::fresh_name(std::string_view base) const {
  std::string candidate(base);
  for (std::size_t i = 1; has_net(candidate); ++i) candidate = std::string(base) + "_" + std::to_string(i);
  return candidate;
}

void CircuitBuilder::add_input(std::string_view name, std::size_t line) {
  inputs_.emplace_back(net(name), line);
}

void CircuitBuilder::add_output(std::string_view name, std::size_t line) {
  outputs_.emplace_back(net(name), line);
}

void CircuitBuilder::add_gate(GateKind kind, std::string_view output,
                              const std::vector<std::string>& inputs, std::size_t line) {
  PendingGate g{kind, net(output), {}, line};
  g.inputs.reserve(inputs.size());
  for (const auto& in : inputs) g.inputs.push_back(net(in));
  gates_.push_back(std::move(g));
}

void CircuitBuilder::instantiate(const Circuit& sub,
                                 const std::unordered_map<std::string, std::string>& bind,
                                 std::string_view prefix) {
  auto outer = [&](NetId n) {
    const auto& local = sub.net_name(n);
    auto it = bind.find(local);
    return it != bind.end() ? it->second : std::string(prefix) + local;
  };
  for (const auto& g : sub.gates()) {
    std::vector<std::string> ins;
    ins.reserve(g.inputs.size());
    for (auto n : g.inputs) ins.push_back(outer(n));
    add_gate(g.kind, outer(g.output), ins);
  }
}

Circuit CircuitBuilder::build() && {
  Circuit c;
  c.name_ = std::move(name_);
  const auto num_nets = names_.size();
  c.driver_.assign(num_nets, kNoGate);

  std::vector<bool> is_input(num_nets, false);
  for (auto [n, line] : inputs_) {
    if (is_input[n]) throw ParseError(line, "duplicate driver for net '" + names_[n] + "'");
    is_input[n] = true;
    c.inputs_.push_back(n);
  }

  c.gates_.reserve(gates_.size());
  for (auto& pg : gates_) {
    const auto arity = pg.inputs.size();
    if (is_single_input(pg.kind) ? arity != 1 : arity < 2)
      throw ParseError(pg.line, std::string(to_string(pg.kind)) + " gate driving '" + names_[pg.output] +
                                    "' has " + std::to_string(arity) + " inputs");
    if (is_input[pg.output] || c.driver_[pg.output] != kNoGate)
      throw ParseError(pg.line, "duplicate driver for net '" + names_[pg.output] + "'");
    const auto id = static_cast<GateId>(c.gates_.size());
    c.driver_[pg.output] = id;
    c.gates_.push_back(Gate{id, pg.kind, std::move(pg.inputs), pg.output});
    if (pg.kind == GateKind::Dff) c.flops_.push_back(id);
  }

  // Every referenced net needs a driver.
  for (const auto& g : c.gates_)
    for (auto n : g.inputs)
      if (!is_input[n] && c.driver_[n] == kNoGate)
        throw ParseError(gates_.empty() ? 0 : gates_[g.id].line, "undefined net '" + names_[n] + "'");
  for (auto [n, line] : outputs_) {
    if (!is_input[n] && c.driver_[n] == kNoGate)
      throw ParseError(line, "undefined net '" + names_[n] + "'");
    c.outputs_.push_back(n);
  }

  // Fanout index (CSR).
  c.fanout_offsets_.assign(num_nets + 1, 0);
  for (const auto& g : c.gates_)
    for (auto n : g.inputs) ++c.fanout_offsets_[n + 1];
  for (std::size_t i = 0; i < num_nets; ++i) c.fanout_offsets_[i + 1] += c.fanout_offsets_[i];
  c.fanout_gates_.resize(c.fanout_offsets_.back());
  {
    auto cursor = c.fanout_offsets_;
    for (const auto& g : c.gates_)
      for (auto n : g.inputs) c.fanout_gates_[cursor[n]++] = g.id;
  }

  // Kahn over combinational gates; DFF outputs and PIs are sources.
  std::vector<std::uint32_t> pending(c.gates_.size(), 0);
  std::vector<GateId> ready;
  for (const auto& g : c.gates_) {
    if (g.kind == GateKind::Dff) continue;
    for (auto n : g.inputs) {
      auto d = c.driver_[n];
      if (d != kNoGate && c.gates_[d].kind != GateKind::Dff) ++pending[g.id];
    }
    if (pending[g.id] == 0) ready.push_back(g.id);
  }
  // Source order among ready gates keeps evaluation order close to the file.
  std::reverse(ready.begin(), ready.end());
  c.topo_.reserve(c.gates_.size() - c.flops_.size());
  while (!ready.empty()) {
    auto id = ready.back();
    ready.pop_back();
    c.topo_.push_back(id);
    for (auto succ : c.fanout(c.gates_[id].output)) {
      if (c.gates_[succ].kind == GateKind::Dff) continue;
      // One fanout entry per pin, matching one pending count per pin.
      if (--pending[succ] == 0) ready.push_back(succ);
    }
  }
  if (c.topo_.size() != c.gates_.size() - c.flops_.size()) {
    for (const auto& g : c.gates_)
      if (g.kind != GateKind::Dff && pending[g.id] != 0)
        throw ParseError(gates_[g.id].line, "combinational cycle through net '" + names_[g.output] + "'");
  }

  c.net_names_ = std::move(names_);
  c.net_index_ = std::move(index_);
  return c;
}

// ---------------------------------------------------------------- Evaluation

std::vector<std::uint64_t> evaluate_words(const Circuit& circuit,
                                          std::span<const std::uint64_t> input_words,
                                          std::span<const std::uint64_t> state_words) {
  const auto pis = circuit.primary_inputs();
  const auto ffs = circuit.flip_flops();
  if (input_words.size() != pis.size())
    throw Error("expected " + std::to_string(pis.size()) + " input assignments, got " +
                std::to_string(input_words.size()));
  if (state_words.size() != ffs.size())
    throw Error("expected " + std::to_string(ffs.size()) + " state assignments, got " +
                std::to_string(state_words.size()));

  std::vector<std::uint64_t> value(circuit.num_nets(), 0);
  for (std::size_t i = 0; i < pis.size(); ++i) value[pis[i]] = input_words[i];
  for (std::size_t i = 0; i < ffs.size(); ++i) value[circuit.gate(ffs[i]).output] = state_words[i];

  std::vector<std::uint64_t> scratch;
  for (auto id : circuit.topo_order()) {
    const auto& g = circuit.gate(id);
    scratch.resize(g.inputs.size());
    for (std::size_t i = 0; i < g.inputs.size(); ++i) scratch[i] = value[g.inputs[i]];
    value[g.output] = eval_gate_word(g.kind, scratch);
  }
  return value;
}

std::vector<std::uint8_t> evaluate_nets(const Circuit& circuit, const Bits& inputs, const Bits& state) {
  std::vector<std::uint64_t> in(inputs.size()), st(state.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) in[i] = inputs[i] ? 1 : 0;
  for (std::size_t i = 0; i < state.size(); ++i) st[i] = state[i] ? 1 : 0;
  auto words = evaluate_words(circuit, in, st);
  std::vector<std::uint8_t> nets(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) nets[i] = static_cast<std::uint8_t>(words[i] & 1);
  return nets;
}

EvalResult evaluate(const Circuit& circuit, const Bits& inputs, const Bits& state) {
  auto nets = evaluate_nets(circuit, inputs, state);
  EvalResult r;
  r.outputs.reserve(circuit.primary_outputs().size());
  for (auto n : circuit.primary_outputs()) r.outputs.push_back(nets[n] != 0);
  r.next_state.reserve(circuit.flip_flops().size());
  for (auto ff : circuit.flip_flops()) r.next_state.push_back(nets[circuit.gate(ff).inputs[0]] != 0);
  return r;
}

// ---------------------------------------------------------------- Metadata

bool is_key_input_name(std::string_view name) {
  constexpr std::string_view prefix = "keyinput";
  if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) return false;
  return std::all_of(name.begin() + prefix.size(), name.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; });
}

CircuitMetadata extract_metadata(const Circuit& circuit, std::size_t key_length) {
  CircuitMetadata m;
  m.name = circuit.name();
  m.key_length = key_length;
  m.num_gates = circuit.num_combinational_gates();
  m.num_primary_inputs = static_cast<std::size_t>(
      std::count_if(circuit.primary_inputs().begin(), circuit.primary_inputs().end(),
                    [&](NetId n) { return !is_key_input_name(circuit.net_name(n)); }));
  m.num_primary_outputs = circuit.primary_outputs().size();
  m.num_flip_flop_io = circuit.flip_flops().size();
  return m;
}

std::string metadata_csv_header() { return "name,keyLength,numGates,numPI,numPO,numFFIO"; }

std::string to_csv_row(const CircuitMetadata& m) {
  return m.name + "," + std::to_string(m.key_length) + "," + std::to_string(m.num_gates) + "," +
         std::to_string(m.num_primary_inputs) + "," + std::to_string(m.num_primary_outputs) + "," +
         std::to_string(m.num_flip_flop_io);
}

bool structurally_equal(const Circuit& a, const Circuit& b) {
  auto same_ports = [&](std::span<const NetId> x, std::span<const NetId> y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (a.net_name(x[i]) != b.net_name(y[i])) return false;
    return true;
  };
  if (!same_ports(a.primary_inputs(), b.primary_inputs())) return false;
  if (!same_ports(a.primary_outputs(), b.primary_outputs())) return false;
  if (a.gates().size() != b.gates().size()) return false;
  for (std::size_t i = 0; i < a.gates().size(); ++i) {
    const auto& ga = a.gates()[i];
    const auto& gb = b.gates()[i];
    if (ga.kind != gb.kind || a.net_name(ga.output) != b.net_name(gb.output)) return false;
    if (ga.inputs.size() != gb.inputs.size()) return false;
    for (std::size_t j = 0; j < ga.inputs.size(); ++j)
      if (a.net_name(ga.inputs[j]) != b.net_name(gb.inputs[j])) return false;
  }
  return true;
}

}  // namespace hwassure
