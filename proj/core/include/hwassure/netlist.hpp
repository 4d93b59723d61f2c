#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hwassure {

/// Bit assignment in the port order of whatever it is applied to.
using Bits = std::vector<bool>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bench syntax or structural problem; `line()` is 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class GateKind : std::uint8_t { And, Nand, Or, Nor, Xor, Xnor, Not, Buf, Dff };

std::string_view to_string(GateKind kind);
std::optional<GateKind> gate_kind_from_string(std::string_view name);
bool is_single_input(GateKind kind);

/// Evaluates a combinational gate kind over 64 packed patterns.
std::uint64_t eval_gate_word(GateKind kind, std::span<const std::uint64_t> inputs);
bool eval_gate(GateKind kind, std::span<const bool> inputs);

using NetId = std::uint32_t;
using GateId = std::uint32_t;
inline constexpr NetId kNoNet = 0xffffffffu;
inline constexpr GateId kNoGate = 0xffffffffu;

struct Gate {
  GateId id = 0;
  GateKind kind = GateKind::Buf;
  std::vector<NetId> inputs;
  NetId output = kNoNet;
};

/// Gate-level netlist. Immutable once built; construct through CircuitBuilder.
///
/// Invariants checked at build time: one driver per net, acyclic
/// combinational logic, arity per kind, outputs refer to existing nets.
class Circuit {
 public:
  Circuit() = default;

  const std::string& name() const { return name_; }
  std::size_t num_nets() const { return net_names_.size(); }
  const std::string& net_name(NetId net) const { return net_names_.at(net); }
  std::optional<NetId> find_net(std::string_view name) const;
  NetId net(std::string_view name) const;

  std::span<const Gate> gates() const { return gates_; }
  const Gate& gate(GateId id) const { return gates_.at(id); }
  std::span<const NetId> primary_inputs() const { return inputs_; }
  std::span<const NetId> primary_outputs() const { return outputs_; }
  /// DFF gate ids in declaration order.
  std::span<const GateId> flip_flops() const { return flops_; }

  /// Combinational gates in an order where every gate follows its fanin.
  std::span<const GateId> topo_order() const { return topo_; }
  /// Driving gate of a net, kNoGate for primary inputs.
  GateId driver(NetId net) const { return driver_.at(net); }
  bool is_primary_input(NetId net) const { return driver_.at(net) == kNoGate; }
  /// Gates reading a net.
  std::span<const GateId> fanout(NetId net) const;

  std::size_t num_combinational_gates() const { return gates_.size() - flops_.size(); }
  bool is_combinational() const { return flops_.empty(); }

 private:
  friend class CircuitBuilder;

  std::string name_;
  std::vector<std::string> net_names_;
  std::unordered_map<std::string, NetId> net_index_;
  std::vector<Gate> gates_;
  std::vector<NetId> inputs_;
  std::vector<NetId> outputs_;
  std::vector<GateId> flops_;
  std::vector<GateId> topo_;
  std::vector<GateId> driver_;
  std::vector<std::uint32_t> fanout_offsets_;
  std::vector<GateId> fanout_gates_;
};

/// Incremental construction by net name; `build()` validates and freezes.
class CircuitBuilder {
 public:
  explicit CircuitBuilder(std::string name = {});

  NetId net(std::string_view name);
  bool has_net(std::string_view name) const;
  /// Returns `base` when unused, otherwise `base_1`, `base_2`, ...
  std::string fresh_name(std::string_view base) const;

  void add_input(std::string_view name, std::size_t line = 0);
  void add_output(std::string_view name, std::size_t line = 0);
  void add_gate(GateKind kind, std::string_view output, const std::vector<std::string>& inputs,
                std::size_t line = 0);

  /// Copies every gate of `sub` with nets renamed through `bind` (sub net name
  /// -> outer net name). Unbound nets become `prefix + name`. Primary
  /// inputs/outputs of `sub` are not declared on the outer circuit.
  void instantiate(const Circuit& sub, const std::unordered_map<std::string, std::string>& bind,
                   std::string_view prefix);

  Circuit build() &&;

 private:
  struct PendingGate {
    GateKind kind;
    NetId output;
    std::vector<NetId> inputs;
    std::size_t line;
  };

  std::string name_;
  std::vector<std::string> names_;
  std::unordered_map<std::string, NetId> index_;
  std::vector<std::pair<NetId, std::size_t>> inputs_;
  std::vector<std::pair<NetId, std::size_t>> outputs_;
  std::vector<PendingGate> gates_;
};

struct EvalResult {
  Bits outputs;
  Bits next_state;
};

/// One clocked step: outputs in primary-output order, next state in DFF order.
EvalResult evaluate(const Circuit& circuit, const Bits& inputs, const Bits& state = {});

/// Settled value of every net for one (inputs, state) assignment.
std::vector<std::uint8_t> evaluate_nets(const Circuit& circuit, const Bits& inputs, const Bits& state);

/// Bit-parallel evaluation of 64 patterns; returns one word per net.
std::vector<std::uint64_t> evaluate_words(const Circuit& circuit,
                                          std::span<const std::uint64_t> input_words,
                                          std::span<const std::uint64_t> state_words = {});

struct CircuitMetadata {
  std::string name;
  std::size_t key_length = 0;
  std::size_t num_gates = 0;
  std::size_t num_primary_inputs = 0;
  std::size_t num_primary_outputs = 0;
  std::size_t num_flip_flop_io = 0;

  bool operator==(const CircuitMetadata&) const = default;
};

/// True for names following the locked-benchmark key port convention.
bool is_key_input_name(std::string_view name);

/// Counts structural features. Primary inputs named keyinput<N> are not
/// counted as primary inputs.
CircuitMetadata extract_metadata(const Circuit& circuit, std::size_t key_length);

std::string metadata_csv_header();
std::string to_csv_row(const CircuitMetadata& metadata);

Circuit parse_bench(std::string_view text, std::string name = {});
Circuit read_bench_file(const std::string& path);
std::string write_bench(const Circuit& circuit);
void write_bench_file(const Circuit& circuit, const std::string& path);

/// Same gate kinds, connectivity by net name, and port orderings.
bool structurally_equal(const Circuit& a, const Circuit& b);

}  // namespace hwassure
