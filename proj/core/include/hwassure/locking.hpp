#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "hwassure/netlist.hpp"

namespace hwassure {

/// Immutable key bit sequence; bit i drives keyinput<i>.
class LockingKey {
 public:
  LockingKey() = default;
  explicit LockingKey(Bits bits) : bits_(std::move(bits)) {}

  /// Parses a '0'/'1' string, first character is bit 0.
  static LockingKey from_string(std::string_view text);
  /// Key whose bit i equals bit i of `value` (little-endian enumeration).
  static LockingKey from_index(std::uint64_t value, std::size_t length);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  const Bits& bits() const { return bits_; }
  std::string to_string() const;

  bool operator==(const LockingKey&) const = default;

 private:
  Bits bits_;
};

struct LockSite {
  std::string net;
  GateKind kind = GateKind::Xor;
};

/// Locked netlist (the attacked design) plus its correct key. The oracle is
/// the same core evaluated under `correct_key`.
struct LockedCircuit {
  Circuit core;
  std::vector<NetId> key_inputs;
  LockingKey correct_key;
  std::vector<LockSite> lock_sites;
  /// Positions within core.primary_inputs().
  std::vector<std::size_t> data_positions;
  std::vector<std::size_t> key_positions;

  std::size_t key_length() const { return key_inputs.size(); }
  std::size_t num_data_inputs() const { return data_positions.size(); }
};

/// Wraps a circuit whose key ports follow the keyinput<N> naming convention.
LockedCircuit make_locked(Circuit core, LockingKey correct_key, std::vector<LockSite> sites = {});

/// Nets eligible for key gates: outputs of combinational gates.
std::vector<NetId> lockable_nets(const Circuit& circuit);

/// EPIC-style random XOR/XNOR key-gate insertion on k distinct gate outputs.
LockedCircuit insert_random_locking(const Circuit& circuit, std::size_t k, std::uint64_t seed);

/// Core primary-input vector with data bits and key bits in place.
Bits bind_key(const LockedCircuit& locked, const Bits& data_inputs, const LockingKey& key);

EvalResult evaluate_locked(const LockedCircuit& locked, const LockingKey& key, const Bits& inputs,
                           const Bits& state = {});

struct Exhaustive {};
struct Sampled {
  std::size_t num_inputs = 1000;
  std::size_t num_keys = 100;
  std::uint64_t seed = 1;
};
using CorruptibilityMode = std::variant<Exhaustive, Sampled>;

struct CorruptibilityEstimate {
  double value = 0.0;
  std::uint64_t input_samples = 0;
  std::uint64_t key_samples = 0;
};

/// Pr[Ce(i,k) != Co(i)] over inputs and wrong keys; "different" means any
/// output bit differs.
CorruptibilityEstimate compute_output_corruptibility(const LockedCircuit& locked,
                                                     const CorruptibilityMode& mode);

/// Key error rate: fraction of the 2^n input minterms corrupted by `key`.
double compute_ker(const LockedCircuit& locked, const LockingKey& key);

/// Input error rate: fraction of the 2^k - 1 wrong keys that corrupt `minterm`.
double compute_ier(const LockedCircuit& locked, const Bits& minterm);

LockingKey read_key_file(const std::string& path);
void write_key_file(const LockingKey& key, const std::string& path);

}  // namespace hwassure
