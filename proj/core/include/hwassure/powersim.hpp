#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hwassure/aes.hpp"
#include "hwassure/netlist.hpp"

namespace hwassure {

struct ToggleTrace {
  std::vector<std::uint64_t> per_cycle;
  std::uint64_t total = 0;
};

/// Primary-input vector for a given cycle.
using Stimulus = std::function<Bits(std::size_t cycle)>;

/// I.i.d. uniform input vectors drawn from a seeded generator, one per call in
/// cycle order.
Stimulus uniform_stimulus(std::uint64_t seed, std::size_t num_inputs);

/// Cycle-accurate zero-delay simulator that counts net transitions. The
/// reference point is the settled circuit with all inputs and flops at 0.
class ToggleSimulator {
 public:
  explicit ToggleSimulator(const Circuit& circuit);

  /// Applies `inputs` with the current flop state, returns the number of nets
  /// (inputs included) whose settled value changed, then clocks the flops.
  std::uint64_t step(const Bits& inputs);

  const Circuit& circuit() const { return *circuit_; }

 private:
  void settle();

  const Circuit* circuit_;
  std::vector<std::uint8_t> value_;
  std::vector<std::uint8_t> next_;
  std::vector<std::uint8_t> state_;
};

ToggleTrace simulate_circuit_toggles(const Circuit& circuit, const Stimulus& stimulus, std::size_t cycles);
ToggleTrace simulate_circuit_toggles(const Circuit& circuit, std::uint64_t stimulus_seed, std::size_t cycles);

enum class Granularity { PerEncryption, PerCycle };
std::string_view to_string(Granularity g);
Granularity granularity_from_string(std::string_view s);

struct NoiseIp {
  std::string name;
  Circuit circuit;
  std::uint64_t stimulus_seed = 1;
  /// Periodic activity pattern; cycle c is active when schedule[c % size].
  /// Empty means always active. Inactive cycles hold inputs and state.
  std::vector<bool> schedule;
};

struct SubsystemConfig {
  bool aes_enabled = true;
  std::vector<NoiseIp> noise_ips;
  std::size_t cycles_per_encryption = kAesCycles;
  Granularity granularity = Granularity::PerEncryption;
};

struct SwitchingProfile {
  std::string block;
  std::string key;  // hex, empty for key-independent blocks
  Granularity granularity = Granularity::PerEncryption;
  std::vector<std::uint64_t> samples;
};

struct SubsystemProfiles {
  SwitchingProfile subsystem;
  SwitchingProfile aes;
  std::vector<SwitchingProfile> ips;
};

/// Runs the AES core over the plaintexts with every noise IP clocked
/// alongside. The subsystem sample is the sum of the component samples.
SubsystemProfiles simulate_subsystem(const SubsystemConfig& config, const AesBlock& key,
                                     std::span<const AesBlock> plaintexts);

std::vector<AesBlock> random_plaintexts(std::size_t count, std::uint64_t seed);

/// Sums consecutive windows of `window` per-cycle values.
std::vector<std::uint64_t> window_sums(std::span<const std::uint64_t> per_cycle, std::size_t window);

/// Header "sample,subsystem,aes,<ip>..." and one row per sample.
std::string profiles_csv(const SubsystemProfiles& profiles);

}  // namespace hwassure
