#include "hwassure/powersim.hpp"

#include <memory>
#include <sstream>

#include "hwassure/rng.hpp"

namespace hwassure {

Stimulus uniform_stimulus(std::uint64_t seed, std::size_t num_inputs) {
  auto rng = std::make_shared<Rng>(seed);
  return [rng, num_inputs](std::size_t) { return rng->bits(num_inputs); };
}

ToggleSimulator::ToggleSimulator(const Circuit& circuit)
    : circuit_(&circuit),
      value_(circuit.num_nets(), 0),
      next_(circuit.num_nets(), 0),
      state_(circuit.flip_flops().size(), 0) {
  std::swap(value_, next_);
  settle();
  std::swap(value_, next_);
}

// Evaluates next_ from its primary-input and flop-output entries.
void ToggleSimulator::settle() {
  const auto& c = *circuit_;
  const auto ffs = c.flip_flops();
  for (std::size_t i = 0; i < ffs.size(); ++i) next_[c.gate(ffs[i]).output] = state_[i];
  for (auto id : c.topo_order()) {
    const auto& g = c.gate(id);
    std::uint8_t r = 0;
    switch (g.kind) {
      case GateKind::And:
      case GateKind::Nand:
        r = 1;
        for (auto n : g.inputs) r &= next_[n];
        if (g.kind == GateKind::Nand) r ^= 1;
        break;
      case GateKind::Or:
      case GateKind::Nor:
        for (auto n : g.inputs) r |= next_[n];
        if (g.kind == GateKind::Nor) r ^= 1;
        break;
      case GateKind::Xor:
      case GateKind::Xnor:
        for (auto n : g.inputs) r ^= next_[n];
        if (g.kind == GateKind::Xnor) r ^= 1;
        break;
      case GateKind::Not: r = next_[g.inputs[0]] ^ 1; break;
      case GateKind::Buf: r = next_[g.inputs[0]]; break;
      case GateKind::Dff: break;
    }
    next_[g.output] = r;
  }
}

std::uint64_t ToggleSimulator::step(const Bits& inputs) {
  const auto& c = *circuit_;
  const auto pis = c.primary_inputs();
  if (inputs.size() != pis.size())
    throw Error("expected " + std::to_string(pis.size()) + " inputs, got " + std::to_string(inputs.size()));
  for (std::size_t i = 0; i < pis.size(); ++i) next_[pis[i]] = inputs[i];
  settle();
  std::uint64_t toggles = 0;
  for (std::size_t n = 0; n < next_.size(); ++n) toggles += value_[n] != next_[n];
  std::swap(value_, next_);
  const auto ffs = c.flip_flops();
  for (std::size_t i = 0; i < ffs.size(); ++i) state_[i] = value_[c.gate(ffs[i]).inputs[0]];
  return toggles;
}

ToggleTrace simulate_circuit_toggles(const Circuit& circuit, const Stimulus& stimulus, std::size_t cycles) {
  if (cycles == 0) throw Error("toggle simulation needs at least one cycle");
  ToggleSimulator sim(circuit);
  ToggleTrace t;
  t.per_cycle.reserve(cycles);
  for (std::size_t cycle = 0; cycle < cycles; ++cycle) {
    t.per_cycle.push_back(sim.step(stimulus(cycle)));
    t.total += t.per_cycle.back();
  }
  return t;
}

ToggleTrace simulate_circuit_toggles(const Circuit& circuit, std::uint64_t stimulus_seed, std::size_t cycles) {
  return simulate_circuit_toggles(circuit, uniform_stimulus(stimulus_seed, circuit.primary_inputs().size()), cycles);
}

std::string_view to_string(Granularity g) { return g == Granularity::PerCycle ? "per-cycle" : "per-encryption"; }

Granularity granularity_from_string(std::string_view s) {
  if (s == "per-cycle") return Granularity::PerCycle;
  if (s == "per-encryption") return Granularity::PerEncryption;
  throw Error("granularity must be per-cycle or per-encryption, got '" + std::string(s) + "'");
}

std::vector<std::uint64_t> window_sums(std::span<const std::uint64_t> per_cycle, std::size_t window) {
  if (window == 0) throw Error("window must be positive");
  std::vector<std::uint64_t> out(per_cycle.size() / window, 0);
  for (std::size_t i = 0; i < out.size() * window; ++i) out[i / window] += per_cycle[i];
  return out;
}

SubsystemProfiles simulate_subsystem(const SubsystemConfig& config, const AesBlock& key,
                                     std::span<const AesBlock> plaintexts) {
  if (plaintexts.empty()) throw Error("subsystem simulation needs at least one plaintext");
  if (config.aes_enabled && config.cycles_per_encryption != kAesCycles)
    throw Error("the AES core takes " + std::to_string(kAesCycles) + " cycles per encryption");
  if (config.cycles_per_encryption == 0) throw Error("cycles per encryption must be positive");
  const auto per_enc = config.cycles_per_encryption;
  const auto cycles = plaintexts.size() * per_enc;

  auto finish = [&](std::string block, std::string key_hex, std::vector<std::uint64_t> per_cycle) {
    SwitchingProfile p;
    p.block = std::move(block);
    p.key = std::move(key_hex);
    p.granularity = config.granularity;
    p.samples = config.granularity == Granularity::PerCycle ? std::move(per_cycle) : window_sums(per_cycle, per_enc);
    return p;
  };

  std::vector<std::uint64_t> aes(cycles, 0);
  if (config.aes_enabled)
    for (std::size_t e = 0; e < plaintexts.size(); ++e) {
      const auto t = aes128_encrypt_trace(key, plaintexts[e]);
      for (std::size_t c = 0; c < kAesCycles; ++c) aes[e * per_enc + c] = t.toggles[c];
    }
  std::vector<std::uint64_t> total = aes;

  SubsystemProfiles out;
  for (const auto& ip : config.noise_ips) {
    ToggleSimulator sim(ip.circuit);
    Rng rng(ip.stimulus_seed);
    const auto width = ip.circuit.primary_inputs().size();
    std::vector<std::uint64_t> trace(cycles, 0);
    for (std::size_t c = 0; c < cycles; ++c) {
      if (!ip.schedule.empty() && !ip.schedule[c % ip.schedule.size()]) continue;
      trace[c] = sim.step(rng.bits(width));
      total[c] += trace[c];
    }
    out.ips.push_back(finish(ip.name, "", std::move(trace)));
  }
  const auto key_hex = to_hex(key);
  out.aes = finish("aes", config.aes_enabled ? key_hex : "", std::move(aes));
  out.subsystem = finish("subsystem", key_hex, std::move(total));
  return out;
}

std::vector<AesBlock> random_plaintexts(std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<AesBlock> out(count);
  for (auto& b : out)
    for (std::size_t i = 0; i < 16; i += 8) {
      const auto w = rng.next();
      for (std::size_t j = 0; j < 8; ++j) b[i + j] = static_cast<std::uint8_t>(w >> (8 * j));
    }
  return out;
}

std::string profiles_csv(const SubsystemProfiles& p) {
  std::ostringstream out;
  out << "sample,subsystem,aes";
  for (const auto& ip : p.ips) out << ',' << ip.block;
  out << '\n';
  for (std::size_t i = 0; i < p.subsystem.samples.size(); ++i) {
    out << i << ',' << p.subsystem.samples[i] << ',' << p.aes.samples[i];
    for (const auto& ip : p.ips) out << ',' << ip.samples[i];
    out << '\n';
  }
  return out.str();
}

}  // namespace hwassure
