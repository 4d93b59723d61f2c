#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hwassure/netlist.hpp"

namespace testsupport {

inline std::string data_dir() { return HWASSURE_DATA_DIR; }
inline std::string bench_path(const std::string& name) { return data_dir() + "/benchmarks/" + name + ".bench"; }

inline hwassure::Circuit load(const std::string& name) { return hwassure::read_bench_file(bench_path(name)); }

/// Random well-formed circuit: gates read from inputs, flop outputs or earlier
/// gates. Every DFF takes its D pin from a gate output.
inline hwassure::Circuit random_circuit(std::uint64_t seed, int inputs, int gates, int flops, int outputs) {
  using hwassure::GateKind;
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  hwassure::CircuitBuilder b("rand" + std::to_string(seed));
  std::vector<std::string> pool;
  for (int i = 0; i < inputs; ++i) {
    pool.push_back("i" + std::to_string(i));
    b.add_input(pool.back());
  }
  for (int i = 0; i < flops; ++i) pool.push_back("q" + std::to_string(i));
  const GateKind kinds[] = {GateKind::And, GateKind::Nand, GateKind::Or, GateKind::Nor,
                            GateKind::Xor, GateKind::Xnor, GateKind::Not, GateKind::Buf};
  std::vector<std::string> gate_nets;
  for (int g = 0; g < gates; ++g) {
    const auto kind = kinds[pick(8)];
    const std::size_t arity = hwassure::is_single_input(kind) ? 1 : 2 + pick(2);
    std::vector<std::string> ins;
    for (std::size_t a = 0; a < arity; ++a) ins.push_back(pool[pick(pool.size())]);
    const auto name = "g" + std::to_string(g);
    b.add_gate(kind, name, ins);
    pool.push_back(name);
    gate_nets.push_back(name);
  }
  for (int i = 0; i < flops; ++i) b.add_gate(GateKind::Dff, "q" + std::to_string(i), {gate_nets[pick(gate_nets.size())]});
  for (int o = 0; o < outputs; ++o) b.add_output(gate_nets[gate_nets.size() - 1 - static_cast<std::size_t>(o)]);
  return std::move(b).build();
}

/// Reference evaluator: repeat sweeps in source order until nothing changes.
/// Returns every net value keyed by name.
inline std::map<std::string, int> naive_net_values(const hwassure::Circuit& c, const hwassure::Bits& in,
                                                   const hwassure::Bits& state) {
  using hwassure::GateKind;
  std::map<std::string, int> v;
  for (std::size_t i = 0; i < in.size(); ++i) v[c.net_name(c.primary_inputs()[i])] = in[i];
  for (std::size_t i = 0; i < state.size(); ++i) v[c.net_name(c.gate(c.flip_flops()[i]).output)] = state[i];
  // Start every undriven net at 0; an acyclic circuit settles after depth sweeps.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& g : c.gates()) {
      if (g.kind == GateKind::Dff) continue;
      std::vector<int> a;
      for (auto n : g.inputs) a.push_back(v[c.net_name(n)]);
      int r = 0;
      switch (g.kind) {
        case GateKind::And: r = 1; for (int x : a) r &= x; break;
        case GateKind::Nand: r = 1; for (int x : a) r &= x; r = !r; break;
        case GateKind::Or: for (int x : a) r |= x; break;
        case GateKind::Nor: for (int x : a) r |= x; r = !r; break;
        case GateKind::Xor: for (int x : a) r ^= x; break;
        case GateKind::Xnor: for (int x : a) r ^= x; r = !r; break;
        case GateKind::Not: r = !a[0]; break;
        case GateKind::Buf: r = a[0]; break;
        case GateKind::Dff: break;
      }
      auto& slot = v[c.net_name(g.output)];
      if (slot != r) {
        slot = r;
        changed = true;
      }
    }
  }
  for (hwassure::NetId n = 0; n < c.num_nets(); ++n) v[c.net_name(n)];
  return v;
}

inline hwassure::EvalResult naive_evaluate(const hwassure::Circuit& c, const hwassure::Bits& in,
                                           const hwassure::Bits& state) {
  const auto v = naive_net_values(c, in, state);
  hwassure::EvalResult out;
  for (auto n : c.primary_outputs()) out.outputs.push_back(v.at(c.net_name(n)));
  for (auto ff : c.flip_flops()) out.next_state.push_back(v.at(c.net_name(c.gate(ff).inputs[0])));
  return out;
}

inline hwassure::Bits bits_of(std::uint64_t value, std::size_t n) {
  hwassure::Bits b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = (value >> i) & 1u;
  return b;
}

inline hwassure::Bits random_bits(std::mt19937_64& rng, std::size_t n) {
  hwassure::Bits b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = rng() & 1u;
  return b;
}

inline std::string load_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void save_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace testsupport
