#include "hwassure/platform.hpp"

#include <optional>
#include <unordered_map>
#include <unordered_set>

namespace hwassure {

FrameModel frame(const Circuit& circuit) {
  FrameModel model;
  model.num_original_inputs = circuit.primary_inputs().size();
  model.num_original_outputs = circuit.primary_outputs().size();

  CircuitBuilder b(circuit.name());
  for (auto n : circuit.primary_inputs()) b.add_input(circuit.net_name(n));
  for (auto ff : circuit.flip_flops()) b.add_input(circuit.net_name(circuit.gate(ff).output));
  for (auto n : circuit.primary_outputs()) b.add_output(circuit.net_name(n));
  for (auto ff : circuit.flip_flops()) b.add_output(circuit.net_name(circuit.gate(ff).inputs[0]));
  for (const auto& g : circuit.gates()) {
    if (g.kind == GateKind::Dff) continue;
    std::vector<std::string> ins;
    for (auto n : g.inputs) ins.push_back(circuit.net_name(n));
    b.add_gate(g.kind, circuit.net_name(g.output), ins);
  }
  model.frame = std::move(b).build();
  for (auto ff : circuit.flip_flops()) {
    model.ff_inputs.push_back(model.frame.net(circuit.net_name(circuit.gate(ff).output)));
    model.ff_outputs.push_back(model.frame.net(circuit.net_name(circuit.gate(ff).inputs[0])));
  }
  return model;
}

Circuit unroll(const Circuit& circuit, std::size_t frames) {
  if (frames == 0) throw Error("unroll needs at least one frame");
  CircuitBuilder b(circuit.name() + "_x" + std::to_string(frames));
  auto at = [&](NetId n, std::size_t t) { return circuit.net_name(n) + "@" + std::to_string(t); };
  for (std::size_t t = 0; t < frames; ++t)
    for (auto n : circuit.primary_inputs()) b.add_input(at(n, t));
  for (auto ff : circuit.flip_flops()) b.add_input(at(circuit.gate(ff).output, 0));
  for (std::size_t t = 0; t < frames; ++t)
    for (auto n : circuit.primary_outputs()) b.add_output(at(n, t));
  for (auto ff : circuit.flip_flops()) b.add_output(at(circuit.gate(ff).inputs[0], frames - 1));
  for (std::size_t t = 0; t < frames; ++t) {
    for (const auto& g : circuit.gates()) {
      if (g.kind == GateKind::Dff) {
        if (t + 1 < frames) b.add_gate(GateKind::Buf, at(g.output, t + 1), {at(g.inputs[0], t)});
        continue;
      }
      std::vector<std::string> ins;
      for (auto n : g.inputs) ins.push_back(at(n, t));
      b.add_gate(g.kind, at(g.output, t), ins);
    }
  }
  return std::move(b).build();
}

Circuit scan_wrap(const Circuit& circuit) {
  if (!circuit.is_combinational()) throw Error("scan_wrap expects a combinational circuit");
  CircuitBuilder b(circuit.name() + "_wrapped");
  for (auto n : circuit.primary_inputs()) {
    const auto& name = circuit.net_name(n);
    if (is_key_input_name(name))
      b.add_input(name);
    else
      b.add_gate(GateKind::Dff, name, {name});
  }
  for (const auto& g : circuit.gates()) {
    std::vector<std::string> ins;
    for (auto n : g.inputs) ins.push_back(circuit.net_name(n));
    b.add_gate(g.kind, circuit.net_name(g.output), ins);
  }
  const auto pos = circuit.primary_outputs();
  for (std::size_t j = 0; j < pos.size(); ++j) {
    const auto cell = "wo" + std::to_string(j);
    if (circuit.find_net(cell)) throw Error("circuit already uses net name '" + cell + "'");
    b.add_gate(GateKind::Dff, cell, {circuit.net_name(pos[j])});
  }
  return std::move(b).build();
}

// ---------------------------------------------------------------- Topology

ScanTopology ScanTopology::for_flops(std::size_t flop_count, std::size_t num_chains,
                                     std::size_t compression_ratio) {
  if (num_chains == 0 || compression_ratio == 0) throw Error("scan chains and CR must be positive");
  if (num_chains % compression_ratio != 0)
    throw Error("CR " + std::to_string(compression_ratio) + " does not divide " + std::to_string(num_chains) +
                " chains");
  ScanTopology t;
  t.num_chains = num_chains;
  t.compression_ratio = compression_ratio;
  t.external_channels = num_chains / compression_ratio;
  t.chain_length = std::max<std::size_t>(1, (flop_count + num_chains - 1) / num_chains);
  return t;
}

void ScanTopology::validate() const {
  if (compression_ratio == 0 || external_channels == 0 || chain_length == 0)
    throw Error("scan topology fields must be positive");
  if (num_chains != compression_ratio * external_channels)
    throw Error("scan topology needs chains = CR x channels");
}

namespace {

std::string indexed(const char* base, std::size_t i) { return base + std::to_string(i); }

// XOR tree over `ins` into `out` using 2-input gates; `tmp` prefixes internal nets.
void add_parity(CircuitBuilder& b, std::vector<std::string> ins, const std::string& out, const std::string& tmp) {
  if (ins.size() == 1) {
    b.add_gate(GateKind::Buf, out, ins);
    return;
  }
  std::size_t counter = 0;
  while (ins.size() > 2) {
    std::vector<std::string> next;
    for (std::size_t i = 0; i + 1 < ins.size(); i += 2) {
      auto name = tmp + std::to_string(counter++);
      b.add_gate(GateKind::Xor, name, {ins[i], ins[i + 1]});
      next.push_back(std::move(name));
    }
    if (ins.size() % 2) next.push_back(ins.back());
    ins = std::move(next);
  }
  b.add_gate(GateKind::Xor, out, ins);
}

}  // namespace

Circuit build_decompressor(const ScanTopology& topology) {
  topology.validate();
  CircuitBuilder b("decompressor_cr" + std::to_string(topology.compression_ratio));
  for (std::size_t c = 0; c < topology.external_channels; ++c) b.add_input(indexed("ch", c));
  for (std::size_t j = 0; j < topology.num_chains; ++j) b.add_output(indexed("sc", j));
  for (std::size_t j = 0; j < topology.num_chains; ++j)
    b.add_gate(GateKind::Buf, indexed("sc", j), {indexed("ch", j / topology.compression_ratio)});
  return std::move(b).build();
}

Circuit build_compactor(const ScanTopology& topology) {
  topology.validate();
  CircuitBuilder b("compactor_cr" + std::to_string(topology.compression_ratio));
  for (std::size_t j = 0; j < topology.num_chains; ++j) b.add_input(indexed("sc", j));
  for (std::size_t c = 0; c < topology.external_channels; ++c) b.add_output(indexed("ch", c));
  for (std::size_t c = 0; c < topology.external_channels; ++c) {
    std::vector<std::string> group;
    for (std::size_t r = 0; r < topology.compression_ratio; ++r)
      group.push_back(indexed("sc", c * topology.compression_ratio + r));
    add_parity(b, group, indexed("ch", c), "x" + std::to_string(c) + "_");
  }
  return std::move(b).build();
}

PlatformFrame compose_platform_frame(const FrameModel& model, const ScanTopology& topology) {
  topology.validate();
  const auto flops = model.ff_inputs.size();
  if (topology.capacity() < flops)
    throw Error("scan topology holds " + std::to_string(topology.capacity()) + " flops but the frame has " +
                std::to_string(flops));
  if (flops > 0 && topology.capacity() - flops >= topology.num_chains)
    throw Error("scan topology is longer than needed for " + std::to_string(flops) + " flops");

  const auto& fr = model.frame;
  const auto L = topology.chain_length;
  const auto C = topology.external_channels;
  auto flop_at = [&](std::size_t chain, std::size_t pos) -> std::optional<std::size_t> {
    auto f = chain * L + pos;
    return f < flops ? std::optional<std::size_t>(f) : std::nullopt;
  };

  PlatformFrame out;
  out.topology = topology;
  std::unordered_set<std::string> reserved;
  for (NetId n = 0; n < fr.num_nets(); ++n) reserved.insert(fr.net_name(n));
  auto port = [&](std::string name) {
    if (reserved.count(name)) throw Error("frame already uses net name '" + name + "'");
    reserved.insert(name);
    return name;
  };

  CircuitBuilder b(fr.name() + "_cr" + std::to_string(topology.compression_ratio));
  for (std::size_t i = 0; i < model.num_original_inputs; ++i) b.add_input(fr.net_name(fr.primary_inputs()[i]));
  if (flops == 0) {
    for (auto n : fr.primary_outputs()) b.add_output(fr.net_name(n));
    b.instantiate(fr, {}, "");
    out.circuit = std::move(b).build();
    return out;
  }

  // Which (group, channel) pairs observe at least one flop.
  std::vector<std::vector<std::vector<std::size_t>>> members(L, std::vector<std::vector<std::size_t>>(C));
  for (std::size_t p = 0; p < L; ++p)
    for (std::size_t j = 0; j < topology.num_chains; ++j)
      if (flop_at(j, p)) members[p][j / topology.compression_ratio].push_back(j);

  std::vector<std::vector<std::string>> scan_in(L);
  for (std::size_t p = 0; p < L; ++p)
    for (std::size_t c = 0; c < C; ++c) {
      auto name = port("si" + std::to_string(p) + "_" + std::to_string(c));
      b.add_input(name);
      out.scan_in.push_back(ScanPort{p, c, name});
      scan_in[p].push_back(std::move(name));
    }
  for (std::size_t i = 0; i < model.num_original_outputs; ++i) b.add_output(fr.net_name(fr.primary_outputs()[i]));
  for (std::size_t p = 0; p < L; ++p)
    for (std::size_t c = 0; c < C; ++c) {
      if (members[p][c].empty()) continue;
      auto name = port("so" + std::to_string(p) + "_" + std::to_string(c));
      b.add_output(name);
      out.scan_out.push_back(ScanPort{p, c, std::move(name)});
    }

  // Decompressor copy per shift group drives that group's Q pins. Copy
  // outputs for chain positions without a flop are left out.
  const auto decompressor = build_decompressor(topology);
  for (std::size_t p = 0; p < L; ++p) {
    std::unordered_map<std::string, std::string> bind;
    for (std::size_t c = 0; c < C; ++c) bind[indexed("ch", c)] = scan_in[p][c];
    CircuitBuilder copy(decompressor.name());
    for (std::size_t c = 0; c < C; ++c) copy.add_input(indexed("ch", c));
    for (const auto& g : decompressor.gates()) {
      const auto j = static_cast<std::size_t>(&g - decompressor.gates().data());
      auto f = flop_at(j, p);
      if (!f) continue;
      const auto& local = decompressor.net_name(g.output);
      bind[local] = fr.net_name(model.ff_inputs[*f]);
      copy.add_gate(g.kind, local, {decompressor.net_name(g.inputs[0])});
    }
    b.instantiate(std::move(copy).build(), bind, "dc" + std::to_string(p) + "_");
    ++out.decompressor_copies;
  }

  b.instantiate(fr, {}, "");

  // Compactor copy per shift group reads that group's D pins; absent flops
  // hold constant 0 and drop out of the parity.
  for (std::size_t p = 0; p < L; ++p) {
    std::unordered_map<std::string, std::string> bind;
    CircuitBuilder copy("compactor_cr" + std::to_string(topology.compression_ratio));
    for (std::size_t c = 0; c < C; ++c) {
      if (members[p][c].empty()) continue;
      std::vector<std::string> group;
      for (auto j : members[p][c]) {
        group.push_back(indexed("sc", j));
        copy.add_input(group.back());
        bind[group.back()] = fr.net_name(model.ff_outputs[*flop_at(j, p)]);
      }
      bind[indexed("ch", c)] = "so" + std::to_string(p) + "_" + std::to_string(c);
      add_parity(copy, group, indexed("ch", c), "x" + std::to_string(c) + "_");
    }
    b.instantiate(std::move(copy).build(), bind, "cp" + std::to_string(p) + "_");
    ++out.compactor_copies;
  }

  out.circuit = std::move(b).build();
  return out;
}

}  // namespace hwassure
