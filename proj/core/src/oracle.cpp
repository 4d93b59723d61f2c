#include "hwassure/oracle.hpp"

namespace hwassure {

Bits Oracle::query(const Bits& inputs) {
  if (inputs.size() != num_inputs())
    throw Error("oracle expects " + std::to_string(num_inputs()) + " inputs, got " + std::to_string(inputs.size()));
  ++queries_;
  return do_query(inputs);
}

CircuitOracle::CircuitOracle(LockedCircuit locked) : locked_(std::move(locked)) {
  if (!locked_.core.is_combinational()) throw Error("circuit oracle needs a combinational design");
}

Bits CircuitOracle::do_query(const Bits& inputs) {
  return evaluate_locked(locked_, locked_.correct_key, inputs).outputs;
}

ScanOracle::ScanOracle(LockedCircuit sequential, ScanTopology topology)
    : locked_(std::move(sequential)), topology_(topology) {
  topology_.validate();
  const auto flops = locked_.core.flip_flops().size();
  if (topology_.capacity() < flops) throw Error("scan topology too small for the design");
  const auto L = topology_.chain_length;
  observed_.assign(L, std::vector<bool>(topology_.external_channels, false));
  for (std::size_t f = 0; f < flops; ++f) {
    const auto chain = f / L;
    observed_[f % L][chain / topology_.compression_ratio] = true;
  }
  for (const auto& row : observed_)
    for (bool b : row) num_observed_ += b;
}

std::size_t ScanOracle::num_inputs() const {
  const auto scan = locked_.core.flip_flops().empty() ? 0 : topology_.chain_length * topology_.external_channels;
  return locked_.num_data_inputs() + scan;
}

std::size_t ScanOracle::num_outputs() const {
  return locked_.core.primary_outputs().size() + num_observed_;
}

Bits ScanOracle::do_query(const Bits& inputs) {
  const auto n = locked_.num_data_inputs();
  const Bits data(inputs.begin(), inputs.begin() + static_cast<std::ptrdiff_t>(n));
  const auto flops = locked_.core.flip_flops().size();
  if (flops == 0) return evaluate_locked(locked_, locked_.correct_key, data).outputs;

  const auto L = topology_.chain_length;
  const auto C = topology_.external_channels;
  const auto cr = topology_.compression_ratio;
  // cells[j][i]: chain j, cell i. Shifting moves cell i to i+1 and loads cell 0.
  std::vector<Bits> cells(topology_.num_chains, Bits(L, false));
  auto shift_in = [&](std::size_t cycle) {
    const auto group = L - 1 - cycle;
    for (std::size_t j = 0; j < topology_.num_chains; ++j) {
      for (std::size_t i = L - 1; i > 0; --i) cells[j][i] = cells[j][i - 1];
      cells[j][0] = inputs[n + group * C + j / cr];
    }
  };
  for (std::size_t t = 0; t < L; ++t) shift_in(t);

  Bits state(flops);
  for (std::size_t f = 0; f < flops; ++f) state[f] = cells[f / L][f % L];
  const auto step = evaluate_locked(locked_, locked_.correct_key, data, state);

  for (auto& chain : cells) std::fill(chain.begin(), chain.end(), false);
  for (std::size_t f = 0; f < flops; ++f) cells[f / L][f % L] = step.next_state[f];

  // Shift-out cycle t presents cell L-1 to the compactor, which started at
  // position L-1-t.
  std::vector<Bits> seen(L, Bits(C, false));
  for (std::size_t t = 0; t < L; ++t) {
    for (std::size_t c = 0; c < C; ++c) {
      bool parity = false;
      for (std::size_t r = 0; r < cr; ++r) parity ^= cells[c * cr + r][L - 1];
      seen[L - 1 - t][c] = parity;
    }
    for (auto& chain : cells) {
      for (std::size_t i = L - 1; i > 0; --i) chain[i] = chain[i - 1];
      chain[0] = false;
    }
  }

  Bits out = step.outputs;
  for (std::size_t p = 0; p < L; ++p)
    for (std::size_t c = 0; c < C; ++c)
      if (observed_[p][c]) out.push_back(seen[p][c]);
  return out;
}

LockedCircuit platform_attack_model(const LockedCircuit& sequential, const ScanTopology& topology) {
  auto composed = compose_platform_frame(frame(sequential.core), topology);
  return make_locked(std::move(composed.circuit), sequential.correct_key, sequential.lock_sites);
}

}  // namespace hwassure
