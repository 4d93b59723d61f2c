#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hwassure/netlist.hpp"

namespace hwassure {

/// One-cycle combinational equivalent of a sequential design: every DFF Q pin
/// becomes a primary input and every D pin a primary output, appended after
/// the original ports in DFF declaration order.
struct FrameModel {
  Circuit frame;
  std::vector<NetId> ff_inputs;
  std::vector<NetId> ff_outputs;
  std::size_t num_original_inputs = 0;
  std::size_t num_original_outputs = 0;
};

FrameModel frame(const Circuit& circuit);

/// Stitches `frames` copies of the frame into an unrolled combinational
/// circuit (state of copy t feeds copy t+1). Not used by the attack flow.
Circuit unroll(const Circuit& circuit, std::size_t frames);

/// Boundary wrapper for a combinational IP: every data input becomes a
/// holding scan cell (Q drives the old input net, D = Q) and every output is
/// captured by a cell wo<j>. keyinput<N> ports stay primary inputs, so the
/// result has no data I/O and all access goes through scan.
Circuit scan_wrap(const Circuit& circuit);

/// Internal scan chains fed through external channels.
/// num_chains = compression_ratio * external_channels.
struct ScanTopology {
  std::size_t num_chains = 1;
  std::size_t chain_length = 1;
  std::size_t compression_ratio = 1;
  std::size_t external_channels = 1;

  /// Topology for `flop_count` flops on `num_chains` chains at the given ratio.
  static ScanTopology for_flops(std::size_t flop_count, std::size_t num_chains, std::size_t compression_ratio);

  std::size_t capacity() const { return num_chains * chain_length; }
  void validate() const;
  bool operator==(const ScanTopology&) const = default;
};

/// Broadcast fan-out: channel c (inputs ch<c>) drives chains c*CR .. c*CR+CR-1
/// (outputs sc<j>).
Circuit build_decompressor(const ScanTopology& topology);

/// XOR-tree compaction: output ch<c> is the parity of chains c*CR .. c*CR+CR-1.
Circuit build_compactor(const ScanTopology& topology);

struct ScanPort {
  std::size_t group = 0;
  std::size_t channel = 0;
  std::string net;
};

/// Flop f sits on chain f / chain_length at position f % chain_length. Shift
/// group p collects position p of every chain.
struct PlatformFrame {
  Circuit circuit;
  ScanTopology topology;
  std::size_t decompressor_copies = 0;
  std::size_t compactor_copies = 0;
  /// In port order, group-major. A channel whose chains hold no flop at some
  /// position has no scan-out port for that group.
  std::vector<ScanPort> scan_in;
  std::vector<ScanPort> scan_out;
};

/// Frame plus one decompressor and one compactor copy per shift group.
/// Original primary inputs/outputs pass through unchanged.
PlatformFrame compose_platform_frame(const FrameModel& model, const ScanTopology& topology);

}  // namespace hwassure
