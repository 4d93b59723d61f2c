#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hwassure/netlist.hpp"

namespace hwassure {

inline constexpr std::size_t kMaxTruthTableFanin = 16;

/// Halved: CTF = 1 - |N(0) - N(1)| / 2. Classical: 1 - |N(0) - N(1)| / (N(0) + N(1)).
/// N counts are fractions of the gate's input patterns in both forms.
enum class CtfForm { Halved, Classical };

double controllability_transfer(GateKind kind, std::size_t fanin, CtfForm form = CtfForm::Halved);
/// Mean over inputs of the fraction of patterns where flipping that input flips the output.
double observability_transfer(GateKind kind, std::size_t fanin);

/// Per-net CY: primary inputs 1, gate outputs CTF x mean input CY. Reconvergent
/// fanout is treated as independent.
std::vector<double> controllability(const Circuit& circuit, CtfForm form = CtfForm::Halved);

/// Per-net OY: primary outputs 1; otherwise the mean over fanout pins of
/// OTF(gate) x OY(gate output); 0 for nets that reach nothing.
std::vector<double> observability(const Circuit& circuit);

struct OhOptions {
  std::size_t patterns = 4096;
  std::uint64_t seed = 1;
  /// Enumerate all 2^PI patterns instead of sampling.
  bool exhaustive = false;
};

struct OhResult {
  double value = 0.0;
  std::size_t detected = 0;
  std::size_t injected = 0;
  std::size_t patterns = 0;
};

/// Stuck-at-0/1 on every primary input; a fault counts when some pattern
/// changes the value of `node`.
OhResult observation_hardness(const Circuit& circuit, NetId node, const OhOptions& options = {});

struct FsmTransition {
  std::string from;
  std::string to;
  bool vulnerable = false;
  std::vector<double> pv;  // delays of violated paths
  std::vector<double> po;  // delays of non-violated paths
};

struct FsmSpec {
  std::vector<std::string> states;
  std::vector<FsmTransition> transitions;
  std::vector<double> p_fs;  // path delays of the full design
};

struct TransitionSf {
  std::size_t transition = 0;
  double sf = 0.0;
};

struct FsmFiResult {
  double pvt_percent = 0.0;
  /// Empty when no transition is vulnerable.
  std::optional<double> asf;
  std::vector<TransitionSf> sf;
};

/// SF = (min(PV) - max(PO)) / mean(P_FS); max over an empty PO is 0.
FsmFiResult fsm_fi_vulnerability(const FsmSpec& spec);

/// Rows "transition,<from>,<to>,<0|1>,<pv>,<po>", "pfs,<delays>" and
/// optionally "state,<name>"; delay lists are ';'-separated.
FsmSpec parse_fsm_csv(std::string_view text);

double puf_inter_hd(const std::vector<Bits>& responses);
double puf_intra_hd(const Bits& reference, const std::vector<Bits>& samples);

/// One response per line, hex digits (4 bits each, most significant first)
/// or a 0b-prefixed bit string.
std::vector<Bits> parse_puf_responses(std::string_view text);
Bits parse_response(std::string_view text);

struct Defect {
  std::string name;
  double confidence = 0.0;
  double frequency = 0.0;
};

/// Sum(X_R * DF) / Sum(DF) x 100.
double cdc(const std::vector<Defect>& defects);

/// Header "defect,confidence,frequency".
std::vector<Defect> parse_defect_csv(std::string_view text);

}  // namespace hwassure
