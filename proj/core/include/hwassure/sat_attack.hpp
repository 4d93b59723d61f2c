#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hwassure/locking.hpp"
#include "hwassure/oracle.hpp"
#include "hwassure/solver.hpp"

namespace hwassure {

struct AttackBudget {
  double max_seconds = 3600.0;
  std::uint64_t max_iterations = 0;  // 0 = unlimited
  std::string solver = "builtin";
};

enum class AttackStatus { Success, Timeout };
std::string_view to_string(AttackStatus status);

struct DipRecord {
  Bits input;
  Bits output;
};

struct AttackResult {
  LockingKey recovered_key;  // empty on timeout
  std::uint64_t iterations = 0;
  double elapsed_seconds = 0.0;
  std::vector<DipRecord> dip_trace;
  AttackStatus status = AttackStatus::Timeout;
};

/// Oracle-guided DIP loop on a combinational attack model. Each iteration
/// solves the two-key miter for a distinguishing input, queries the oracle and
/// constrains both key copies to the observed response; when the miter turns
/// UNSAT any key consistent with the accumulated responses is returned.
AttackResult sat_attack(const LockedCircuit& model, Oracle& oracle, const AttackBudget& budget = {});

struct VerifyReport {
  bool equivalent = false;
  bool exhaustive = false;
  std::uint64_t patterns = 0;
  std::uint64_t mismatches = 0;
};

/// Compares the model under `key` with the oracle: all patterns when there are
/// at most `exhaustive_limit` inputs, else `samples` seeded random patterns.
VerifyReport verify_key(const LockedCircuit& model, Oracle& oracle, const LockingKey& key,
                        std::size_t exhaustive_limit = 16, std::size_t samples = 10000, std::uint64_t seed = 1);

}  // namespace hwassure
