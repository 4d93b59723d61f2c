#pragma once

#include <cstddef>
#include <cstdint>

#include "hwassure/locking.hpp"
#include "hwassure/platform.hpp"

namespace hwassure {

/// Black-box input -> output access to an unlocked chip.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::size_t num_inputs() const = 0;
  virtual std::size_t num_outputs() const = 0;
  Bits query(const Bits& inputs);
  std::uint64_t queries() const { return queries_; }

 protected:
  virtual Bits do_query(const Bits& inputs) = 0;

 private:
  std::uint64_t queries_ = 0;
};

/// Combinational locked design evaluated under its correct key; inputs are the
/// data inputs in core port order.
class CircuitOracle final : public Oracle {
 public:
  explicit CircuitOracle(LockedCircuit locked);
  std::size_t num_inputs() const override { return locked_.num_data_inputs(); }
  std::size_t num_outputs() const override { return locked_.core.primary_outputs().size(); }

 protected:
  Bits do_query(const Bits& inputs) override;

 private:
  LockedCircuit locked_;
};

/// Sequential locked design behind scan access. A query shifts the scan-in
/// stimulus through the decompressor into the chains, runs one functional
/// cycle with the primary inputs applied, then shifts the captured state out
/// through the compactor.
///
/// Input layout: original data inputs, then one bit per (shift group p,
/// channel c) in group-major order, where group p is the bit that ends at
/// chain position p. Output layout: original outputs, then one bit per
/// (p, c) whose channel observes at least one real flop at position p.
/// Unused chain cells read as 0.
class ScanOracle final : public Oracle {
 public:
  ScanOracle(LockedCircuit sequential, ScanTopology topology);
  std::size_t num_inputs() const override;
  std::size_t num_outputs() const override;

 protected:
  Bits do_query(const Bits& inputs) override;

 private:
  LockedCircuit locked_;
  ScanTopology topology_;
  std::vector<std::vector<bool>> observed_;  // [position][channel]
  std::size_t num_observed_ = 0;
};

/// Composed one-frame attack model of a (possibly sequential) locked design;
/// I/O layout matches ScanOracle for the same topology.
LockedCircuit platform_attack_model(const LockedCircuit& sequential, const ScanTopology& topology);

}  // namespace hwassure
