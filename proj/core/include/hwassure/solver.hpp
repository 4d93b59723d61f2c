#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hwassure/cnf.hpp"

namespace hwassure {

enum class SatStatus { Sat, Unsat, Unknown };

/// Raised when a solve call runs out of its conflict or time budget.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

struct SolverLimits {
  std::int64_t max_conflicts = -1;  // per solve call, -1 = unlimited
  double max_seconds = -1.0;        // per solve call, -1 = unlimited
};

/// Incremental SAT engine. Variables are 1-based DIMACS indices.
class SatBackend {
 public:
  virtual ~SatBackend() = default;
  virtual Lit new_var() = 0;
  virtual std::int32_t num_vars() const = 0;
  /// Returns false once the clause set is known unsatisfiable.
  virtual bool add_clause(std::span<const Lit> clause) = 0;
  /// Unknown means a limit was hit.
  virtual SatStatus solve(std::span<const Lit> assumptions = {}) = 0;
  /// Model value after Sat.
  virtual bool model_value(Lit var) const = 0;
  virtual void set_limits(const SolverLimits& limits) = 0;

  void add_formula(const CnfFormula& formula);
  Lit ensure_vars(std::int32_t count);
};

struct SolverStats {
  std::uint64_t solves = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t restarts = 0;
  std::uint64_t learnt_literals = 0;
};

/// Conflict-driven clause learning: two watched literals, first-UIP learning
/// with clause minimization, VSIDS, phase saving, Luby restarts and activity
/// based learnt-clause deletion. No randomness; runs are reproducible.
class CdclSolver final : public SatBackend {
 public:
  CdclSolver();
  ~CdclSolver() override;
  CdclSolver(const CdclSolver&) = delete;
  CdclSolver& operator=(const CdclSolver&) = delete;

  Lit new_var() override;
  std::int32_t num_vars() const override;
  bool add_clause(std::span<const Lit> clause) override;
  SatStatus solve(std::span<const Lit> assumptions = {}) override;
  bool model_value(Lit var) const override;
  void set_limits(const SolverLimits& limits) override;

  const SolverStats& stats() const;
  /// Subset of the assumptions responsible for the last Unsat answer.
  const std::vector<Lit>& failed_assumptions() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs an external DIMACS solver per call: `<command> <file.cnf>`, reading
/// competition-format output ("s SATISFIABLE", "v ..." lines). Assumptions are
/// passed as unit clauses.
class DimacsProcessSolver final : public SatBackend {
 public:
  explicit DimacsProcessSolver(std::string command);

  Lit new_var() override;
  std::int32_t num_vars() const override { return formula_.num_variables; }
  bool add_clause(std::span<const Lit> clause) override;
  SatStatus solve(std::span<const Lit> assumptions = {}) override;
  bool model_value(Lit var) const override;
  void set_limits(const SolverLimits& limits) override { limits_ = limits; }

 private:
  std::string command_;
  CnfFormula formula_;
  std::vector<bool> model_;
  SolverLimits limits_;
};

/// "builtin" or "dimacs:<path>".
std::unique_ptr<SatBackend> make_solver(const std::string& spec);

struct SolveResult {
  SatStatus status = SatStatus::Unknown;
  /// assignment[v] for v in 1..num_variables (index 0 unused).
  std::vector<bool> assignment;
};

/// One-shot solve with the built-in engine. Throws ResourceLimitError when a
/// limit is hit.
SolveResult solve(const CnfFormula& formula, std::span<const Lit> assumptions = {},
                  const SolverLimits& limits = {});

/// Competition-format answer ("s ...", "v ... 0").
std::string format_solution(const SolveResult& result);

}  // namespace hwassure
