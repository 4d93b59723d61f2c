#include "hwassure/sat_attack.hpp"

#include <chrono>

#include "hwassure/rng.hpp"

namespace hwassure {

std::string_view to_string(AttackStatus status) {
  return status == AttackStatus::Success ? "success" : "timeout";
}

namespace {

// Clauses accumulate in `formula`; `flush` forwards the new ones to the solver.
class IncrementalEncoder {
 public:
  explicit IncrementalEncoder(SatBackend& solver) : solver_(solver) {}

  CnfFormula& formula() { return formula_; }

  void flush() {
    solver_.ensure_vars(formula_.num_variables);
    for (; sent_ < formula_.clauses.size(); ++sent_) solver_.add_clause(formula_.clauses[sent_]);
  }

 private:
  SatBackend& solver_;
  CnfFormula formula_;
  std::size_t sent_ = 0;
};

}  // namespace

AttackResult sat_attack(const LockedCircuit& model, Oracle& oracle, const AttackBudget& budget) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  const auto& core = model.core;
  if (!core.is_combinational()) throw Error("attack model must be combinational; frame or compose it first");
  if (oracle.num_inputs() != model.num_data_inputs() || oracle.num_outputs() != core.primary_outputs().size())
    throw Error("oracle interface " + std::to_string(oracle.num_inputs()) + "->" +
                std::to_string(oracle.num_outputs()) + " does not match model " +
                std::to_string(model.num_data_inputs()) + "->" + std::to_string(core.primary_outputs().size()));

  auto solver = make_solver(budget.solver);
  IncrementalEncoder enc(*solver);
  auto& f = enc.formula();

  const auto n = model.num_data_inputs();
  const auto k = model.key_length();
  const auto pis = core.primary_inputs().size();
  const auto pos = core.primary_outputs();

  const Lit t = f.new_var();
  f.add_clause({t});
  std::vector<Lit> x(n), k1(k), k2(k);
  for (auto& v : x) v = f.new_var();
  for (auto& v : k1) v = f.new_var();
  for (auto& v : k2) v = f.new_var();

  auto bind = [&](const std::vector<Lit>& data, const std::vector<Lit>& key) {
    std::vector<Lit> in(pis, 0);
    for (std::size_t i = 0; i < n; ++i) in[model.data_positions[i]] = data[i];
    for (std::size_t i = 0; i < k; ++i) in[model.key_positions[i]] = key[i];
    return in;
  };

  // Miter: some output differs between the key copies while `act` holds.
  const auto y1 = encode_circuit(f, core, bind(x, k1));
  const auto y2 = encode_circuit(f, core, bind(x, k2));
  const Lit act = f.new_var();
  std::vector<Lit> any_diff{-act};
  for (auto po : pos) {
    const Lit a = y1[po], b = y2[po], d = f.new_var();
    f.add_clause({-d, a, b});
    f.add_clause({-d, -a, -b});
    f.add_clause({d, -a, b});
    f.add_clause({d, a, -b});
    any_diff.push_back(d);
  }
  f.add_clause(any_diff);
  enc.flush();

  AttackResult result;
  auto set_limits = [&]() -> bool {
    const double left = budget.max_seconds - elapsed();
    if (budget.max_seconds >= 0 && left <= 0) return false;
    solver->set_limits(SolverLimits{-1, budget.max_seconds >= 0 ? left : -1.0});
    return true;
  };
  auto finish = [&](AttackStatus status) {
    result.status = status;
    result.iterations = result.dip_trace.size();
    result.elapsed_seconds = elapsed();
    return result;
  };

  for (;;) {
    if (budget.max_iterations && result.dip_trace.size() >= budget.max_iterations) return finish(AttackStatus::Timeout);
    if (!set_limits()) return finish(AttackStatus::Timeout);
    const Lit assume[] = {act};
    const auto status = solver->solve(assume);
    if (status == SatStatus::Unknown) return finish(AttackStatus::Timeout);
    if (status == SatStatus::Unsat) break;

    DipRecord dip;
    dip.input.resize(n);
    for (std::size_t i = 0; i < n; ++i) dip.input[i] = solver->model_value(x[i]);
    dip.output = oracle.query(dip.input);

    std::vector<Lit> fixed(n);
    for (std::size_t i = 0; i < n; ++i) fixed[i] = dip.input[i] ? t : -t;
    for (const auto* key : {&k1, &k2}) {
      const auto y = encode_circuit(f, core, bind(fixed, *key));
      for (std::size_t o = 0; o < pos.size(); ++o) f.add_clause({dip.output[o] ? y[pos[o]] : -y[pos[o]]});
    }
    enc.flush();
    result.dip_trace.push_back(std::move(dip));
  }

  if (!set_limits()) return finish(AttackStatus::Timeout);
  const Lit release[] = {-act};
  const auto status = solver->solve(release);
  if (status == SatStatus::Unknown) return finish(AttackStatus::Timeout);
  if (status == SatStatus::Unsat) throw Error("no key is consistent with the oracle responses");
  Bits key(k);
  for (std::size_t i = 0; i < k; ++i) key[i] = solver->model_value(k1[i]);
  result.recovered_key = LockingKey(std::move(key));
  return finish(AttackStatus::Success);
}

VerifyReport verify_key(const LockedCircuit& model, Oracle& oracle, const LockingKey& key,
                        std::size_t exhaustive_limit, std::size_t samples, std::uint64_t seed) {
  VerifyReport r;
  const auto n = model.num_data_inputs();
  auto check = [&](const Bits& in) {
    ++r.patterns;
    if (evaluate_locked(model, key, in).outputs != oracle.query(in)) ++r.mismatches;
  };
  if (n <= exhaustive_limit && n < 63) {
    r.exhaustive = true;
    Bits in(n);
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
      for (std::size_t i = 0; i < n; ++i) in[i] = (v >> i) & 1u;
      check(in);
    }
  } else {
    Rng rng(seed);
    for (std::size_t s = 0; s < samples; ++s) check(rng.bits(n));
  }
  r.equivalent = r.mismatches == 0;
  return r;
}

}  // namespace hwassure
