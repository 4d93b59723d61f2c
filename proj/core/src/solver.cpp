#include "hwassure/solver.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace hwassure {

void SatBackend::add_formula(const CnfFormula& formula) {
  ensure_vars(formula.num_variables);
  for (const auto& c : formula.clauses) add_clause(c);
}

Lit SatBackend::ensure_vars(std::int32_t count) {
  while (num_vars() < count) new_var();
  return num_vars();
}

// ---------------------------------------------------------------- CDCL

namespace {

using ILit = std::uint32_t;  // 2 * var + sign
using CRef = std::uint32_t;
constexpr CRef kNoRef = 0xffffffffu;
constexpr ILit kNoLit = 0xffffffffu;

inline std::uint32_t var_of(ILit l) { return l >> 1; }
inline bool sign_of(ILit l) { return l & 1u; }

// Luby sequence scaled by y, MiniSat formulation.
double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

struct Watcher {
  CRef cref;
  ILit blocker;
};

}  // namespace

struct CdclSolver::Impl {
  // Clause arena layout: [size, flags, activity bits, lits...].
  static constexpr std::uint32_t kLearnt = 1, kDeleted = 2;
  std::vector<std::uint32_t> arena;
  std::size_t wasted = 0;
  std::vector<CRef> clauses, learnts;

  std::vector<std::int8_t> assigns;  // 1 true, -1 false, 0 unassigned
  std::vector<int> level;
  std::vector<CRef> reason;
  std::vector<std::uint8_t> phase;  // saved polarity, 1 = true
  std::vector<double> activity;
  std::vector<std::uint8_t> seen;
  std::vector<std::vector<Watcher>> watches;  // indexed by literal that falsifies a watch

  std::vector<ILit> trail;
  std::vector<std::size_t> trail_lim;
  std::size_t qhead = 0;

  std::vector<std::uint32_t> heap;
  std::vector<int> heap_pos;

  double var_inc = 1.0, var_decay = 0.95;
  double cla_inc = 1.0, cla_decay = 0.999;
  double max_learnts = 0;

  bool ok = true;
  std::vector<ILit> assumptions;
  std::vector<Lit> failed;
  std::vector<bool> model;
  SolverLimits limits;
  SolverStats stats;

  std::int64_t conflict_budget = -1;
  std::chrono::steady_clock::time_point deadline{};
  bool has_deadline = false;
  bool budget_hit = false;

  // ----- helpers
  std::uint32_t num_vars() const { return static_cast<std::uint32_t>(assigns.size()); }
  std::uint32_t& csize(CRef c) { return arena[c]; }
  std::uint32_t& cflags(CRef c) { return arena[c + 1]; }
  float cact(CRef c) const { return std::bit_cast<float>(arena[c + 2]); }
  void set_cact(CRef c, float a) { arena[c + 2] = std::bit_cast<std::uint32_t>(a); }
  ILit* clits(CRef c) { return &arena[c + 3]; }

  std::int8_t value(ILit l) const {
    const auto a = assigns[var_of(l)];
    return sign_of(l) ? static_cast<std::int8_t>(-a) : a;
  }
  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  static ILit to_ilit(Lit l) {
    const auto v = static_cast<std::uint32_t>(std::abs(l) - 1);
    return 2 * v + (l < 0 ? 1u : 0u);
  }
  static Lit to_lit(ILit l) {
    const auto v = static_cast<Lit>(var_of(l) + 1);
    return sign_of(l) ? -v : v;
  }

  // ----- heap (max activity at top, ties by lower index)
  bool heap_less(std::uint32_t a, std::uint32_t b) const {
    return activity[a] > activity[b] || (activity[a] == activity[b] && a < b);
  }
  void heap_up(std::size_t i) {
    const auto v = heap[i];
    while (i > 0) {
      const auto parent = (i - 1) / 2;
      if (!heap_less(v, heap[parent])) break;
      heap[i] = heap[parent];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = parent;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_down(std::size_t i) {
    const auto v = heap[i];
    for (;;) {
      auto child = 2 * i + 1;
      if (child >= heap.size()) break;
      if (child + 1 < heap.size() && heap_less(heap[child + 1], heap[child])) ++child;
      if (!heap_less(heap[child], v)) break;
      heap[i] = heap[child];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = child;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_insert(std::uint32_t v) {
    if (heap_pos[v] >= 0) return;
    heap.push_back(v);
    heap_up(heap.size() - 1);
  }
  std::uint32_t heap_pop() {
    const auto top = heap[0];
    heap_pos[top] = -1;
    const auto last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_pos[last] = 0;
      heap_down(0);
    }
    return top;
  }

  // ----- activity
  void bump_var(std::uint32_t v) {
    if ((activity[v] += var_inc) > 1e100) {
      for (auto& a : activity) a *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos[v]));
  }
  void bump_clause(CRef c) {
    const float a = cact(c) + static_cast<float>(cla_inc);
    set_cact(c, a);
    if (a > 1e20f) {
      for (auto l : learnts) set_cact(l, cact(l) * 1e-20f);
      cla_inc *= 1e-20;
    }
  }

  // ----- clauses
  CRef alloc(const std::vector<ILit>& lits, bool learnt) {
    const auto c = static_cast<CRef>(arena.size());
    arena.push_back(static_cast<std::uint32_t>(lits.size()));
    arena.push_back(learnt ? kLearnt : 0);
    arena.push_back(std::bit_cast<std::uint32_t>(0.0f));
    arena.insert(arena.end(), lits.begin(), lits.end());
    return c;
  }
  void attach(CRef c) {
    const auto* l = clits(c);
    watches[l[0] ^ 1].push_back({c, l[1]});
    watches[l[1] ^ 1].push_back({c, l[0]});
  }
  bool locked(CRef c) {
    const auto first = clits(c)[0];
    return value(first) == 1 && reason[var_of(first)] == c;
  }
  void remove(CRef c) {
    cflags(c) |= kDeleted;
    wasted += csize(c) + 3;
  }

  void garbage_collect() {
    std::vector<std::uint32_t> fresh;
    fresh.reserve(arena.size() - wasted);
    std::unordered_map<CRef, CRef> moved;
    auto relocate = [&](std::vector<CRef>& list) {
      std::size_t j = 0;
      for (auto c : list) {
        if (cflags(c) & kDeleted) continue;
        const auto n = static_cast<CRef>(fresh.size());
        fresh.insert(fresh.end(), arena.begin() + c, arena.begin() + c + 3 + csize(c));
        moved[c] = n;
        list[j++] = n;
      }
      list.resize(j);
    };
    relocate(clauses);
    relocate(learnts);
    for (auto l : trail) {
      auto& r = reason[var_of(l)];
      if (r != kNoRef) r = moved.at(r);
    }
    arena = std::move(fresh);
    wasted = 0;
    for (auto& w : watches) w.clear();
    for (auto c : clauses) attach(c);
    for (auto c : learnts) attach(c);
  }

  // ----- trail
  void enqueue(ILit l, CRef from) {
    const auto v = var_of(l);
    assigns[v] = sign_of(l) ? -1 : 1;
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(l);
  }
  void cancel_until(int lvl) {
    if (decision_level() <= lvl) return;
    for (auto i = trail.size(); i-- > trail_lim[static_cast<std::size_t>(lvl)];) {
      const auto v = var_of(trail[i]);
      phase[v] = sign_of(trail[i]) ? 0 : 1;
      assigns[v] = 0;
      reason[v] = kNoRef;
      heap_insert(v);
    }
    trail.resize(trail_lim[static_cast<std::size_t>(lvl)]);
    trail_lim.resize(static_cast<std::size_t>(lvl));
    qhead = trail.size();
  }

  CRef propagate() {
    CRef conflict = kNoRef;
    while (qhead < trail.size()) {
      const ILit p = trail[qhead++];
      const ILit false_lit = p ^ 1;
      auto& ws = watches[p];
      std::size_t i = 0, j = 0;
      ++stats.propagations;
      while (i < ws.size()) {
        const auto w = ws[i];
        if (value(w.blocker) == 1) {
          ws[j++] = ws[i++];
          continue;
        }
        const CRef c = w.cref;
        if (cflags(c) & kDeleted) {
          ++i;
          continue;
        }
        ILit* lits = clits(c);
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        ++i;
        const ILit first = lits[0];
        const Watcher keep{c, first};
        if (first != w.blocker && value(first) == 1) {
          ws[j++] = keep;
          continue;
        }
        bool moved = false;
        const auto n = csize(c);
        for (std::uint32_t k = 2; k < n; ++k) {
          if (value(lits[k]) != -1) {
            lits[1] = lits[k];
            lits[k] = false_lit;
            watches[lits[1] ^ 1].push_back(keep);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = keep;
        if (value(first) == -1) {
          conflict = c;
          qhead = trail.size();
          while (i < ws.size()) ws[j++] = ws[i++];
        } else {
          enqueue(first, c);
        }
      }
      ws.resize(j);
      if (conflict != kNoRef) break;
    }
    return conflict;
  }

  std::uint32_t abstract_level(std::uint32_t v) const { return 1u << (static_cast<unsigned>(level[v]) & 31u); }

  bool lit_redundant(ILit p, std::uint32_t levels, std::vector<ILit>& to_clear) {
    std::vector<ILit> stack{p};
    const auto top = to_clear.size();
    while (!stack.empty()) {
      const auto q = stack.back();
      stack.pop_back();
      const CRef c = reason[var_of(q)];
      const ILit* lits = clits(c);
      for (std::uint32_t k = 1; k < csize(c); ++k) {
        const auto l = lits[k];
        const auto v = var_of(l);
        if (seen[v] || level[v] == 0) continue;
        if (reason[v] != kNoRef && (abstract_level(v) & levels)) {
          seen[v] = 1;
          stack.push_back(l);
          to_clear.push_back(l);
        } else {
          for (auto k2 = top; k2 < to_clear.size(); ++k2) seen[var_of(to_clear[k2])] = 0;
          to_clear.resize(top);
          return false;
        }
      }
    }
    return true;
  }

  void analyze(CRef conflict, std::vector<ILit>& learnt, int& backtrack) {
    learnt.assign(1, kNoLit);
    int path = 0;
    ILit p = kNoLit;
    auto index = trail.size();
    do {
      if (cflags(conflict) & kLearnt) bump_clause(conflict);
      const ILit* lits = clits(conflict);
      for (std::uint32_t k = (p == kNoLit ? 0 : 1); k < csize(conflict); ++k) {
        const auto q = lits[k];
        const auto v = var_of(q);
        if (seen[v] || level[v] == 0) continue;
        bump_var(v);
        seen[v] = 1;
        if (level[v] >= decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
      while (!seen[var_of(trail[--index])]) {
      }
      p = trail[index];
      conflict = reason[var_of(p)];
      seen[var_of(p)] = 0;
      --path;
    } while (path > 0);
    learnt[0] = p ^ 1;

    std::vector<ILit> to_clear(learnt.begin(), learnt.end());
    std::uint32_t levels = 0;
    for (std::size_t k = 1; k < learnt.size(); ++k) levels |= abstract_level(var_of(learnt[k]));
    std::size_t j = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
      const auto v = var_of(learnt[k]);
      if (reason[v] == kNoRef || !lit_redundant(learnt[k], levels, to_clear)) learnt[j++] = learnt[k];
    }
    learnt.resize(j);
    stats.learnt_literals += learnt.size();

    backtrack = 0;
    if (learnt.size() > 1) {
      std::size_t max_i = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level[var_of(learnt[k])] > level[var_of(learnt[max_i])]) max_i = k;
      std::swap(learnt[1], learnt[max_i]);
      backtrack = level[var_of(learnt[1])];
    }
    for (auto l : to_clear) seen[var_of(l)] = 0;
  }

  // Assumption literals that imply the negation of `p` (p is false).
  void analyze_final(ILit p) {
    failed.clear();
    failed.push_back(to_lit(p ^ 1));
    if (decision_level() == 0) return;
    seen[var_of(p)] = 1;
    for (auto i = trail.size(); i-- > trail_lim[0];) {
      const auto v = var_of(trail[i]);
      if (!seen[v]) continue;
      if (reason[v] == kNoRef) {
        if (v != var_of(p)) failed.push_back(to_lit(trail[i]));
      } else {
        const CRef c = reason[v];
        const ILit* lits = clits(c);
        for (std::uint32_t k = 1; k < csize(c); ++k)
          if (level[var_of(lits[k])] > 0) seen[var_of(lits[k])] = 1;
      }
      seen[v] = 0;
    }
    seen[var_of(p)] = 0;
  }

  void reduce_db() {
    std::sort(learnts.begin(), learnts.end(), [&](CRef a, CRef b) {
      if (cact(a) != cact(b)) return cact(a) < cact(b);
      return a < b;
    });
    const auto half = learnts.size() / 2;
    std::size_t j = 0;
    for (std::size_t i = 0; i < learnts.size(); ++i) {
      const CRef c = learnts[i];
      if (i < half && csize(c) > 2 && !locked(c))
        remove(c);
      else
        learnts[j++] = c;
    }
    learnts.resize(j);
  }

  bool out_of_budget() {
    if (conflict_budget >= 0 && static_cast<std::int64_t>(stats.conflicts) >= conflict_budget) return true;
    return has_deadline && std::chrono::steady_clock::now() >= deadline;
  }

  ILit pick_branch() {
    while (!heap.empty()) {
      const auto v = heap_pop();
      if (assigns[v] == 0) return 2 * v + (phase[v] ? 0u : 1u);
    }
    return kNoLit;
  }

  SatStatus search(std::int64_t conflicts_until_restart) {
    std::vector<ILit> learnt;
    std::int64_t local = 0;
    for (;;) {
      const CRef conflict = propagate();
      if (conflict != kNoRef) {
        ++stats.conflicts;
        ++local;
        if (decision_level() == 0) return SatStatus::Unsat;
        int backtrack = 0;
        analyze(conflict, learnt, backtrack);
        cancel_until(backtrack);
        if (learnt.size() == 1) {
          enqueue(learnt[0], kNoRef);
        } else {
          const CRef c = alloc(learnt, true);
          learnts.push_back(c);
          attach(c);
          bump_clause(c);
          enqueue(learnt[0], c);
        }
        var_inc /= var_decay;
        cla_inc /= cla_decay;
        continue;
      }
      if (out_of_budget()) {
        budget_hit = true;
        return SatStatus::Unknown;
      }
      if (local >= conflicts_until_restart) return SatStatus::Unknown;
      if (static_cast<double>(learnts.size()) - static_cast<double>(trail.size()) >= max_learnts) reduce_db();

      ILit next = kNoLit;
      while (static_cast<std::size_t>(decision_level()) < assumptions.size()) {
        const auto a = assumptions[static_cast<std::size_t>(decision_level())];
        if (value(a) == 1) {
          trail_lim.push_back(trail.size());
        } else if (value(a) == -1) {
          analyze_final(a ^ 1);
          return SatStatus::Unsat;
        } else {
          next = a;
          break;
        }
      }
      if (next == kNoLit) {
        ++stats.decisions;
        next = pick_branch();
        if (next == kNoLit) return SatStatus::Sat;
      }
      trail_lim.push_back(trail.size());
      enqueue(next, kNoRef);
    }
  }
};

CdclSolver::CdclSolver() : impl_(std::make_unique<Impl>()) {}
CdclSolver::~CdclSolver() = default;

Lit CdclSolver::new_var() {
  auto& s = *impl_;
  const auto v = s.num_vars();
  s.assigns.push_back(0);
  s.level.push_back(0);
  s.reason.push_back(kNoRef);
  s.phase.push_back(0);
  s.activity.push_back(0.0);
  s.seen.push_back(0);
  s.watches.emplace_back();
  s.watches.emplace_back();
  s.heap_pos.push_back(-1);
  s.heap_insert(v);
  return static_cast<Lit>(v + 1);
}

std::int32_t CdclSolver::num_vars() const { return static_cast<std::int32_t>(impl_->num_vars()); }

bool CdclSolver::add_clause(std::span<const Lit> clause) {
  auto& s = *impl_;
  if (!s.ok) return false;
  s.cancel_until(0);
  std::vector<ILit> lits;
  lits.reserve(clause.size());
  for (auto l : clause) {
    if (l == 0 || std::abs(l) > num_vars()) throw Error("literal " + std::to_string(l) + " out of range");
    lits.push_back(Impl::to_ilit(l));
  }
  std::sort(lits.begin(), lits.end());
  std::size_t j = 0;
  ILit prev = kNoLit;
  for (auto l : lits) {
    if (s.value(l) == 1 || l == (prev ^ 1)) return true;
    if (l != prev && s.value(l) != -1) lits[j++] = prev = l;
  }
  lits.resize(j);
  if (lits.empty()) return s.ok = false;
  if (lits.size() == 1) {
    s.enqueue(lits[0], kNoRef);
    return s.ok = (s.propagate() == kNoRef);
  }
  const CRef c = s.alloc(lits, false);
  s.clauses.push_back(c);
  s.attach(c);
  return true;
}

SatStatus CdclSolver::solve(std::span<const Lit> assumptions) {
  auto& s = *impl_;
  ++s.stats.solves;
  s.model.clear();
  s.failed.clear();
  if (!s.ok) return SatStatus::Unsat;
  s.assumptions.clear();
  for (auto a : assumptions) {
    if (a == 0 || std::abs(a) > num_vars()) throw Error("assumption " + std::to_string(a) + " out of range");
    s.assumptions.push_back(Impl::to_ilit(a));
  }
  s.budget_hit = false;
  s.conflict_budget = s.limits.max_conflicts >= 0
                          ? static_cast<std::int64_t>(s.stats.conflicts) + s.limits.max_conflicts
                          : -1;
  s.has_deadline = s.limits.max_seconds >= 0;
  if (s.has_deadline)
    s.deadline = std::chrono::steady_clock::now() +
                 std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                     std::chrono::duration<double>(s.limits.max_seconds));
  s.max_learnts = std::max(static_cast<double>(s.clauses.size()) / 3.0, 2000.0);

  SatStatus status = SatStatus::Unknown;
  for (int restart = 0; status == SatStatus::Unknown; ++restart) {
    status = s.search(static_cast<std::int64_t>(luby(2.0, restart) * 100));
    if (s.budget_hit) break;
    if (status == SatStatus::Unknown) {
      ++s.stats.restarts;
      s.cancel_until(0);
      s.max_learnts *= 1.05;
      if (s.wasted > s.arena.size() / 2) s.garbage_collect();
    }
  }
  if (status == SatStatus::Sat) {
    s.model.resize(s.num_vars());
    for (std::uint32_t v = 0; v < s.num_vars(); ++v) s.model[v] = s.assigns[v] == 1;
  } else if (status == SatStatus::Unsat && s.failed.empty()) {
    s.ok = false;
  }
  s.cancel_until(0);
  return status;
}

bool CdclSolver::model_value(Lit var) const {
  const auto v = static_cast<std::size_t>(std::abs(var) - 1);
  if (v >= impl_->model.size()) throw Error("no model value for variable " + std::to_string(var));
  return var > 0 ? impl_->model[v] : !impl_->model[v];
}

void CdclSolver::set_limits(const SolverLimits& limits) { impl_->limits = limits; }
const SolverStats& CdclSolver::stats() const { return impl_->stats; }
const std::vector<Lit>& CdclSolver::failed_assumptions() const { return impl_->failed; }

// ---------------------------------------------------------------- External

DimacsProcessSolver::DimacsProcessSolver(std::string command) : command_(std::move(command)) {
  if (command_.empty()) throw Error("external solver path is empty");
}

Lit DimacsProcessSolver::new_var() { return formula_.new_var(); }

bool DimacsProcessSolver::add_clause(std::span<const Lit> clause) {
  formula_.add_clause(std::vector<Lit>(clause.begin(), clause.end()));
  return true;
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

}  // namespace

SatStatus DimacsProcessSolver::solve(std::span<const Lit> assumptions) {
  CnfFormula query = formula_;
  for (auto a : assumptions) query.add_clause({a});
  namespace fs = std::filesystem;
  static std::uint64_t counter = 0;
  const auto path = fs::temp_directory_path() /
                    ("hwassure_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "_" +
                     std::to_string(counter++) + ".cnf");
  {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_dimacs(query, out);
  }
  std::string cmd = shell_quote(command_) + " " + shell_quote(path.string());
  if (limits_.max_seconds > 0)
    cmd = "timeout " + std::to_string(static_cast<long long>(std::ceil(limits_.max_seconds))) + " " + cmd;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) {
    fs::remove(path);
    throw Error("cannot run external solver '" + command_ + "'");
  }
  std::string output;
  std::array<char, 4096> buf{};
  while (auto n = std::fread(buf.data(), 1, buf.size(), pipe)) output.append(buf.data(), n);
  pclose(pipe);
  fs::remove(path);

  SatStatus status = SatStatus::Unknown;
  model_.assign(static_cast<std::size_t>(formula_.num_variables), false);
  std::istringstream in(output);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("s ", 0) == 0) {
      if (line.find("UNSATISFIABLE") != std::string::npos)
        status = SatStatus::Unsat;
      else if (line.find("SATISFIABLE") != std::string::npos)
        status = SatStatus::Sat;
    } else if (line.rfind("v ", 0) == 0) {
      std::istringstream ls(line.substr(2));
      long long l;
      while (ls >> l)
        if (l != 0 && std::llabs(l) <= formula_.num_variables)
          model_[static_cast<std::size_t>(std::llabs(l) - 1)] = l > 0;
    }
  }
  return status;
}

bool DimacsProcessSolver::model_value(Lit var) const {
  const auto v = static_cast<std::size_t>(std::abs(var) - 1);
  if (v >= model_.size()) throw Error("no model value for variable " + std::to_string(var));
  return var > 0 ? model_[v] : !model_[v];
}

std::unique_ptr<SatBackend> make_solver(const std::string& spec) {
  if (spec.empty() || spec == "builtin") return std::make_unique<CdclSolver>();
  if (spec.rfind("dimacs:", 0) == 0) return std::make_unique<DimacsProcessSolver>(spec.substr(7));
  throw Error("unknown solver '" + spec + "' (expected builtin or dimacs:<path>)");
}

SolveResult solve(const CnfFormula& formula, std::span<const Lit> assumptions, const SolverLimits& limits) {
  CdclSolver s;
  s.set_limits(limits);
  s.add_formula(formula);
  SolveResult r;
  r.status = s.solve(assumptions);
  if (r.status == SatStatus::Unknown) throw ResourceLimitError("solver budget exhausted");
  if (r.status == SatStatus::Sat) {
    r.assignment.assign(static_cast<std::size_t>(formula.num_variables) + 1, false);
    for (Lit v = 1; v <= formula.num_variables; ++v) r.assignment[static_cast<std::size_t>(v)] = s.model_value(v);
  }
  return r;
}

std::string format_solution(const SolveResult& result) {
  std::ostringstream out;
  switch (result.status) {
    case SatStatus::Sat: {
      out << "s SATISFIABLE\nv";
      for (std::size_t v = 1; v < result.assignment.size(); ++v)
        out << ' ' << (result.assignment[v] ? "" : "-") << v;
      out << " 0\n";
      break;
    }
    case SatStatus::Unsat: out << "s UNSATISFIABLE\n"; break;
    case SatStatus::Unknown: out << "s UNKNOWN\n"; break;
  }
  return out.str();
}

}  // namespace hwassure
