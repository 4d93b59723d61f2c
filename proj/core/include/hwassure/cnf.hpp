#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hwassure/netlist.hpp"

namespace hwassure {

/// DIMACS-style literal: variable v >= 1 is `v`, its negation `-v`.
using Lit = std::int32_t;

struct CnfFormula {
  std::int32_t num_variables = 0;
  std::vector<std::vector<Lit>> clauses;
  /// Variable per circuit net, 0 for nets not encoded.
  std::vector<Lit> net_to_var;

  Lit new_var() { return ++num_variables; }
  void add_clause(std::vector<Lit> clause);
};

/// Appends clauses for every combinational gate of `circuit` into `formula`.
/// `input_vars` (optional, one per primary input) reuses existing variables so
/// several copies can share inputs; 0 entries get fresh variables. Returns the
/// variable of every net.
std::vector<Lit> encode_circuit(CnfFormula& formula, const Circuit& circuit, std::span<const Lit> input_vars = {});

/// Standalone Tseitin encoding; fills net_to_var.
CnfFormula tseitin_encode(const Circuit& circuit);

void write_dimacs(const CnfFormula& formula, std::ostream& out);
std::string to_dimacs(const CnfFormula& formula);
CnfFormula parse_dimacs(std::string_view text);
CnfFormula read_dimacs_file(const std::string& path);

}  // namespace hwassure
