#include "hwassure/cnf.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace hwassure {

void CnfFormula::add_clause(std::vector<Lit> clause) {
  if (clause.empty()) throw Error("empty clause");
  for (auto l : clause)
    if (l == 0 || std::abs(l) > num_variables) throw Error("literal " + std::to_string(l) + " out of range");
  clauses.push_back(std::move(clause));
}

namespace {

// y <-> AND(a...) with y possibly negated for NAND.
void encode_and(CnfFormula& f, Lit y, const std::vector<Lit>& a) {
  std::vector<Lit> big{y};
  for (auto x : a) {
    f.add_clause({-y, x});
    big.push_back(-x);
  }
  f.add_clause(std::move(big));
}

void encode_xor2(CnfFormula& f, Lit y, Lit a, Lit b) {
  f.add_clause({-y, a, b});
  f.add_clause({-y, -a, -b});
  f.add_clause({y, -a, b});
  f.add_clause({y, a, -b});
}

}  // namespace

std::vector<Lit> encode_circuit(CnfFormula& f, const Circuit& circuit, std::span<const Lit> input_vars) {
  if (!circuit.is_combinational()) throw Error("CNF encoding needs a combinational circuit; frame it first");
  const auto pis = circuit.primary_inputs();
  if (!input_vars.empty() && input_vars.size() != pis.size())
    throw Error("input variable count does not match primary inputs");
  std::vector<Lit> var(circuit.num_nets(), 0);
  for (std::size_t i = 0; i < pis.size(); ++i)
    var[pis[i]] = (!input_vars.empty() && input_vars[i] != 0) ? input_vars[i] : f.new_var();
  for (auto gid : circuit.topo_order()) {
    const auto& g = circuit.gate(gid);
    const Lit y = f.new_var();
    var[g.output] = y;
    std::vector<Lit> a;
    for (auto n : g.inputs) a.push_back(var[n]);
    switch (g.kind) {
      case GateKind::And: encode_and(f, y, a); break;
      case GateKind::Nand: encode_and(f, -y, a); break;
      case GateKind::Or: {
        for (auto& x : a) x = -x;
        encode_and(f, -y, a);
        break;
      }
      case GateKind::Nor: {
        for (auto& x : a) x = -x;
        encode_and(f, y, a);
        break;
      }
      case GateKind::Xor:
      case GateKind::Xnor: {
        Lit acc = a[0];
        for (std::size_t i = 1; i + 1 < a.size(); ++i) {
          const Lit t = f.new_var();
          encode_xor2(f, t, acc, a[i]);
          acc = t;
        }
        encode_xor2(f, g.kind == GateKind::Xor ? y : -y, acc, a.back());
        break;
      }
      case GateKind::Not:
      case GateKind::Buf: {
        const Lit x = g.kind == GateKind::Not ? -a[0] : a[0];
        f.add_clause({-y, x});
        f.add_clause({y, -x});
        break;
      }
      case GateKind::Dff: break;
    }
  }
  return var;
}

CnfFormula tseitin_encode(const Circuit& circuit) {
  CnfFormula f;
  f.net_to_var = encode_circuit(f, circuit);
  return f;
}

void write_dimacs(const CnfFormula& f, std::ostream& out) {
  out << "p cnf " << f.num_variables << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) {
    for (auto l : c) out << l << ' ';
    out << "0\n";
  }
}

std::string to_dimacs(const CnfFormula& f) {
  std::ostringstream out;
  write_dimacs(f, out);
  return out.str();
}

CnfFormula parse_dimacs(std::string_view text) {
  CnfFormula f;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  std::size_t declared_clauses = 0;
  std::vector<Lit> current;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok[0] == 'c' || tok[0] == '%') continue;
    if (tok == "p") {
      std::string kind;
      long long v = -1, c = -1;
      if (header || !(ls >> kind >> v >> c) || kind != "cnf" || v < 0 || c < 0)
        throw ParseError(line_no, "bad DIMACS header");
      header = true;
      f.num_variables = static_cast<std::int32_t>(v);
      declared_clauses = static_cast<std::size_t>(c);
      continue;
    }
    if (!header) throw ParseError(line_no, "clause before 'p cnf' header");
    ls.clear();
    ls.str(line);
    long long l;
    while (ls >> l) {
      if (l == 0) {
        if (current.empty()) throw ParseError(line_no, "empty clause");
        f.clauses.push_back(std::move(current));
        current.clear();
      } else {
        if (std::llabs(l) > f.num_variables) throw ParseError(line_no, "literal exceeds declared variables");
        current.push_back(static_cast<Lit>(l));
      }
    }
    if (!ls.eof()) throw ParseError(line_no, "bad literal");
  }
  if (!current.empty()) f.clauses.push_back(std::move(current));
  if (!header) throw ParseError(0, "missing 'p cnf' header");
  if (f.clauses.size() != declared_clauses)
    throw ParseError(0, "header declares " + std::to_string(declared_clauses) + " clauses, found " +
                            std::to_string(f.clauses.size()));
  return f;
}

CnfFormula read_dimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_dimacs(ss.str());
}

}  // namespace hwassure
