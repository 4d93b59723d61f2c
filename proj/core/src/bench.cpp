#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hwassure/netlist.hpp"

namespace hwassure {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_net_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',' || c == '=' ||
        c == '#')
      return false;
  return true;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::toupper(static_cast<unsigned char>(a[i])) != std::toupper(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

// Splits "KIND(a, b, c)" into the keyword and its argument list.
bool split_call(std::string_view s, std::string_view& keyword, std::vector<std::string>& args) {
  auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') return false;
  keyword = trim(s.substr(0, open));
  auto inner = s.substr(open + 1, s.size() - open - 2);
  args.clear();
  if (trim(inner).empty()) return true;
  std::size_t start = 0;
  while (true) {
    auto comma = inner.find(',', start);
    auto piece = trim(inner.substr(start, comma == std::string_view::npos ? inner.size() - start : comma - start));
    args.emplace_back(piece);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return true;
}

}  // namespace

Circuit parse_bench(std::string_view text, std::string name) {
  CircuitBuilder builder(std::move(name));
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::string_view keyword;
  std::vector<std::string> args;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    auto line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      if (!split_call(line, keyword, args) || args.size() != 1 || !valid_net_name(args[0]))
        throw ParseError(line_no, "expected INPUT(net), OUTPUT(net) or 'net = KIND(...)'");
      if (iequals(keyword, "INPUT"))
        builder.add_input(args[0], line_no);
      else if (iequals(keyword, "OUTPUT"))
        builder.add_output(args[0], line_no);
      else
        throw ParseError(line_no, "unknown declaration '" + std::string(keyword) + "'");
      continue;
    }

    auto lhs = trim(line.substr(0, eq));
    auto rhs = trim(line.substr(eq + 1));
    if (!valid_net_name(lhs)) throw ParseError(line_no, "invalid net name '" + std::string(lhs) + "'");
    if (!split_call(rhs, keyword, args)) throw ParseError(line_no, "malformed gate expression");
    auto kind = gate_kind_from_string(keyword);
    if (!kind) throw ParseError(line_no, "unknown gate kind '" + std::string(keyword) + "'");
    for (const auto& a : args)
      if (!valid_net_name(a)) throw ParseError(line_no, "invalid net name '" + a + "'");
    builder.add_gate(*kind, lhs, args, line_no);
  }
  return std::move(builder).build();
}

Circuit read_bench_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open bench file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_bench(ss.str(), std::filesystem::path(path).stem().string());
}

std::string write_bench(const Circuit& circuit) {
  std::string out;
  out += "# " + (circuit.name().empty() ? std::string("circuit") : circuit.name()) + "\n";
  out += "# " + std::to_string(circuit.primary_inputs().size()) + " inputs, " +
         std::to_string(circuit.primary_outputs().size()) + " outputs, " +
         std::to_string(circuit.flip_flops().size()) + " flip-flops, " +
         std::to_string(circuit.num_combinational_gates()) + " gates\n\n";
  for (auto n : circuit.primary_inputs()) out += "INPUT(" + circuit.net_name(n) + ")\n";
  out += "\n";
  for (auto n : circuit.primary_outputs()) out += "OUTPUT(" + circuit.net_name(n) + ")\n";
  out += "\n";
  for (const auto& g : circuit.gates()) {
    out += circuit.net_name(g.output) + " = " + std::string(to_string(g.kind)) + "(";
    for (std::size_t i = 0; i < g.inputs.size(); ++i) {
      if (i) out += ", ";
      out += circuit.net_name(g.inputs[i]);
    }
    out += ")\n";
  }
  return out;
}

void write_bench_file(const Circuit& circuit, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << write_bench(circuit);
}

}  // namespace hwassure
