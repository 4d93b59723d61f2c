#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "hwassure/netlist.hpp"
#include "support.hpp"

using namespace hwassure;
using testsupport::bits_of;

namespace {

// c17 written out by hand from its six NAND definitions.
std::pair<bool, bool> c17_by_hand(bool n1, bool n2, bool n3, bool n6, bool n7) {
  auto nand = [](bool a, bool b) { return !(a && b); };
  const bool n10 = nand(n1, n3), n11 = nand(n3, n6);
  const bool n16 = nand(n2, n11), n19 = nand(n11, n7);
  return {nand(n10, n16), nand(n16, n19)};
}

std::size_t count_gate_lines(const std::string& path, bool include_dff) {
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.find('=') == std::string::npos) continue;
    if (!include_dff && line.find("DFF") != std::string::npos) continue;
    ++n;
  }
  return n;
}

}  // namespace

TEST(Bench, MinimalSource) {
  const auto c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a,b)");
  EXPECT_EQ(c.gates().size(), 1u);
  EXPECT_EQ(c.primary_inputs().size(), 2u);
  EXPECT_EQ(c.primary_outputs().size(), 1u);
  EXPECT_EQ(c.flip_flops().size(), 0u);
}

TEST(Bench, BundledC17Counts) {
  const auto c = testsupport::load("c17");
  EXPECT_EQ(c.gates().size(), 6u);
  for (const auto& g : c.gates()) EXPECT_EQ(g.kind, GateKind::Nand);
  EXPECT_EQ(c.primary_inputs().size(), 5u);
  EXPECT_EQ(c.primary_outputs().size(), 2u);
  EXPECT_EQ(c.name(), "c17");
}

TEST(Bench, UndefinedNet) {
  try {
    parse_bench("OUTPUT(c)\nINPUT(b)\nc = AND(a,b)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos);
  }
}

TEST(Bench, DuplicateDriver) {
  EXPECT_THROW(parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a,b)\nc = OR(a,b)"), ParseError);
  EXPECT_THROW(parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(a)\na = AND(a,b)"), ParseError);
}

TEST(Bench, CombinationalCycle) {
  EXPECT_THROW(parse_bench("INPUT(a)\nOUTPUT(x)\nx = AND(a,y)\ny = OR(a,x)"), ParseError);
  // A loop through a flop is fine.
  EXPECT_NO_THROW(parse_bench("INPUT(a)\nOUTPUT(x)\nx = AND(a,q)\nq = DFF(x)"));
}

TEST(Bench, SyntaxErrorsCarryLineNumbers) {
  try {
    parse_bench("INPUT(a)\n\n# note\nOUTPUT(b)\nb = FROB(a, a)\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
  EXPECT_THROW(parse_bench("INPUT(a\n"), ParseError);
  EXPECT_THROW(parse_bench("INPUT(a)\nOUTPUT(b)\nb = AND(a)\n"), ParseError);
  EXPECT_THROW(parse_bench("INPUT(a)\nOUTPUT(b)\nb = NOT(a, a)\n"), ParseError);
}

TEST(Bench, KeywordsAreCaseInsensitive) {
  const auto c = parse_bench("input(a)\nInput(b)\noutput(c)\nc = nand(a, b)  # trailing\nd = buff(c)");
  EXPECT_EQ(c.gate(0).kind, GateKind::Nand);
  EXPECT_EQ(c.gate(1).kind, GateKind::Buf);
}

TEST(Bench, WriteSingleAnd) {
  const auto text = write_bench(parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a,b)"));
  std::size_t count = 0;
  for (std::size_t p = text.find("= AND"); p != std::string::npos; p = text.find("= AND", p + 1)) ++count;
  EXPECT_EQ(count, 1u);
}

TEST(Bench, RoundTripBundled) {
  for (const char* name : {"c17", "c432", "c499", "c880", "c1355", "c1908", "c3540", "s27"}) {
    const auto c = testsupport::load(name);
    const auto again = parse_bench(write_bench(c), c.name());
    EXPECT_TRUE(structurally_equal(c, again)) << name;
  }
}

TEST(Bench, RoundTripKeepsDff) {
  const auto c = testsupport::load("s27");
  const auto again = parse_bench(write_bench(c));
  EXPECT_EQ(again.flip_flops().size(), 3u);
  EXPECT_TRUE(structurally_equal(c, again));
}

TEST(Bench, RoundTripRandomCircuits) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto c = testsupport::random_circuit(seed, 4 + seed % 5, 10 + static_cast<int>(seed), seed % 4, 2);
    EXPECT_TRUE(structurally_equal(c, parse_bench(write_bench(c), c.name()))) << seed;
  }
}

TEST(Evaluate, AndTruthTable) {
  const auto c = parse_bench("INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a,b)");
  EXPECT_EQ(evaluate(c, {true, true}).outputs, Bits{true});
  EXPECT_EQ(evaluate(c, {true, false}).outputs, Bits{false});
}

TEST(Evaluate, C17MatchesHandDerivation) {
  const auto c = testsupport::load("c17");
  for (std::uint64_t v = 0; v < 32; ++v) {
    const auto in = bits_of(v, 5);
    const auto [o1, o2] = c17_by_hand(in[0], in[1], in[2], in[3], in[4]);
    EXPECT_EQ(evaluate(c, in).outputs, (Bits{o1, o2})) << v;
  }
  EXPECT_EQ(evaluate(c, Bits(5, false)).outputs, (Bits{false, false}));
}

TEST(Evaluate, MissingAssignment) {
  const auto c = testsupport::load("s27");
  EXPECT_THROW(evaluate(c, Bits(3)), Error);
  EXPECT_THROW(evaluate(c, Bits(4)), Error);
  EXPECT_NO_THROW(evaluate(c, Bits(4), Bits(3)));
}

TEST(Evaluate, TopologicalMatchesFixpoint) {
  std::mt19937_64 rng(99);
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const int gates = 5 + static_cast<int>(seed % 95);
    const auto c = testsupport::random_circuit(seed, 3 + seed % 6, gates, seed % 5, 3);
    for (int t = 0; t < 20; ++t) {
      const auto in = testsupport::random_bits(rng, c.primary_inputs().size());
      const auto st = testsupport::random_bits(rng, c.flip_flops().size());
      const auto fast = evaluate(c, in, st);
      const auto slow = testsupport::naive_evaluate(c, in, st);
      ASSERT_EQ(fast.outputs, slow.outputs) << seed;
      ASSERT_EQ(fast.next_state, slow.next_state) << seed;
    }
  }
}

TEST(Evaluate, WordsMatchScalar) {
  std::mt19937_64 rng(5);
  const auto c = testsupport::load("c432");
  std::vector<std::uint64_t> words(c.primary_inputs().size());
  for (auto& w : words) w = rng();
  const auto nets = evaluate_words(c, words);
  for (int lane = 0; lane < 64; lane += 7) {
    Bits in(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) in[i] = (words[i] >> lane) & 1u;
    const auto out = evaluate(c, in).outputs;
    for (std::size_t o = 0; o < out.size(); ++o)
      EXPECT_EQ(out[o], static_cast<bool>((nets[c.primary_outputs()[o]] >> lane) & 1u));
  }
}

TEST(Metadata, EmptyCircuit) {
  const auto m = extract_metadata(CircuitBuilder("empty").build(), 0);
  EXPECT_EQ(m, (CircuitMetadata{"empty", 0, 0, 0, 0, 0}));
}

TEST(Metadata, BundledGateLineCounts) {
  for (const char* name : {"c17", "c432", "c499", "c880", "s27"}) {
    const auto path = testsupport::bench_path(name);
    const auto m = extract_metadata(read_bench_file(path), 0);
    EXPECT_EQ(m.num_gates, count_gate_lines(path, false)) << name;
  }
  const auto s27 = extract_metadata(testsupport::load("s27"), 0);
  EXPECT_EQ(s27.num_flip_flop_io, 3u);
  EXPECT_EQ(s27.num_primary_inputs, 4u);
}

TEST(Metadata, KeyInputsExcluded) {
  const auto c = parse_bench("INPUT(a)\nINPUT(keyinput0)\nOUTPUT(y)\ny = XOR(a, keyinput0)");
  const auto m = extract_metadata(c, 1);
  EXPECT_EQ(m.num_primary_inputs, 1u);
  EXPECT_EQ(m.key_length, 1u);
  EXPECT_EQ(to_csv_row(m), ",1,1,1,1,0");
  EXPECT_EQ(metadata_csv_header(), "name,keyLength,numGates,numPI,numPO,numFFIO");
}

TEST(Metadata, ExternalGateCountIsAPlainField) {
  // A gate count from another counting convention round-trips unchanged.
  CircuitMetadata m{"c880", 64, 404, 60, 26, 0};
  EXPECT_EQ(to_csv_row(m), "c880,64,404,60,26,0");
}
