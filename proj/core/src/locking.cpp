#include "hwassure/locking.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <fstream>
#include <unordered_set>

#include "hwassure/rng.hpp"

namespace hwassure {

namespace {

constexpr std::uint64_t kLaneMasks[6] = {
    0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
    0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull,
};

// Word for variable `index` of an exhaustive enumeration, block `block` of 64
// consecutive assignments.
std::uint64_t enumeration_word(std::size_t index, std::uint64_t block) {
  if (index < 6) return kLaneMasks[index];
  return ((block >> (index - 6)) & 1) ? ~std::uint64_t{0} : 0;
}

std::uint64_t valid_lanes(std::size_t num_vars) {
  return num_vars >= 6 ? ~std::uint64_t{0} : (std::uint64_t{1} << (std::uint64_t{1} << num_vars)) - 1;
}

std::uint64_t num_blocks(std::size_t num_vars) {
  return num_vars >= 6 ? (std::uint64_t{1} << (num_vars - 6)) : 1;
}

std::uint64_t splat(bool b) { return b ? ~std::uint64_t{0} : 0; }

void require_combinational(const LockedCircuit& locked) {
  if (!locked.core.is_combinational())
    throw Error("locking metrics need a combinational core; frame '" + locked.core.name() + "' first");
}

// Packed PO words of the core for the given per-PI words.
std::vector<std::uint64_t> output_words(const Circuit& core, std::span<const std::uint64_t> pi_words) {
  auto nets = evaluate_words(core, pi_words);
  std::vector<std::uint64_t> out;
  out.reserve(core.primary_outputs().size());
  for (auto n : core.primary_outputs()) out.push_back(nets[n]);
  return out;
}

std::uint64_t mismatch(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m |= a[i] ^ b[i];
  return m;
}

}  // namespace

// ---------------------------------------------------------------- LockingKey

LockingKey LockingKey::from_string(std::string_view text) {
  Bits bits;
  for (char c : text) {
    if (c == '0' || c == '1')
      bits.push_back(c == '1');
    else if (!std::isspace(static_cast<unsigned char>(c)))
      throw Error("invalid key character '" + std::string(1, c) + "'");
  }
  return LockingKey(std::move(bits));
}

LockingKey LockingKey::from_index(std::uint64_t value, std::size_t length) {
  Bits bits(length);
  for (std::size_t i = 0; i < length; ++i) bits[i] = i < 64 && ((value >> i) & 1);
  return LockingKey(std::move(bits));
}

std::string LockingKey::to_string() const {
  std::string s;
  s.reserve(bits_.size());
  for (bool b : bits_) s.push_back(b ? '1' : '0');
  return s;
}

LockingKey read_key_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open key file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return LockingKey::from_string(text);
}

void write_key_file(const LockingKey& key, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << key.to_string() << "\n";
}

// ---------------------------------------------------------------- Insertion

LockedCircuit make_locked(Circuit core, LockingKey correct_key, std::vector<LockSite> sites) {
  LockedCircuit locked;
  const auto pis = core.primary_inputs();
  std::vector<std::pair<std::size_t, std::size_t>> keys;  // (key index, PI position)
  for (std::size_t pos = 0; pos < pis.size(); ++pos) {
    const auto& name = core.net_name(pis[pos]);
    if (is_key_input_name(name))
      keys.emplace_back(std::stoul(name.substr(8)), pos);
    else
      locked.data_positions.push_back(pos);
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (keys[i].first != i) throw Error("key inputs of '" + core.name() + "' are not keyinput0..N-1");
    locked.key_positions.push_back(keys[i].second);
    locked.key_inputs.push_back(pis[keys[i].second]);
  }
  if (correct_key.size() != keys.size())
    throw Error("key has " + std::to_string(correct_key.size()) + " bits but '" + core.name() + "' has " +
                std::to_string(keys.size()) + " key inputs");
  if (!sites.empty() && sites.size() != keys.size()) throw Error("lock-site count differs from key length");
  locked.core = std::move(core);
  locked.correct_key = std::move(correct_key);
  locked.lock_sites = std::move(sites);
  return locked;
}

std::vector<NetId> lockable_nets(const Circuit& circuit) {
  std::vector<NetId> nets;
  for (const auto& g : circuit.gates())
    if (g.kind != GateKind::Dff) nets.push_back(g.output);
  return nets;
}

LockedCircuit insert_random_locking(const Circuit& circuit, std::size_t k, std::uint64_t seed) {
  auto candidates = lockable_nets(circuit);
  if (k == 0) throw Error("key length must be at least 1");
  if (k > candidates.size())
    throw Error("cannot insert " + std::to_string(k) + " key gates into '" + circuit.name() + "' with " +
                std::to_string(candidates.size()) + " lockable nets");

  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) std::swap(candidates[i], candidates[i + rng.below(candidates.size() - i)]);
  candidates.resize(k);
  Bits key_bits(k);
  for (std::size_t i = 0; i < k; ++i) key_bits[i] = rng.bit();

  std::vector<std::size_t> site_of(circuit.num_nets(), k);
  for (std::size_t i = 0; i < k; ++i) site_of[candidates[i]] = i;

  std::unordered_set<std::string> taken;
  for (NetId n = 0; n < circuit.num_nets(); ++n) taken.insert(circuit.net_name(n));
  auto unique = [&](std::string base) {
    std::string name = base;
    for (std::size_t i = 1; taken.count(name); ++i) name = base + "_" + std::to_string(i);
    taken.insert(name);
    return name;
  };

  CircuitBuilder b(circuit.name() + "_enc" + std::to_string(k));
  for (auto n : circuit.primary_inputs()) b.add_input(circuit.net_name(n));
  std::vector<std::string> key_names(k);
  for (std::size_t i = 0; i < k; ++i) {
    key_names[i] = "keyinput" + std::to_string(i);
    if (taken.count(key_names[i])) throw Error("net name '" + key_names[i] + "' already used");
    taken.insert(key_names[i]);
    b.add_input(key_names[i]);
  }
  for (auto n : circuit.primary_outputs()) b.add_output(circuit.net_name(n));

  std::vector<LockSite> sites(k);
  for (const auto& g : circuit.gates()) {
    std::vector<std::string> ins;
    for (auto n : g.inputs) ins.push_back(circuit.net_name(n));
    const auto& out = circuit.net_name(g.output);
    const auto site = site_of[g.output];
    if (site == k || g.kind == GateKind::Dff) {
      b.add_gate(g.kind, out, ins);
      continue;
    }
    // Original driver moves to a fresh net; the key gate takes over the old name
    // so every reader and output port is untouched.
    auto inner = unique(out + "_enc");
    b.add_gate(g.kind, inner, ins);
    const auto kind = key_bits[site] ? GateKind::Xnor : GateKind::Xor;
    b.add_gate(kind, out, {inner, key_names[site]});
    sites[site] = LockSite{out, kind};
  }
  return make_locked(std::move(b).build(), LockingKey(std::move(key_bits)), std::move(sites));
}

// ---------------------------------------------------------------- Evaluation

Bits bind_key(const LockedCircuit& locked, const Bits& data_inputs, const LockingKey& key) {
  if (key.size() != locked.key_length())
    throw Error("key length " + std::to_string(key.size()) + " does not match locked width " +
                std::to_string(locked.key_length()));
  if (data_inputs.size() != locked.num_data_inputs())
    throw Error("expected " + std::to_string(locked.num_data_inputs()) + " data inputs, got " +
                std::to_string(data_inputs.size()));
  Bits full(locked.core.primary_inputs().size());
  for (std::size_t i = 0; i < data_inputs.size(); ++i) full[locked.data_positions[i]] = data_inputs[i];
  for (std::size_t i = 0; i < key.size(); ++i) full[locked.key_positions[i]] = key[i];
  return full;
}

EvalResult evaluate_locked(const LockedCircuit& locked, const LockingKey& key, const Bits& inputs,
                           const Bits& state) {
  return evaluate(locked.core, bind_key(locked, inputs, key), state);
}

// ---------------------------------------------------------------- Metrics

CorruptibilityEstimate compute_output_corruptibility(const LockedCircuit& locked,
                                                     const CorruptibilityMode& mode) {
  require_combinational(locked);
  const auto n = locked.num_data_inputs();
  const auto k = locked.key_length();
  const auto num_pis = locked.core.primary_inputs().size();
  std::vector<std::uint64_t> words(num_pis);
  CorruptibilityEstimate est;

  if (std::holds_alternative<Exhaustive>(mode)) {
    if (n + k > 24)
      throw Error("exhaustive corruptibility needs inputs + key bits <= 24, got " + std::to_string(n + k));
    const auto lanes = valid_lanes(n);
    const std::uint64_t num_keys = std::uint64_t{1} << k;
    std::uint64_t corrupted = 0;
    // Oracle outputs per input block, computed once under the correct key.
    std::vector<std::vector<std::uint64_t>> oracle;
    for (std::uint64_t blk = 0; blk < num_blocks(n); ++blk) {
      for (std::size_t i = 0; i < n; ++i) words[locked.data_positions[i]] = enumeration_word(i, blk);
      for (std::size_t i = 0; i < k; ++i) words[locked.key_positions[i]] = splat(locked.correct_key[i]);
      oracle.push_back(output_words(locked.core, words));
    }
    for (std::uint64_t kv = 0; kv < num_keys; ++kv) {
      auto key = LockingKey::from_index(kv, k);
      if (key == locked.correct_key) continue;
      for (std::size_t i = 0; i < k; ++i) words[locked.key_positions[i]] = splat(key[i]);
      for (std::uint64_t blk = 0; blk < num_blocks(n); ++blk) {
        for (std::size_t i = 0; i < n; ++i) words[locked.data_positions[i]] = enumeration_word(i, blk);
        corrupted += std::popcount(mismatch(output_words(locked.core, words), oracle[blk]) & lanes);
      }
    }
    est.input_samples = std::uint64_t{1} << n;
    est.key_samples = num_keys - 1;
    const double pairs = static_cast<double>(est.input_samples) * static_cast<double>(est.key_samples);
    est.value = pairs > 0 ? static_cast<double>(corrupted) / pairs : 0.0;
    return est;
  }

  const auto& s = std::get<Sampled>(mode);
  if (s.num_inputs == 0 || s.num_keys == 0) throw Error("sampled corruptibility needs positive sample counts");
  Rng rng(s.seed);
  std::vector<Bits> inputs(s.num_inputs);
  for (auto& in : inputs) in = rng.bits(n);
  std::vector<LockingKey> keys;
  while (keys.size() < s.num_keys) {
    LockingKey key(rng.bits(k));
    if (!(key == locked.correct_key)) keys.push_back(std::move(key));
  }
  std::uint64_t corrupted = 0;
  for (std::size_t base = 0; base < inputs.size(); base += 64) {
    const auto count = std::min<std::size_t>(64, inputs.size() - base);
    const std::uint64_t lanes = count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t w = 0;
      for (std::size_t l = 0; l < count; ++l) w |= std::uint64_t{inputs[base + l][i]} << l;
      words[locked.data_positions[i]] = w;
    }
    for (std::size_t i = 0; i < k; ++i) words[locked.key_positions[i]] = splat(locked.correct_key[i]);
    auto reference = output_words(locked.core, words);
    for (const auto& key : keys) {
      for (std::size_t i = 0; i < k; ++i) words[locked.key_positions[i]] = splat(key[i]);
      corrupted += std::popcount(mismatch(output_words(locked.core, words), reference) & lanes);
    }
  }
  est.input_samples = s.num_inputs;
  est.key_samples = s.num_keys;
  est.value = static_cast<double>(corrupted) / (static_cast<double>(s.num_inputs) * s.num_keys);
  return est;
}

double compute_ker(const LockedCircuit& locked, const LockingKey& key) {
  require_combinational(locked);
  const auto n = locked.num_data_inputs();
  const auto k = locked.key_length();
  if (n > 20) throw Error("KER enumerates 2^n inputs; n=" + std::to_string(n) + " exceeds 20");
  if (key.size() != k) throw Error("key length mismatch");
  std::vector<std::uint64_t> words(locked.core.primary_inputs().size());
  const auto lanes = valid_lanes(n);
  std::uint64_t corrupted = 0;
  for (std::uint64_t blk = 0; blk < num_blocks(n); ++blk) {
    for (std::size_t i = 0; i < n; ++i) words[locked.data_positions[i]] = enumeration_word(i, blk);
    for (std::size_t i = 0; i < k; ++i) words[locked.key_positions[i]] = splat(locked.correct_key[i]);
    auto reference = output_words(locked.core, words);
    for (std::size_t i = 0; i < k; ++i) words[locked.key_positions[i]] = splat(key[i]);
    corrupted += std::popcount(mismatch(output_words(locked.core, words), reference) & lanes);
  }
  return static_cast<double>(corrupted) / static_cast<double>(std::uint64_t{1} << n);
}

double compute_ier(const LockedCircuit& locked, const Bits& minterm) {
  require_combinational(locked);
  const auto n = locked.num_data_inputs();
  const auto k = locked.key_length();
  if (k > 20) throw Error("IER enumerates 2^k keys; k=" + std::to_string(k) + " exceeds 20");
  if (minterm.size() != n) throw Error("minterm width mismatch");
  std::vector<std::uint64_t> words(locked.core.primary_inputs().size());
  for (std::size_t i = 0; i < n; ++i) words[locked.data_positions[i]] = splat(minterm[i]);
  for (std::size_t i = 0; i < k; ++i) words[locked.key_positions[i]] = splat(locked.correct_key[i]);
  auto reference = output_words(locked.core, words);

  // Keys are enumerated across lanes; the correct key never mismatches, so it
  // contributes nothing to the count.
  const auto lanes = valid_lanes(k);
  std::uint64_t corrupted = 0;
  for (std::uint64_t blk = 0; blk < num_blocks(k); ++blk) {
    for (std::size_t i = 0; i < k; ++i) words[locked.key_positions[i]] = enumeration_word(i, blk);
    corrupted += std::popcount(mismatch(output_words(locked.core, words), reference) & lanes);
  }
  const double wrong = static_cast<double>((std::uint64_t{1} << k) - 1);
  return wrong > 0 ? static_cast<double>(corrupted) / wrong : 0.0;
}

}  // namespace hwassure
