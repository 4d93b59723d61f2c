#include "hwassure/aes.hpp"

#include <bit>
#include <cctype>

#include "hwassure/netlist.hpp"

namespace hwassure {

namespace {

std::uint8_t xtime(std::uint8_t x) { return static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0)); }

std::uint8_t gmul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return r;
}

struct SboxTable {
  std::array<std::uint8_t, 256> s{};
  SboxTable() {
    for (int x = 0; x < 256; ++x) {
      // Multiplicative inverse by exponentiation (x^254), then the affine map.
      std::uint8_t inv = 1, base = static_cast<std::uint8_t>(x);
      for (int e = 254; e; e >>= 1) {
        if (e & 1) inv = gmul(inv, base);
        base = gmul(base, base);
      }
      if (x == 0) inv = 0;
      std::uint8_t y = inv;
      for (int r = 1; r <= 4; ++r) y ^= static_cast<std::uint8_t>((inv << r) | (inv >> (8 - r)));
      s[static_cast<std::size_t>(x)] = static_cast<std::uint8_t>(y ^ 0x63);
    }
  }
};

const SboxTable& table() {
  static const SboxTable t;
  return t;
}

// Column-major state: byte index = 4 * column + row.
void sub_bytes(AesBlock& s) {
  for (auto& b : s) b = aes_sbox(b);
}

void shift_rows(AesBlock& s) {
  AesBlock t = s;
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) s[static_cast<std::size_t>(4 * c + r)] = t[static_cast<std::size_t>(4 * ((c + r) % 4) + r)];
}

void mix_columns(AesBlock& s) {
  for (int c = 0; c < 4; ++c) {
    auto* col = &s[static_cast<std::size_t>(4 * c)];
    const std::uint8_t a0 = col[0], a1 = col[1], a2 = col[2], a3 = col[3];
    col[0] = static_cast<std::uint8_t>(gmul(a0, 2) ^ gmul(a1, 3) ^ a2 ^ a3);
    col[1] = static_cast<std::uint8_t>(a0 ^ gmul(a1, 2) ^ gmul(a2, 3) ^ a3);
    col[2] = static_cast<std::uint8_t>(a0 ^ a1 ^ gmul(a2, 2) ^ gmul(a3, 3));
    col[3] = static_cast<std::uint8_t>(gmul(a0, 3) ^ a1 ^ a2 ^ gmul(a3, 2));
  }
}

void add_round_key(AesBlock& s, const AesBlock& k) {
  for (std::size_t i = 0; i < 16; ++i) s[i] ^= k[i];
}

std::array<std::uint8_t, 4> sub_rot_word(const AesBlock& k) {
  return {aes_sbox(k[13]), aes_sbox(k[14]), aes_sbox(k[15]), aes_sbox(k[12])};
}

AesBlock next_round_key(const AesBlock& k, std::uint8_t rcon) {
  AesBlock n{};
  auto t = sub_rot_word(k);
  t[0] ^= rcon;
  for (int i = 0; i < 4; ++i) n[static_cast<std::size_t>(i)] = k[static_cast<std::size_t>(i)] ^ t[static_cast<std::size_t>(i)];
  for (std::size_t i = 4; i < 16; ++i) n[i] = k[i] ^ n[i - 4];
  return n;
}

// S-box bus driven by the current registers: 16 state bytes + 4 key bytes.
std::array<std::uint8_t, 20> sbox_bus(const AesBlock& state, const AesBlock& key) {
  std::array<std::uint8_t, 20> bus{};
  for (std::size_t i = 0; i < 16; ++i) bus[i] = aes_sbox(state[i]);
  const auto w = sub_rot_word(key);
  for (std::size_t i = 0; i < 4; ++i) bus[16 + i] = w[i];
  return bus;
}

template <std::size_t N>
std::uint32_t hd(const std::array<std::uint8_t, N>& a, const std::array<std::uint8_t, N>& b) {
  std::uint32_t d = 0;
  for (std::size_t i = 0; i < N; ++i) d += static_cast<std::uint32_t>(std::popcount(static_cast<unsigned>(a[i] ^ b[i])));
  return d;
}

}  // namespace

std::uint8_t aes_sbox(std::uint8_t x) { return table().s[x]; }

AesBlock parse_block(std::string_view hex) {
  AesBlock b{};
  std::size_t n = 0;
  int hi = -1;
  for (char ch : hex) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    int v;
    if (ch >= '0' && ch <= '9')
      v = ch - '0';
    else if (ch >= 'a' && ch <= 'f')
      v = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F')
      v = ch - 'A' + 10;
    else
      throw Error("bad hex digit '" + std::string(1, ch) + "'");
    if (hi < 0) {
      hi = v;
    } else {
      if (n >= 16) throw Error("block has more than 32 hex digits");
      b[n++] = static_cast<std::uint8_t>(hi << 4 | v);
      hi = -1;
    }
  }
  if (n != 16 || hi >= 0) throw Error("block needs exactly 32 hex digits");
  return b;
}

std::string to_hex(const AesBlock& block) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  for (auto b : block) {
    s += digits[b >> 4];
    s += digits[b & 15];
  }
  return s;
}

AesBlock aes128_encrypt(const AesBlock& key, const AesBlock& plaintext) { return aes128_encrypt_trace(key, plaintext).ciphertext; }

AesTrace aes128_encrypt_trace(const AesBlock& key, const AesBlock& plaintext) {
  static constexpr std::uint8_t rcon[10] = {0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1b, 0x36};
  AesTrace trace;
  AesBlock state{}, round_key{};
  auto bus = sbox_bus(state, round_key);

  auto clock = [&](std::size_t cycle, const AesBlock& next_state, const AesBlock& next_key) {
    const auto next_bus = sbox_bus(next_state, next_key);
    trace.toggles[cycle] = hd(state, next_state) + hd(round_key, next_key) + hd(bus, next_bus);
    state = next_state;
    round_key = next_key;
    bus = next_bus;
  };

  AesBlock s = plaintext;
  add_round_key(s, key);
  clock(0, s, key);
  for (std::size_t r = 1; r <= 10; ++r) {
    const auto k = next_round_key(round_key, rcon[r - 1]);
    s = state;
    sub_bytes(s);
    shift_rows(s);
    if (r != 10) mix_columns(s);
    add_round_key(s, k);
    clock(r, s, k);
  }
  trace.ciphertext = state;
  return trace;
}

}  // namespace hwassure
