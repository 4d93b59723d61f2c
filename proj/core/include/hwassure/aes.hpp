#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace hwassure {

using AesBlock = std::array<std::uint8_t, 16>;

/// Hex text (32 digits, whitespace ignored) to bytes.
AesBlock parse_block(std::string_view hex);
std::string to_hex(const AesBlock& block);

AesBlock aes128_encrypt(const AesBlock& key, const AesBlock& plaintext);

inline constexpr std::size_t kAesCycles = 11;

struct AesTrace {
  AesBlock ciphertext{};
  std::array<std::uint32_t, kAesCycles> toggles{};
};

/// Iterative one-round-per-cycle core with on-the-fly key expansion. Cycle 0
/// loads plaintext ^ key and the key; cycles 1..10 run the rounds. Toggles per
/// cycle are the Hamming distance to the previous cycle of the state register,
/// the round-key register and the S-box output bus (SubBytes of the state plus
/// SubWord(RotWord) of the last key word). Every call starts from the reset
/// state: registers zero, bus driven from zero registers.
AesTrace aes128_encrypt_trace(const AesBlock& key, const AesBlock& plaintext);

std::uint8_t aes_sbox(std::uint8_t x);

}  // namespace hwassure
