#pragma once

// Hashing, field encoding and signatures. Everything above this header talks
// to the crypto backend (libsodium: SHA-256 and Ed25519) only through here.

#include <sodium.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chainlab {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

namespace detail {

inline void ensure_sodium() {
  static const bool ready = [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
    return true;
  }();
  (void)ready;
}

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace detail

inline std::string to_hex(ByteView bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

/// Throws std::invalid_argument on odd length or non-hex characters.
inline Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = detail::hex_value(hex[2 * i]);
    int lo = detail::hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex character");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

template <std::size_t N>
std::array<std::uint8_t, N> fixed_from_hex(std::string_view hex) {
  auto bytes = from_hex(hex);
  if (bytes.size() != N) throw std::invalid_argument("hex string has wrong length");
  std::array<std::uint8_t, N> out{};
  std::copy(bytes.begin(), bytes.end(), out.begin());
  return out;
}

/// 256-bit digest. Also serves as the 256-bit unsigned integer produced by the
/// lottery RNGs, read big-endian.
struct Digest256 {
  std::array<std::uint8_t, 32> bytes{};

  friend bool operator==(const Digest256&, const Digest256&) = default;
  friend auto operator<=>(const Digest256&, const Digest256&) = default;

  [[nodiscard]] std::string hex() const { return to_hex(bytes); }

  /// Big-endian integer value modulo `m` (m > 0).
  [[nodiscard]] std::uint64_t mod(std::uint64_t m) const {
    if (m == 0) throw std::invalid_argument("modulus must be positive");
    unsigned __int128 acc = 0;
    for (auto b : bytes) acc = ((acc << 8) | b) % m;
    return static_cast<std::uint64_t>(acc);
  }

  [[nodiscard]] bool is_zero() const {
    return std::all_of(bytes.begin(), bytes.end(), [](auto b) { return b == 0; });
  }

  static Digest256 from_hex(std::string_view hex) { return {fixed_from_hex<32>(hex)}; }
};

struct Digest256Hasher {
  std::size_t operator()(const Digest256& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | d.bytes[i];
    return h;
  }
};

/// SHA-256.
inline Digest256 hash(ByteView data) {
  detail::ensure_sodium();
  Digest256 out;
  crypto_hash_sha256(out.bytes.data(), data.data(), data.size());
  return out;
}

inline Digest256 hash(std::string_view text) {
  return hash(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline int hamming_distance(const Digest256& a, const Digest256& b) {
  int bits = 0;
  for (std::size_t i = 0; i < a.bytes.size(); ++i) {
    bits += std::popcount(static_cast<unsigned>(a.bytes[i] ^ b.bytes[i]));
  }
  return bits;
}

/// Unambiguous multi-field encoding for composite hashes: every field is a
/// 4-byte big-endian length followed by its bytes; integers are 32-byte
/// big-endian.
class FieldEncoder {
 public:
  FieldEncoder& add_bytes(ByteView field) {
    const auto len = static_cast<std::uint32_t>(field.size());
    for (int shift = 24; shift >= 0; shift -= 8) {
      buffer_.push_back(static_cast<std::uint8_t>(len >> shift));
    }
    buffer_.insert(buffer_.end(), field.begin(), field.end());
    return *this;
  }

  FieldEncoder& add_text(std::string_view text) {
    return add_bytes(ByteView(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }

  FieldEncoder& add_digest(const Digest256& d) { return add_bytes(d.bytes); }

  FieldEncoder& add_uint(std::uint64_t value) {
    std::array<std::uint8_t, 32> word{};
    for (int i = 0; i < 8; ++i) word[31 - i] = static_cast<std::uint8_t>(value >> (8 * i));
    return add_bytes(word);
  }

  [[nodiscard]] const Bytes& bytes() const { return buffer_; }
  [[nodiscard]] Digest256 hash() const { return chainlab::hash(buffer_); }

 private:
  Bytes buffer_;
};

struct PublicKey {
  std::array<std::uint8_t, crypto_sign_PUBLICKEYBYTES> bytes{};

  friend bool operator==(const PublicKey&, const PublicKey&) = default;
  friend auto operator<=>(const PublicKey&, const PublicKey&) = default;

  [[nodiscard]] std::string hex() const { return to_hex(bytes); }
  static PublicKey from_hex(std::string_view hex) {
    return {fixed_from_hex<crypto_sign_PUBLICKEYBYTES>(hex)};
  }
};

class PrivateKey {
 public:
  PrivateKey() = default;
  explicit PrivateKey(const std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES>& bytes)
      : bytes_(bytes) {}
  PrivateKey(const PrivateKey&) = default;
  PrivateKey& operator=(const PrivateKey&) = default;
  ~PrivateKey() { sodium_memzero(bytes_.data(), bytes_.size()); }

  [[nodiscard]] const std::uint8_t* data() const { return bytes_.data(); }

 private:
  std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> bytes_{};
};

/// Ed25519 signature, kept as its two 32-byte halves (R, S).
struct Signature {
  std::array<std::uint8_t, 32> r{};
  std::array<std::uint8_t, 32> s{};

  friend bool operator==(const Signature&, const Signature&) = default;

  [[nodiscard]] std::array<std::uint8_t, 64> bytes() const {
    std::array<std::uint8_t, 64> out{};
    std::copy(r.begin(), r.end(), out.begin());
    std::copy(s.begin(), s.end(), out.begin() + 32);
    return out;
  }

  [[nodiscard]] std::string hex() const { return to_hex(bytes()); }

  static Signature from_bytes(const std::array<std::uint8_t, 64>& raw) {
    Signature sig;
    std::copy(raw.begin(), raw.begin() + 32, sig.r.begin());
    std::copy(raw.begin() + 32, raw.end(), sig.s.begin());
    return sig;
  }

  static Signature from_hex(std::string_view hex) { return from_bytes(fixed_from_hex<64>(hex)); }
};

struct KeyPair {
  PrivateKey private_key;
  PublicKey public_key;

  using Seed = std::array<std::uint8_t, crypto_sign_SEEDBYTES>;

  static KeyPair from_seed(const Seed& seed) {
    detail::ensure_sodium();
    std::array<std::uint8_t, crypto_sign_SECRETKEYBYTES> sk{};
    KeyPair kp;
    crypto_sign_seed_keypair(kp.public_key.bytes.data(), sk.data(), seed.data());
    kp.private_key = PrivateKey(sk);
    sodium_memzero(sk.data(), sk.size());
    return kp;
  }

  /// Deterministic key generation from a seeded engine. Only raw engine
  /// output is consumed, so the result is identical across standard libraries.
  static KeyPair generate(std::mt19937_64& rng) {
    Seed seed{};
    for (std::size_t i = 0; i < seed.size(); i += 8) {
      auto word = rng();
      for (std::size_t j = 0; j < 8; ++j) seed[i + j] = static_cast<std::uint8_t>(word >> (8 * j));
    }
    return from_seed(seed);
  }
};

inline Signature sign(const PrivateKey& key, ByteView message) {
  detail::ensure_sodium();
  std::array<std::uint8_t, 64> raw{};
  crypto_sign_detached(raw.data(), nullptr, message.data(), message.size(), key.data());
  return Signature::from_bytes(raw);
}

/// Malformed or mismatched input yields false; never throws.
inline bool verify(const PublicKey& key, ByteView message, const Signature& sig) noexcept {
  try {
    detail::ensure_sodium();
  } catch (...) {
    return false;
  }
  auto raw = sig.bytes();
  return crypto_sign_verify_detached(raw.data(), message.data(), message.size(),
                                     key.bytes.data()) == 0;
}

}  // namespace chainlab
