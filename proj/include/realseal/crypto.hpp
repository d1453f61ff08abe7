#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "realseal/bytes.hpp"
#include "realseal/result.hpp"

namespace realseal::crypto {

// Signing is Ed25519 (deterministic, 32-byte keys, 64-byte signatures);
// hashing is SHA-256 throughout. Private keys are held as the 32-byte seed.

inline constexpr std::size_t kSeedBytes = 32;
inline constexpr std::size_t kPublicKeyBytes = 32;
inline constexpr std::size_t kPrivateKeyBytes = 32;
inline constexpr std::size_t kSignatureBytes = 64;
inline constexpr std::size_t kDigestBytes = 32;
inline constexpr std::size_t kFingerprintBytes = 16;

struct Digest {
    std::array<std::uint8_t, kDigestBytes> bytes{};

    std::string hex() const { return hex_encode(bytes); }
    static std::optional<Digest> from_hex(std::string_view hex);
    auto operator<=>(const Digest&) const = default;
};

struct Signature {
    std::array<std::uint8_t, kSignatureBytes> bytes{};

    std::string hex() const { return hex_encode(bytes); }
    static std::optional<Signature> from_hex(std::string_view hex);
    auto operator<=>(const Signature&) const = default;
};

struct PublicKey {
    std::array<std::uint8_t, kPublicKeyBytes> bytes{};

    std::string hex() const { return hex_encode(bytes); }
    static std::optional<PublicKey> from_hex(std::string_view hex);
    auto operator<=>(const PublicKey&) const = default;
};

struct PrivateKey {
    std::array<std::uint8_t, kPrivateKeyBytes> bytes{};

    auto operator<=>(const PrivateKey&) const = default;
};

// First 16 bytes of content_hash(public key); the trust-list lookup id.
struct Fingerprint {
    std::array<std::uint8_t, kFingerprintBytes> bytes{};

    std::string hex() const { return hex_encode(bytes); }
    static std::optional<Fingerprint> from_hex(std::string_view hex);
    auto operator<=>(const Fingerprint&) const = default;
};

struct KeyPair {
    PrivateKey private_key;
    PublicKey public_key;
};

enum class KeyErrorKind {
    InvalidSeed,
    InvalidKey,
    InvalidEnvelope,
};

struct KeyError {
    KeyErrorKind kind;
    std::string detail;
};

// Deterministic when seeded (seed must be exactly 32 bytes).
Result<KeyPair, KeyError> generate_keypair(std::span<const std::uint8_t> seed);
// OS entropy.
KeyPair generate_keypair();

Digest content_hash(std::span<const std::uint8_t> payload);

Signature sign(std::span<const std::uint8_t> message, const PrivateKey& key);
bool verify_signature(std::span<const std::uint8_t> message, const Signature& signature,
                      const PublicKey& key);

Fingerprint fingerprint_of(const PublicKey& key);

// Key files: two-line text envelope, "realseal-key-v1:<role>" then lowercase
// hex of the raw 32 bytes.
std::string encode_private_key_file(const PrivateKey& key);
std::string encode_public_key_file(const PublicKey& key);
Result<PrivateKey, KeyError> parse_private_key_file(std::string_view text);
Result<PublicKey, KeyError> parse_public_key_file(std::string_view text);

}  // namespace realseal::crypto
