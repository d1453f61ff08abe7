#include "realseal/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace realseal::crypto {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) {
            throw std::runtime_error("libsodium initialization failed");
        }
    });
}

template <std::size_t N>
std::optional<std::array<std::uint8_t, N>> array_from_hex(std::string_view hex) {
    auto decoded = hex_decode(hex);
    if (!decoded || decoded->size() != N) return std::nullopt;
    std::array<std::uint8_t, N> out{};
    std::memcpy(out.data(), decoded->data(), N);
    return out;
}

// Expanded Ed25519 secret key (seed || public key), derived on demand.
std::array<std::uint8_t, 64> expand_private_key(const PrivateKey& key) {
    ensure_sodium();
    std::array<std::uint8_t, 64> sk{};
    std::array<std::uint8_t, 32> pk{};
    crypto_sign_seed_keypair(pk.data(), sk.data(), key.bytes.data());
    return sk;
}

}  // namespace

std::optional<Digest> Digest::from_hex(std::string_view hex) {
    auto b = array_from_hex<kDigestBytes>(hex);
    if (!b) return std::nullopt;
    return Digest{*b};
}

std::optional<Signature> Signature::from_hex(std::string_view hex) {
    auto b = array_from_hex<kSignatureBytes>(hex);
    if (!b) return std::nullopt;
    return Signature{*b};
}

std::optional<PublicKey> PublicKey::from_hex(std::string_view hex) {
    auto b = array_from_hex<kPublicKeyBytes>(hex);
    if (!b) return std::nullopt;
    return PublicKey{*b};
}

std::optional<Fingerprint> Fingerprint::from_hex(std::string_view hex) {
    auto b = array_from_hex<kFingerprintBytes>(hex);
    if (!b) return std::nullopt;
    return Fingerprint{*b};
}

Result<KeyPair, KeyError> generate_keypair(std::span<const std::uint8_t> seed) {
    if (seed.size() != kSeedBytes) {
        return KeyError{KeyErrorKind::InvalidSeed,
                        "seed must be exactly 32 bytes, got " + std::to_string(seed.size())};
    }
    ensure_sodium();
    KeyPair pair;
    std::memcpy(pair.private_key.bytes.data(), seed.data(), kSeedBytes);
    std::array<std::uint8_t, 64> sk{};
    crypto_sign_seed_keypair(pair.public_key.bytes.data(), sk.data(),
                             pair.private_key.bytes.data());
    sodium_memzero(sk.data(), sk.size());
    return pair;
}

KeyPair generate_keypair() {
    ensure_sodium();
    std::array<std::uint8_t, kSeedBytes> seed{};
    randombytes_buf(seed.data(), seed.size());
    auto pair = generate_keypair(seed);
    sodium_memzero(seed.data(), seed.size());
    return std::move(pair).value();
}

Digest content_hash(std::span<const std::uint8_t> payload) {
    ensure_sodium();
    Digest d;
    crypto_hash_sha256(d.bytes.data(), payload.data(), payload.size());
    return d;
}

Signature sign(std::span<const std::uint8_t> message, const PrivateKey& key) {
    auto sk = expand_private_key(key);
    Signature sig;
    crypto_sign_ed25519_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                                 sk.data());
    sodium_memzero(sk.data(), sk.size());
    return sig;
}

bool verify_signature(std::span<const std::uint8_t> message, const Signature& signature,
                      const PublicKey& key) {
    ensure_sodium();
    return crypto_sign_ed25519_verify_detached(signature.bytes.data(), message.data(),
                                               message.size(), key.bytes.data()) == 0;
}

Fingerprint fingerprint_of(const PublicKey& key) {
    Digest d = content_hash(key.bytes);
    Fingerprint fp;
    std::memcpy(fp.bytes.data(), d.bytes.data(), kFingerprintBytes);
    return fp;
}

namespace {

constexpr std::string_view kPrivateHeader = "realseal-key-v1:private";
constexpr std::string_view kPublicHeader = "realseal-key-v1:public";

Result<std::array<std::uint8_t, 32>, KeyError> parse_key_file(std::string_view text,
                                                              std::string_view header) {
    std::size_t first_nl = text.find('\n');
    if (first_nl == std::string_view::npos) {
        return KeyError{KeyErrorKind::InvalidEnvelope, "missing header line"};
    }
    if (text.substr(0, first_nl) != header) {
        return KeyError{KeyErrorKind::InvalidEnvelope,
                        "bad header, expected " + std::string(header)};
    }
    std::string_view rest = text.substr(first_nl + 1);
    std::size_t second_nl = rest.find('\n');
    std::string_view hex = second_nl == std::string_view::npos ? rest : rest.substr(0, second_nl);
    if (second_nl != std::string_view::npos && second_nl + 1 != rest.size()) {
        return KeyError{KeyErrorKind::InvalidEnvelope, "trailing data after key material"};
    }
    auto bytes = array_from_hex<32>(hex);
    if (!bytes) {
        return KeyError{KeyErrorKind::InvalidEnvelope, "key material is not 64 hex chars"};
    }
    return *bytes;
}

}  // namespace

std::string encode_private_key_file(const PrivateKey& key) {
    return std::string(kPrivateHeader) + "\n" + hex_encode(key.bytes) + "\n";
}

std::string encode_public_key_file(const PublicKey& key) {
    return std::string(kPublicHeader) + "\n" + hex_encode(key.bytes) + "\n";
}

Result<PrivateKey, KeyError> parse_private_key_file(std::string_view text) {
    auto bytes = parse_key_file(text, kPrivateHeader);
    if (!bytes.ok()) return bytes.error();
    return PrivateKey{bytes.value()};
}

Result<PublicKey, KeyError> parse_public_key_file(std::string_view text) {
    auto bytes = parse_key_file(text, kPublicHeader);
    if (!bytes.ok()) return bytes.error();
    return PublicKey{bytes.value()};
}

}  // namespace realseal::crypto
