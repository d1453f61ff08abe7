#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace realseal {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

inline std::string to_string(std::span<const std::uint8_t> b) {
    return std::string(b.begin(), b.end());
}

// Lowercase hex, no separators.
std::string hex_encode(std::span<const std::uint8_t> data);

// Strict: even length, lowercase [0-9a-f] only.
std::optional<Bytes> hex_decode(std::string_view hex);

std::optional<Bytes> read_file_bytes(const std::filesystem::path& path);
bool write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> data);

}  // namespace realseal
