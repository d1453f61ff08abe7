#include "realseal/rng.hpp"

#include <string_view>

namespace realseal {

namespace {

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (char c : text) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return mix(base ^ mix(stream + 0x9e3779b97f4a7c15ull));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view name) {
    return derive_seed(base, fnv1a(name));
}

}  // namespace realseal
