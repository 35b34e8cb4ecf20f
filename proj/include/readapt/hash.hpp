#pragma once

#include <cstdint>
#include <string_view>

namespace readapt::detail {

// FNV-1a, used wherever a seed has to be derived from mixed inputs.
// std::hash is not pinned across standard libraries; this is.
inline constexpr std::uint64_t fnv_offset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t fnv_prime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(std::uint64_t h, std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= fnv_prime;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::uint64_t h, std::uint64_t value) noexcept {
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (8 * i)) & 0xffu;
        h *= fnv_prime;
    }
    return h;
}

/// Uniform double in [0, 1) from a 64-bit hash.
inline double to_unit_interval(std::uint64_t h) noexcept {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

} // namespace readapt::detail
