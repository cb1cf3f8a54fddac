#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace taxotrace {

// 64-bit FNV-1a. Used for manifest digests and for deriving per-utterance
// seeds from the global seed; not a cryptographic hash.
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

inline std::uint64_t fnv1a_update(std::uint64_t h, std::string_view data) {
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a_update(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xff;
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a(std::string_view data) {
    return fnv1a_update(kFnvOffset, data);
}

/// Deterministic sub-seed for a named stream, e.g.
/// derive_seed(global, "crop", epoch, utterance_id).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                                 std::uint64_t index = 0, std::string_view key = "") {
    std::uint64_t h = kFnvOffset;
    h = fnv1a_update(h, seed);
    h = fnv1a_update(h, stream);
    h = fnv1a_update(h, index);
    h = fnv1a_update(h, key);
    return h;
}

std::string hex_digest(std::uint64_t h);

}  // namespace taxotrace
