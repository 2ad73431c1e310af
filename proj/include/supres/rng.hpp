#pragma once

#include <cstdint>
#include <random>

namespace supres {

// Named substreams inside one trial. Values are part of the reproducibility
// contract: changing them changes every generated batch.
enum class StreamTag : std::uint64_t {
    amplitudes = 1,
    noise = 2,
    support = 3,
    oracle = 4,
};

// SplitMix64 finalizer; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Counter-based derivation of independent child seeds. A seed derived from
// (root, index, tag) depends on nothing else, so trials can be executed in any
// order or on any thread and still see identical random draws.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index, StreamTag tag) noexcept;
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) noexcept;

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

} // namespace supres
