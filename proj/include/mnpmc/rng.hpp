#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mnpmc {

/// Finalizer of the splitmix64 generator, used here as a 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Collapses (seed, id0, id1, ...) into a single stream seed.
/// The mixing is order sensitive, so (a, b) and (b, a) give distinct streams.
constexpr std::uint64_t stream_seed(std::uint64_t seed,
                                    std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t state = splitmix64(seed);
    for (std::uint64_t id : path) {
        state = splitmix64(state ^ splitmix64(id));
    }
    return state;
}

/// Independent generator for a labeled substream.
///
/// Simulations derive one stream per (seed, realization, particle) so that
/// results are reproducible independent of the degree of parallelism.
inline std::mt19937_64 substream(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> path) {
    return std::mt19937_64(stream_seed(seed, path));
}

/// Leading substream labels, one per purpose, so unrelated draws never share
/// a stream even for equal (realization, particle) indices.
namespace stream_tag {
inline constexpr std::uint64_t release_radii = 0x01;
inline constexpr std::uint64_t impulse = 0x02;
inline constexpr std::uint64_t sequence_bits = 0x03;
inline constexpr std::uint64_t sequence_radii = 0x04;
inline constexpr std::uint64_t sequence_particle = 0x05;
inline constexpr std::uint64_t ser_sequence = 0x06;
inline constexpr std::uint64_t validation = 0x07;
}  // namespace stream_tag

}  // namespace mnpmc
