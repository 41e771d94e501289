#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace intdim {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the `stream`-th independent sub-computation under a user seed.
/// Stream 0 is the user seed itself, so a single-repeat / single-fold run
/// reproduces the direct computation exactly.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Engine for a named purpose (`salt`) under `seed`.
Engine make_engine(std::uint64_t seed, std::uint64_t salt) noexcept;

/// Uniform in [0, 1) with 53 random bits.
double uniform01(Engine& eng) noexcept;

/// Uniform integer in [0, bound), unbiased.
std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) noexcept;

/// `count` distinct positions from [0, n), ascending.
std::vector<std::size_t> sample_without_replacement(Engine& eng, std::size_t n, std::size_t count);

/// Uniformly random permutation of [0, n).
std::vector<std::size_t> permutation(Engine& eng, std::size_t n);

}  // namespace intdim
