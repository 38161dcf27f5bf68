#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "eqalloc/types.hpp"

namespace eqalloc {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

/// Folds a key path (master seed, realization, community, stream tag...)
/// into one seed. Distinct paths give statistically independent streams.
std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) noexcept;

Rng make_rng(std::initializer_list<std::uint64_t> keys);

/// n i.i.d. N(0, stddev^2) draws. stddev == 0 consumes nothing.
Vector draw_normal(Rng& rng, Eigen::Index n, double stddev);

namespace stream {
inline constexpr std::uint64_t kProcessNoise = 0x70726f63;
inline constexpr std::uint64_t kFeedbackNoise = 0x66656564;
inline constexpr std::uint64_t kEstimate = 0x65737469;
inline constexpr std::uint64_t kPopulation = 0x706f7075;
inline constexpr std::uint64_t kGraph = 0x67726170;
inline constexpr std::uint64_t kRealization = 0x7265616c;
}  // namespace stream

}  // namespace eqalloc
