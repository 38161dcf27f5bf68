#include "eqalloc/rng.hpp"

namespace eqalloc {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2);
  z ^= b * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  for (auto k : keys) h = mix_seed(h, k);
  return h;
}

Rng make_rng(std::initializer_list<std::uint64_t> keys) { return Rng(derive_seed(keys)); }

Vector draw_normal(Rng& rng, Eigen::Index n, double stddev) {
  Vector out = Vector::Zero(n);
  if (stddev == 0.0) return out;
  std::normal_distribution<double> dist(0.0, stddev);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = dist(rng);
  return out;
}

}  // namespace eqalloc
