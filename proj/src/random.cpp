#include "intdim/random.hpp"

#include <algorithm>
#include <numeric>

namespace intdim {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  return seed + stream * 0x9e3779b97f4a7c15ULL;
}

Engine make_engine(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(seed)), static_cast<std::uint32_t>(splitmix64(seed) >> 32),
                    static_cast<std::uint32_t>(splitmix64(salt)), static_cast<std::uint32_t>(salt)};
  return Engine(seq);
}

double uniform01(Engine& eng) noexcept {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) noexcept {
  // Rejection on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - (~std::uint64_t{0} % bound));
  std::uint64_t x = eng();
  while (x >= limit) x = eng();
  return x % bound;
}

std::vector<std::size_t> permutation(Engine& eng, std::size_t n) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(p[i - 1], p[uniform_below(eng, i)]);
  }
  return p;
}

std::vector<std::size_t> sample_without_replacement(Engine& eng, std::size_t n, std::size_t count) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  count = std::min(count, n);
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(p[i], p[i + uniform_below(eng, n - i)]);
  }
  p.resize(count);
  std::sort(p.begin(), p.end());
  return p;
}

}  // namespace intdim
