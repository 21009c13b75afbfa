#include "locsvm/rng.hpp"

#include <cmath>
#include <numbers>

namespace locsvm {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t CounterRng::derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (stream * 0xd1b54a32d192ed03ULL + kGolden));
  h = mix64(h ^ (sub * 0x8cb92ba72f3d8dd7ULL + kGolden));
  return h;
}

CounterRng CounterRng::substream(std::uint64_t id) const { return CounterRng(derive(key_, id, 0x5ab5)); }

std::uint64_t CounterRng::next() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double CounterRng::uniform_open() {
  return (static_cast<double>(next() >> 12) + 0.5) * 0x1.0p-52;
}

double CounterRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double CounterRng::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t CounterRng::below(std::uint64_t n) {
  // Lemire's multiply-shift with rejection.
  std::uint64_t x = next();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = next();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace locsvm
