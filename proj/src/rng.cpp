#include "fsdet/rng.hpp"

#include <cmath>
#include <numbers>

#include "fsdet/errors.hpp"

namespace fsdet {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t condition_key, std::uint64_t replicate) {
  std::uint64_t state = seed;
  state ^= splitmix64(state) ^ condition_key;
  state ^= splitmix64(state) ^ replicate;
  return splitmix64(state);
}

std::pair<double, double> normal_pair(double u1, double u2) {
  if (!(u1 > 0.0 && u1 <= 1.0)) fail(ErrorKind::DomainError, "Box-Muller u1 must lie in (0, 1]");
  if (!(u2 >= 0.0 && u2 < 1.0)) fail(ErrorKind::DomainError, "Box-Muller u2 must lie in [0, 1)");
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(angle), r * std::sin(angle)};
}

double NormalStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const auto [z1, z2] = normal_pair(u1, u2);
  spare_ = z2;
  has_spare_ = true;
  return z1;
}

void NormalStream::fill(double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = next();
}

}  // namespace fsdet
