#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <utility>

namespace fsdet {

/// Advances `state` and returns the next splitmix64 output.
std::uint64_t splitmix64(std::uint64_t& state);

/// 64-bit FNV-1a of a byte string; used to key streams by condition label.
std::uint64_t fnv1a(std::string_view bytes);

/// Seed of one replicate stream: the splitmix64 sequence started at `seed`
/// is advanced past the condition key and the replicate index, each mixed in
/// by xor, and its next output is returned. Distinct (key, replicate) pairs
/// give unrelated streams independent of evaluation order.
std::uint64_t replicate_seed(std::uint64_t seed, std::uint64_t condition_key, std::uint64_t replicate);

/// z1 = sqrt(-2 ln u1) cos(2 pi u2), z2 = sqrt(-2 ln u1) sin(2 pi u2).
/// DomainError unless u1 in (0, 1] and u2 in [0, 1).
std::pair<double, double> normal_pair(double u1, double u2);

/// Standard normal deviates from a 64-bit Mersenne twister via Box-Muller.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

  /// 53-bit uniform in [0, 1).
  double uniform();
  double next();
  /// Fills out[0..n) in order; equivalent to n calls of next().
  void fill(double* out, std::size_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fsdet
