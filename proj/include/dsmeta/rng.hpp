#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace dsmeta {

/// Random stream keyed by a 64-bit seed and an integer path
/// (e.g. cell key, replicate index). Identical (seed, path) gives an
/// identical draw sequence regardless of which thread creates it.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);
  RngStream(std::uint64_t seed, const std::vector<std::uint64_t>& path);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  double normal();
  double chi_square(double df);

  std::uint64_t seed() const { return seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

 private:
  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::mt19937_64 engine_;
};

/// Draw (Z + ncp) / sqrt(V / df), Z ~ N(0,1), V ~ χ²(df) independent.
double sample_noncentral_t(double df, double ncp, RngStream& rng);

/// SplitMix64 finalizer; used to derive stream keys and cell keys.
std::uint64_t mix64(std::uint64_t x);

}  // namespace dsmeta
