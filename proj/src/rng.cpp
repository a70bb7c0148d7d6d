#include "dsmeta/rng.hpp"

#include <cmath>

#include "dsmeta/errors.hpp"

namespace dsmeta {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, const std::vector<std::uint64_t>& path) {
  // Every path element enters the seed sequence as two 32-bit words, with the
  // path length prepended so that prefixes of a path map to different states.
  std::vector<std::uint32_t> words;
  words.reserve(4 + 2 * path.size());
  auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  push(path.size());
  for (auto p : path) push(mix64(p));
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
    : RngStream(seed, std::vector<std::uint64_t>(path)) {}

RngStream::RngStream(std::uint64_t seed, const std::vector<std::uint64_t>& path)
    : seed_(seed), path_(path), engine_(make_engine(seed, path)) {}

double RngStream::normal() {
  // Fresh distribution object per draw: no cached second variate, so the
  // draw sequence depends only on the engine state.
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

double RngStream::chi_square(double df) {
  std::chi_squared_distribution<double> dist(df);
  return dist(engine_);
}

double sample_noncentral_t(double df, double ncp, RngStream& rng) {
  if (!(df > 0.0)) throw DomainError("sample_noncentral_t: df must be positive");
  const double z = rng.normal();
  const double v = rng.chi_square(df);
  return (z + ncp) / std::sqrt(v / df);
}

}  // namespace dsmeta
