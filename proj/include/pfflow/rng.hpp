#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace pfflow {

// Splittable random streams.
//
// Every consumer of randomness owns a named stream derived from the run seed:
//
//   substream_seed = splitmix64(splitmix64(splitmix64(seed) ^ fnv1a(tag)) ^ index)
//
// Each substream seeds an independent mt19937_64. Distinct (tag, index) pairs
// give statistically independent streams, so parallel callers can own disjoint
// streams while the whole run stays reproducible from one 64-bit seed.
//
// Stream tags in use: "reference" (reference-measure draws, index = resample
// step), "sde" (Euler-Maruyama, index = particle).

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view tag,
                                        std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ fnv1a(tag)) ^ index);
}

// One named substream producing N(0,1) draws.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0)
      : engine_(derive_stream_seed(seed, tag, index)) {}

  double next() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace pfflow
