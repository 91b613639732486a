#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gazepriv {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Seed for one recording: independent of worker scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t global_seed,
                                    std::string_view subject,
                                    std::string_view session,
                                    std::string_view task = {}) {
  std::uint64_t h = mix64(global_seed);
  h = mix64(h ^ fnv1a(subject));
  h = mix64(h ^ fnv1a(session));
  h = mix64(h ^ fnv1a(task));
  return h;
}

// Seedable, splittable generator. split() hands out child streams whose
// seeds depend only on the parent seed and the split ordinal.
class Rng {
 public:
  using Engine = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

  Rng split() { return Rng(mix64(seed_ ^ mix64(++splits_))); }

  Engine& engine() { return engine_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t splits_ = 0;
  Engine engine_;
};

}  // namespace gazepriv
