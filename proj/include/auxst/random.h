#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace auxst {

// Every draw goes through these helpers instead of the <random>
// distributions so sequences are identical across standard libraries.
using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);
std::uint64_t mix_seed(std::uint64_t seed, std::string_view stream);

// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

// Uniform real in [0, 1).
double uniform_unit(Rng& rng);

double uniform_real(Rng& rng, double lo, double hi);

template <typename T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(items[i - 1], items[j]);
  }
}

// FNV-1a, hex encoded. Stable checksum for manifests and model identity.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace auxst
