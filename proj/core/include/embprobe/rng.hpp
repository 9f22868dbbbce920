// Copyright 2026 The embprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EMBPROBE_RNG_HPP_
#define EMBPROBE_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

namespace embprobe {

/// Stable 64-bit hash (FNV-1a followed by a splitmix64 finalizer).
std::uint64_t StableHash(std::string_view bytes, std::uint64_t basis = 0);

/// Derives an independent seed from a parent seed and a label, optionally
/// keyed by up to two counters (e.g. speaker and utterance index). The mapping
/// is fixed across platforms and releases.
std::uint64_t DeriveSeed(std::uint64_t seed, std::string_view label,
                         std::uint64_t a = 0, std::uint64_t b = 0);

// mt19937_64 is fully specified by the standard, but the std distributions are
// not, so the variates are drawn here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer on [0, n); n > 0. Unbiased (rejection).
  std::uint64_t Below(std::uint64_t n);
  // Standard normal via Box-Muller.
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

template <typename T>
void Shuffle(std::vector<T> &values, Rng &rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.Below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace embprobe

#endif  // EMBPROBE_RNG_HPP_
