// Copyright 2026 The paylane Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PAYLANE_RANDOM_HPP
#define PAYLANE_RANDOM_HPP

#include <cstdint>
#include <limits>

namespace paylane {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based generator: output k is a hash of (key, k). Satisfies the
/// UniformRandomBitGenerator requirements.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  constexpr explicit CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() { return splitmix64(key_ ^ splitmix64(counter_++)); }

  /// Uniform double in [0, 1).
  constexpr double uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Purposes for which a simulation draws randomness. Each draw is keyed by
/// (seed, subject id, step, purpose) so that replays and parallel runs do not
/// depend on evaluation order.
enum class Draw : std::uint64_t {
  kSlowdown = 1,
  kCoin = 2,
  kPlacement = 3,
  kClasses = 4,
  kInflow = 5,
};

class RandomStreams {
 public:
  constexpr explicit RandomStreams(std::uint64_t seed) : seed_(seed) {}

  constexpr std::uint64_t seed() const { return seed_; }

  constexpr CounterRng stream(std::uint64_t subject, std::uint64_t step,
                              Draw purpose) const {
    std::uint64_t k = splitmix64(seed_);
    k = splitmix64(k ^ static_cast<std::uint64_t>(purpose));
    k = splitmix64(k ^ subject);
    k = splitmix64(k ^ step);
    return CounterRng(k);
  }

  constexpr double uniform(std::uint64_t subject, std::uint64_t step,
                           Draw purpose) const {
    return stream(subject, step, purpose).uniform();
  }

 private:
  std::uint64_t seed_;
};

}  // namespace paylane

#endif  // PAYLANE_RANDOM_HPP
