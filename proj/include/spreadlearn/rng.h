// Copyright 2026 The Spreadlearn Authors
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

// Counter-based random streams.
//
// Every stochastic operation in the library takes an explicit seed. Work on
// record n draws from RecordStream(seed, tag, n), so the values a record sees
// depend only on (seed, tag, n) and never on the order in which records are
// visited or on how they are split across threads.

#ifndef SPREADLEARN_RNG_H_
#define SPREADLEARN_RNG_H_

#include <cstdint>
#include <limits>

namespace spreadlearn {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive combination of two words into a new key.
constexpr uint64_t MixSeed(uint64_t a, uint64_t b) {
  return Mix64(a ^ Mix64(b + 0x9e3779b97f4a7c15ULL));
}

// SplitMix64 generator; satisfies UniformRandomBitGenerator so it plugs into
// the <random> distributions.
class SplitMix64 {
 public:
  using result_type = uint64_t;

  explicit constexpr SplitMix64(uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return Mix64(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// Stream tags keep independent uses of one seed from sharing draws.
enum class StreamTag : uint64_t {
  kSequence = 1,
  kLabelNoise = 2,
  kInputNoise = 3,
  kImportance = 4,
  kSynthetic = 5,
  kSubsample = 6,
  kMonteCarlo = 7,
  kExperimentCell = 8,
};

inline SplitMix64 RecordStream(uint64_t seed, StreamTag tag, uint64_t index) {
  return SplitMix64(
      MixSeed(MixSeed(seed, static_cast<uint64_t>(tag)), index));
}

}  // namespace spreadlearn

#endif  // SPREADLEARN_RNG_H_
