// Copyright 2026 The dpnash Authors
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

#ifndef DPNASH_RNG_H_
#define DPNASH_RNG_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace dpnash {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Maps a 128-bit counter and a 64-bit key to 128 bits.
std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

// Purpose tags keep the substreams of one run disjoint.
enum class StreamTag : uint8_t {
  kEnvironment = 1,
  kCentralNoise = 2,
  kLocalNoise = 3,
  kGameGenerator = 4,
  kCalibration = 5,
  kTest = 6,
};

// Builds a 64-bit stream id from a tag and an index below 2^56.
constexpr uint64_t StreamId(StreamTag tag, uint64_t index) {
  return (static_cast<uint64_t>(tag) << 56) ^ (index & ((uint64_t{1} << 56) - 1));
}

// Counter-based generator. The key is the master seed, the upper half of the
// counter selects the substream and the lower half is the draw index, so any
// value can be recomputed from (seed, stream, index) without replaying.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

  // Raw 64-bit output number `index` of substream `stream`.
  static uint64_t At(uint64_t seed, uint64_t stream, uint64_t index);

  uint64_t NextU64();

  // Uniform on the open interval (0, 1) with 52-bit resolution.
  double Uniform01();

  // Laplace(0, scale). Returns exactly 0 when scale == 0.
  double Laplace(double scale);

  // Exponential(1).
  double Exponential();

  // Inverse-CDF categorical draw using a single uniform. Boundary ties go to
  // the lower index; zero-probability entries are never returned.
  size_t Categorical(std::span<const double> probs);

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }
  uint64_t position() const { return index_; }

 private:
  uint64_t seed_;
  uint64_t stream_;
  uint64_t index_ = 0;
};

// Maps a uniform draw on (0, 1) to Laplace(0, scale).
double LaplaceFromUniform(double u, double scale);

// Converts 64 random bits to a double on (0, 1).
inline double ToOpenUnit(uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

}  // namespace dpnash

#endif  // DPNASH_RNG_H_
