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

#include "dpnash/rng.h"

#include <cmath>

namespace dpnash {
namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85;

inline void MulHiLo(uint32_t a, uint32_t b, uint32_t* hi, uint32_t* lo) {
  const uint64_t product = static_cast<uint64_t>(a) * b;
  *hi = static_cast<uint32_t>(product >> 32);
  *lo = static_cast<uint32_t>(product);
}

}  // namespace

std::array<uint32_t, 4> Philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    uint32_t hi0, lo0, hi1, lo1;
    MulHiLo(kPhiloxM0, counter[0], &hi0, &lo0);
    MulHiLo(kPhiloxM1, counter[2], &hi1, &lo1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
  }
  return counter;
}

uint64_t CounterRng::At(uint64_t seed, uint64_t stream, uint64_t index) {
  // Each Philox block yields two outputs; index selects block and half.
  const uint64_t block = index >> 1;
  const auto out = Philox4x32(
      {static_cast<uint32_t>(block), static_cast<uint32_t>(block >> 32),
       static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32)},
      {static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32)});
  if ((index & 1) == 0) {
    return (static_cast<uint64_t>(out[1]) << 32) | out[0];
  }
  return (static_cast<uint64_t>(out[3]) << 32) | out[2];
}

uint64_t CounterRng::NextU64() { return At(seed_, stream_, index_++); }

double CounterRng::Uniform01() { return ToOpenUnit(NextU64()); }

double LaplaceFromUniform(double u, double scale) {
  if (scale == 0.0) return 0.0;
  const double v = u - 0.5;
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(v));
  return v < 0 ? -magnitude : magnitude;
}

double CounterRng::Laplace(double scale) {
  if (scale == 0.0) return 0.0;
  return LaplaceFromUniform(Uniform01(), scale);
}

double CounterRng::Exponential() { return -std::log(Uniform01()); }

size_t CounterRng::Categorical(std::span<const double> probs) {
  const double u = Uniform01();
  double cdf = 0.0;
  size_t last_positive = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cdf += probs[i];
    last_positive = i;
    if (u <= cdf) return i;
  }
  // Row sums slightly below one by roundoff.
  return last_positive;
}

}  // namespace dpnash
