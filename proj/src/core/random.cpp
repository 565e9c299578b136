// Copyright 2026 The mitodg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mitodg/core/random.hpp"

#include <cmath>
#include <numbers>

namespace mitodg {

namespace {

constexpr std::uint64_t kRootSalt = 0x6d69746f64672d30ULL;  // "mitodg-0"

std::uint64_t child_key(std::uint64_t parent, std::uint64_t k) noexcept {
  return mix64(mix64(parent + kGoldenGamma) ^ k);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed)
    : seed_(seed), key_(mix64(seed ^ kRootSalt)) {}

RandomStream RandomStream::derive(std::uint64_t key) const {
  std::vector<std::uint64_t> path = path_;
  path.push_back(key);
  return RandomStream(seed_, std::move(path), child_key(key_, key));
}

std::uint64_t Generator::below(std::uint64_t n) noexcept {
  // Lemire's multiply-shift with rejection of the biased low region.
  std::uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::int64_t Generator::between(std::int64_t lo, std::int64_t hi) noexcept {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next_u64());
  return lo + static_cast<std::int64_t>(below(span));
}

double Generator::normal() noexcept {
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace mitodg
