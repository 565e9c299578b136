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

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mitodg {

/// SplitMix64 output finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

/// FNV-1a over bytes; used to turn string identifiers into derivation keys.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Generator;

/// Immutable descriptor of a reproducible random stream: a root seed plus the
/// derivation path that led here. The 64-bit key is a function of both and
/// fully determines the draw sequence (see docs/determinism.md).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  RandomStream derive(std::uint64_t key) const;
  RandomStream derive(std::string_view label) const { return derive(fnv1a64(label)); }

  Generator generator() const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::span<const std::uint64_t> path() const noexcept { return path_; }
  std::uint64_t key() const noexcept { return key_; }

  friend bool operator==(const RandomStream& a, const RandomStream& b) {
    return a.seed_ == b.seed_ && a.path_ == b.path_;
  }

 private:
  RandomStream(std::uint64_t seed, std::vector<std::uint64_t> path, std::uint64_t key)
      : seed_(seed), path_(std::move(path)), key_(key) {}

  std::uint64_t seed_;
  std::vector<std::uint64_t> path_;
  std::uint64_t key_;
};

/// Counter-mode SplitMix64: draw i is mix64(key + (i + 1) * gamma).
/// All distribution helpers are implemented here rather than via <random>
/// distributions, whose outputs differ between standard libraries.
class Generator {
 public:
  using result_type = std::uint64_t;

  explicit Generator(std::uint64_t key) noexcept : state_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Unbiased integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept;

  /// Unbiased integer in [lo, hi], inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via Box-Muller; each call consumes exactly two words.
  double normal() noexcept;
  double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::span<T> values) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::uint64_t state_;
};

inline Generator RandomStream::generator() const { return Generator(key_); }

}  // namespace mitodg
