// Copyright 2026 The Talkgames Authors
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

#ifndef TALKGAMES_UTIL_RANDOM_H_
#define TALKGAMES_UTIL_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string>

namespace talkgames::util {

// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t Mix64(std::uint64_t x);

// Derives a child seed from a parent seed and a path of stream indices, e.g.
// DeriveSeed(run_seed, {step, group, branch}).
std::uint64_t DeriveSeed(std::uint64_t seed,
                         std::initializer_list<std::uint64_t> path);

// Portable random source: the engine is fully specified by the standard and
// the mapping to doubles and integers is done here, so draws are identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1).
  double Uniform01();
  // Uniform integer in [lo, hi].
  std::int64_t UniformInt(std::int64_t lo, std::int64_t hi);
  // Index drawn proportionally to `weights` (non-negative, positive sum).
  std::size_t Categorical(std::span<const double> weights);

  std::string SerializeState() const;
  void RestoreState(const std::string& state);

 private:
  std::mt19937_64 engine_;
};

}  // namespace talkgames::util

#endif  // TALKGAMES_UTIL_RANDOM_H_
