// Copyright 2026 The fedwelfare Authors
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

#ifndef FEDWELFARE_COMMON_H_
#define FEDWELFARE_COMMON_H_

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace fedwelfare {

// Identifies a client (data silo) across rounds and replications.
enum class ClientId : std::int32_t {};

constexpr std::int32_t to_int(ClientId id) { return static_cast<std::int32_t>(id); }
constexpr ClientId client(std::int32_t value) { return static_cast<ClientId>(value); }

// All randomness flows through explicitly passed engines of this type.
using Rng = std::mt19937_64;

// splitmix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed of replication `index` under `base_seed`:
//   mix64(base_seed ^ mix64(index + 1)).
constexpr std::uint64_t replication_seed(std::uint64_t base_seed,
                                         std::uint64_t index) {
  return mix64(base_seed ^ mix64(index + 1));
}

// Layout or shape disagreement between objects that must match.
class StructuralError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A value outside an operation's documented domain.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid scenario configuration or method parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fedwelfare

#endif  // FEDWELFARE_COMMON_H_
