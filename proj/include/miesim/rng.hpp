// Copyright 2026 The miesim Authors
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

#ifndef MIESIM_RNG_HPP
#define MIESIM_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace miesim {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ull;
    }
    return h;
}

/// Seed of trial `index` of the stream named `tag`. Independent of how trials are scheduled.
constexpr std::uint64_t trial_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
    return splitmix64(splitmix64(master ^ splitmix64(fnv1a(tag))) + splitmix64(index + 0x632BE59BD9B4E019ull));
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

inline Rng trial_rng(std::uint64_t master, std::string_view tag, std::uint64_t index) {
    return make_rng(trial_seed(master, tag, index));
}

/// Uniform integer in [0, bound).
inline std::uint64_t uniform_below(Rng &rng, std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
}

}  // namespace miesim

#endif
