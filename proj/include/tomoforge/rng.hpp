// Copyright 2026 The Tomoforge Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Seeded random streams.
 *
 * Every stochastic routine takes an explicit `Rng&`; there is no global
 * generator. Streams for independent work units are derived from a root seed
 * with a keyed mix:
 *
 *     seed = mix(mix(mix(root ^ fnv1a(tag)) ^ i0) ^ i1) ...
 *
 * where `mix` is the SplitMix64 finalizer and `fnv1a` is 64-bit FNV-1a over
 * the tag bytes. Given the same (root, tag, indices) any implementation
 * obtains the same 64-bit stream seed.
 */

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace tomoforge {

using Rng = std::mt19937_64;

struct RngSeed {
    std::uint64_t value = 0;

    friend bool operator==(RngSeed, RngSeed) = default;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr RngSeed derive_seed(RngSeed root, std::string_view tag,
                              std::initializer_list<std::uint64_t> indices) {
    std::uint64_t h = splitmix64(root.value ^ fnv1a64(tag));
    for (std::uint64_t i : indices) {
        h = splitmix64(h ^ i);
    }
    return RngSeed{h};
}

inline Rng make_rng(RngSeed seed) { return Rng(seed.value); }

} // namespace tomoforge
