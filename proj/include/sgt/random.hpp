// Copyright 2026 The sgt-qudit Authors
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
/**
 * @file random.hpp
 * Seeded random source and deterministic seed derivation.
 */
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace sgt {

/// Every stochastic operation takes one of these explicitly; nothing in the
/// library touches a global generator.
using Rng = std::mt19937_64;

namespace detail {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/**
 * Derive a child seed from a parent seed, a stream tag and a list of
 * coordinates (dimension, count level, state index, ...). The mapping is a
 * pure function so any single run can be regenerated in isolation.
 */
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                    std::initializer_list<std::uint64_t> coords = {}) noexcept {
    std::uint64_t h = detail::splitmix64(base ^ detail::fnv1a(tag));
    for (const auto c : coords) {
        h = detail::splitmix64(h ^ detail::splitmix64(c));
    }
    return h;
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

} // namespace sgt
