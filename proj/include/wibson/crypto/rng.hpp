// Copyright 2026 The Wibson Sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "wibson/crypto/bytes.hpp"

#include <cstdint>
#include <random>
#include <span>

namespace wibson {

/// The single seeded randomness source of a run. Every key, nonce and
/// sampling decision is drawn from here, so a seed fully determines a run.
/// Not thread-safe; owned by one engine.
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    Rng(const Rng&) = delete;
    Rng& operator=(const Rng&) = delete;
    Rng(Rng&&) = default;
    Rng& operator=(Rng&&) = default;

    std::uint64_t next() { return engine_(); }

    void fill(std::span<std::uint8_t> out)
    {
        std::size_t i = 0;
        while (i < out.size()) {
            auto word = engine_();
            for (int b = 0; b < 8 && i < out.size(); ++b, ++i)
                out[i] = static_cast<std::uint8_t>(word >> (8 * b));
        }
    }

    template <typename F>
    F fixed()
    {
        F out;
        fill(out.bytes);
        return out;
    }

    Bytes bytes(std::size_t n)
    {
        Bytes out(n);
        fill(out);
        return out;
    }

    /// Uniform in [0, bound). Rejection sampling keeps the result independent
    /// of the standard library's distribution implementation.
    std::uint64_t below(std::uint64_t bound)
    {
        if (bound == 0)
            return 0;
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
        std::uint64_t v;
        do {
            v = engine_();
        } while (v >= limit);
        return v % bound;
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

} // namespace wibson
