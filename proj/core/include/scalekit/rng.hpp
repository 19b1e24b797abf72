// Copyright (c) 2026 The scalekit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace scalekit {

// Deterministic random draws built on std::mt19937_64. The engine's output
// stream is pinned by the standard; the distributions below are constructed
// from raw engine words instead of <random> distribution objects, whose
// streams are implementation-defined. Same seed, same draws.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform_pos() { return 1.0 - uniform(); }

    /// Standard normal via Box-Muller; generates pairs, caches the spare.
    double normal();

    /// Integer uniform on [0, n), n >= 1. Rejection-free modulo bias is
    /// negligible for the n used here (dataset and grid indices).
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    /// Derives an independent stream seed from a base seed and an index
    /// (SplitMix64 of base + index).
    static std::uint64_t derive(std::uint64_t base, std::uint64_t index);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace scalekit
