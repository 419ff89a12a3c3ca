#pragma once

#include "fedsim/bytes.hpp"

#include <cstdint>

namespace fedsim {

/// Deterministic random stream (ChaCha20 keystream over an incrementing
/// block counter). The same seed always yields the same stream; wall-clock
/// entropy never enters the simulation.
class DetRng {
public:
    explicit DetRng(uint64_t seed);
    explicit DetRng(const Digest32& key);

    /// Derives an independent child stream; used to give each simulation
    /// subsystem its own stream so event ordering cannot perturb draws.
    DetRng fork(std::string_view label);

    uint64_t next_u64();
    /// Uniform in [0, bound), bound > 0. Rejection-sampled, unbiased.
    uint64_t uniform(uint64_t bound);
    /// Uniform real in [lo, hi).
    double uniform_real(double lo, double hi);
    /// Exponentially distributed with the given mean.
    double exponential(double mean);
    void fill(std::span<uint8_t> out);

private:
    Digest32 key_;
    uint64_t counter_ = 0;
    std::array<uint8_t, 64> block_{};
    size_t avail_ = 0;
    void refill();
};

}  // namespace fedsim
