#pragma once

#include <cstdint>
#include <random>

namespace wsn {

// Deterministic random source. All randomness in the simulator flows through
// this wrapper so that a seed fully determines a trial on every platform.
//
// std::mt19937_64 has standard-mandated output, but the standard library's
// floating-point distributions do not, so the unit-interval conversion is done
// by hand: take the top 53 bits and scale by 2^-53. Result is in [0, 1).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform draw in [lo, hi). Requires lo <= hi.
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
    std::mt19937_64 gen_;
};

} // namespace wsn
