#pragma once

#include <array>
#include <cstdint>

namespace levysim {

uint64_t splitmix64(uint64_t x);

// One Philox4x32-10 block: 128-bit counter + 64-bit key -> 128 output bits.
std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> counter,
                                      std::array<uint32_t, 2> key);

// Philox4x32-10 counter-based stream (Salmon, Moraes, Dror, Shaw; SC'11).
// The stream state is a pure function of (seed, path_index): draw sequences
// do not depend on how paths are scheduled across workers, and copies are
// cheap value snapshots.
class RngStream {
public:
    RngStream(uint64_t seed, uint64_t path_index);

    uint64_t next_u64();
    // Uniform on the open interval (0,1); never returns an endpoint.
    double next_uniform();
    // Standard normal by inverse CDF (one uniform per draw).
    double next_normal();
    // Exponential(rate) by inverse transform (one uniform per draw).
    double next_exponential(double rate);
    // Three-point weak-Taylor increment: +-sqrt(3*dt) w.p. 1/6 each, 0 otherwise.
    double next_three_point(double dt);

    uint64_t path_index() const noexcept { return path_; }

private:
    void refill();

    std::array<uint32_t, 2> key_;
    uint64_t path_;
    uint64_t block_ = 0;
    std::array<uint64_t, 2> buf_{};
    int pos_ = 2;  // consumed entries in buf_
};

inline RngStream stream_for(uint64_t seed, uint64_t path_index) {
    return RngStream(seed, path_index);
}

}  // namespace levysim
