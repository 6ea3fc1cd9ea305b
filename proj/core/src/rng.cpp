#include "levysim/rng.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>

namespace levysim {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& ctr, const std::array<uint32_t, 2>& key) {
    const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * ctr[0];
    const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * ctr[2];
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32_10(std::array<uint32_t, 4> counter,
                                      std::array<uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        philox_round(counter, key);
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return counter;
}

RngStream::RngStream(uint64_t seed, uint64_t path_index) : path_(path_index) {
    const uint64_t k = splitmix64(seed);
    key_ = {static_cast<uint32_t>(k), static_cast<uint32_t>(k >> 32)};
}

void RngStream::refill() {
    const std::array<uint32_t, 4> ctr = {
        static_cast<uint32_t>(block_), static_cast<uint32_t>(block_ >> 32),
        static_cast<uint32_t>(path_), static_cast<uint32_t>(path_ >> 32)};
    const std::array<uint32_t, 4> out = philox4x32_10(ctr, key_);
    buf_[0] = (static_cast<uint64_t>(out[1]) << 32) | out[0];
    buf_[1] = (static_cast<uint64_t>(out[3]) << 32) | out[2];
    pos_ = 0;
    ++block_;
}

uint64_t RngStream::next_u64() {
    if (pos_ >= 2) refill();
    return buf_[pos_++];
}

double RngStream::next_uniform() {
    // 52 random bits centered in each cell: open interval, never 0 or 1.
    return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

double RngStream::next_normal() {
    static const boost::math::normal_distribution<double> unit_normal(0.0, 1.0);
    return boost::math::quantile(unit_normal, next_uniform());
}

double RngStream::next_exponential(double rate) {
    return -std::log(next_uniform()) / rate;
}

double RngStream::next_three_point(double dt) {
    const double u = next_uniform();
    const double mag = std::sqrt(3.0 * dt);
    if (u < 1.0 / 6.0) return -mag;
    if (u > 5.0 / 6.0) return mag;
    return 0.0;
}

}  // namespace levysim
