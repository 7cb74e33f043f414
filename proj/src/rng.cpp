#include "thermonet/rng.hpp"

#include <cmath>

namespace thermonet {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64(s);
}

std::uint64_t RngStream::raw_u64() {
    // xoshiro256++ (Blackman & Vigna, public domain reference code).
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

std::uint64_t RngStream::next_u64() {
    ++draws_;
    return raw_u64();
}

double RngStream::next_uniform() {
    ++draws_;
    return static_cast<double>(raw_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
    ++draws_;
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double v1 = 0.0, v2 = 0.0, s = 0.0;
    do {
        v1 = 2.0 * static_cast<double>(raw_u64() >> 11) * 0x1.0p-53 - 1.0;
        v2 = 2.0 * static_cast<double>(raw_u64() >> 11) * 0x1.0p-53 - 1.0;
        s = v1 * v1 + v2 * v2;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v2 * f;
    have_spare_ = true;
    return v1 * f;
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
    ++draws_;
    const auto wide = static_cast<unsigned __int128>(raw_u64()) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k) {
    std::uint64_t s = master;
    std::uint64_t out = 0;
    for (std::uint64_t i = 0; i <= k; ++i) out = splitmix64(s);
    return out;
}

} // namespace thermonet
