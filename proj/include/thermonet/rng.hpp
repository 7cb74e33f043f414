#pragma once

#include <cstdint>

namespace thermonet {

/// Deterministic random stream: xoshiro256++ seeded through splitmix64.
///
/// The generator is fixed so that runs are replayable across builds and
/// platforms:
///   - seeding: four splitmix64 outputs from the 64-bit seed (seed 0 is valid);
///   - uniforms: top 53 bits of the 64-bit output, giving a double in [0,1);
///   - normals: Marsaglia polar method. Each accepted pair yields two
///     variates; the second is cached in the stream and returned by the next
///     call, so normals consume uniforms in bursts of 2k (k >= 1 rejections).
///
/// draw_count() counts variates handed out (uniforms, normals, integers),
/// not raw generator advances. A stream is single-owner: it may move between
/// threads but must never be used from two threads at once.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t draw_count() const { return draws_; }

    std::uint64_t next_u64();
    /// Uniform double in [0,1).
    double next_uniform();
    /// Standard normal variate.
    double next_normal();
    /// Uniform integer in [0, bound), bound > 0. Uses the 128-bit multiply
    /// reduction; the modulo bias is below 2^-64 per draw.
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::uint64_t raw_u64();

    std::uint64_t state_[4];
    std::uint64_t seed_ = 0;
    std::uint64_t draws_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// k-th output of the splitmix64 chain started at `master`. Used to derive
/// the per-purpose sub-streams of a run (train data, test data, init,
/// training loop) from one experiment seed. Adjacent master seeds never
/// collide for small k because the splitmix increment is odd.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t k);

} // namespace thermonet
