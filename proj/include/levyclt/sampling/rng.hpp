#pragma once

// Reproducible random streams: xoshiro256** seeded from (master_seed, stream_id) via
// splitmix64, and hand-written variate generators so that draws do not depend on the
// standard library implementation.

#include <cstdint>
#include <span>

namespace levyclt {

std::uint64_t splitmix64(std::uint64_t& state);

/// Stream id for a (replicate, step, purpose) triple; splitmix-style mixing of each field.
std::uint64_t derive_stream_id(std::uint64_t replicate, std::uint64_t step, std::uint64_t purpose_tag);

/// Purpose tags used by the samplers (part of the stream-id contract).
enum StreamPurpose : std::uint64_t {
    kPurposeLaw = 1,
    kPurposeReference = 2,
    kPurposeBrownian = 3,
    kPurposeSmallJumps = 4,
    kPurposeBigJumps = 5,
    kPurposeSurrogate = 6,
    kPurposeBootstrap = 7,
    kPurposeProbe = 8,
};

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform on (0, 1).
    double uniform_open();
    /// Standard normal (Box-Muller, second variate cached).
    double normal();
    void normals(std::span<double> out);
    /// Exponential with mean 1.
    double exponential();
    /// Gamma(shape, 1), Marsaglia-Tsang.
    double gamma(double shape);
    /// Poisson(mean): inversion for mean <= 30, PTRS transformed rejection above.
    std::uint64_t poisson(double mean);

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t s_[4];
    bool has_cached_normal_ = false;
    double cached_normal_ = 0.0;
};

}  // namespace levyclt
