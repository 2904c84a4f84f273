#include "levyclt/sampling/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace levyclt {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

inline std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// log(k!) for the PTRS acceptance test
double log_factorial(std::uint64_t k) { return std::lgamma(static_cast<double>(k) + 1.0); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    return mix(state);
}

std::uint64_t derive_stream_id(std::uint64_t replicate, std::uint64_t step, std::uint64_t purpose_tag) {
    std::uint64_t h = mix(purpose_tag + 0x9e3779b97f4a7c15ULL);
    h = mix(h ^ (replicate + 0x632be59bd9b4e019ULL));
    h = mix(h ^ (step + 0x85157af5ULL));
    return h;
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id) : master_seed_(master_seed), stream_id_(stream_id) {
    std::uint64_t st = mix(master_seed) ^ rotl(mix(stream_id ^ 0xd1b54a32d192ed03ULL), 17);
    for (auto& s : s_) s = splitmix64(st);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform_open() {
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

double RngStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(th);
    has_cached_normal_ = true;
    return r * std::cos(th);
}

void RngStream::normals(std::span<double> out) {
    for (auto& v : out) v = normal();
}

double RngStream::exponential() { return -std::log(uniform_open()); }

double RngStream::gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("RngStream::gamma: shape must be positive");
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform_open(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t RngStream::poisson(double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("RngStream::poisson: mean must be finite and non-negative");
    if (mean == 0.0) return 0;
    if (mean <= 30.0) {
        // sequential inversion
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= mean / static_cast<double>(k);
            const double next = cdf + p;
            if (next == cdf) break;
            cdf = next;
        }
        return k;
    }
    // Hormann's PTRS
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = uniform() - 0.5;
        const double v = uniform_open();
        const double us = 0.5 - std::abs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kd);
        if (kd < 0.0 || (us < 0.013 && v > us)) continue;
        const std::uint64_t k = static_cast<std::uint64_t>(kd);
        if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <= -mean + kd * loglam - log_factorial(k)) return k;
    }
}

}  // namespace levyclt
