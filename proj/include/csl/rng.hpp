#pragma once

#include <cmath>
#include <cstdint>

namespace csl {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace detail

// Counter-based generator (Philox 4x32-10). A stream is fully identified by
// (seed, stream_id) and every draw is a pure function of (seed, stream_id,
// counter), so replications, grid cells, and per-unit noise can each get
// their own stream and reproduce independently of evaluation order.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0) noexcept
        : seed_(seed), stream_(stream_id) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_; }

    // Derives an independent child stream. Mixing the parent id with the
    // child index keeps repeated derivations from colliding.
    RngStream substream(std::uint64_t id) const noexcept {
        return RngStream(seed_, detail::mix64(stream_ ^ detail::mix64(id + 1)));
    }

    std::uint64_t next_u64() {
        if (buffered_ == 0) {
            fill_block();
        }
        return buf_[--buffered_];
    }

    // Uniform draw in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform draw in (0, 1]; used where log(u) must stay finite.
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Box-Muller transform; consumes exactly two uniforms per draw.
    double standard_normal() {
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double sd) {
        return mean + sd * standard_normal();
    }

    bool bernoulli(double p) {
        return uniform() < p;
    }

    // Integer in [0, bound) by rejection; bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

private:
    void fill_block() {
        std::uint32_t c0 = static_cast<std::uint32_t>(block_);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
        std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
        std::uint32_t k0 = static_cast<std::uint32_t>(seed_);
        std::uint32_t k1 = static_cast<std::uint32_t>(seed_ >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ULL * c0;
            const std::uint64_t p1 = 0xCD9E8D57ULL * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            c0 = n0;
            c1 = lo1;
            c2 = n2;
            c3 = lo0;
            k0 += 0x9E3779B9U;
            k1 += 0xBB67AE85U;
        }
        buf_[1] = (std::uint64_t(c1) << 32) | c0;
        buf_[0] = (std::uint64_t(c3) << 32) | c2;
        buffered_ = 2;
        ++block_;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::uint64_t buf_[2] = {0, 0};
    int buffered_ = 0;
};

} // namespace csl
