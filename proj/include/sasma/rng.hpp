#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sasma {

/// Reproducible random stream keyed by (seed, stream_id).
///
/// Each Monte Carlo replication owns one stream; the engine is seeded through
/// std::seed_seq from all 128 key bits so neighbouring stream ids do not
/// produce correlated engine states. Not thread-safe: one stream per thread.
class RngStream {
public:
    using engine_type = std::mt19937_64;

    RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id),
                          static_cast<std::uint32_t>(stream_id >> 32), 0x5a5a5a5au};
        engine_.seed(seq);
    }

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    engine_type& engine() noexcept { return engine_; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() {
        // 53 random mantissa bits, shifted off zero by half an ulp.
        const std::uint64_t bits = engine_() >> 11;
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    /// Standard exponential.
    double exponential() { return -std::log(uniform_open()); }

    double normal() { return normal_(engine_); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sasma
