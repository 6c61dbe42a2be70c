#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace fdkl {

/// Seed record for reproducible sampling.
///
/// Each sample path draws from its own engine derived from (seed, stream, sample),
/// so results do not depend on the order or thread in which samples are generated.
class SeededRng {
public:
    using Engine = std::mt19937_64;

    explicit SeededRng(std::uint64_t seed = 0, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    static std::string algorithm() { return "mt19937_64"; }

    /// Same seed, different stream.
    SeededRng with_stream(std::uint64_t stream) const { return SeededRng(seed_, stream); }

    /// Engine for one sample of this stream.
    Engine engine(std::uint64_t sample) const;

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

} // namespace fdkl
