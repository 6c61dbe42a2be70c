#include "fdkl/rng.hpp"

namespace fdkl {

SeededRng::Engine SeededRng::engine(std::uint64_t sample) const {
    const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
    const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(seed_), hi(seed_), lo(stream_), hi(stream_), lo(sample), hi(sample)};
    return Engine(seq);
}

} // namespace fdkl
