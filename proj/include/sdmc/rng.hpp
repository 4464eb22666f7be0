#pragma once

#include <cstdint>

#include "sdmc/field.hpp"

namespace sdmc {

/// Counter-based generator: output n of stream s is a pure function of
/// (seed, s, n), so every node's randomness is reproducible and independent of
/// the order in which nodes draw.
class RngStream {
public:
    RngStream() = default;
    RngStream(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint64_t next_u64() noexcept;

    // Uniform on [0, bound) by rejection; bound > 0.
    std::uint64_t uniform(std::uint64_t bound) noexcept;

    Fe uniform(const Field& f) noexcept { return Fe{uniform(f.q())}; }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace sdmc
