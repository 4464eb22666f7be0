#include "sdmc/rng.hpp"

namespace sdmc {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(mix64(mix64(seed + kGolden) ^ mix64(stream * kGolden + 0x632BE59BD9B4E019ull))) {}

std::uint64_t RngStream::next_u64() noexcept {
    const std::uint64_t ctr = counter_++;
    return mix64(key_ + mix64(ctr * kGolden + 1));
}

std::uint64_t RngStream::uniform(std::uint64_t bound) noexcept {
    // Reject the top partial bucket so that every residue is equally likely.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound + 1) % bound;
    for (;;) {
        const std::uint64_t x = next_u64();
        if (x <= limit) return x % bound;
    }
}

}  // namespace sdmc
