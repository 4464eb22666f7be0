#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace sdmc {

namespace detail {
__extension__ using u128 = unsigned __int128;
}  // namespace detail

/// Element of a prime field, always held in canonical form [0, q).
struct Fe {
    std::uint64_t v = 0;

    constexpr Fe() = default;
    constexpr explicit Fe(std::uint64_t value) : v(value) {}

    friend constexpr auto operator<=>(Fe, Fe) = default;
};

// Deterministic Miller-Rabin, exact for every 64-bit input.
bool is_prime(std::uint64_t n);

// Distinct prime factors, ascending.
std::vector<std::uint64_t> prime_factors(std::uint64_t n);

/// Prime field F_q together with the data needed to produce roots of unity.
///
/// Immutable after construction. Roots are derived from the smallest primitive
/// root g as alpha_N = g^((q-1)/N) so that every run produces identical shares.
class Field {
public:
    explicit Field(std::uint64_t q);

    std::uint64_t q() const noexcept { return q_; }
    const std::vector<std::uint64_t>& order_factors() const noexcept { return factors_; }
    Fe generator() const noexcept { return generator_; }

    Fe zero() const noexcept { return Fe{0}; }
    Fe one() const noexcept { return Fe{1}; }
    Fe from_int(std::int64_t x) const noexcept;
    Fe from_uint(std::uint64_t x) const noexcept { return Fe{x % q_}; }

    Fe add(Fe a, Fe b) const noexcept {
        std::uint64_t s = a.v + b.v;  // both < q < 2^63
        return Fe{s >= q_ ? s - q_ : s};
    }
    Fe sub(Fe a, Fe b) const noexcept { return Fe{a.v >= b.v ? a.v - b.v : a.v + q_ - b.v}; }
    Fe neg(Fe a) const noexcept { return Fe{a.v == 0 ? 0 : q_ - a.v}; }
    Fe mul(Fe a, Fe b) const noexcept {
        return Fe{static_cast<std::uint64_t>(static_cast<detail::u128>(a.v) * b.v % q_)};
    }
    Fe pow(Fe a, std::uint64_t e) const noexcept;
    // Throws invalid_parameters on zero.
    Fe inv(Fe a) const;

    bool divides_order(std::uint64_t n) const noexcept { return n != 0 && (q_ - 1) % n == 0; }

    /// Primitive n-th root of unity; throws order_not_dividing when n does not divide q-1.
    Fe primitive_root(std::uint64_t n) const;

    /// Roots found at construction for `find_field` requests.
    const std::map<std::uint64_t, Fe>& root_cache() const noexcept { return root_cache_; }
    void cache_root(std::uint64_t n) { root_cache_.emplace(n, primitive_root(n)); }

    bool operator==(const Field& other) const noexcept { return q_ == other.q_; }

private:
    std::uint64_t q_;
    std::vector<std::uint64_t> factors_;
    Fe generator_;
    std::map<std::uint64_t, Fe> root_cache_;
};

using FieldPtr = std::shared_ptr<const Field>;

FieldPtr make_field(std::uint64_t q);

inline constexpr std::uint64_t kDefaultPrimeCeiling = std::uint64_t{1} << 62;

/// Smallest prime q >= max(min_q, 2) with n | q-1. The root alpha_n is cached.
FieldPtr find_field(std::uint64_t n, std::uint64_t min_q,
                    std::uint64_t ceiling = kDefaultPrimeCeiling);

Fe primitive_nth_root(const Field& f, std::uint64_t n);

// Evaluation of the polynomial with the given coefficients at alpha_N^i,
// i = 0..N-1, where N = coeffs.size(). Radix-2 when N is a power of two,
// direct summation otherwise.
std::vector<Fe> dft(const Field& f, std::span<const Fe> coeffs);
std::vector<Fe> idft(const Field& f, std::span<const Fe> evals);

// O(N^2) reference path, kept public so tests can cross-check the fast path.
std::vector<Fe> dft_direct(const Field& f, std::span<const Fe> coeffs);

/// Interpolation weights W (d x d, row-major) such that c = W y for the first d
/// abscissae: c_j = sum_k W[j][k] y_k.
std::vector<Fe> lagrange_weights(const Field& f, std::span<const Fe> xs, std::size_t degree_bound);

/// Coefficients c_0..c_{d-1} of the unique polynomial of degree < d through the
/// first d points. All abscissae must be distinct.
std::vector<Fe> lagrange_interpolate(const Field& f, std::span<const std::pair<Fe, Fe>> points,
                                     std::size_t degree_bound);

Fe poly_eval(const Field& f, std::span<const Fe> coeffs, Fe x);

}  // namespace sdmc
