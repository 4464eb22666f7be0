#include "sdmc/field.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sdmc/error.hpp"

namespace sdmc {

namespace {

using u64 = std::uint64_t;
using u128 = detail::u128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// Pollard-Brent; n must be composite and odd.
u64 pollard_rho(u64 n) {
    for (u64 c = 1;; ++c) {
        auto step = [&](u64 x) { return (mulmod(x, x, n) + c) % n; };
        u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
        u64 r = 1;
        const u64 block = 128;
        do {
            x = y;
            for (u64 i = 0; i < r; ++i) y = step(y);
            u64 k = 0;
            do {
                ys = y;
                for (u64 i = 0; i < std::min(block, r - k); ++i) {
                    y = step(y);
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += block;
            } while (k < r && g == 1);
            r <<= 1;
        } while (g == 1);
        if (g == n) {
            do {
                ys = step(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

void factor_into(u64 n, std::vector<u64>& out) {
    if (n == 1) return;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull}) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    u64 d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::vector<Fe> dft_with_root(const Field& f, std::span<const Fe> coeffs, Fe root) {
    const std::size_t n = coeffs.size();
    std::vector<Fe> out(coeffs.begin(), coeffs.end());
    if (n <= 1) return out;
    if (!is_power_of_two(n)) {
        std::vector<Fe> powers(n);
        powers[0] = f.one();
        for (std::size_t k = 1; k < n; ++k) powers[k] = f.mul(powers[k - 1], root);
        for (std::size_t i = 0; i < n; ++i) {
            Fe acc = f.zero();
            for (std::size_t l = 0; l < n; ++l) acc = f.add(acc, f.mul(coeffs[l], powers[(i * l) % n]));
            out[i] = acc;
        }
        return out;
    }
    // Iterative radix-2 Cooley-Tukey, natural-order output.
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(out[i], out[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const Fe w_len = f.pow(root, n / len);
        for (std::size_t start = 0; start < n; start += len) {
            Fe w = f.one();
            for (std::size_t k = 0; k < len / 2; ++k) {
                const Fe u = out[start + k];
                const Fe v = f.mul(out[start + k + len / 2], w);
                out[start + k] = f.add(u, v);
                out[start + k + len / 2] = f.sub(u, v);
                w = f.mul(w, w_len);
            }
        }
    }
    return out;
}

}  // namespace

bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These twelve bases are a proven deterministic set below 3.3e24.
    for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<u64> prime_factors(u64 n) {
    std::vector<u64> out;
    factor_into(n, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Field::Field(u64 q) : q_(q) {
    require(is_prime(q), Errc::invalid_parameters, "modulus " + std::to_string(q) + " is not prime");
    require(q < (u64{1} << 63), Errc::invalid_parameters, "modulus must be below 2^63");
    factors_ = prime_factors(q - 1);
    if (q == 2) {
        generator_ = Fe{1};
        return;
    }
    for (u64 g = 2; g < q; ++g) {
        bool primitive = std::all_of(factors_.begin(), factors_.end(),
                                     [&](u64 p) { return powmod(g, (q - 1) / p, q) != 1; });
        if (primitive) {
            generator_ = Fe{g};
            break;
        }
    }
}

Fe Field::from_int(std::int64_t x) const noexcept {
    const auto m = static_cast<std::int64_t>(q_);
    std::int64_t r = x % m;
    if (r < 0) r += m;
    return Fe{static_cast<u64>(r)};
}

Fe Field::pow(Fe a, u64 e) const noexcept { return Fe{powmod(a.v, e, q_)}; }

Fe Field::inv(Fe a) const {
    require(a.v != 0, Errc::invalid_parameters, "inverse of zero");
    return pow(a, q_ - 2);
}

Fe Field::primitive_root(u64 n) const {
    require(divides_order(n), Errc::order_not_dividing,
            "N=" + std::to_string(n) + " does not divide q-1=" + std::to_string(q_ - 1));
    if (auto it = root_cache_.find(n); it != root_cache_.end()) return it->second;
    return pow(generator_, (q_ - 1) / n);
}

FieldPtr make_field(u64 q) { return std::make_shared<const Field>(q); }

FieldPtr find_field(u64 n, u64 min_q, u64 ceiling) {
    require(n >= 1, Errc::invalid_parameters, "N must be positive");
    // n | q-1 already forces q >= n+1.
    u64 start = std::max<u64>(min_q, 2);
    u64 rem = (start - 1) % n;
    u64 candidate = rem == 0 ? start : start + (n - rem);
    for (; candidate <= ceiling; candidate += n) {
        if (is_prime(candidate)) {
            auto field = std::make_shared<Field>(candidate);
            field->cache_root(n);
            return field;
        }
        if (candidate > ceiling - n) break;
    }
    fail(Errc::search_bound_exceeded, "no prime q >= " + std::to_string(min_q) + " with " +
                                          std::to_string(n) + " | q-1 below " + std::to_string(ceiling));
}

Fe primitive_nth_root(const Field& f, u64 n) { return f.primitive_root(n); }

std::vector<Fe> dft(const Field& f, std::span<const Fe> coeffs) {
    require(!coeffs.empty(), Errc::length_mismatch, "empty DFT input");
    return dft_with_root(f, coeffs, f.primitive_root(coeffs.size()));
}

std::vector<Fe> dft_direct(const Field& f, std::span<const Fe> coeffs) {
    const std::size_t n = coeffs.size();
    require(n > 0, Errc::length_mismatch, "empty DFT input");
    const Fe root = f.primitive_root(n);
    std::vector<Fe> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        Fe acc = f.zero();
        for (std::size_t l = 0; l < n; ++l) acc = f.add(acc, f.mul(coeffs[l], f.pow(root, (i * l) % n)));
        out[i] = acc;
    }
    return out;
}

std::vector<Fe> idft(const Field& f, std::span<const Fe> evals) {
    const std::size_t n = evals.size();
    require(n > 0, Errc::length_mismatch, "empty IDFT input");
    const Fe root = f.primitive_root(n);
    auto out = dft_with_root(f, evals, f.inv(root));
    const Fe n_inv = f.inv(f.from_uint(n));
    for (auto& x : out) x = f.mul(x, n_inv);
    return out;
}

Fe poly_eval(const Field& f, std::span<const Fe> coeffs, Fe x) {
    Fe acc = f.zero();
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = f.add(f.mul(acc, x), *it);
    return acc;
}

std::vector<Fe> lagrange_weights(const Field& f, std::span<const Fe> xs, std::size_t d) {
    require(d >= 1, Errc::invalid_parameters, "degree bound must be positive");
    require(xs.size() >= d, Errc::insufficient_points,
            "need " + std::to_string(d) + " points, got " + std::to_string(xs.size()));
    for (std::size_t a = 0; a < xs.size(); ++a)
        for (std::size_t b = a + 1; b < xs.size(); ++b)
            require(xs[a] != xs[b], Errc::duplicate_abscissa, "x=" + std::to_string(xs[a].v) + " repeated");

    // Master polynomial M(x) = prod (x - x_k), coefficients low to high.
    std::vector<Fe> master(d + 1, f.zero());
    master[0] = f.one();
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t j = k + 1; j > 0; --j) master[j] = f.sub(master[j - 1], f.mul(master[j], xs[k]));
        master[0] = f.neg(f.mul(master[0], xs[k]));
    }
    std::vector<Fe> w(d * d, f.zero());
    std::vector<Fe> basis(d);
    for (std::size_t k = 0; k < d; ++k) {
        // basis = M(x) / (x - x_k) by synthetic division.
        Fe carry = master[d];
        for (std::size_t j = d; j > 0; --j) {
            basis[j - 1] = carry;
            carry = f.add(master[j - 1], f.mul(carry, xs[k]));
        }
        Fe denom = f.one();
        for (std::size_t j = 0; j < d; ++j)
            if (j != k) denom = f.mul(denom, f.sub(xs[k], xs[j]));
        const Fe scale = f.inv(denom);
        for (std::size_t j = 0; j < d; ++j) w[j * d + k] = f.mul(basis[j], scale);
    }
    return w;
}

std::vector<Fe> lagrange_interpolate(const Field& f, std::span<const std::pair<Fe, Fe>> points,
                                     std::size_t d) {
    std::vector<Fe> xs;
    xs.reserve(points.size());
    for (const auto& p : points) xs.push_back(p.first);
    const auto w = lagrange_weights(f, xs, d);
    std::vector<Fe> c(d, f.zero());
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) c[j] = f.add(c[j], f.mul(w[j * d + k], points[k].second));
    return c;
}

}  // namespace sdmc
