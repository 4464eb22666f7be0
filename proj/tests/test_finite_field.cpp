#include <doctest.h>

#include "oracle.hpp"
#include "sdmc/error.hpp"
#include "sdmc/field.hpp"
#include "sdmc/rng.hpp"

using namespace sdmc;

namespace {

std::vector<Fe> fes(std::initializer_list<std::uint64_t> xs) {
    std::vector<Fe> v;
    for (auto x : xs) v.push_back(Fe{x});
    return v;
}

std::vector<Fe> random_vec(const Field& f, std::size_t n, RngStream& rng) {
    std::vector<Fe> v(n);
    for (auto& x : v) x = rng.uniform(f);
    return v;
}

}  // namespace

TEST_CASE("oracle reproduces the frozen field constants") {
    CHECK(oracle::find_field(7, 8) == 29);
    CHECK(oracle::find_field(1, 2) == 2);
    CHECK(oracle::find_field(5, 7) == 11);
    CHECK(oracle::root(29, 7) == 16);
    CHECK(oracle::root(5, 4) == 2);
    CHECK(oracle::root(11, 5) == 4);  // generator 2, 2^2
    CHECK(oracle::order(3, 11) == 5);  // 3 is another primitive 5th root
    CHECK(oracle::inv(7, 29) == 25);
    CHECK(oracle::dft({0, 1, 0, 0}, 5) == std::vector<std::uint64_t>{1, 2, 4, 3});
    CHECK(oracle::interpolate({1, 2}, {3, 5}, 11) == std::vector<std::uint64_t>{1, 2});
}

TEST_CASE("find_field picks the smallest admissible prime") {
    CHECK(find_field(7, 8)->q() == 29);
    CHECK(find_field(1, 2)->q() == 2);
    CHECK(find_field(5, 7)->q() == 11);
    const auto f = find_field(7, 8);
    REQUIRE(f->root_cache().count(7) == 1);
    CHECK(f->root_cache().at(7) == Fe{16});
    CHECK_THROWS_AS(find_field(7, 30, 40), Error);
}

TEST_CASE("find_field agrees with trial division") {
    for (std::uint64_t n = 1; n <= 12; ++n)
        for (std::uint64_t m = 2; m <= 60; m += 7) CHECK(find_field(n, m)->q() == oracle::find_field(n, m));
}

TEST_CASE("primitive roots are the frozen values") {
    CHECK(primitive_nth_root(*make_field(29), 7) == Fe{16});
    CHECK(primitive_nth_root(*make_field(5), 4) == Fe{2});
    CHECK(primitive_nth_root(*make_field(11), 5) == Fe{4});
    try {
        primitive_nth_root(*make_field(29), 5);
        FAIL("expected order_not_dividing");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::order_not_dividing);
    }
}

TEST_CASE("primitive roots have exact order n") {
    for (std::uint64_t q : {5, 7, 11, 13, 29, 31, 41, 97, 193}) {
        const auto f = make_field(q);
        for (std::uint64_t n = 1; n < q; ++n) {
            if ((q - 1) % n) continue;
            const Fe a = f->primitive_root(n);
            CHECK(f->pow(a, n) == Fe{1});
            for (auto p : prime_factors(n)) CHECK(f->pow(a, n / p) != Fe{1});
            CHECK(a.v == oracle::root(q, n));
        }
    }
}

TEST_CASE("inverse of 7 mod 29") { CHECK(make_field(29)->inv(Fe{7}) == Fe{25}); }

TEST_CASE("dft examples over F_5") {
    const auto f = make_field(5);
    CHECK(dft(*f, fes({1, 0, 0, 0})) == fes({1, 1, 1, 1}));
    const auto e = dft(*f, fes({0, 1, 0, 0}));
    CHECK(e == fes({1, 2, 4, 3}));
    Fe s{0};
    for (Fe x : e) s = f->add(s, x);
    CHECK(s == Fe{0});
    CHECK(idft(*f, fes({1, 1, 1, 1})) == fes({1, 0, 0, 0}));
    CHECK(idft(*f, fes({1, 2, 4, 3})) == fes({0, 1, 0, 0}));
    CHECK_THROWS_AS(dft(*f, fes({1, 2, 3})), Error);
}

TEST_CASE("dft matches direct evaluation and round-trips") {
    RngStream rng(3, 0);
    for (std::uint64_t q : {5, 17, 29, 97, 257}) {
        const auto f = make_field(q);
        for (std::uint64_t n = 1; n < q && n <= 32; ++n) {
            if ((q - 1) % n) continue;
            const auto c = random_vec(*f, n, rng);
            const auto e = dft(*f, c);
            CHECK(e == dft_direct(*f, c));
            std::vector<std::uint64_t> raw;
            for (Fe x : c) raw.push_back(x.v);
            const auto want = oracle::dft(raw, q);
            for (std::size_t i = 0; i < n; ++i) CHECK(e[i].v == want[i]);
            CHECK(idft(*f, e) == c);
            // Coefficient 0 is N^{-1} times the sum of evaluations.
            Fe s{0};
            for (Fe x : e) s = f->add(s, x);
            CHECK(f->mul(s, f->inv(f->from_uint(n))) == c[0]);
        }
    }
}

TEST_CASE("dft is linear") {
    const auto f = make_field(97);
    RngStream rng(4, 0);
    for (int it = 0; it < 50; ++it) {
        const auto u = random_vec(*f, 12, rng), v = random_vec(*f, 12, rng);
        const Fe a = rng.uniform(*f), b = rng.uniform(*f);
        std::vector<Fe> w(12);
        for (std::size_t i = 0; i < 12; ++i) w[i] = f->add(f->mul(a, u[i]), f->mul(b, v[i]));
        const auto du = dft(*f, u), dv = dft(*f, v), dw = dft(*f, w);
        for (std::size_t i = 0; i < 12; ++i) CHECK(dw[i] == f->add(f->mul(a, du[i]), f->mul(b, dv[i])));
    }
}

TEST_CASE("roots of unity annihilate every non-multiple exponent") {
    for (std::uint64_t q : {5, 11, 29, 31, 97}) {
        const auto f = make_field(q);
        for (std::uint64_t n = 1; n < q; ++n) {
            if ((q - 1) % n) continue;
            const Fe a = f->primitive_root(n);
            for (std::uint64_t s = 0; s <= 2 * n; ++s) {
                Fe sum{0};
                for (std::uint64_t i = 0; i < n; ++i) sum = f->add(sum, f->pow(a, i * s));
                CHECK(sum == (s % n == 0 ? f->from_uint(n) : Fe{0}));
            }
        }
    }
}

TEST_CASE("lagrange examples") {
    const auto f = make_field(11);
    const std::vector<std::pair<Fe, Fe>> one = {{Fe{3}, Fe{7}}};
    CHECK(lagrange_interpolate(*f, one, 1) == fes({7}));
    const std::vector<std::pair<Fe, Fe>> two = {{Fe{1}, Fe{3}}, {Fe{2}, Fe{5}}};
    CHECK(lagrange_interpolate(*f, two, 2) == fes({1, 2}));

    const std::vector<std::pair<Fe, Fe>> dup = {{Fe{1}, Fe{3}}, {Fe{1}, Fe{5}}};
    try {
        lagrange_interpolate(*f, dup, 2);
        FAIL("expected duplicate_abscissa");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::duplicate_abscissa);
    }
    try {
        lagrange_interpolate(*f, one, 2);
        FAIL("expected insufficient_points");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::insufficient_points);
    }
}

TEST_CASE("lagrange recovers random polynomials") {
    const auto f = make_field(29);
    RngStream rng(5, 0);
    for (int it = 0; it < 100; ++it) {
        const auto c = random_vec(*f, 4, rng);
        std::vector<std::pair<Fe, Fe>> pts;
        std::vector<std::uint64_t> xs, ys;
        while (pts.size() < 6) {
            const Fe x = rng.uniform(*f);
            bool fresh = true;
            for (const auto& p : pts) fresh = fresh && p.first != x;
            if (!fresh) continue;
            pts.push_back({x, poly_eval(*f, c, x)});
            if (xs.size() < 4) {
                xs.push_back(x.v);
                ys.push_back(pts.back().second.v);
            }
        }
        CHECK(lagrange_interpolate(*f, pts, 4) == c);
        const auto want = oracle::interpolate(xs, ys, 29);
        for (std::size_t j = 0; j < 4; ++j) CHECK(c[j].v == want[j]);
    }
}

TEST_CASE("primality against trial division") {
    for (std::uint64_t n = 0; n < 3000; ++n) CHECK(is_prime(n) == oracle::is_prime(n));
    CHECK(is_prime(2305843009213693951ull));  // 2^61 - 1
    CHECK_FALSE(is_prime(3215031751ull));      // strong pseudoprime to bases 2, 3, 5, 7
}
