#include <doctest.h>

#include <bit>
#include <map>

#include <nlohmann/json.hpp>

#include "oracle.hpp"
#include "sdmc/error.hpp"
#include "sdmc/protocols.hpp"

using namespace sdmc;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return Errc::invalid_parameters;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

MatrixFq ints(const FieldPtr& f, std::size_t r, std::size_t c, std::vector<std::int64_t> v) {
    return MatrixFq::from_ints(f, r, c, v);
}

MatrixFq random_invertible(const FieldPtr& f, std::size_t n, RngStream& g) {
    for (;;) {
        auto m = random_matrix(f, n, n, g);
        if (rank(m) == n) return m;
    }
}

Rational R(std::int64_t a, std::int64_t b = 1) { return Rational(a, b); }

}  // namespace

// ---------------------------------------------------------------------------
// Two-matrix multiplication.

TEST_CASE("sdmm2 reproduces the 2x2 example in F_29") {
    const auto f = make_field(29);
    const auto a = ints(f, 2, 3, {1, 2, 3, 4, 5, 6});
    const auto b = ints(f, 3, 2, {7, 8, 9, 10, 11, 12});
    SimNet net(2, 7, f, 1);
    const auto c = sdmm2(net, a, b, 2);
    // 58 64 / 139 154 reduced mod 29.
    CHECK(c == ints(f, 2, 2, {0, 6, 23, 9}));
    CHECK(oracle::to_mat(c) == oracle::mul(oracle::to_mat(a), oracle::to_mat(b), 29));
    const auto r = net.report();
    CHECK(r.chi_ul == R(7, 3));
    CHECK(r.upload_symbols == 7 * (6 / 3 + 6 / 3));
    CHECK(r.interserver_symbols == 0);
}

TEST_CASE("sdmm2 with T = 0 is plain distributed multiplication") {
    const auto f = make_field(29);
    RngStream g(5, 1);
    const auto a = random_matrix(f, 3, 4, g), b = random_matrix(f, 4, 2, g);
    SimNet net(2, 4, f, 3);
    CHECK(sdmm2(net, a, b, 0) == mat_mul(a, b));
    CHECK(net.report().chi_ul == R(1));
}

TEST_CASE("sdmm2 rejects N <= 2T and indivisible inner dimensions") {
    const auto f = make_field(29);
    const auto a = MatrixFq::zeros(f, 2, 4), b = MatrixFq::zeros(f, 4, 2);
    SimNet net4(2, 4, f, 1);
    CHECK(code_of([&] { sdmm2(net4, a, b, 2); }) == Errc::invalid_parameters);
    SimNet net7(2, 7, f, 1);
    CHECK(code_of([&] { sdmm2(net7, a, b, 2); }) == Errc::indivisible_dimension);
    CHECK(code_of([&] { sdmm2(net7, a, MatrixFq::zeros(f, 3, 2), 2); }) == Errc::dimension_mismatch);
}

TEST_CASE("own-data multiplication costs N/(N-T) and is correct") {
    const auto f = make_field(29);
    RngStream g(8, 1);
    SUBCASE("example") {
        const auto a = random_matrix(f, 2, 10, g), b = random_matrix(f, 10, 2, g);
        SimNet net(1, 7, f, 2);
        CHECK(sdmm2_own_data(net, a, b, 2) == mat_mul(a, b));
        CHECK(net.report().chi_ul == R(7, 5));
    }
    SUBCASE("T = 0") {
        const auto a = random_matrix(f, 3, 7, g), b = random_matrix(f, 7, 3, g);
        SimNet net(1, 7, f, 2);
        CHECK(sdmm2_own_data(net, a, b, 0) == mat_mul(a, b));
        CHECK(net.report().chi_ul == R(1));
    }
    SimNet net(1, 4, f, 1);
    CHECK(code_of([&] { sdmm2_own_data(net, MatrixFq::zeros(f, 1, 1), MatrixFq::zeros(f, 1, 1), 4); }) ==
          Errc::invalid_parameters);
}

TEST_CASE("user-secure round: the first N-T coefficients carry C") {
    const auto f = make_field(29);
    RngStream g(11, 1);
    for (std::size_t T : {0u, 1u, 2u}) {
        CAPTURE(T);
        const std::size_t N = 7, K = N - 2 * T;
        const auto a = random_matrix(f, 2, K * 2, g), b = random_matrix(f, K * 2, N - T, g);
        SimNet net(2, N, f, 4);
        auto [la, ka] = make_left_shares(a, N, K, T, net.rng(NodeId::source(1)), "A");
        auto [rb, kb] = make_right_shares(b, N, K, T, net.rng(NodeId::source(2)), "B");
        const auto prod = multiply_shares(net, la, rb, "C");
        const auto out = usersecure_round(net, prod, T, "C");
        CHECK(out.front().params == ShareParams{N, N - T, T, Side::Left});
        const auto coeffs = reconstruct_all_coeffs(out);
        const auto c = mat_mul(a, b);
        const auto blocks = partition_cols(c, N - T);
        for (std::size_t l = 0; l < N - T; ++l) CHECK(coeffs[l] == blocks[l]);
        CHECK(decode_shares(out) == c);

        SimNet net2(2, N, f, 4);
        CHECK(sdmm2(net2, a, b, T, Delivery::UserSecure) == c);
        CHECK(net2.report().chi_dl == R(static_cast<std::int64_t>(N), static_cast<std::int64_t>(N - T)));
    }
}

// ---------------------------------------------------------------------------
// Straggler tolerance.

TEST_CASE("straggler protocol thresholds and one failed group") {
    const auto f = make_field(29);
    const auto l = BivariateLayout::make(*f, 2, 2, 2, 1, 5, false);
    CHECK(l.N1 == 4);
    CHECK(straggler_group_threshold(l) == 16);
    CHECK(straggler_worst_case_threshold(20, l) == 19);
    RngStream g(2, 2);
    const auto a = random_matrix(f, 4, 4, g), b = random_matrix(f, 4, 4, g);
    SimNet net(2, 20, f, 1);
    net.inject_stragglers({l.server_id(0, 3), l.server_id(2, 3)});
    CHECK(straggler_sdmm(net, a, b, l) == mat_mul(a, b));
    const auto info = net.report().stragglers;
    REQUIRE(info.has_value());
    CHECK(info->complete_groups == 4);
    CHECK(info->group_threshold == 16);
    CHECK(info->worst_case_threshold == 19);
}

TEST_CASE("straggler protocol succeeds iff K2*K3 groups are complete") {
    const auto f = make_field(37);
    RngStream g(3, 3);
    for (bool own : {false, true}) {
        CAPTURE(own);
        const auto l = BivariateLayout::make(*f, 2, 2, 2, 1, 5, own);
        const std::size_t n = l.server_count();
        const auto a = random_matrix(f, 4, 4, g), b = random_matrix(f, 4, 4, g);
        const auto c = mat_mul(a, b);
        for (unsigned mask = 0; mask < 32; ++mask) {
            CAPTURE(mask);
            std::set<std::size_t> failed;
            for (std::size_t s = 1; s <= 5; ++s)
                if (mask & (1u << (s - 1))) failed.insert(l.server_id((mask + s) % l.N1, s));
            SimNet net(2, n, f, mask + 1);
            net.inject_stragglers(failed);
            if (5 - std::popcount(mask) >= 4) {
                CHECK(straggler_sdmm(net, a, b, l) == c);
            } else {
                CHECK(code_of([&] { straggler_sdmm(net, a, b, l); }) == Errc::insufficient_groups);
            }
        }
    }
}

TEST_CASE("a single-group, single-block layout matches sdmm2") {
    const auto f = make_field(29);
    RngStream g(4, 4);
    const auto a = random_matrix(f, 2, 6, g), b = random_matrix(f, 6, 2, g);
    const auto l = BivariateLayout::make(*f, 3, 1, 1, 2, 1, false, {Fe{1}});
    SimNet s(2, 7, f, 9), u(2, 7, f, 9);
    CHECK(straggler_sdmm(s, a, b, l) == sdmm2(u, a, b, 2));
    CHECK(s.report().upload_symbols == u.report().upload_symbols);
    CHECK(s.report().chi_ul == R(7, 3));
}

TEST_CASE("straggler layout needs enough servers and groups") {
    const auto f = make_field(29);
    const auto l = BivariateLayout::make(*f, 2, 2, 2, 1, 5, false);
    SimNet small(2, 19, f, 1);
    const auto a = MatrixFq::zeros(f, 4, 4);
    CHECK(code_of([&] { straggler_sdmm(small, a, a, l); }) == Errc::invalid_parameters);
    CHECK(code_of([&] { straggler_worst_case_threshold(12, l); }) == Errc::invalid_parameters);
}

// ---------------------------------------------------------------------------
// Chains.

TEST_CASE("chain multiplication for three and two matrices") {
    const auto f = make_field(29);
    RngStream g(6, 6);
    const std::size_t N = 7, T = 2, K = 3;
    SUBCASE("three factors") {
        std::vector<MatrixFq> ch = {random_matrix(f, 3, 3, g), random_matrix(f, 3, 3, g), random_matrix(f, 3, 6, g)};
        SimNet net(3, N, f, 1);
        const auto c = chain_multiply(net, ch, T);
        CHECK(c == mat_mul(mat_mul(ch[0], ch[1]), ch[2]));
        const auto r = net.report();
        CHECK(r.chi_ul == R(N, K));
        REQUIRE(r.interserver_rounds.size() == 1);
        CHECK(r.interserver_rounds[0].per_server() == R(N - 1, K));
        CHECK(r.computation_rounds == 2);
    }
    SUBCASE("two factors") {
        std::vector<MatrixFq> ch = {random_matrix(f, 2, 3, g), random_matrix(f, 3, 2, g)};
        SimNet net(2, N, f, 1);
        CHECK(chain_multiply(net, ch, T) == mat_mul(ch[0], ch[1]));
        CHECK(net.report().interserver_rounds.empty());
    }
    SUBCASE("an indivisible intermediate names the round") {
        std::vector<MatrixFq> ch = {random_matrix(f, 3, 3, g), random_matrix(f, 3, 2, g), random_matrix(f, 2, 3, g)};
        SimNet net(3, N, f, 1);
        CHECK(code_of([&] { chain_multiply(net, ch, T); }) == Errc::indivisible_dimension);
        CHECK(message_of([&] { chain_multiply(net, ch, T); }).find("round 2") != std::string::npos);
    }
}

TEST_CASE("chain costs across N and T") {
    RngStream g(7, 7);
    for (auto [N, T] : {std::pair{5u, 1u}, std::pair{7u, 2u}, std::pair{9u, 3u}, std::pair{8u, 1u}}) {
        CAPTURE(N);
        const auto f = find_field(N, 30);
        const std::size_t K = N - 2 * T;
        std::vector<MatrixFq> ch;
        for (int i = 0; i < 4; ++i) ch.push_back(random_matrix(f, K, K, g));
        SimNet net(4, N, f, 2);
        CHECK(chain_multiply(net, ch, T) == mat_mul(mat_mul(mat_mul(ch[0], ch[1]), ch[2]), ch[3]));
        const auto r = net.report();
        CHECK(r.chi_ul == R(N, K));
        CHECK(r.interserver_rounds.size() == 2);
        for (const auto& round : r.interserver_rounds) CHECK(round.per_server() == R(N - 1, K));
    }
}

// ---------------------------------------------------------------------------
// Conversions and transposes.

TEST_CASE("share conversions") {
    const auto f = make_field(29);
    RngStream g(9, 9);
    const std::size_t N = 7;
    SUBCASE("left to right with different K and T") {
        const auto a = random_matrix(f, 6, 6, g);
        SimNet net(1, N, f, 1);
        auto [l, k] = make_left_shares(a, N, 3, 2, net.rng(NodeId::source(1)), "A");
        const auto r = convert_shares(net, l, {N, 2, 1, Side::Right}, "A");
        CHECK(r.front().params == ShareParams{N, 2, 1, Side::Right});
        CHECK(decode_shares(r) == a);
        CHECK(net.report().communication_rounds == 1);
    }
    SUBCASE("right to left") {
        const auto a = random_matrix(f, 6, 4, g);
        SimNet net(1, N, f, 1);
        auto [r, k] = make_right_shares(a, N, 3, 2, net.rng(NodeId::source(1)), "A");
        CHECK(decode_shares(convert_shares(net, r, {N, 2, 2, Side::Left}, "A")) == a);
    }
    SUBCASE("same side is allowed only from K = 1") {
        const auto a = random_matrix(f, 4, 4, g);
        SimNet net(1, N, f, 1);
        auto [l1, k1] = make_left_shares(a, N, 1, 2, net.rng(NodeId::source(1)), "A");
        CHECK(decode_shares(convert_shares(net, l1, {N, 4, 2, Side::Left}, "A")) == a);
        auto [l2, k2] = make_left_shares(a, N, 2, 2, net.rng(NodeId::source(1)), "A");
        CHECK(code_of([&] { convert_shares(net, l2, {N, 4, 2, Side::Left}, "A"); }) == Errc::illegal_conversion);
    }
    SUBCASE("product shares convert to left shares of the product") {
        const auto a = random_matrix(f, 2, 6, g), b = random_matrix(f, 6, 4, g);
        SimNet net(2, N, f, 1);
        auto [la, ka] = make_left_shares(a, N, 3, 2, net.rng(NodeId::source(1)), "A");
        auto [rb, kb] = make_right_shares(b, N, 3, 2, net.rng(NodeId::source(2)), "B");
        const auto p = multiply_shares(net, la, rb, "C");
        CHECK(decode_shares(convert_shares(net, p, {N, 2, 2, Side::Left}, "C")) == mat_mul(a, b));
        CHECK(decode_shares(convert_shares(net, p, {N, 2, 2, Side::Right}, "C")) == mat_mul(a, b));
    }
}

TEST_CASE("transposition of left shares") {
    const auto f = make_field(29);
    RngStream g(10, 10);
    const std::size_t N = 7;
    const auto a = random_matrix(f, 4, 6, g);
    SimNet net(1, N, f, 1);
    auto [l, k] = make_left_shares(a, N, 3, 2, net.rng(NodeId::source(1)), "A");
    const auto t = transpose_shares(net, l, {N, 2, 2, Side::Left}, "At");
    CHECK(decode_shares(t) == transpose(a));
    CHECK(decode_shares(transpose_shares(net, t, {N, 3, 2, Side::Left}, "Att")) == a);

    auto s = random_matrix(f, 6, 6, g);
    s = mat_add(s, transpose(s));
    auto [ls, ks] = make_left_shares(s, N, 3, 2, net.rng(NodeId::source(1)), "S");
    CHECK(decode_shares(transpose_shares(net, ls, {N, 3, 2, Side::Left}, "St")) == s);
}

// ---------------------------------------------------------------------------
// Powers, inverses, Newton, solving.

TEST_CASE("exponentiation rounds follow the binary expansion") {
    const auto f = make_field(29);
    RngStream g(12, 12);
    const auto a = random_matrix(f, 3, 3, g);
    for (std::uint64_t r = 1; r <= 64; ++r) {
        CAPTURE(r);
        SimNet net(1, 7, f, r);
        CHECK(exponentiate(net, a, r, 2) == mat_pow(a, r));
        const std::size_t expect = static_cast<std::size_t>(std::bit_width(r) - 1 + std::popcount(r) - 1);
        CHECK(net.report().computation_rounds == expect);
    }
    SimNet net(1, 7, f, 1);
    exponentiate(net, a, 6, 2);
    CHECK(net.report().computation_rounds == 3);
    CHECK(code_of([&] { exponentiate(net, a, 0, 2); }) == Errc::invalid_parameters);
}

TEST_CASE("masked inversion") {
    const auto f = make_field(29);
    RngStream g(13, 13);
    const std::size_t N = 7, T = 2;
    SUBCASE("random invertible input") {
        const auto a = random_invertible(f, 3, g);
        SimNet net(1, N, f, 5);
        auto [r, k] = make_right_shares(a, N, 3, T, net.rng(NodeId::source(1)), "A");
        const auto inv = masked_inverse(net, r, T);
        CHECK(mat_mul(decode_shares(inv), a) == MatrixFq::identity(f, 3));
    }
    SUBCASE("identity") {
        SimNet net(1, N, f, 5);
        CHECK(secure_inverse(net, MatrixFq::identity(f, 3), T) == MatrixFq::identity(f, 3));
        CHECK(net.report().chi_ul == R(7, 3));
    }
    SUBCASE("singular input") {
        SimNet net(1, N, f, 5);
        auto a = random_matrix(f, 3, 3, g);
        for (std::size_t c = 0; c < 3; ++c) a(2, c) = a(0, c);
        CHECK(code_of([&] { secure_inverse(net, a, T); }) == Errc::singular_matrix);
    }
}

TEST_CASE("Newton iteration") {
    const auto f = make_field(29);
    RngStream g(14, 14);
    const std::size_t N = 7, T = 2;
    const auto a = random_invertible(f, 3, g);
    const auto ainv = plaintext_inverse(a);
    const auto id = MatrixFq::identity(f, 3);
    SUBCASE("the inverse is a fixed point") {
        SimNet net(2, N, f, 1);
        CHECK(newton_inverse_rounds(net, a, ainv, 3, T) == ainv);
    }
    SUBCASE("the residual squares every step") {
        const auto x0 = random_matrix(f, 3, 3, g);
        const auto e0 = mat_sub(id, mat_mul(a, x0));
        for (std::size_t k = 0; k <= 4; ++k) {
            CAPTURE(k);
            SimNet net(2, N, f, k + 1);
            const auto xk = newton_inverse_rounds(net, a, x0, k, T);
            CHECK(mat_sub(id, mat_mul(a, xk)) == mat_pow(e0, std::uint64_t{1} << k));
        }
    }
    SUBCASE("a nilpotent residual converges in one step") {
        auto e = MatrixFq::zeros(f, 3, 3);
        e(0, 2) = Fe{5};
        const auto x0 = mat_mul(ainv, mat_sub(id, e));
        SimNet net(2, N, f, 1);
        CHECK(newton_inverse_rounds(net, a, x0, 1, T) == ainv);
    }
}

TEST_CASE("linear solve") {
    const auto f = make_field(29);
    RngStream g(15, 15);
    const auto a = random_invertible(f, 3, g);
    SimNet n1(2, 7, f, 1);
    CHECK(solve_linear(n1, a, MatrixFq::identity(f, 3), 2) == plaintext_inverse(a));
    const auto b = random_matrix(f, 3, 6, g);
    SimNet n2(2, 7, f, 1);
    CHECK(mat_mul(a, solve_linear(n2, a, b, 2)) == b);
    auto s = MatrixFq::zeros(f, 3, 3);
    SimNet n3(2, 7, f, 1);
    CHECK(code_of([&] { solve_linear(n3, s, b, 2); }) == Errc::singular_matrix);
}

TEST_CASE("optimal pipeline costs N/(N-T) both ways") {
    const auto f = make_field(29);
    RngStream g(16, 16);
    const auto a = random_matrix(f, 3, 15, g), b = random_matrix(f, 15, 5, g);
    SimNet net(2, 7, f, 1);
    CHECK(optimal_cost_pipeline(net, a, b, 2) == mat_mul(a, b));
    CHECK(net.report().chi_ul == R(7, 5));
    CHECK(net.report().chi_dl == R(7, 5));
}

// ---------------------------------------------------------------------------
// Expressions.

TEST_CASE("polynomial expressions evaluate securely") {
    const auto f = make_field(29);
    RngStream g(17, 17);
    std::map<std::string, MatrixFq> in = {
        {"A1", random_matrix(f, 3, 3, g)}, {"A2", random_matrix(f, 3, 3, g)}, {"A3", random_invertible(f, 3, g)}};
    const auto e = parse_expression("A1^2*A2 + 2*inv(A3)");
    const auto expect = mat_add(mat_mul(mat_mul(in["A1"], in["A1"]), in["A2"]),
                                mat_scale(Fe{2}, plaintext_inverse(in["A3"])));
    CHECK(eval_plain(*e, in) == expect);
    for (auto d : {Delivery::Direct, Delivery::UserSecure}) {
        SimNet net(3, 7, f, 1);
        CHECK(eval_matrix_polynomial(net, *e, in, 2, d) == expect);
    }
    SimNet net(1, 7, f, 1);
    CHECK(eval_matrix_polynomial(net, *parse_expression("A1"), in, 2) == in["A1"]);
}

TEST_CASE("least squares through hcat and transposes") {
    const auto f = make_field(29);
    RngStream g(18, 18);
    std::map<std::string, MatrixFq> in;
    for (;;) {
        in = {{"X1", random_matrix(f, 6, 2, g)}, {"X2", random_matrix(f, 6, 2, g)}, {"y", random_matrix(f, 6, 2, g)}};
        const auto x = concat_cols(std::vector<MatrixFq>{in["X1"], in["X2"]});
        if (rank(mat_mul(transpose(x), x)) == 4) break;
    }
    const auto e = parse_expression("inv(tr(hcat(X1, X2)) * hcat(X1, X2)) * tr(hcat(X1, X2)) * y");
    const auto x = concat_cols(std::vector<MatrixFq>{in["X1"], in["X2"]});
    const auto beta = eval_plain(*e, in);
    CHECK(mat_mul(mat_mul(transpose(x), x), beta) == mat_mul(transpose(x), in["y"]));
    SimNet net(3, 4, f, 1);
    CHECK(eval_matrix_polynomial(net, *e, in, 1) == beta);
}

TEST_CASE("expression parser") {
    CHECK(to_string(*parse_expression("A*B+C'")) == "(A*B + tr(C))");
    CHECK(to_string(*parse_expression("-2*A^3")) == "-2*A^3");
    CHECK(expression_inputs(*parse_expression("inv(A)*B - A")) == std::set<std::string>{"A", "B"});
    for (const char* bad : {"", "A+", "A^-2", "3", "(A", "foo(A)", "A^0", "A $"}) {
        CAPTURE(bad);
        CHECK(code_of([&] { parse_expression(bad); }) == Errc::parse_error);
    }
}

// ---------------------------------------------------------------------------
// Oracle equivalence and descriptors.

TEST_CASE("protocol outputs equal the reference product across parameters") {
    RngStream g(19, 19);
    for (auto [N, T] : {std::pair{5u, 1u}, std::pair{7u, 2u}, std::pair{9u, 3u}}) {
        CAPTURE(N);
        const auto f = find_field(N, 30);
        const std::uint64_t q = f->q();
        const std::size_t inner = (N - 2 * T) * (N - T);
        const auto a = random_matrix(f, 3, inner, g), b = random_matrix(f, inner, N - T, g);
        const auto ref = oracle::mul(oracle::to_mat(a), oracle::to_mat(b), q);
        SimNet s1(2, N, f, 1), s2(1, N, f, 1), s3(2, N, f, 1);
        CHECK(oracle::to_mat(sdmm2(s1, a, b, T)) == ref);
        CHECK(oracle::to_mat(sdmm2_own_data(s2, a, b, T)) == ref);
        CHECK(oracle::to_mat(sdmm2(s3, a, b, T, Delivery::UserSecure)) == ref);
    }
}

TEST_CASE("descriptor replay and padding") {
    using nlohmann::json;
    const auto o = run_protocol({{"protocol", "sdmm2"}, {"n", 7}, {"t", 2}, {"q", 29}, {"seed", 3},
                                 {"gen", {"2x6", "6x2"}}});
    REQUIRE(o.result.has_value());
    REQUIRE(o.expected.has_value());
    CHECK(*o.result == *o.expected);
    CHECK(o.report.chi_ul == R(7, 3));

    const auto again = run_protocol({{"protocol", "sdmm2"}, {"n", 7}, {"t", 2}, {"q", 29}, {"seed", 3},
                                     {"gen", {"2x6", "6x2"}}});
    CHECK(to_json(again.log, true) == to_json(o.log, true));

    const json odd = {{"protocol", "sdmm2"}, {"n", 7}, {"t", 2}, {"q", 29}, {"gen", {"2x5", "5x2"}}};
    CHECK(code_of([&] { run_protocol(odd); }) == Errc::indivisible_dimension);
    json padded = odd;
    padded["pad"] = true;
    const auto p = run_protocol(padded);
    CHECK(p.result->rows() == 2);
    CHECK(p.result->cols() == 2);
    CHECK(*p.result == *p.expected);

    json inv = {{"protocol", "invert"}, {"n", 7}, {"t", 2}, {"q", 29}, {"pad", true},
                {"inputs", {matrix_to_json(ints(make_field(29), 2, 2, {1, 2, 3, 4}))}}};
    const auto pi = run_protocol(inv);
    CHECK(*pi.result == *pi.expected);
    CHECK(pi.result->rows() == 2);

    CHECK(code_of([&] { run_protocol({{"protocol", "bogus"}, {"n", 3}}); }) == Errc::invalid_parameters);
}
