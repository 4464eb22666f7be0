// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <bit>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "sdmc/audit.hpp"
#include "sdmc/error.hpp"
#include "sdmc/protocols.hpp"

using namespace sdmc;

namespace {

// Pinned limits.
constexpr double kExampleSeconds = 1.0;
constexpr double kExhaustiveSeconds = 10.0;
constexpr std::uint64_t kSeed = 20240601;

struct Outcome {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why) {
        if (pass) detail = why;
        pass = false;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Rational R(std::size_t a, std::size_t b = 1) {
    return Rational(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
}

bool equals_oracle(const MatrixFq& got, const MatrixFq& a, const MatrixFq& b) {
    return oracle::to_mat(got) == oracle::mul(oracle::to_mat(a), oracle::to_mat(b), a.field().q());
}

MatrixFq random_invertible(const FieldPtr& f, std::size_t n, RngStream& g) {
    for (;;) {
        auto m = random_matrix(f, n, n, g);
        if (rank(m) == n) return m;
    }
}

std::optional<Errc> error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

Outcome worked_example() {
    Outcome o;
    const auto f = make_field(29);
    RngStream g(kSeed, 1);
    const auto t0 = Clock::now();
    for (int k = 0; k < 20; ++k) {
        const auto a = random_matrix(f, 4, 6, g), b = random_matrix(f, 6, 4, g);
        SimNet net(2, 7, f, kSeed + k);
        if (!equals_oracle(sdmm2(net, a, b, 2), a, b)) o.fail("pair " + std::to_string(k) + " differs from oracle");
        if (net.report().chi_ul != R(7, 3)) o.fail("chi_UL " + to_string(net.report().chi_ul));
    }
    const double s = seconds_since(t0);
    if (s >= kExampleSeconds) o.fail("took " + std::to_string(s) + " s");
    if (o.pass) o.detail = "20 pairs exact, chi_UL 7/3, " + std::to_string(s) + " s";
    return o;
}

Outcome own_data() {
    Outcome o;
    const auto f = make_field(29);
    RngStream g(kSeed, 2);
    for (int k = 0; k < 5; ++k) {
        const auto a = random_matrix(f, 4, 10, g), b = random_matrix(f, 10, 4, g);
        SimNet net(1, 7, f, kSeed + k);
        if (!equals_oracle(sdmm2_own_data(net, a, b, 2), a, b)) o.fail("result differs from oracle");
        if (net.report().chi_ul != R(7, 5)) o.fail("chi_UL " + to_string(net.report().chi_ul));
    }
    if (o.pass) o.detail = "K=5, chi_UL 7/5 = N/(N-T)";
    return o;
}

Outcome exhaustive_secrecy() {
    Outcome o;
    const auto t0 = Clock::now();
    const ShareParams p{5, 1, 2, Side::Left};
    const auto v = secrecy_exhaustive(p, 11, 1, 1);
    const auto neg = secrecy_exhaustive(p, 11, 1, 1, 3);
    const double s = seconds_since(t0);
    if (!v.pass) o.fail("T=2 views not uniform: " + v.evidence);
    if (v.key_assignments != 121) o.fail(std::to_string(v.key_assignments) + " key assignments");
    if (neg.pass) o.fail("3-collusion control passed");
    if (s >= kExhaustiveSeconds) o.fail("took " + std::to_string(s) + " s");
    if (o.pass)
        o.detail = "121 keys, " + std::to_string(v.colluding_sets) + " pairs uniform, 3-collusion control fails, " +
                   std::to_string(s) + " s";
    return o;
}

Outcome annihilation() {
    Outcome o;
    std::size_t checks = 0;
    for (std::uint64_t q : {5, 11, 29}) {
        const auto f = make_field(q);
        for (std::uint64_t n = 1; n < q; ++n) {
            if ((q - 1) % n) continue;
            const Fe a = f->primitive_root(n);
            for (std::uint64_t s = 0; s < q; ++s) {
                Fe sum{0};
                for (std::uint64_t i = 0; i < n; ++i) sum = f->add(sum, f->pow(a, i * s));
                ++checks;
                if (sum != (s % n == 0 ? f->from_uint(n) : Fe{0}))
                    o.fail("q=" + std::to_string(q) + " N=" + std::to_string(n) + " s=" + std::to_string(s));
            }
        }
    }
    if (o.pass) o.detail = std::to_string(checks) + " sums, zero failures";
    return o;
}

Outcome stragglers() {
    Outcome o;
    const auto f = make_field(29);
    const auto l = BivariateLayout::make(*f, 2, 2, 2, 1, 5, false);
    if (l.N1 != 4) o.fail("N1 = " + std::to_string(l.N1));
    RngStream g(kSeed, 5);
    const auto a = random_matrix(f, 4, 4, g), b = random_matrix(f, 4, 4, g);
    for (unsigned mask = 0; mask < 32; ++mask) {
        std::set<std::size_t> failed;
        for (std::size_t s = 1; s <= 5; ++s)
            if (mask & (1u << (s - 1)))
                for (std::size_t r = 0; r < l.N1; ++r) failed.insert(l.server_id(r, s));
        SimNet net(2, 20, f, kSeed + mask);
        net.inject_stragglers(failed);
        const int lost = std::popcount(mask);
        if (lost <= 1) {
            if (!equals_oracle(straggler_sdmm(net, a, b, l), a, b)) o.fail("mask " + std::to_string(mask) + " wrong");
            const auto info = net.report().stragglers;
            if (!info || info->group_threshold != 16) o.fail("group threshold not reported as 16");
        } else if (error_of([&] { straggler_sdmm(net, a, b, l); }) != Errc::insufficient_groups) {
            o.fail("mask " + std::to_string(mask) + " did not fail with insufficient_groups");
        }
    }
    if (straggler_group_threshold(l) != 16) o.fail("threshold formula");
    if (o.pass) o.detail = "any single group lost recovers, 2+ lost fails, threshold 16";
    return o;
}

Outcome chains() {
    Outcome o;
    const auto f = make_field(29);
    RngStream g(kSeed, 6);
    // 4x4 blocks need K = N-2T dividing 4 with N | 28.
    for (auto [N, T] : {std::pair<std::size_t, std::size_t>{4, 1}, {7, 3}}) {
        const std::size_t K = N - 2 * T;
        for (std::size_t gamma : {3u, 4u}) {
            std::vector<MatrixFq> ch;
            for (std::size_t k = 0; k < gamma; ++k) ch.push_back(random_matrix(f, 4, 4, g));
            SimNet net(gamma, N, f, kSeed + gamma);
            const auto got = chain_multiply(net, ch, T);
            auto want = oracle::to_mat(ch[0]);
            for (std::size_t k = 1; k < gamma; ++k) want = oracle::mul(want, oracle::to_mat(ch[k]), 29);
            const std::string at = "N=" + std::to_string(N) + " gamma=" + std::to_string(gamma);
            if (oracle::to_mat(got) != want) o.fail(at + " differs from oracle");
            const auto r = net.report();
            if (r.chi_ul != R(N, K)) o.fail(at + " chi_UL " + to_string(r.chi_ul));
            if (r.interserver_rounds.size() != gamma - 2) o.fail(at + " round count");
            for (const auto& round : r.interserver_rounds)
                if (round.per_server() != R(N - 1, K)) o.fail(at + " per-round " + to_string(round.per_server()));
        }
    }
    if (o.pass) o.detail = "(N,T)=(4,1),(7,3); chi_UL N/(N-2T), per round (N-1)/(N-2T)";
    return o;
}

Outcome conversions() {
    Outcome o;
    const auto f = make_field(29);
    RngStream g(kSeed, 7);
    const std::size_t N = 7;
    auto pick = [&](std::uint64_t n) { return static_cast<std::size_t>(g.uniform(n)); };
    int counts[4] = {0, 0, 0, 0};
    for (int it = 0; it < 50; ++it) {
        const auto a = random_matrix(f, 6, 6, g);
        const std::size_t T = 1 + pick(2);
        // K in {1, 2, 3} divides 6 and satisfies K + 2T <= 7 for both T.
        const std::size_t k1 = 1 + pick(3), k2 = 1 + pick(3);
        SimNet net(1, N, f, kSeed + it);
        auto& rng = net.rng(NodeId::source(1));
        const int kind = it % 4;
        ++counts[kind];
        MatrixFq got, want = a;
        if (kind == 0) {
            auto [s, k] = make_left_shares(a, N, k1, T, rng, "A");
            got = decode_shares(convert_shares(net, s, {N, k2, T, Side::Right}, "A"));
        } else if (kind == 1) {
            auto [s, k] = make_right_shares(a, N, k1, T, rng, "A");
            got = decode_shares(convert_shares(net, s, {N, k2, T, Side::Left}, "A"));
        } else if (kind == 2) {
            auto [s, k] = make_left_shares(a, N, 1, T, rng, "A");
            got = decode_shares(convert_shares(net, s, {N, k2, T, Side::Left}, "A"));
        } else {
            auto [s, k] = make_left_shares(a, N, k1, T, rng, "A");
            got = decode_shares(transpose_shares(net, s, {N, k2, T, Side::Left}, "At"));
            want = transpose(a);
        }
        if (got != want) o.fail("iteration " + std::to_string(it) + " kind " + std::to_string(kind));
    }
    if (o.pass)
        o.detail = std::to_string(counts[0]) + " L->R, " + std::to_string(counts[1]) + " R->L, " +
                   std::to_string(counts[2]) + " (N,1,T)->L, " + std::to_string(counts[3]) + " transposes exact";
    return o;
}

Outcome exponentiation() {
    Outcome o;
    const auto f = make_field(29);
    RngStream g(kSeed, 8);
    const auto a = random_matrix(f, 3, 3, g);
    for (std::uint64_t r = 1; r <= 64; ++r) {
        SimNet net(1, 7, f, kSeed + r);
        const auto got = exponentiate(net, a, r, 2);
        auto want = oracle::to_mat(a);
        for (std::uint64_t k = 1; k < r; ++k) want = oracle::mul(want, oracle::to_mat(a), 29);
        if (oracle::to_mat(got) != want) o.fail("r=" + std::to_string(r) + " wrong power");
        const std::size_t expect = static_cast<std::size_t>(std::bit_width(r) - 1 + std::popcount(r) - 1);
        if (net.report().computation_rounds != expect)
            o.fail("r=" + std::to_string(r) + " rounds " + std::to_string(net.report().computation_rounds));
    }
    if (o.pass) o.detail = "r = 1..64 exact, rounds floor(log2 r) + h(r) - 1";
    return o;
}

Outcome inversion() {
    Outcome o;
    const auto f = make_field(29);
    RngStream g(kSeed, 9);
    // 3x3 with (N,T) = (7,2); 4x4 with (4,1) so that K = N-2T divides 4.
    for (auto [n, N, T] : {std::tuple<std::size_t, std::size_t, std::size_t>{3, 7, 2}, {4, 4, 1}}) {
        for (int k = 0; k < 20; ++k) {
            const auto a = random_invertible(f, n, g);
            SimNet net(1, N, f, kSeed + k);
            const auto inv = secure_inverse(net, a, T);
            if (mat_mul(a, inv) != MatrixFq::identity(f, n)) o.fail(std::to_string(n) + "x" + std::to_string(n) + " A A^-1 != I");
            if (net.report().chi_ul != R(N, N - 2 * T)) o.fail("chi_UL " + to_string(net.report().chi_ul));
        }
    }
    auto s = random_matrix(f, 3, 3, g);
    for (std::size_t c = 0; c < 3; ++c) s(2, c) = f->add(s(0, c), s(1, c));
    SimNet net(1, 7, f, kSeed);
    if (error_of([&] { secure_inverse(net, s, 2); }) != Errc::singular_matrix) o.fail("singular input not reported");
    if (o.pass) o.detail = "40 inverses exact, singular rejected, chi_UL N/(N-2T)";
    return o;
}

Outcome newton() {
    Outcome o;
    const auto f = make_field(29);
    RngStream g(kSeed, 10);
    const auto id = MatrixFq::identity(f, 3);
    for (int inst = 0; inst < 20; ++inst) {
        const auto a = random_invertible(f, 3, g);
        const auto x0 = random_matrix(f, 3, 3, g);
        const auto e0 = mat_sub(id, mat_mul(a, x0));
        for (std::size_t k = 0; k <= 4; ++k) {
            SimNet net(2, 7, f, kSeed + inst * 5 + k);
            const auto xk = newton_inverse_rounds(net, a, x0, k, 2);
            if (mat_sub(id, mat_mul(a, xk)) != mat_pow(e0, std::uint64_t{1} << k))
                o.fail("instance " + std::to_string(inst) + " k=" + std::to_string(k));
        }
    }
    const auto a = random_invertible(f, 3, g);
    auto e = MatrixFq::zeros(f, 3, 3);
    e(0, 1) = Fe{3};
    e(1, 2) = Fe{7};
    e(0, 2) = Fe{1};  // strictly upper triangular, E^3 = 0 and E^2 != 0
    auto e2 = MatrixFq::zeros(f, 3, 3);
    e2(0, 1) = Fe{4};  // rank one, E^2 = 0
    const auto ainv = plaintext_inverse(a);
    SimNet net(2, 7, f, kSeed);
    if (newton_inverse_rounds(net, a, mat_mul(ainv, mat_sub(id, e2)), 1, 2) != ainv)
        o.fail("nilpotent residual did not converge in one step");
    SimNet net2(2, 7, f, kSeed);
    if (newton_inverse_rounds(net2, a, mat_mul(ainv, mat_sub(id, e)), 2, 2) != ainv)
        o.fail("order-3 nilpotent residual did not converge in two steps");
    if (o.pass) o.detail = "100 residual identities exact, nilpotent start converges in one step";
    return o;
}

Outcome cost_tables() {
    Outcome o;
    const std::size_t N = 20;
    const auto rows = upload_comparison(N, 9);
    if (rows.size() != 10) o.fail(std::to_string(rows.size()) + " rows");
    for (const auto& r : rows) {
        if (r.proposed != R(N, N - 2 * r.T)) o.fail("T=" + std::to_string(r.T) + " proposed");
        if (r.secure_matdot != R(2 * N, N - 2 * r.T + 1)) o.fail("T=" + std::to_string(r.T) + " secure MatDot");
    }
    if (rows.size() == 10) {
        if (rows[2].proposed != R(5, 4) || rows[9].proposed != R(10)) o.fail("T=2 or T=9 proposed value");
        if (rows[2].secure_matdot != R(40, 17)) o.fail("T=2 secure MatDot value");
    }
    if (o.pass) o.detail = "T=0..9 exact, T=2 -> 5/4 and 40/17, T=9 -> 10";
    return o;
}

Outcome pipeline() {
    Outcome o;
    const auto f = make_field(29);
    RngStream g(kSeed, 12);
    const auto a = random_matrix(f, 3, 15, g), b = random_matrix(f, 15, 5, g);
    SimNet net(2, 7, f, kSeed);
    if (!equals_oracle(optimal_cost_pipeline(net, a, b, 2), a, b)) o.fail("result differs from oracle");
    const auto r = net.report();
    if (r.chi_ul != R(7, 5)) o.fail("chi_UL " + to_string(r.chi_ul));
    if (r.chi_dl != R(7, 5)) o.fail("chi_DL " + to_string(r.chi_dl));
    if (o.pass) o.detail = "chi_UL = chi_DL = 7/5";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"worked example N=7 T=2", worked_example},
        {"own-data upload N/(N-T)", own_data},
        {"exhaustive secrecy (5,1,2,11)", exhaustive_secrecy},
        {"annihilation identity", annihilation},
        {"straggler thresholds", stragglers},
        {"chain multiplication", chains},
        {"conversion and transpose round trips", conversions},
        {"exponentiation rounds", exponentiation},
        {"masked inversion", inversion},
        {"Newton residual identity", newton},
        {"cost tables N=20", cost_tables},
        {"optimal pipeline", pipeline},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.fail(std::string("exception: ") + e.what());
        }
        if (!o.pass) ++failures;
        std::printf("criterion %2zu %s: %s (%s)\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first,
                    o.detail.c_str());
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
