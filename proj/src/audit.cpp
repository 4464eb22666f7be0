#include "sdmc/audit.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include "sdmc/error.hpp"
#include "sdmc/protocols.hpp"

namespace sdmc {

namespace {

using View = std::vector<std::uint64_t>;
using Histogram = std::map<View, std::uint64_t>;

std::string num(std::uint64_t x) { return std::to_string(x); }

// q^e, or nullopt past `cap`.
std::optional<std::uint64_t> checked_pow(std::uint64_t q, std::uint64_t e, std::uint64_t cap) {
    std::uint64_t r = 1;
    for (std::uint64_t k = 0; k < e; ++k) {
        if (r > cap / q) return std::nullopt;
        r *= q;
    }
    return r;
}

// Matrix whose entries are the base-q digits of `index`.
MatrixFq from_index(const FieldPtr& f, std::size_t rows, std::size_t cols, std::uint64_t index) {
    MatrixFq m(f, rows, cols);
    for (auto& x : m.data()) {
        x = Fe{index % f->q()};
        index /= f->q();
    }
    return m;
}

std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    std::function<void(std::size_t)> rec = [&](std::size_t start) {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return out;
}

std::string set_name(const std::vector<std::size_t>& s) {
    std::string out = "{";
    for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + std::to_string(s[k] + 1);
    return out + "}";
}

std::pair<std::size_t, std::size_t> block_shape(const ShareParams& p, std::size_t rows, std::size_t cols) {
    const bool left = p.side == Side::Left;
    require(left || p.side == Side::Right || p.side == Side::RightOwnData, Errc::invalid_parameters,
            "audits cover left and right shares");
    require((left ? cols : rows) % p.K == 0, Errc::indivisible_dimension, "input shape not divisible by K");
    return left ? std::pair{rows, cols / p.K} : std::pair{rows / p.K, cols};
}

std::vector<MatrixFq> keys_from_index(const FieldPtr& f, std::size_t T, std::pair<std::size_t, std::size_t> shape,
                                      std::uint64_t index) {
    std::vector<MatrixFq> keys;
    const std::uint64_t per = *checked_pow(f->q(), shape.first * shape.second, ~std::uint64_t{0});
    for (std::size_t l = 0; l < T; ++l) {
        keys.push_back(from_index(f, shape.first, shape.second, index % per));
        index /= per;
    }
    return keys;
}

View view_of(const ShareSet& shares, const std::vector<std::size_t>& set) {
    View v;
    for (std::size_t i : set)
        for (Fe x : shares[i].payload.data()) v.push_back(x.v);
    return v;
}

double chi_square_p(double stat, double df) {
    if (df <= 0) return 1.0;
    return boost::math::gamma_q(df / 2.0, stat / 2.0);
}

double entropy_bits(const Histogram& h, double total) {
    double e = 0;
    for (const auto& [v, c] : h) {
        const double p = static_cast<double>(c) / total;
        e -= p * std::log2(p);
    }
    return e;
}

std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace

nlohmann::json to_json(const SecrecyVerdict& v) {
    return {{"check", v.check},
            {"N", v.N},
            {"K", v.K},
            {"T", v.T},
            {"q", v.q},
            {"rows", v.rows},
            {"cols", v.cols},
            {"colluders", v.colluders},
            {"side", side_name(v.side)},
            {"mode", v.mode == AuditMode::Exhaustive ? "exhaustive" : "statistical"},
            {"pass", v.pass},
            {"key_assignments", v.key_assignments},
            {"inputs", v.inputs},
            {"colluding_sets", v.colluding_sets},
            {"min_p_value", v.min_p_value},
            {"evidence", v.evidence}};
}

nlohmann::json to_json(const LeakageReport& r) {
    return {{"N", r.N},
            {"T", r.T},
            {"q", r.q},
            {"pairs", r.pairs},
            {"key_assignments", r.key_assignments},
            {"mutual_information_bits", r.mutual_information_bits},
            {"evidence", r.evidence}};
}

SecrecyVerdict secrecy_exhaustive(const ShareParams& p, std::uint64_t q, std::size_t rows, std::size_t cols,
                                  std::optional<std::size_t> colluders) {
    p.validate();
    const FieldPtr f = make_field(q);
    const auto shape = block_shape(p, rows, cols);
    const std::size_t t = colluders.value_or(p.T);
    require(t <= p.N, Errc::invalid_parameters, "more colluders than servers");

    SecrecyVerdict v{"server-view", p.N, p.K, p.T, q, rows, cols, t, p.side, AuditMode::Exhaustive, false, 0, 0, 0, 1.0, {}};
    const auto keys = checked_pow(q, p.T * shape.first * shape.second, kMaxKeyAssignments);
    require(keys.has_value(), Errc::state_space_too_large, "more than " + num(kMaxKeyAssignments) + " key assignments");
    const auto inputs = checked_pow(q, rows * cols, kMaxAuditStates / *keys);
    require(inputs.has_value(), Errc::state_space_too_large, "input x key space exceeds " + num(kMaxAuditStates));
    v.key_assignments = *keys;
    v.inputs = *inputs;
    if (t == 0) {
        v.pass = true;
        v.evidence = "no colluding set of positive size";
        return v;
    }

    const auto sets = subsets(p.N, t);
    v.colluding_sets = sets.size();
    std::vector<std::vector<Histogram>> hist(sets.size(), std::vector<Histogram>(*inputs));
    for (std::uint64_t in = 0; in < *inputs; ++in) {
        const MatrixFq secret = from_index(f, rows, cols, in);
        for (std::uint64_t k = 0; k < *keys; ++k) {
            const auto shares = encode_shares(secret, p, keys_from_index(f, p.T, shape, k));
            for (std::size_t s = 0; s < sets.size(); ++s) ++hist[s][in][view_of(shares, sets[s])];
        }
    }

    // Uniform over the full view space, identical for all inputs.
    const std::size_t payload = p.side == Side::Left ? rows * (cols / p.K) : (rows / p.K) * cols;
    const auto space = checked_pow(q, t * payload, ~std::uint64_t{0} / 2);
    for (std::size_t s = 0; s < sets.size(); ++s) {
        for (std::uint64_t in = 0; in < *inputs; ++in) {
            const auto& h = hist[s][in];
            if (h != hist[s][0]) {
                v.evidence = "colluders " + set_name(sets[s]) + ": view distributions of inputs 0 and " + num(in) +
                             " differ";
                return v;
            }
            const bool uniform = space && h.size() == *space &&
                                 std::all_of(h.begin(), h.end(), [&](const auto& e) { return e.second == h.begin()->second; });
            if (!uniform) {
                v.evidence = "colluders " + set_name(sets[s]) + ": " + num(h.size()) + " distinct views, not uniform over " +
                             (space ? num(*space) : std::string("the view space"));
                return v;
            }
        }
    }
    v.pass = true;
    v.evidence = num(sets.size()) + " colluding sets x " + num(*inputs) + " inputs x " + num(*keys) +
                 " key assignments: every view occurs exactly " + num(*keys / *space) + " time(s)";
    return v;
}

SecrecyVerdict secrecy_statistical(const ShareParams& p, std::uint64_t q, std::size_t rows, std::size_t cols,
                                   std::optional<std::size_t> colluders, std::uint64_t samples, std::uint64_t seed,
                                   double alpha) {
    p.validate();
    const FieldPtr f = make_field(q);
    const auto shape = block_shape(p, rows, cols);
    const std::size_t t = colluders.value_or(p.T);
    SecrecyVerdict v{"server-view", p.N, p.K, p.T, q, rows, cols, t, p.side, AuditMode::Statistical, false, 0, 0, 0, 1.0, {}};
    v.key_assignments = samples;
    v.inputs = 2;
    if (t == 0) {
        v.pass = true;
        v.evidence = "no colluding set of positive size";
        return v;
    }
    const std::size_t payload = shape.first * shape.second;
    // Leading symbols kept per view: at least five expected hits per bin.
    std::size_t d = 0;
    std::uint64_t bins = 1;
    while (d < t * payload && bins * q * 5 <= samples) {
        bins *= q;
        ++d;
    }
    require(d >= 1, Errc::state_space_too_large, "too few samples for one symbol of the view");

    const auto sets = subsets(p.N, t);
    v.colluding_sets = sets.size();
    RngStream rng(seed, 0xA0D1'7000ull);
    const std::vector<MatrixFq> secrets = {MatrixFq::zeros(f, rows, cols), random_matrix(f, rows, cols, rng)};
    const double tests = static_cast<double>(sets.size() * secrets.size());
    std::string worst;
    for (std::size_t in = 0; in < secrets.size(); ++in) {
        std::vector<std::vector<std::uint64_t>> counts(sets.size(), std::vector<std::uint64_t>(bins));
        for (std::uint64_t s = 0; s < samples; ++s) {
            const auto shares = make_shares(secrets[in], p, rng).first;
            for (std::size_t k = 0; k < sets.size(); ++k) {
                const View view = view_of(shares, sets[k]);
                std::uint64_t idx = 0;
                for (std::size_t j = 0; j < d; ++j) idx = idx * q + view[j];
                ++counts[k][idx];
            }
        }
        for (std::size_t k = 0; k < sets.size(); ++k) {
            const double e = static_cast<double>(samples) / static_cast<double>(bins);
            double stat = 0;
            for (auto c : counts[k]) stat += (static_cast<double>(c) - e) * (static_cast<double>(c) - e) / e;
            const double pv = chi_square_p(stat, static_cast<double>(bins - 1));
            if (pv < v.min_p_value) {
                v.min_p_value = pv;
                worst = "colluders " + set_name(sets[k]) + ", input " + num(in);
            }
        }
    }
    v.pass = v.min_p_value > alpha / tests;
    v.evidence = num(static_cast<std::uint64_t>(tests)) + " chi-square tests over " + num(bins) + " bins (" + num(d) +
                 " leading symbols), " + num(samples) + " samples each; smallest p = " + std::to_string(v.min_p_value) +
                 " at " + worst + "; threshold " + std::to_string(alpha / tests);
    return v;
}

SecrecyVerdict secrecy_user_exhaustive(std::size_t N, std::size_t T, std::uint64_t q,
                                       const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs) {
    require(N > 2 * T, Errc::invalid_parameters, "need N > 2T");
    require(pairs.size() >= 2, Errc::invalid_parameters, "need at least two input pairs");
    const FieldPtr f = make_field(q);
    const std::size_t K = N - 2 * T, Kp = N - T;
    SecrecyVerdict v{"user-view", N, K, T, q, 1, 1, 0, Side::Left, AuditMode::Exhaustive, false, 0, 0, 0, 1.0, {}};
    v.inputs = pairs.size();

    const ShareParams pl{N, K, T, Side::Left}, pr{N, K, T, Side::Right}, ps{N, Kp, T, Side::Left};
    // Dealer keys: R is T x (1x1), S is T x (1 x Kp); each server re-shares with T x (1x1).
    const auto r_keys = checked_pow(q, T, kMaxAuditStates);
    const auto s_keys = checked_pow(q, T * Kp, kMaxAuditStates);
    require(r_keys && s_keys && *r_keys * *s_keys <= kMaxAuditStates, Errc::state_space_too_large,
            "dealer key space q^" + num(T * (1 + Kp)) + " exceeds " + num(kMaxAuditStates));
    const auto total = checked_pow(q, T * (1 + Kp + N), ~std::uint64_t{0} / 2);
    v.key_assignments = total.value_or(0);

    // The re-sharing keys enter the view linearly: view = base(R, S) + w with
    // w uniform on the span W of the unit-key contributions. Each (R, S)
    // therefore yields the uniform distribution on the coset base + W, and two
    // inputs agree iff their coset histograms agree.
    const Fe n_inv = f->inv(f->from_uint(N));
    std::vector<View> basis;  // reduced rows; pivot of row k is pivots[k]
    std::vector<std::size_t> pivots;
    auto reduce = [&](View x) {
        for (std::size_t k = 0; k < basis.size(); ++k) {
            const Fe c{x[pivots[k]]};
            if (c.v == 0) continue;
            for (std::size_t j = 0; j < N; ++j) x[j] = f->sub(Fe{x[j]}, f->mul(c, Fe{basis[k][j]})).v;
        }
        return x;
    };
    const MatrixFq zero_c = MatrixFq::zeros(f, 1, Kp);
    for (std::size_t t = 0; t < T; ++t) {
        std::vector<MatrixFq> unit(T, MatrixFq::zeros(f, 1, 1));
        unit[t](0, 0) = Fe{1};
        View e;
        for (const auto& sh : encode_shares(zero_c, ps, unit)) e.push_back(f->mul(n_inv, sh.payload(0, 0)).v);
        e = reduce(e);
        std::size_t p = 0;
        while (p < N && e[p] == 0) ++p;
        if (p == N) continue;
        const Fe s = f->inv(Fe{e[p]});
        for (auto& x : e) x = f->mul(s, Fe{x}).v;
        for (auto& row : basis) {
            const Fe c{row[p]};
            for (std::size_t j = 0; j < N; ++j) row[j] = f->sub(Fe{row[j]}, f->mul(c, Fe{e[j]})).v;
        }
        basis.push_back(std::move(e));
        pivots.push_back(p);
    }

    std::vector<Histogram> hist(pairs.size());
    std::optional<std::uint64_t> product;
    const std::vector<MatrixFq> no_keys(T, MatrixFq::zeros(f, 1, 1));
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const Fe a = f->from_uint(pairs[pi].first), b = f->from_uint(pairs[pi].second);
        const std::uint64_t c = f->mul(a, b).v;
        require(!product || *product == c, Errc::invalid_parameters, "input pairs must share the product");
        product = c;
        MatrixFq A = MatrixFq::zeros(f, 1, K), B = MatrixFq::zeros(f, K, Kp);
        A(0, 0) = a;
        B(0, 0) = b;
        for (std::uint64_t rk = 0; rk < *r_keys; ++rk) {
            const auto sa = encode_shares(A, pl, keys_from_index(f, T, {1, 1}, rk));
            for (std::uint64_t sk = 0; sk < *s_keys; ++sk) {
                const auto sb = encode_shares(B, pr, keys_from_index(f, T, {1, Kp}, sk));
                View base(N, 0);
                for (std::size_t i = 0; i < N; ++i) {
                    const auto re = encode_shares(mat_mul(sa[i].payload, sb[i].payload), ps, no_keys);
                    for (std::size_t j = 0; j < N; ++j)
                        base[j] = f->add(Fe{base[j]}, f->mul(n_inv, re[j].payload(0, 0))).v;
                }
                ++hist[pi][reduce(std::move(base))];
            }
        }
    }
    for (std::size_t pi = 1; pi < pairs.size(); ++pi) {
        if (hist[pi] != hist[0]) {
            v.evidence = "pairs 1 and " + num(pi + 1) + " induce different user-view distributions";
            return v;
        }
    }
    v.pass = true;
    const auto coset = *checked_pow(q, basis.size(), ~std::uint64_t{0});
    v.evidence = num(pairs.size()) + " input pairs with product " + num(*product) + ", " + num(*r_keys * *s_keys) +
                 " dealer key assignments x " + (total ? num(*total / (*r_keys * *s_keys)) : std::string("all")) +
                 " re-sharing keys each: identical user-view distributions over " + num(hist[0].size() * coset) +
                 " views";
    return v;
}

SecrecyVerdict secrecy_user_statistical(std::size_t N, std::size_t T, std::uint64_t q,
                                        const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs,
                                        std::uint64_t samples, std::uint64_t seed, double alpha) {
    require(N > 2 * T, Errc::invalid_parameters, "need N > 2T");
    require(pairs.size() >= 2, Errc::invalid_parameters, "need at least two input pairs");
    const FieldPtr f = make_field(q);
    const std::size_t K = N - 2 * T, Kp = N - T;
    SecrecyVerdict v{"user-view", N, K, T, q, 1, 1, 0, Side::Left, AuditMode::Statistical, false, 0, 0, 0, 1.0, {}};
    v.inputs = pairs.size();
    v.key_assignments = samples;

    constexpr std::uint64_t kBuckets = 64;
    std::vector<std::vector<double>> counts(pairs.size(), std::vector<double>(kBuckets));
    std::optional<std::uint64_t> product;
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        const Fe a = f->from_uint(pairs[pi].first), b = f->from_uint(pairs[pi].second);
        require(!product || *product == f->mul(a, b).v, Errc::invalid_parameters, "input pairs must share the product");
        product = f->mul(a, b).v;
        MatrixFq A = MatrixFq::zeros(f, 1, K), B = MatrixFq::zeros(f, K, Kp);
        A(0, 0) = a;
        B(0, 0) = b;
        for (std::uint64_t s = 0; s < samples; ++s) {
            SimNet net(2, N, f, mix(seed * 0x9E3779B97F4A7C15ull + pi * samples + s));
            sdmm2(net, A, B, T, Delivery::UserSecure);
            std::uint64_t h = 0;
            for (const auto& e : net.log().entries())
                if (e.to.kind == NodeKind::User)
                    for (Fe x : e.payload->data()) h = mix(h ^ (x.v + 0x632BE59BD9B4E019ull));
            counts[pi][h % kBuckets] += 1;
        }
    }
    // Homogeneity chi-square on the pairs x buckets table.
    const double total = static_cast<double>(samples * pairs.size());
    double stat = 0;
    std::size_t used_buckets = 0;
    for (std::uint64_t b = 0; b < kBuckets; ++b) {
        double col = 0;
        for (const auto& row : counts) col += row[b];
        if (col == 0) continue;
        ++used_buckets;
        for (const auto& row : counts) {
            const double e = static_cast<double>(samples) * col / total;
            stat += (row[b] - e) * (row[b] - e) / e;
        }
    }
    const double df = static_cast<double>((pairs.size() - 1) * (used_buckets - 1));
    v.min_p_value = chi_square_p(stat, df);
    v.pass = v.min_p_value > alpha;
    v.evidence = num(pairs.size()) + " input pairs with product " + num(*product) + ", " + num(samples) +
                 " protocol runs each, homogeneity over " + num(used_buckets) + " hashed buckets: p = " +
                 std::to_string(v.min_p_value);
    return v;
}

std::vector<std::pair<MatrixFq, MatrixFq>> leakage_demo_pairs(const FieldPtr& f, std::size_t K, std::uint64_t c) {
    require(K >= 2, Errc::invalid_parameters, "the demonstration needs K >= 2");
    MatrixFq a1 = MatrixFq::zeros(f, 1, K), b1 = MatrixFq::zeros(f, K, 1);
    MatrixFq a2 = MatrixFq::zeros(f, 1, K), b2 = MatrixFq::zeros(f, K, 1);
    a1(0, 0) = Fe{1};
    b1(0, 0) = f->from_uint(c);
    a2(0, 0) = Fe{1};
    a2(0, 1) = Fe{1};
    b2(0, 0) = f->sub(f->from_uint(c), Fe{1});
    b2(1, 0) = Fe{1};
    return {{a1, b1}, {a2, b2}};
}

LeakageReport raw_user_leakage(std::size_t N, std::size_t T, const std::vector<std::pair<MatrixFq, MatrixFq>>& pairs) {
    require(N > 2 * T, Errc::invalid_parameters, "need N > 2T");
    require(pairs.size() >= 2, Errc::invalid_parameters, "need at least two input pairs");
    const FieldPtr f = pairs[0].first.field_ptr();
    const std::size_t K = N - 2 * T;
    const ShareParams pl{N, K, T, Side::Left}, pr{N, K, T, Side::Right};
    const auto sa_shape = block_shape(pl, pairs[0].first.rows(), pairs[0].first.cols());
    const auto sb_shape = block_shape(pr, pairs[0].second.rows(), pairs[0].second.cols());
    const auto r_keys = checked_pow(f->q(), T * sa_shape.first * sa_shape.second, kMaxKeyAssignments);
    const auto s_keys = checked_pow(f->q(), T * sb_shape.first * sb_shape.second, kMaxKeyAssignments);
    require(r_keys && s_keys && *r_keys * *s_keys <= kMaxAuditStates, Errc::state_space_too_large, "key space too large");

    LeakageReport rep{N, T, f->q(), pairs.size(), *r_keys * *s_keys, 0.0, {}};
    std::vector<Histogram> hist(pairs.size());
    Histogram all;
    const MatrixFq c = mat_mul(pairs[0].first, pairs[0].second);
    for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
        require(mat_mul(pairs[pi].first, pairs[pi].second) == c, Errc::invalid_parameters,
                "input pairs must share the product");
        for (std::uint64_t rk = 0; rk < *r_keys; ++rk) {
            const auto sa = encode_shares(pairs[pi].first, pl, keys_from_index(f, T, sa_shape, rk));
            for (std::uint64_t sk = 0; sk < *s_keys; ++sk) {
                const auto sb = encode_shares(pairs[pi].second, pr, keys_from_index(f, T, sb_shape, sk));
                View view;
                for (std::size_t i = 0; i < N; ++i)
                    for (Fe x : mat_mul(sa[i].payload, sb[i].payload).data()) view.push_back(x.v);
                ++hist[pi][view];
                ++all[view];
            }
        }
    }
    const double per = static_cast<double>(rep.key_assignments);
    double cond = 0;
    for (const auto& h : hist) cond += entropy_bits(h, per);
    cond /= static_cast<double>(pairs.size());
    rep.mutual_information_bits = std::max(0.0, entropy_bits(all, per * static_cast<double>(pairs.size())) - cond);
    rep.evidence = num(pairs.size()) + " input pairs with a common product, " + num(rep.key_assignments) +
                   " key assignments each: I = " + std::to_string(rep.mutual_information_bits) + " bits";
    return rep;
}

std::vector<AliasTerm> aliasing_terms(std::size_t N, std::size_t K, std::size_t T, bool own_data) {
    require(N >= 1 && K >= 1, Errc::invalid_parameters, "need N, K >= 1");
    struct Term {
        std::string name;
        std::size_t exp;
        bool data;
        std::size_t l;
    };
    auto neg = [N](std::size_t e) { return (N - e % N) % N; };
    std::vector<Term> a, b;
    for (std::size_t l = 0; l < K; ++l) a.push_back({"A" + std::to_string(l + 1), l % N, true, l});
    for (std::size_t l = 0; l < T; ++l) a.push_back({"R" + std::to_string(l + 1), (K + l) % N, false, l});
    for (std::size_t l = 0; l < K; ++l) b.push_back({"B" + std::to_string(l + 1), neg(l), true, l});
    for (std::size_t l = 0; l < T; ++l)
        b.push_back({"S" + std::to_string(l + 1), neg(own_data ? K + l : K + T + l), false, l});
    std::vector<AliasTerm> out;
    for (const auto& x : a) {
        for (const auto& y : b) {
            if ((x.exp + y.exp) % N != 0) continue;
            const bool intended = x.data == y.data && x.l == y.l && (x.data || own_data);
            if (!intended) out.push_back({x.name, y.name, x.exp, y.exp});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Rational proposed_upload_cost(std::size_t N, std::size_t T) {
    require(N > 2 * T, Errc::invalid_parameters, "need N > 2T");
    return Rational(static_cast<std::int64_t>(N), static_cast<std::int64_t>(N - 2 * T));
}

Rational proposed_download_cost(std::size_t N, std::size_t K, std::size_t m, std::size_t n, std::size_t p) {
    require(K >= 1 && m >= 1 && n >= 1 && p >= 1, Errc::invalid_parameters, "dimensions must be positive");
    using I = std::int64_t;
    const I Ni = static_cast<I>(N), Ki = static_cast<I>(K), mi = static_cast<I>(m), ni = static_cast<I>(n),
            pi = static_cast<I>(p);
    const I lo = std::min(mi, pi);
    const Rational r(ni, Ki);  // rank bound of one product share
    if (ni < lo) return Rational(Ni) * (Rational(mi + pi) - r) / (Rational(Ki) * Rational(mi + pi - ni));
    if (ni <= Ki * lo) return Rational(Ni) * r * (Rational(mi + pi) - r) / Rational(mi * pi);
    return Rational(Ni);
}

Rational secure_matdot_upload_cost(std::size_t N, std::size_t T) {
    require(N + 1 > 2 * T + 1, Errc::invalid_parameters, "need N > 2T");
    return Rational(2 * static_cast<std::int64_t>(N), static_cast<std::int64_t>(N - 2 * T + 1));
}

std::optional<std::pair<std::size_t, Rational>> row_by_column_upload_cost(std::size_t N, std::size_t T) {
    using I = std::int64_t;
    auto threshold = [T](I k) {
        const I t = static_cast<I>(T);
        return std::min(2 * k * k + 2 * t - 3, k * k + k * t + t - 2);
    };
    std::optional<std::pair<std::size_t, Rational>> best;
    for (I k = 1; threshold(k) <= static_cast<I>(N); ++k) {
        const I r = threshold(k);
        if (r >= 1) best = std::pair{static_cast<std::size_t>(k), Rational(r, k)};
    }
    return best;
}

std::vector<CostRow> cost_formulas(std::size_t N, std::size_t T, std::size_t m, std::size_t n, std::size_t p) {
    require(N > 2 * T, Errc::invalid_parameters, "need N > 2T");
    const std::size_t K = N - 2 * T;
    using I = std::int64_t;
    const Rational own(static_cast<I>(N), static_cast<I>(N - T));
    std::vector<CostRow> rows;
    rows.push_back({"proposed", proposed_upload_cost(N, T), proposed_download_cost(N, K, m, n, p),
                    "K = N-2T, product shares downloaded"});
    rows.push_back({"proposed, 1 inter-server round", proposed_upload_cost(N, T), own, "user-secure re-sharing"});
    rows.push_back({"own data", own, proposed_download_cost(N, N - T, m, n, p), "K = N-T, user keeps the keys"});
    rows.push_back({"optimal pipeline", own, own, "conversions on the servers"});
    rows.push_back({"secure MatDot", secure_matdot_upload_cost(N, T), Rational(static_cast<I>(N)),
                    "recovery threshold 2(K+T)-1"});
    if (auto rc = row_by_column_upload_cost(N, T)) {
        const I k = static_cast<I>(rc->first);
        rows.push_back({"row-by-column", rc->second, rc->second / Rational(k),
                        "K = " + std::to_string(k) + ", threshold min(2K^2+2T-3, K^2+KT+T-2)"});
    } else {
        rows.push_back({"row-by-column", std::nullopt, std::nullopt, "no admissible K"});
    }
    return rows;
}

std::vector<UploadComparisonRow> upload_comparison(std::size_t N, std::size_t t_max) {
    std::vector<UploadComparisonRow> out;
    for (std::size_t t = 0; t <= t_max; ++t) {
        UploadComparisonRow r;
        r.T = t;
        if (N > 2 * t) {
            r.proposed = proposed_upload_cost(N, t);
            r.secure_matdot = secure_matdot_upload_cost(N, t);
        }
        if (N > t) r.own_data = Rational(static_cast<std::int64_t>(N), static_cast<std::int64_t>(N - t));
        if (auto rc = row_by_column_upload_cost(N, t)) r.row_by_column = rc->second;
        out.push_back(r);
    }
    return out;
}

FormulaCheck measured_vs_formula(const CostReport& report, std::optional<Rational> chi_ul,
                                 std::optional<Rational> chi_dl) {
    FormulaCheck c{true, ""};
    auto check = [&](const char* name, const Rational& got, const std::optional<Rational>& want) {
        if (!want) return;
        if (got == *want) {
            c.detail += std::string(name) + " " + to_string(got) + " = formula; ";
        } else {
            c.pass = false;
            c.detail += std::string(name) + " measured " + to_string(got) + ", formula " + to_string(*want) +
                        ", delta " + to_string(got - *want) + "; ";
        }
    };
    check("chi_ul", report.chi_ul, chi_ul);
    check("chi_dl", report.chi_dl, chi_dl);
    if (!c.detail.empty()) c.detail.resize(c.detail.size() - 2);
    return c;
}

}  // namespace sdmc
