#include "sdmc/sharing.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "sdmc/error.hpp"

namespace sdmc {

namespace {

std::string num(std::size_t x) { return std::to_string(x); }

bool is_right_side(Side s) { return s == Side::Right || s == Side::RightOwnData; }

// Validates a complete, consistent share set and returns it ordered by index.
std::vector<const Share*> ordered(std::span<const Share> shares) {
    require(!shares.empty(), Errc::missing_share, "no shares supplied");
    const auto& p = shares.front().params;
    const auto& tag = shares.front().object_tag;
    std::vector<const Share*> slot(p.N, nullptr);
    for (const auto& s : shares) {
        require(s.object_tag == tag, Errc::tag_mismatch, "share tags '" + tag + "' and '" + s.object_tag + "'");
        require(s.params == p, Errc::param_mismatch, "share parameters differ within one set");
        require(s.server_index >= 1 && s.server_index <= p.N, Errc::missing_share,
                "server index " + num(s.server_index) + " outside 1.." + num(p.N));
        require(slot[s.server_index - 1] == nullptr, Errc::param_mismatch,
                "duplicate share for server " + num(s.server_index));
        slot[s.server_index - 1] = &s;
    }
    for (std::size_t i = 0; i < p.N; ++i)
        require(slot[i] != nullptr, Errc::missing_share, "share of server " + num(i + 1) + " missing");
    return slot;
}

void require_compatible(const Share& a, const Share& b) {
    require(a.params == b.params, Errc::param_mismatch, "share parameters/side differ");
    require(a.server_index == b.server_index, Errc::param_mismatch, "shares belong to different servers");
    require(a.payload.same_shape(b.payload), Errc::param_mismatch, "share payload shapes differ");
}

}  // namespace

std::string_view side_name(Side s) noexcept {
    switch (s) {
        case Side::Left: return "left";
        case Side::Right: return "right";
        case Side::RightOwnData: return "right-own-data";
        case Side::BivariateA: return "bivariate-a";
        case Side::BivariateB: return "bivariate-b";
        case Side::Product: return "product";
    }
    return "unknown";
}

Side side_from_name(std::string_view name) {
    for (Side s : {Side::Left, Side::Right, Side::RightOwnData, Side::BivariateA, Side::BivariateB, Side::Product})
        if (side_name(s) == name) return s;
    fail(Errc::parse_error, "unknown share side '" + std::string(name) + "'");
}

void ShareParams::validate() const {
    require(N >= 1, Errc::invalid_parameters, "N must be positive");
    require(K >= 1, Errc::invalid_parameters, "K must be positive");
    switch (side) {
        case Side::Left:
        case Side::RightOwnData:
            require(K + T <= N, Errc::invalid_parameters,
                    std::string(side_name(side)) + " shares need K+T <= N (K=" + num(K) + ", T=" + num(T) +
                        ", N=" + num(N) + ")");
            break;
        case Side::Right:
            require(K + 2 * T <= N, Errc::invalid_parameters,
                    "right shares need K+2T <= N (K=" + num(K) + ", T=" + num(T) + ", N=" + num(N) + ")");
            break;
        default:
            break;
    }
}

ExponentLayout exponent_layout(const ShareParams& p) {
    p.validate();
    ExponentLayout out;
    const std::size_t N = p.N;
    auto neg = [N](std::size_t e) { return (N - e % N) % N; };
    for (std::size_t l = 0; l < p.K; ++l) out.data.push_back(p.side == Side::Left ? l : neg(l));
    for (std::size_t l = 0; l < p.T; ++l) {
        switch (p.side) {
            case Side::Left: out.keys.push_back(p.K + l); break;
            case Side::Right: out.keys.push_back(neg(p.K + p.T + l)); break;
            case Side::RightOwnData: out.keys.push_back(neg(p.K + l)); break;
            default: fail(Errc::invalid_parameters, "side has no univariate exponent layout");
        }
    }
    return out;
}

std::vector<MatrixFq> evaluate_at_roots(std::span<const MatrixFq> coeffs) {
    require(!coeffs.empty(), Errc::length_mismatch, "empty coefficient sequence");
    const auto& first = coeffs.front();
    const Field& f = first.field();
    const std::size_t n = coeffs.size();
    std::vector<MatrixFq> out(n, MatrixFq(first.field_ptr(), first.rows(), first.cols()));
    std::vector<Fe> column(n);
    for (const auto& c : coeffs) require(c.same_shape(first), Errc::dimension_mismatch, "coefficient shapes differ");
    for (std::size_t e = 0; e < first.size(); ++e) {
        for (std::size_t l = 0; l < n; ++l) column[l] = coeffs[l].data()[e];
        const auto evals = dft(f, column);
        for (std::size_t i = 0; i < n; ++i) out[i].data()[e] = evals[i];
    }
    return out;
}

std::vector<MatrixFq> interpolate_from_roots(std::span<const MatrixFq> evals) {
    require(!evals.empty(), Errc::length_mismatch, "empty evaluation sequence");
    const auto& first = evals.front();
    const Field& f = first.field();
    const std::size_t n = evals.size();
    std::vector<MatrixFq> out(n, MatrixFq(first.field_ptr(), first.rows(), first.cols()));
    std::vector<Fe> column(n);
    for (const auto& c : evals) require(c.same_shape(first), Errc::dimension_mismatch, "evaluation shapes differ");
    for (std::size_t e = 0; e < first.size(); ++e) {
        for (std::size_t i = 0; i < n; ++i) column[i] = evals[i].data()[e];
        const auto coeffs = idft(f, column);
        for (std::size_t l = 0; l < n; ++l) out[l].data()[e] = coeffs[l];
    }
    return out;
}

ShareSet encode_shares(const MatrixFq& secret, const ShareParams& params, std::span<const MatrixFq> keys,
                       std::string tag) {
    params.validate();
    require(params.side == Side::Left || is_right_side(params.side), Errc::invalid_parameters,
            "encode_shares handles left and right sides only");
    secret.field().primitive_root(params.N);
    require(keys.size() == params.T, Errc::invalid_parameters,
            "expected " + num(params.T) + " key blocks, got " + num(keys.size()));
    const auto blocks =
        params.side == Side::Left ? partition_cols(secret, params.K) : partition_rows(secret, params.K);
    for (const auto& k : keys)
        require(k.same_shape(blocks.front()), Errc::dimension_mismatch, "key block shape differs from data block");

    const auto layout = exponent_layout(params);
    std::vector<MatrixFq> seq(params.N, MatrixFq(secret.field_ptr(), blocks[0].rows(), blocks[0].cols()));
    for (std::size_t l = 0; l < params.K; ++l) seq[layout.data[l]] = blocks[l];
    for (std::size_t l = 0; l < params.T; ++l) seq[layout.keys[l]] = keys[l];

    auto evals = evaluate_at_roots(seq);
    ShareSet out;
    out.reserve(params.N);
    for (std::size_t i = 0; i < params.N; ++i) out.push_back(Share{params, i + 1, std::move(evals[i]), tag});
    return out;
}

std::pair<ShareSet, SecretKeyBundle> make_shares(const MatrixFq& secret, const ShareParams& params,
                                                 RngStream& rng, std::string tag) {
    params.validate();
    const bool left = params.side == Side::Left;
    const std::size_t dim = left ? secret.cols() : secret.rows();
    require(dim % params.K == 0, Errc::indivisible_dimension,
            std::string(left ? "column" : "row") + " count " + num(dim) + " not divisible by K=" + num(params.K));
    const std::size_t br = left ? secret.rows() : secret.rows() / params.K;
    const std::size_t bc = left ? secret.cols() / params.K : secret.cols();
    SecretKeyBundle bundle;
    for (std::size_t l = 0; l < params.T; ++l) bundle.keys.push_back(random_matrix(secret.field_ptr(), br, bc, rng));
    auto shares = encode_shares(secret, params, bundle.keys, std::move(tag));
    return {std::move(shares), std::move(bundle)};
}

std::pair<ShareSet, SecretKeyBundle> make_left_shares(const MatrixFq& a, std::size_t N, std::size_t K,
                                                      std::size_t T, RngStream& rng, std::string tag) {
    return make_shares(a, {N, K, T, Side::Left}, rng, std::move(tag));
}

std::pair<ShareSet, SecretKeyBundle> make_right_shares(const MatrixFq& b, std::size_t N, std::size_t K,
                                                       std::size_t T, RngStream& rng, std::string tag) {
    return make_shares(b, {N, K, T, Side::Right}, rng, std::move(tag));
}

std::pair<ShareSet, SecretKeyBundle> make_right_shares_own(const MatrixFq& b, std::size_t N, std::size_t K,
                                                           std::size_t T, RngStream& rng, std::string tag) {
    return make_shares(b, {N, K, T, Side::RightOwnData}, rng, std::move(tag));
}

Share public_share(const MatrixFq& value, const ShareParams& params, std::size_t server_index, std::string tag) {
    params.validate();
    const Field& f = value.field();
    const Fe root = f.primitive_root(params.N);
    const Fe x = f.pow(root, server_index - 1);
    const auto layout = exponent_layout(params);
    const auto blocks =
        params.side == Side::Left ? partition_cols(value, params.K) : partition_rows(value, params.K);
    MatrixFq payload(value.field_ptr(), blocks[0].rows(), blocks[0].cols());
    for (std::size_t l = 0; l < params.K; ++l) axpy_inplace(payload, f.pow(x, layout.data[l]), blocks[l]);
    return Share{params, server_index, std::move(payload), std::move(tag)};
}

MatrixFq reconstruct_constant(std::span<const Share> shares) {
    const auto slot = ordered(shares);
    const Field& f = slot[0]->payload.field();
    MatrixFq acc = MatrixFq::zeros(slot[0]->payload.field_ptr(), slot[0]->payload.rows(), slot[0]->payload.cols());
    for (const Share* s : slot) axpy_inplace(acc, f.one(), s->payload);
    return mat_scale(f.inv(f.from_uint(slot.size())), acc);
}

std::vector<MatrixFq> reconstruct_all_coeffs(std::span<const Share> shares) {
    const auto slot = ordered(shares);
    std::vector<MatrixFq> evals;
    evals.reserve(slot.size());
    for (const Share* s : slot) evals.push_back(s->payload);
    return interpolate_from_roots(evals);
}

MatrixFq decode_shares(std::span<const Share> shares) {
    require(!shares.empty(), Errc::missing_share, "no shares supplied");
    const auto& p = shares.front().params;
    if (p.side == Side::Product) return reconstruct_constant(shares);
    require(p.side == Side::Left || is_right_side(p.side), Errc::invalid_parameters,
            "cannot decode " + std::string(side_name(p.side)) + " shares directly");
    const auto coeffs = reconstruct_all_coeffs(shares);
    const auto layout = exponent_layout(p);
    std::vector<MatrixFq> blocks;
    for (std::size_t e : layout.data) blocks.push_back(coeffs[e]);
    return p.side == Side::Left ? concat_cols(blocks) : stack_rows(blocks);
}

Share share_add(const Share& a, const Share& b) {
    require_compatible(a, b);
    return Share{a.params, a.server_index, mat_add(a.payload, b.payload), a.object_tag};
}

Share share_sub(const Share& a, const Share& b) {
    require_compatible(a, b);
    return Share{a.params, a.server_index, mat_sub(a.payload, b.payload), a.object_tag};
}

Share share_scale(Fe c, const Share& a) { return Share{a.params, a.server_index, mat_scale(c, a.payload), a.object_tag}; }

ShareSet share_add(std::span<const Share> a, std::span<const Share> b) {
    require(a.size() == b.size(), Errc::param_mismatch, "share sets differ in size");
    ShareSet out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(share_add(a[i], b[i]));
    return out;
}

ShareSet share_scale(Fe c, std::span<const Share> a) {
    ShareSet out;
    out.reserve(a.size());
    for (const auto& s : a) out.push_back(share_scale(c, s));
    return out;
}

nlohmann::json share_to_json(const Share& s) {
    return {{"params", {{"N", s.params.N}, {"K", s.params.K}, {"T", s.params.T}, {"side", side_name(s.params.side)}}},
            {"server_index", s.server_index},
            {"object_tag", s.object_tag},
            {"payload", matrix_to_json(s.payload)}};
}

Share share_from_json(const nlohmann::json& j, const FieldPtr& field) {
    try {
        const auto& p = j.at("params");
        Share s;
        s.params = ShareParams{p.at("N").get<std::size_t>(), p.at("K").get<std::size_t>(),
                               p.at("T").get<std::size_t>(), side_from_name(p.at("side").get<std::string>())};
        s.server_index = j.at("server_index").get<std::size_t>();
        s.object_tag = j.at("object_tag").get<std::string>();
        s.payload = matrix_from_json(j.at("payload"), field);
        return s;
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::parse_error, e.what());
    }
}

// ---------------------------------------------------------------------------

std::vector<Fe> default_betas(const Field& f, std::size_t n2) {
    require(n2 < f.q(), Errc::invalid_parameters,
            "field too small for " + num(n2) + " distinct nonzero evaluation points");
    std::vector<Fe> out;
    for (std::size_t s = 1; s <= n2; ++s) out.push_back(Fe{s});
    return out;
}

BivariateLayout BivariateLayout::make(const Field& f, std::size_t K1, std::size_t K2, std::size_t K3, std::size_t T,
                                      std::size_t N2, bool own_data, std::vector<Fe> betas) {
    BivariateLayout l;
    l.K1 = K1;
    l.K2 = K2;
    l.K3 = K3;
    l.T = T;
    l.N1 = own_data ? K1 + T : K1 + 2 * T;
    l.N2 = N2;
    l.own_data = own_data;
    l.betas = betas.empty() ? default_betas(f, N2) : std::move(betas);
    l.validate(f);
    return l;
}

void BivariateLayout::validate(const Field& f) const {
    require(K1 >= 1 && K2 >= 1 && K3 >= 1, Errc::invalid_parameters, "partition counts must be positive");
    require(N1 == (own_data ? K1 + T : K1 + 2 * T), Errc::invalid_parameters,
            "N1 must equal " + std::string(own_data ? "K1+T" : "K1+2T"));
    require(f.divides_order(N1), Errc::order_not_dividing, "N1=" + num(N1) + " does not divide q-1");
    require(N2 >= K2 * K3, Errc::invalid_parameters, "N2 must be at least K2*K3");
    require(betas.size() == N2, Errc::invalid_parameters, "need exactly N2 evaluation points");
    for (std::size_t a = 0; a < betas.size(); ++a) {
        require(betas[a].v < f.q(), Errc::invalid_parameters, "beta not reduced mod q");
        for (std::size_t b = a + 1; b < betas.size(); ++b)
            require(betas[a] != betas[b], Errc::duplicate_abscissa, "evaluation points must be distinct");
    }
}

namespace {

// Evaluates sum_{blocks} block * x1^{e1} * x2^{e2} at every server point.
// `terms` pairs each block with its (x1 exponent mod N1, x2 exponent).
struct BivariateTerm {
    const MatrixFq* block;
    std::size_t x1_exp;
    std::size_t x2_exp;
};

ShareSet evaluate_bivariate(const BivariateLayout& l, const std::vector<BivariateTerm>& terms, Side side,
                            const std::string& tag) {
    const MatrixFq& proto = *terms.front().block;
    const Field& f = proto.field();
    ShareSet out(l.server_count());
    for (std::size_t s = 1; s <= l.N2; ++s) {
        // Collapse x2 first: one coefficient matrix per x1 exponent.
        std::vector<MatrixFq> seq(l.N1, MatrixFq(proto.field_ptr(), proto.rows(), proto.cols()));
        for (const auto& t : terms) axpy_inplace(seq[t.x1_exp], f.pow(l.betas[s - 1], t.x2_exp), *t.block);
        auto evals = evaluate_at_roots(seq);
        for (std::size_t r = 0; r < l.N1; ++r) {
            const std::size_t id = l.server_id(r, s);
            out[id - 1] = Share{ShareParams{l.server_count(), l.K1, l.T, side}, id, std::move(evals[r]), tag};
        }
    }
    return out;
}

}  // namespace

ShareSet encode_bivariate_A(const MatrixFq& a, const BivariateLayout& l, std::span<const MatrixFq> r_keys,
                            std::string tag) {
    l.validate(a.field());
    const auto grid = grid_partition(a, l.K2, l.K1);
    require(r_keys.size() == l.K2 * l.T, Errc::invalid_parameters, "R must hold K2*T blocks");
    std::vector<BivariateTerm> terms;
    for (std::size_t i = 0; i < l.K2; ++i) {
        for (std::size_t j = 0; j < l.K1; ++j) terms.push_back({&grid.at(i, j), j, i});
        for (std::size_t j = 0; j < l.T; ++j) {
            const auto& key = r_keys[i * l.T + j];
            require(key.same_shape(grid.blocks[0]), Errc::dimension_mismatch, "R block shape mismatch");
            terms.push_back({&key, l.K1 + j, i});
        }
    }
    return evaluate_bivariate(l, terms, Side::BivariateA, tag);
}

ShareSet encode_bivariate_B(const MatrixFq& b, const BivariateLayout& l, std::span<const MatrixFq> s_keys,
                            std::string tag) {
    l.validate(b.field());
    const auto grid = grid_partition(b, l.K1, l.K3);
    require(s_keys.size() == l.T * l.K3, Errc::invalid_parameters, "S must hold T*K3 blocks");
    const std::size_t N1 = l.N1;
    auto neg = [N1](std::size_t e) { return (N1 - e % N1) % N1; };
    const std::size_t key_offset = l.own_data ? l.K1 : l.K1 + l.T;
    std::vector<BivariateTerm> terms;
    for (std::size_t k = 0; k < l.K3; ++k) {
        for (std::size_t j = 0; j < l.K1; ++j) terms.push_back({&grid.at(j, k), neg(j), k * l.K2});
        for (std::size_t j = 0; j < l.T; ++j) {
            const auto& key = s_keys[j * l.K3 + k];
            require(key.same_shape(grid.blocks[0]), Errc::dimension_mismatch, "S block shape mismatch");
            terms.push_back({&key, neg(key_offset + j), k * l.K2});
        }
    }
    return evaluate_bivariate(l, terms, Side::BivariateB, tag);
}

std::pair<ShareSet, SecretKeyBundle> make_bivariate_shares_A(const MatrixFq& a, const BivariateLayout& l,
                                                             RngStream& rng, std::string tag) {
    l.validate(a.field());
    require(a.rows() % l.K2 == 0 && a.cols() % l.K1 == 0, Errc::indivisible_dimension,
            "A must split into a K2 x K1 grid");
    SecretKeyBundle bundle;
    for (std::size_t n = 0; n < l.K2 * l.T; ++n)
        bundle.keys.push_back(random_matrix(a.field_ptr(), a.rows() / l.K2, a.cols() / l.K1, rng));
    auto shares = encode_bivariate_A(a, l, bundle.keys, std::move(tag));
    return {std::move(shares), std::move(bundle)};
}

std::pair<ShareSet, SecretKeyBundle> make_bivariate_shares_B(const MatrixFq& b, const BivariateLayout& l,
                                                             RngStream& rng, std::string tag) {
    l.validate(b.field());
    require(b.rows() % l.K1 == 0 && b.cols() % l.K3 == 0, Errc::indivisible_dimension,
            "B must split into a K1 x K3 grid");
    SecretKeyBundle bundle;
    for (std::size_t n = 0; n < l.T * l.K3; ++n)
        bundle.keys.push_back(random_matrix(b.field_ptr(), b.rows() / l.K1, b.cols() / l.K3, rng));
    auto shares = encode_bivariate_B(b, l, bundle.keys, std::move(tag));
    return {std::move(shares), std::move(bundle)};
}

}  // namespace sdmc
