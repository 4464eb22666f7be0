#include "sdmc/protocols.hpp"

#include <algorithm>
#include <bit>
#include <optional>

#include "sdmc/error.hpp"

namespace sdmc {

namespace {

std::string num(std::size_t x) { return std::to_string(x); }

bool is_right(Side s) { return s == Side::Right || s == Side::RightOwnData; }

void require_complete(const SimNet& net, const ShareSet& s, const char* what) {
    require(s.size() == net.n(), Errc::missing_share,
            std::string(what) + ": expected " + num(net.n()) + " shares, got " + num(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i)
        require(s[i].server_index == i + 1, Errc::missing_share, std::string(what) + ": shares out of order");
}

// Dimensions of the matrix a share set encodes.
std::pair<std::size_t, std::size_t> secret_shape(const ShareSet& s) {
    const auto& p = s.front().params;
    const auto& m = s.front().payload;
    if (p.side == Side::Left) return {m.rows(), m.cols() * p.K};
    if (is_right(p.side)) return {m.rows() * p.K, m.cols()};
    return {m.rows(), m.cols()};
}

std::vector<RngStream*> server_rngs(SimNet& net) {
    std::vector<RngStream*> out;
    for (std::size_t i = 1; i <= net.n(); ++i) out.push_back(&net.rng(NodeId::server(i)));
    return out;
}

// One communication round in which every server deals `transform(payload_i)`
// under `target` to all servers. Returns received[j][i] = share from i for j.
std::vector<std::vector<MatrixFq>> reshare_round(SimNet& net, const ShareSet& in, const ShareParams& target,
                                                 const std::string& tag, const std::string& label,
                                                 MatrixFq (*transform)(const MatrixFq&) = nullptr) {
    require_complete(net, in, label.c_str());
    require(target.N == net.n(), Errc::param_mismatch, "target N differs from the network size");
    const auto [r, c] = secret_shape(in);
    net.begin_communication_round(label + " " + tag, static_cast<std::uint64_t>(r) * c);
    const auto rngs = server_rngs(net);
    std::vector<std::vector<MatrixFq>> out(net.n());
    net.for_each_server([&](std::size_t i) {
        const MatrixFq x = transform ? transform(in[i - 1].payload) : in[i - 1].payload;
        auto shares = make_shares(x, target, *rngs[i - 1], tag).first;
        out[i - 1].reserve(shares.size());
        for (auto& s : shares) out[i - 1].push_back(std::move(s.payload));
    });
    return net.exchange(tag, std::move(out));
}

// Coefficient e of the polynomial (in the sender's evaluation point) through
// the received matrices: N^{-1} sum_i alpha^{-i e} Q_i.
MatrixFq coefficient(const Field& f, const std::vector<MatrixFq>& received, std::size_t e) {
    const std::size_t n = received.size();
    const Fe inv_root = f.inv(f.primitive_root(n));
    const Fe step = f.pow(inv_root, e);
    const Fe n_inv = f.inv(f.from_uint(n));
    MatrixFq acc = MatrixFq::zeros(received[0].field_ptr(), received[0].rows(), received[0].cols());
    Fe w = n_inv;
    for (std::size_t i = 0; i < n; ++i) {
        axpy_inplace(acc, w, received[i]);
        w = f.mul(w, step);
    }
    return acc;
}

ShareSet wrap(std::vector<MatrixFq> payloads, const ShareParams& p, const std::string& tag) {
    ShareSet out;
    out.reserve(payloads.size());
    for (std::size_t j = 0; j < payloads.size(); ++j) out.push_back(Share{p, j + 1, std::move(payloads[j]), tag});
    return out;
}

MatrixFq transpose_payload(const MatrixFq& m) { return transpose(m); }

}  // namespace

ShareSet multiply_shares(SimNet& net, const ShareSet& left, const ShareSet& right, const std::string& tag) {
    require_complete(net, left, "multiply (left)");
    require_complete(net, right, "multiply (right)");
    require(left.front().params.side == Side::Left, Errc::param_mismatch, "first factor must be left shares");
    require(is_right(right.front().params.side), Errc::param_mismatch, "second factor must be right shares");
    require(left.front().params.K == right.front().params.K, Errc::param_mismatch, "factors use different K");
    net.begin_computation_round();
    std::vector<MatrixFq> prod(net.n());
    net.for_each_server([&](std::size_t i) { prod[i - 1] = mat_mul(left[i - 1].payload, right[i - 1].payload); });
    return wrap(std::move(prod), ShareParams{net.n(), 1, left.front().params.T, Side::Product}, tag);
}

ShareSet reshare_product(SimNet& net, const ShareSet& product, const ShareParams& target, const std::string& tag) {
    require(target.side == Side::Left || target.side == Side::Right, Errc::invalid_parameters,
            "re-sharing targets left or right shares");
    auto received = reshare_round(net, product, target, tag, "reshare");
    const Field& f = net.field();
    std::vector<MatrixFq> avg(net.n());
    net.for_each_server([&](std::size_t j) { avg[j - 1] = coefficient(f, received[j - 1], 0); });
    return wrap(std::move(avg), target, tag);
}

ShareSet usersecure_round(SimNet& net, const ShareSet& product, std::size_t T, const std::string& tag) {
    require(net.n() > T, Errc::invalid_parameters, "user-secure round needs N > T");
    return reshare_product(net, product, ShareParams{net.n(), net.n() - T, T, Side::Left}, tag);
}

ShareSet convert_shares(SimNet& net, const ShareSet& in, const ShareParams& target, const std::string& tag) {
    require(!in.empty(), Errc::missing_share, "no shares to convert");
    const auto& src = in.front().params;
    require(target.side == Side::Left || target.side == Side::Right, Errc::invalid_parameters,
            "conversion targets left or right shares");
    if (src.side == Side::Product) return reshare_product(net, in, target, tag);
    require(src.side == Side::Left || is_right(src.side), Errc::illegal_conversion,
            "cannot convert " + std::string(side_name(src.side)) + " shares");
    const bool same_side = (src.side == Side::Left) == (target.side == Side::Left);
    require(!same_side || src.K == 1, Errc::illegal_conversion,
            std::string(side_name(src.side)) + " shares with K1=" + num(src.K) +
                " cannot be converted to the same side directly");

    auto received = reshare_round(net, in, target, tag, "convert");
    const auto layout = exponent_layout(src);
    const Field& f = net.field();
    std::vector<MatrixFq> out(net.n());
    net.for_each_server([&](std::size_t j) {
        std::vector<MatrixFq> blocks;
        for (std::size_t e : layout.data) blocks.push_back(coefficient(f, received[j - 1], e));
        out[j - 1] = src.side == Side::Left ? concat_cols(blocks) : stack_rows(blocks);
    });
    return wrap(std::move(out), target, tag);
}

ShareSet transpose_shares(SimNet& net, const ShareSet& left, const ShareParams& target, const std::string& tag) {
    require(!left.empty(), Errc::missing_share, "no shares to transpose");
    const auto& src = left.front().params;
    require(src.side == Side::Left, Errc::param_mismatch, "transpose expects left shares");
    require(target.side == Side::Left, Errc::invalid_parameters, "transpose produces left shares");
    auto received = reshare_round(net, left, target, tag, "transpose", &transpose_payload);
    const Field& f = net.field();
    std::vector<MatrixFq> out(net.n());
    net.for_each_server([&](std::size_t j) {
        std::vector<MatrixFq> blocks;
        for (std::size_t l = 0; l < src.K; ++l) blocks.push_back(coefficient(f, received[j - 1], l));
        out[j - 1] = stack_rows(blocks);
    });
    return wrap(std::move(out), target, tag);
}

ShareSet masked_inverse(SimNet& net, const ShareSet& right, std::size_t T, const std::string& tag) {
    require_complete(net, right, "masked inverse");
    const auto& p = right.front().params;
    require(is_right(p.side), Errc::param_mismatch, "masked inverse expects right shares");
    const auto [n, cols] = secret_shape(right);
    require(n == cols, Errc::dimension_mismatch, "inverse of a non-square " + num(n) + "x" + num(cols) + " matrix");
    const ShareParams left_params{net.n(), p.K, T, Side::Left};
    const Field& f = net.field();
    const FieldPtr& fp = net.field_ptr();

    for (int attempt = 0; attempt < kMaskRetries; ++attempt) {
        // Step 1: Phi = sum_i Phi^(i); every server left-shares its own mask.
        net.begin_communication_round("mask " + tag, static_cast<std::uint64_t>(n) * n);
        const auto rngs = server_rngs(net);
        std::vector<std::vector<MatrixFq>> out(net.n());
        for (std::size_t i = 1; i <= net.n(); ++i) {
            const MatrixFq phi_i = random_matrix(fp, n, n, *rngs[i - 1]);
            for (auto& s : make_shares(phi_i, left_params, *rngs[i - 1], "Phi").first)
                out[i - 1].push_back(std::move(s.payload));
        }
        auto received = net.exchange("Phi", std::move(out));
        std::vector<MatrixFq> phi(net.n());
        for (std::size_t j = 0; j < net.n(); ++j) {
            phi[j] = MatrixFq::zeros(fp, received[j][0].rows(), received[j][0].cols());
            for (const auto& m : received[j]) axpy_inplace(phi[j], f.one(), m);
        }
        const ShareSet phi_shares = wrap(phi, left_params, "Phi");

        // Step 2: product shares of P = Phi A.
        const ShareSet prod = multiply_shares(net, phi_shares, right, "P");

        // Step 3: every server broadcasts its product share and averages.
        net.begin_communication_round("publish P", static_cast<std::uint64_t>(n) * n);
        std::vector<std::vector<MatrixFq>> bcast(net.n());
        for (std::size_t i = 0; i < net.n(); ++i) bcast[i].assign(net.n(), prod[i].payload);
        auto got = net.exchange("P", std::move(bcast));
        const MatrixFq pub = coefficient(f, got[0], 0);

        // Step 4: local inversion; every server holds the same P.
        std::optional<MatrixFq> p_inv;
        try {
            p_inv = plaintext_inverse(pub);
        } catch (const Error& e) {
            if (e.code() != Errc::singular_matrix) throw;
            continue;
        }

        // Step 5: [[A^{-1}]]_j = P^{-1} [[Phi]]_j.
        std::vector<MatrixFq> inv(net.n());
        net.for_each_server([&](std::size_t j) { inv[j - 1] = mat_mul(*p_inv, phi[j - 1]); });
        return wrap(std::move(inv), left_params, tag);
    }
    fail(Errc::singular_matrix,
         "masked product stayed singular for " + std::to_string(kMaskRetries) + " independent masks; A is singular");
}

MatrixFq deliver(SimNet& net, const ShareSet& shares) {
    const auto got = net.gather_to_user(shares);
    ShareSet received;
    for (std::size_t k = 0; k < got.size(); ++k) {
        require(got[k].has_value(), Errc::missing_share,
                "server " + num(shares[k].server_index) + " did not deliver its share");
        received.push_back(*got[k]);
    }
    return decode_shares(received);
}

// ---------------------------------------------------------------------------

struct SecureEngine::Value::State {
    Form origin = Form::Left;
    std::optional<ShareSet> left, right, product;
    std::size_t rows = 0, cols = 0;
    std::string tag;
};

std::size_t SecureEngine::Value::rows() const { return s_->rows; }
std::size_t SecureEngine::Value::cols() const { return s_->cols; }
const std::string& SecureEngine::Value::tag() const { return s_->tag; }

SecureEngine::SecureEngine(SimNet& net, std::size_t T) : net_(net), K_(0), T_(T) {
    require(net.n() > 2 * T, Errc::invalid_parameters,
            "need N > 2T (N=" + num(net.n()) + ", T=" + num(T) + ")");
    K_ = net.n() - 2 * T;
}

std::string SecureEngine::fresh_tag(const std::string& base) { return base + "#" + std::to_string(++counter_); }

SecureEngine::Value SecureEngine::make(Form form, ShareSet shares, std::size_t rows, std::size_t cols,
                                       std::string tag) {
    Value v;
    v.s_ = std::make_shared<Value::State>();
    v.s_->origin = form;
    v.s_->rows = rows;
    v.s_->cols = cols;
    v.s_->tag = std::move(tag);
    for (auto& s : shares) s.object_tag = v.s_->tag;
    switch (form) {
        case Form::Left: v.s_->left = std::move(shares); break;
        case Form::Right: v.s_->right = std::move(shares); break;
        case Form::Product: v.s_->product = std::move(shares); break;
    }
    return v;
}

SecureEngine::Value SecureEngine::upload(std::size_t source, const MatrixFq& m, Form form, const std::string& tag) {
    require(form != Form::Product, Errc::invalid_parameters, "sources upload left or right shares");
    const NodeId dealer = source == 0 ? NodeId::user() : NodeId::source(source);
    auto shares = make_shares(m, params(form == Form::Left ? Side::Left : Side::Right), net_.rng(dealer), tag).first;
    net_.scatter(dealer, shares);
    net_.add_input_symbols(m.size());
    return make(form, std::move(shares), m.rows(), m.cols(), tag);
}

SecureEngine::Value SecureEngine::adopt(ShareSet shares, Form form, std::size_t rows, std::size_t cols,
                                        const std::string& tag) {
    return make(form, std::move(shares), rows, cols, tag);
}

const ShareSet* SecureEngine::cached(const Value& v, Form f) const {
    const auto& o = f == Form::Left ? v.s_->left : f == Form::Right ? v.s_->right : v.s_->product;
    return o ? &*o : nullptr;
}

const ShareSet& SecureEngine::left(const Value& v) {
    auto& st = *v.s_;
    if (!st.left) {
        if (st.product)
            st.left = reshare_product(net_, *st.product, params(Side::Left), st.tag);
        else
            st.left = convert_shares(net_, *st.right, params(Side::Left), st.tag);
    }
    return *st.left;
}

const ShareSet& SecureEngine::right(const Value& v) {
    auto& st = *v.s_;
    if (!st.right) {
        if (st.product)
            st.right = reshare_product(net_, *st.product, params(Side::Right), st.tag);
        else
            st.right = convert_shares(net_, *st.left, params(Side::Right), st.tag);
    }
    return *st.right;
}

SecureEngine::Value SecureEngine::mul(const Value& a, const Value& b) {
    require(a.cols() == b.rows(), Errc::dimension_mismatch,
            "product of " + num(a.rows()) + "x" + num(a.cols()) + " and " + num(b.rows()) + "x" + num(b.cols()));
    const auto& l = left(a);
    const auto& r = right(b);
    const std::string tag = fresh_tag("(" + a.tag() + "*" + b.tag() + ")");
    auto prod = multiply_shares(net_, l, r, tag);
    ++multiplications_;
    return make(Form::Product, std::move(prod), a.rows(), b.cols(), tag);
}

SecureEngine::Value SecureEngine::add(const Value& a, const Value& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), Errc::dimension_mismatch, "sum of differently shaped values");
    const std::string tag = fresh_tag("(" + a.tag() + "+" + b.tag() + ")");
    for (Form f : {Form::Product, Form::Left, Form::Right})
        if (cached(a, f) && cached(b, f)) return make(f, share_add(*cached(a, f), *cached(b, f)), a.rows(), a.cols(), tag);
    return make(Form::Left, share_add(left(a), left(b)), a.rows(), a.cols(), tag);
}

SecureEngine::Value SecureEngine::sub(const Value& a, const Value& b) { return add(a, scale(net_.field().neg(net_.field().one()), b)); }

SecureEngine::Value SecureEngine::scale(Fe c, const Value& a) {
    const std::string tag = fresh_tag(std::to_string(c.v) + a.tag());
    for (Form f : {Form::Product, Form::Left, Form::Right})
        if (const auto* s = cached(a, f)) return make(f, share_scale(c, *s), a.rows(), a.cols(), tag);
    fail(Errc::invalid_parameters, "value holds no shares");
}

SecureEngine::Value SecureEngine::add_public(const Value& a, const MatrixFq& m) {
    require(m.rows() == a.rows() && m.cols() == a.cols(), Errc::dimension_mismatch, "public summand shape mismatch");
    const std::string tag = fresh_tag(a.tag() + "+public");
    for (Form f : {Form::Product, Form::Left, Form::Right}) {
        const auto* s = cached(a, f);
        if (!s) continue;
        ShareSet out = *s;
        for (auto& sh : out) {
            if (f == Form::Product)
                sh.payload = mat_add(sh.payload, m);
            else
                sh.payload = mat_add(sh.payload, public_share(m, sh.params, sh.server_index).payload);
        }
        return make(f, std::move(out), a.rows(), a.cols(), tag);
    }
    fail(Errc::invalid_parameters, "value holds no shares");
}

SecureEngine::Value SecureEngine::transpose(const Value& a) {
    const std::string tag = fresh_tag(a.tag() + "'");
    auto t = transpose_shares(net_, left(a), params(Side::Left), tag);
    return make(Form::Left, std::move(t), a.cols(), a.rows(), tag);
}

SecureEngine::Value SecureEngine::inverse(const Value& a) {
    require(a.rows() == a.cols(), Errc::dimension_mismatch, "inverse of a non-square value");
    const std::string tag = fresh_tag("inv(" + a.tag() + ")");
    auto inv = masked_inverse(net_, right(a), T_, tag);
    return make(Form::Left, std::move(inv), a.rows(), a.cols(), tag);
}

SecureEngine::Value SecureEngine::power(const Value& a, std::uint64_t r) {
    require(r >= 1, Errc::invalid_parameters, "exponent must be at least 1");
    require(a.rows() == a.cols(), Errc::dimension_mismatch, "power of a non-square value");
    std::optional<Value> acc;
    Value base = a;
    const int top = std::bit_width(r) - 1;
    for (int bit = 0; bit <= top; ++bit) {
        if (bit > 0) base = mul(base, base);
        if ((r >> bit) & 1u) acc = acc ? mul(*acc, base) : base;
    }
    return *acc;
}

SecureEngine::Value SecureEngine::hconcat(std::span<const Value> parts) {
    require(!parts.empty(), Errc::invalid_parameters, "empty concatenation");
    std::size_t cols = 0;
    std::string tag = "[";
    std::vector<const ShareSet*> sets;
    for (const auto& p : parts) {
        require(p.rows() == parts[0].rows(), Errc::dimension_mismatch, "concatenated blocks differ in row count");
        cols += p.cols();
        tag += (sets.empty() ? "" : ",") + p.tag();
        sets.push_back(&right(p));
    }
    tag = fresh_tag(tag + "]");
    ShareSet out;
    for (std::size_t i = 0; i < net_.n(); ++i) {
        std::vector<MatrixFq> blocks;
        for (const auto* s : sets) blocks.push_back((*s)[i].payload);
        out.push_back(Share{(*sets[0])[i].params, i + 1, concat_cols(blocks), tag});
    }
    return make(Form::Right, std::move(out), parts[0].rows(), cols, tag);
}

MatrixFq SecureEngine::reveal(const Value& v, Delivery delivery) {
    net_.add_output_symbols(static_cast<std::uint64_t>(v.rows()) * v.cols());
    const auto& st = *v.s_;
    if (st.origin == Form::Product) {
        if (delivery == Delivery::UserSecure) return deliver(net_, usersecure_round(net_, *st.product, T_, st.tag));
        return deliver(net_, *st.product);
    }
    return deliver(net_, st.origin == Form::Left ? *st.left : *st.right);
}

// ---------------------------------------------------------------------------

MatrixFq sdmm2(SimNet& net, const MatrixFq& a, const MatrixFq& b, std::size_t T, Delivery delivery) {
    SecureEngine eng(net, T);
    require(a.cols() == b.rows(), Errc::dimension_mismatch, "inner dimensions differ");
    const auto A = eng.upload(1, a, SecureEngine::Form::Left, "A");
    const auto B = eng.upload(2, b, SecureEngine::Form::Right, "B");
    return eng.reveal(eng.mul(A, B), delivery);
}

MatrixFq sdmm2_own_data(SimNet& net, const MatrixFq& a, const MatrixFq& b, std::size_t T) {
    const std::size_t N = net.n();
    require(N > T, Errc::invalid_parameters, "need N > T (N=" + num(N) + ", T=" + num(T) + ")");
    require(a.cols() == b.rows(), Errc::dimension_mismatch, "inner dimensions differ");
    const std::size_t K = N - T;
    auto& user = net.rng(NodeId::user());
    auto [sa, ka] = make_left_shares(a, N, K, T, user, "A");
    auto [sb, kb] = make_right_shares_own(b, N, K, T, user, "B");
    net.scatter(NodeId::user(), sa);
    net.scatter(NodeId::user(), sb);
    net.add_input_symbols(a.size() + b.size());

    // Key correction, computed by the user ahead of time.
    MatrixFq correction = MatrixFq::zeros(a.field_ptr(), a.rows(), b.cols());
    for (std::size_t l = 0; l < T; ++l) correction = mat_add(correction, mat_mul(ka.keys[l], kb.keys[l]));

    const ShareSet prod = multiply_shares(net, sa, sb, "C");
    net.add_output_symbols(static_cast<std::uint64_t>(a.rows()) * b.cols());
    return mat_sub(deliver(net, prod), correction);
}

std::size_t straggler_group_threshold(const BivariateLayout& l) { return l.K2 * l.K3 * l.N1; }

std::size_t straggler_worst_case_threshold(std::size_t n_servers, const BivariateLayout& l) {
    const std::size_t groups = (n_servers + l.N1 - 1) / l.N1;
    require(groups >= l.K2 * l.K3, Errc::invalid_parameters, "too few groups for any recovery");
    return n_servers - (groups - l.K2 * l.K3);
}

MatrixFq straggler_sdmm(SimNet& net, const MatrixFq& a, const MatrixFq& b, const BivariateLayout& l) {
    const Field& f = net.field();
    l.validate(f);
    require(a.cols() == b.rows(), Errc::dimension_mismatch, "inner dimensions differ");
    const std::size_t used = l.server_count();
    require(net.n() >= used, Errc::invalid_parameters,
            "layout needs " + num(used) + " servers, network has " + num(net.n()));

    const NodeId dealer_a = l.own_data ? NodeId::user() : NodeId::source(1);
    const NodeId dealer_b = l.own_data ? NodeId::user() : NodeId::source(2);
    auto [sa, ra] = make_bivariate_shares_A(a, l, net.rng(dealer_a), "A");
    auto [sb, rb] = make_bivariate_shares_B(b, l, net.rng(dealer_b), "B");
    net.scatter(dealer_a, sa);
    net.scatter(dealer_b, sb);
    net.add_input_symbols(a.size() + b.size());

    net.begin_computation_round();
    ShareSet prod(used);
    for (std::size_t k = 0; k < used; ++k)
        prod[k] = Share{ShareParams{used, 1, l.T, Side::Product}, k + 1, mat_mul(sa[k].payload, sb[k].payload), "C"};

    net.add_output_symbols(static_cast<std::uint64_t>(a.rows()) * b.cols());
    const auto got = net.gather_to_user(prod);

    StragglerInfo info;
    info.failed.assign(net.failed().begin(), net.failed().end());
    info.group_threshold = straggler_group_threshold(l);
    info.worst_case_threshold = straggler_worst_case_threshold(net.n(), l);

    // Average every complete x1-group: f(beta_s).
    const std::size_t need = l.K2 * l.K3;
    std::vector<Fe> xs;
    std::vector<MatrixFq> ys;
    const Fe n1_inv = f.inv(f.from_uint(l.N1));
    for (std::size_t s = 1; s <= l.N2; ++s) {
        bool complete = true;
        for (std::size_t r = 0; r < l.N1; ++r) complete = complete && got[l.server_id(r, s) - 1].has_value();
        if (!complete) continue;
        ++info.complete_groups;
        if (xs.size() == need) continue;
        MatrixFq acc = MatrixFq::zeros(a.field_ptr(), prod[0].payload.rows(), prod[0].payload.cols());
        for (std::size_t r = 0; r < l.N1; ++r) axpy_inplace(acc, n1_inv, got[l.server_id(r, s) - 1]->payload);
        xs.push_back(l.betas[s - 1]);
        ys.push_back(std::move(acc));
        info.groups_used.push_back(s);
    }
    net.set_straggler_info(info);
    require(xs.size() == need, Errc::insufficient_groups,
            num(info.complete_groups) + " complete groups survived, " + num(need) + " needed");

    // Interpolate f(x2); coefficient K2(k-1)+i-1 is block C_{i,k}.
    const auto W = lagrange_weights(f, xs, need);
    BlockGrid grid{l.K2, l.K3, std::vector<MatrixFq>(need)};
    for (std::size_t i = 0; i < l.K2; ++i) {
        for (std::size_t k = 0; k < l.K3; ++k) {
            const std::size_t e = l.K2 * k + i;
            MatrixFq c = MatrixFq::zeros(a.field_ptr(), ys[0].rows(), ys[0].cols());
            for (std::size_t t = 0; t < need; ++t) axpy_inplace(c, W[e * need + t], ys[t]);
            if (l.own_data)
                for (std::size_t j = 0; j < l.T; ++j)
                    c = mat_sub(c, mat_mul(ra.keys[i * l.T + j], rb.keys[j * l.K3 + k]));
            grid.at(i, k) = std::move(c);
        }
    }
    return grid_assemble(grid);
}

MatrixFq chain_multiply(SimNet& net, std::span<const MatrixFq> chain, std::size_t T, Delivery delivery) {
    require(chain.size() >= 2, Errc::invalid_parameters, "a chain needs at least two matrices");
    SecureEngine eng(net, T);
    const std::size_t K = eng.K();
    for (std::size_t g = 1; g < chain.size(); ++g)
        require(chain[g - 1].cols() == chain[g].rows(), Errc::dimension_mismatch,
                "matrices " + num(g) + " and " + num(g + 1) + " are not conformal");
    require(chain[0].cols() % K == 0, Errc::indivisible_dimension,
            "round 1: columns of matrix 1 (" + num(chain[0].cols()) + ") not divisible by K=" + num(K));
    for (std::size_t g = 1; g + 1 < chain.size(); ++g)
        require(chain[g].cols() % K == 0, Errc::indivisible_dimension,
                "round " + num(g + 1) + ": intermediate product has " + num(chain[g].cols()) +
                    " columns, not divisible by K=" + num(K));

    std::vector<SecureEngine::Value> vals;
    vals.push_back(eng.upload(1, chain[0], SecureEngine::Form::Left, "A1"));
    for (std::size_t g = 1; g < chain.size(); ++g)
        vals.push_back(eng.upload(g + 1, chain[g], SecureEngine::Form::Right, "A" + num(g + 1)));
    auto acc = vals[0];
    for (std::size_t g = 1; g < vals.size(); ++g) acc = eng.mul(acc, vals[g]);
    return eng.reveal(acc, delivery);
}

MatrixFq exponentiate(SimNet& net, const MatrixFq& a, std::uint64_t r, std::size_t T) {
    require(r >= 1, Errc::invalid_parameters, "exponent must be at least 1");
    SecureEngine eng(net, T);
    const auto A = eng.upload(1, a, SecureEngine::Form::Left, "A");
    return eng.reveal(eng.power(A, r));
}

MatrixFq secure_inverse(SimNet& net, const MatrixFq& a, std::size_t T) {
    SecureEngine eng(net, T);
    const auto A = eng.upload(1, a, SecureEngine::Form::Right, "A");
    return eng.reveal(eng.inverse(A));
}

MatrixFq newton_inverse_rounds(SimNet& net, const MatrixFq& a, const MatrixFq& x0, std::size_t k, std::size_t T) {
    require(a.rows() == a.cols() && x0.rows() == a.rows() && x0.cols() == a.cols(), Errc::dimension_mismatch,
            "Newton iteration needs square, equally sized A and X0");
    SecureEngine eng(net, T);
    const Field& f = net.field();
    const auto A = eng.upload(1, a, SecureEngine::Form::Left, "A");
    auto X = eng.upload(2, x0, SecureEngine::Form::Left, "X0");
    const MatrixFq two_i = mat_scale(f.from_uint(2), MatrixFq::identity(a.field_ptr(), a.rows()));
    const Fe minus_one = f.neg(f.one());
    for (std::size_t it = 0; it < k; ++it) {
        const auto residual = eng.add_public(eng.scale(minus_one, eng.mul(A, X)), two_i);
        X = eng.mul(X, residual);
    }
    return eng.reveal(X);
}

MatrixFq solve_linear(SimNet& net, const MatrixFq& a, const MatrixFq& b, std::size_t T) {
    require(a.rows() == a.cols(), Errc::dimension_mismatch, "coefficient matrix must be square");
    require(a.rows() == b.rows(), Errc::dimension_mismatch, "right-hand side has the wrong row count");
    SecureEngine eng(net, T);
    const auto A = eng.upload(1, a, SecureEngine::Form::Right, "A");
    const auto B = eng.upload(2, b, SecureEngine::Form::Right, "B");
    return eng.reveal(eng.mul(eng.inverse(A), B));
}

MatrixFq optimal_cost_pipeline(SimNet& net, const MatrixFq& a, const MatrixFq& b, std::size_t T) {
    const std::size_t N = net.n();
    require(N > 2 * T, Errc::invalid_parameters, "need N > 2T (N=" + num(N) + ", T=" + num(T) + ")");
    require(a.cols() == b.rows(), Errc::dimension_mismatch, "inner dimensions differ");
    const ShareParams upload{N, N - T, T, Side::Left};
    const ShareParams left{N, N - 2 * T, T, Side::Left};
    const ShareParams right{N, N - 2 * T, T, Side::Right};

    auto sa = make_shares(a, upload, net.rng(NodeId::source(1)), "A").first;
    auto sb = make_shares(b, upload, net.rng(NodeId::source(2)), "B").first;
    net.scatter(NodeId::source(1), sa);
    net.scatter(NodeId::source(2), sb);
    net.add_input_symbols(a.size() + b.size());

    // Left to left is not a direct conversion once K1 >= 2, so A detours
    // through right shares.
    const ShareSet a_left = convert_shares(net, convert_shares(net, sa, right, "A"), left, "A");
    const ShareSet b_right = convert_shares(net, sb, right, "B");
    const ShareSet prod = multiply_shares(net, a_left, b_right, "C");
    net.add_output_symbols(static_cast<std::uint64_t>(a.rows()) * b.cols());
    return deliver(net, usersecure_round(net, prod, T, "C"));
}

}  // namespace sdmc
