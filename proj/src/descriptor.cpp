#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "sdmc/error.hpp"
#include "sdmc/protocols.hpp"

namespace sdmc {

namespace {

using nlohmann::json;

std::size_t round_up(std::size_t x, std::size_t k) { return k == 0 ? x : (x + k - 1) / k * k; }

MatrixFq pad_identity(const MatrixFq& a, std::size_t n) {
    MatrixFq out = pad_to(a, n, n);
    for (std::size_t i = a.rows(); i < n; ++i) out(i, i) = Fe{1};
    return out;
}

std::vector<std::size_t> parse_dims(const std::string& s) {
    const auto x = s.find_first_of("xX");
    require(x != std::string::npos, Errc::parse_error, "dimension '" + s + "' is not RxC");
    try {
        return {std::stoul(s.substr(0, x)), std::stoul(s.substr(x + 1))};
    } catch (const std::exception&) {
        fail(Errc::parse_error, "dimension '" + s + "' is not RxC");
    }
}

json load_json_ref(const json& ref) {
    if (!ref.is_string()) return ref;
    std::ifstream in(ref.get<std::string>());
    require(in.good(), Errc::parse_error, "cannot open '" + ref.get<std::string>() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(Errc::parse_error, ref.get<std::string>() + ": " + e.what());
    }
}

// Order of the roots of unity the protocol needs.
std::size_t root_order(const json& d, std::size_t n, std::size_t t) {
    if (d.value("protocol", "") != "straggler") return n;
    const std::size_t k1 = d.value("k1", std::size_t{1});
    return d.value("own_data", false) ? k1 + t : k1 + 2 * t;
}

}  // namespace

ProtocolOutcome run_protocol(const json& d) {
    try {
        const std::string proto = d.at("protocol").get<std::string>();
        const std::size_t t = d.value("t", std::size_t{0});
        std::size_t n = d.value("n", std::size_t{0});
        if (proto == "straggler" && n == 0) {
            const std::size_t k1 = d.value("k1", std::size_t{1});
            n = (d.value("own_data", false) ? k1 + t : k1 + 2 * t) * d.value("n2", std::size_t{1});
        }
        require(n >= 1, Errc::invalid_parameters, "descriptor needs n >= 1");
        const std::uint64_t seed = d.value("seed", std::uint64_t{1});

        // Inputs: explicit matrices (named or positional) or generated shapes.
        std::vector<json> raw;
        std::vector<std::string> names;
        // Unnamed inputs are called A, B, C, ... by position.
        if (d.contains("inputs")) {
            const auto& in = d.at("inputs");
            if (in.is_object()) {
                for (const auto& [k, v] : in.items()) {
                    names.push_back(k);
                    raw.push_back(load_json_ref(v));
                }
            } else {
                for (const auto& v : in) {
                    names.push_back(std::string(1, static_cast<char>('A' + raw.size())));
                    raw.push_back(load_json_ref(v));
                }
            }
        }

        FieldPtr field;
        if (d.contains("q")) field = make_field(d.at("q").get<std::uint64_t>());
        for (const auto& r : raw) {
            const auto q = r.at("q").get<std::uint64_t>();
            if (!field) field = make_field(q);
            require(field->q() == q, Errc::field_mismatch, "inputs use different moduli");
        }
        if (!field) {
            const std::uint64_t bound = d.value("entry_bound", std::uint64_t{1} << 30);
            field = find_field(root_order(d, n, t), 2 * bound);
        }

        std::vector<MatrixFq> mats;
        for (const auto& r : raw) mats.push_back(matrix_from_json(r, field));
        if (d.contains("gen")) {
            RngStream gen(seed, 0x6E6E'0000'0000ull);
            std::size_t k = 0;
            for (const auto& g : d.at("gen")) {
                const auto dims = parse_dims(g.get<std::string>());
                mats.push_back(random_matrix(field, dims[0], dims[1], gen));
                names.push_back(d.contains("names") ? d.at("names").at(k).get<std::string>()
                                                    : std::string(1, static_cast<char>('A' + names.size())));
                ++k;
            }
        }

        const bool pad = d.value("pad", false);
        const Delivery delivery =
            d.value("delivery", std::string("direct")) == "usersecure" ? Delivery::UserSecure : Delivery::Direct;

        std::size_t gamma = std::max<std::size_t>(mats.size(), 2);
        SimNet net(gamma, n, field, seed);
        net.set_parallel(d.value("parallel", false));

        auto need = [&](std::size_t k) {
            require(mats.size() == k, Errc::invalid_parameters,
                    proto + " takes " + std::to_string(k) + " input matrices, got " + std::to_string(mats.size()));
        };

        ProtocolOutcome out;
        if (proto == "noop") {
            // nothing happens on the network
        } else if (proto == "sdmm2" || proto == "own_data" || proto == "pipeline") {
            need(2);
            const auto& a = mats[0];
            const auto& b = mats[1];
            out.expected = mat_mul(a, b);
            MatrixFq pa = a, pb = b;
            if (pad) {
                if (proto == "sdmm2") {
                    require(n > 2 * t, Errc::invalid_parameters, "need N > 2T");
                    const std::size_t inner = round_up(a.cols(), n - 2 * t);
                    const std::size_t pc = delivery == Delivery::UserSecure ? round_up(b.cols(), n - t) : b.cols();
                    pa = pad_to(a, a.rows(), inner);
                    pb = pad_to(b, inner, pc);
                } else if (proto == "own_data") {
                    require(n > t, Errc::invalid_parameters, "need N > T");
                    const std::size_t inner = round_up(a.cols(), n - t);
                    pa = pad_to(a, a.rows(), inner);
                    pb = pad_to(b, inner, b.cols());
                } else {
                    require(n > 2 * t, Errc::invalid_parameters, "need N > 2T");
                    const std::size_t k = n - 2 * t;
                    const std::size_t inner = round_up(a.cols(), std::lcm(n - t, k));
                    pa = pad_to(a, round_up(a.rows(), k), inner);
                    pb = pad_to(b, inner, round_up(b.cols(), n - t));
                }
            }
            MatrixFq c = proto == "sdmm2"      ? sdmm2(net, pa, pb, t, delivery)
                         : proto == "own_data" ? sdmm2_own_data(net, pa, pb, t)
                                               : optimal_cost_pipeline(net, pa, pb, t);
            out.result = truncate_to(c, a.rows(), b.cols());
        } else if (proto == "chain") {
            require(mats.size() >= 2, Errc::invalid_parameters, "chain takes at least two matrices");
            MatrixFq expected = mats[0];
            for (std::size_t g = 1; g < mats.size(); ++g) expected = mat_mul(expected, mats[g]);
            out.expected = expected;
            std::vector<MatrixFq> chain = mats;
            if (pad) {
                require(n > 2 * t, Errc::invalid_parameters, "need N > 2T");
                const std::size_t k = n - 2 * t;
                for (std::size_t g = 0; g < chain.size(); ++g) {
                    const std::size_t r = g == 0 ? chain[g].rows() : round_up(chain[g].rows(), k);
                    const std::size_t c = g + 1 == chain.size() ? chain[g].cols() : round_up(chain[g].cols(), k);
                    chain[g] = pad_to(chain[g], r, c);
                }
            }
            out.result = truncate_to(chain_multiply(net, chain, t, delivery), expected.rows(), expected.cols());
        } else if (proto == "straggler") {
            need(2);
            const auto& a = mats[0];
            const auto& b = mats[1];
            out.expected = mat_mul(a, b);
            const auto layout = BivariateLayout::make(*field, d.value("k1", std::size_t{1}),
                                                      d.value("k2", std::size_t{1}), d.value("k3", std::size_t{1}), t,
                                                      d.value("n2", std::size_t{1}), d.value("own_data", false));
            std::set<std::size_t> failed;
            if (d.contains("fail"))
                for (const auto& s : d.at("fail")) failed.insert(s.get<std::size_t>());
            if (d.contains("fail_group"))
                for (const auto& g : d.at("fail_group")) {
                    const auto s = g.get<std::size_t>();
                    require(s >= 1 && s <= layout.N2, Errc::invalid_parameters, "no group " + std::to_string(s));
                    for (std::size_t r = 0; r < layout.N1; ++r) failed.insert(layout.server_id(r, s));
                }
            net.inject_stragglers(failed);
            MatrixFq pa = a, pb = b;
            if (pad) {
                const std::size_t inner = round_up(a.cols(), layout.K1);
                pa = pad_to(a, round_up(a.rows(), layout.K2), inner);
                pb = pad_to(b, inner, round_up(b.cols(), layout.K3));
            }
            out.result = truncate_to(straggler_sdmm(net, pa, pb, layout), a.rows(), b.cols());
        } else if (proto == "power") {
            need(1);
            const auto r = d.at("r").get<std::uint64_t>();
            out.expected = mat_pow(mats[0], r);
            MatrixFq a = mats[0];
            if (pad) {
                require(n > 2 * t, Errc::invalid_parameters, "need N > 2T");
                const std::size_t s = round_up(a.rows(), n - 2 * t);
                a = pad_to(a, s, s);
            }
            out.result = truncate_to(exponentiate(net, a, r, t), mats[0].rows(), mats[0].cols());
        } else if (proto == "invert" || proto == "solve" || proto == "newton") {
            if (proto == "newton" && mats.size() == 1) mats.push_back(plaintext_inverse(mats[0]));  // demo seed X0
            need(proto == "invert" ? 1 : 2);
            const auto& a = mats[0];
            const bool newton = proto == "newton";
            std::size_t s = a.rows();
            if (pad) {
                require(n > 2 * t, Errc::invalid_parameters, "need N > 2T");
                s = round_up(a.rows(), n - 2 * t);
            }
            const MatrixFq pa = pad ? pad_identity(a, s) : a;
            if (proto == "invert") {
                out.result = truncate_to(secure_inverse(net, pa, t), a.rows(), a.cols());
                out.expected = plaintext_inverse(a);
            } else if (newton) {
                const MatrixFq& x0 = mats[1];
                const auto k = d.value("k", std::size_t{1});
                MatrixFq expected = x0;
                const MatrixFq two_i = mat_scale(Fe{2}, MatrixFq::identity(field, a.rows()));
                for (std::size_t it = 0; it < k; ++it) expected = mat_mul(expected, mat_sub(two_i, mat_mul(a, expected)));
                out.expected = expected;
                const MatrixFq px = pad ? pad_identity(x0, s) : x0;
                out.result = truncate_to(newton_inverse_rounds(net, pa, px, k, t), a.rows(), a.cols());
            } else {
                const auto& b = mats[1];
                out.expected = plaintext_solve(a, b);
                const MatrixFq pb = pad ? pad_to(b, s, b.cols()) : b;
                out.result = truncate_to(solve_linear(net, pa, pb, t), a.rows(), b.cols());
            }
        } else if (proto == "polyeval") {
            require(!pad, Errc::invalid_parameters, "padding is not supported for expressions");
            const auto expr = parse_expression(d.at("expr").get<std::string>());
            std::map<std::string, MatrixFq> inputs;
            require(names.size() == mats.size(), Errc::invalid_parameters, "expression inputs need names");
            for (std::size_t k = 0; k < mats.size(); ++k) inputs.emplace(names[k], mats[k]);
            out.expected = eval_plain(*expr, inputs);
            out.result = eval_matrix_polynomial(net, *expr, inputs, t, delivery);
        } else {
            fail(Errc::invalid_parameters, "unknown protocol '" + proto + "'");
        }
        out.report = net.report();
        out.log = net.log();
        return out;
    } catch (const json::exception& e) {
        fail(Errc::parse_error, std::string("descriptor: ") + e.what());
    }
}

}  // namespace sdmc
