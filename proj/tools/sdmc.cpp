#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sdmc/audit.hpp"
#include "sdmc/error.hpp"
#include "sdmc/protocols.hpp"

namespace {

using nlohmann::json;
using namespace sdmc;

enum Exit { kOk = 0, kUsage = 2, kProtocol = 3, kStraggler = 4, kSingular = 5 };

int exit_code(Errc c) {
    switch (c) {
        case Errc::invalid_parameters:
        case Errc::parse_error:
        case Errc::order_not_dividing:
        case Errc::search_bound_exceeded:
        case Errc::state_space_too_large: return kUsage;
        case Errc::insufficient_groups:
        case Errc::missing_share: return kStraggler;
        case Errc::singular_matrix: return kSingular;
        default: return kProtocol;
    }
}

struct RunOptions {
    std::size_t n = 0, t = 0;
    std::uint64_t q = 0;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> gen;
    std::vector<std::string> in;
    std::string out;
    bool pad = false;
    bool parallel = false;
    bool usersecure = false;
    bool own_data = false;
    std::size_t k1 = 1, k2 = 1, k3 = 1, n2 = 1;
    std::vector<std::size_t> fail, fail_group;
    std::uint64_t r = 1;
    std::size_t k = 1;
    std::string expr;
    std::uint64_t entry_bound = std::uint64_t{1} << 30;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    if (const char* env = std::getenv("SDMC_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            fail(Errc::parse_error, std::string("SDMC_SEED='") + env + "' is not an integer");
        }
    }
    return 1;
}

void write_json(const std::filesystem::path& p, const json& j) {
    std::ofstream o(p);
    require(o.good(), Errc::invalid_parameters, "cannot write '" + p.string() + "'");
    o << j.dump(2) << '\n';
}

std::string cost(const Rational& r) { return to_string(r) + " (" + to_decimal(r) + ")"; }

json descriptor(const std::string& protocol, const RunOptions& s) {
    json d = {{"protocol", protocol}, {"n", s.n}, {"t", s.t}, {"seed", resolve_seed(s.seed)}};
    if (s.q) d["q"] = s.q;
    d["entry_bound"] = s.entry_bound;
    if (!s.in.empty()) d["inputs"] = s.in;
    if (!s.gen.empty()) d["gen"] = s.gen;
    if (s.pad) d["pad"] = true;
    if (s.parallel) d["parallel"] = true;
    if (s.usersecure) d["delivery"] = "usersecure";
    return d;
}

int execute(const json& d, const std::string& out_dir) {
    const ProtocolOutcome o = run_protocol(d);
    const CostReport& rep = o.report;
    std::cout << "protocol      " << d.at("protocol").get<std::string>() << " (N=" << d.value("n", 0) << ", T="
              << d.value("t", 0) << ", seed=" << d.value("seed", 1) << ")\n";
    bool match = true;
    if (o.result) {
        std::cout << "field         q=" << o.result->field().q() << '\n';
        std::cout << "result        " << o.result->rows() << "x" << o.result->cols();
        if (o.expected) {
            match = *o.result == *o.expected;
            std::cout << (match ? ", matches the plaintext oracle" : ", DOES NOT match the plaintext oracle");
        }
        std::cout << '\n';
    }
    std::cout << "chi_UL        " << cost(rep.chi_ul) << '\n'
              << "chi_DL        " << cost(rep.chi_dl) << '\n'
              << "symbols       upload " << rep.upload_symbols << ", download " << rep.download_symbols
              << ", inter-server " << rep.interserver_symbols << '\n'
              << "rounds        computation " << rep.computation_rounds << ", communication "
              << rep.communication_rounds << '\n';
    for (const auto& r : rep.interserver_rounds)
        std::cout << "  round " << r.round << " " << r.label << ": " << cost(r.per_server()) << " per server\n";
    if (rep.stragglers) {
        const auto& s = *rep.stragglers;
        std::cout << "stragglers    " << s.failed.size() << " failed, " << s.complete_groups
                  << " complete groups, group threshold " << s.group_threshold << ", worst-case threshold "
                  << s.worst_case_threshold << '\n';
    }
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        if (o.result) write_json(dir / "result.json", matrix_to_json(*o.result));
        json r = to_json(rep);
        if (o.expected) r["oracle_match"] = match;
        write_json(dir / "report.json", r);
        write_json(dir / "log.json", to_json(o.log));
        write_json(dir / "descriptor.json", d);
    }
    return match ? kOk : kProtocol;
}

void common(CLI::App* sub, RunOptions& s) {
    sub->add_option("--n", s.n, "number of servers N")->required();
    sub->add_option("--t", s.t, "collusion threshold T");
    sub->add_option("--q", s.q,
                    "field modulus; omitted: smallest prime q >= 2*entry-bound with N | q-1 (default bound 2^30)");
    sub->add_option("--entry-bound", s.entry_bound, "matrix entry bound used for automatic field selection");
    sub->add_option("--seed", s.seed, "RNG seed (fallback: $SDMC_SEED, then 1)");
    sub->add_option("--gen", s.gen, "generate random inputs of shapes RxC,...")->delimiter(',');
    sub->add_option("--in", s.in, "input matrix JSON files");
    sub->add_option("--out", s.out, "directory for result.json, report.json, log.json, descriptor.json");
    sub->add_flag("--pad", s.pad, "zero-pad dimensions to the divisibility the protocol needs");
    sub->add_flag("--parallel", s.parallel, "run per-server computations on a thread pool");
}

// ---------------------------------------------------------------------------

std::string opt(const std::optional<Rational>& r) { return r ? to_string(*r) : "-"; }
std::string opt_dec(const std::optional<Rational>& r) { return r ? to_decimal(*r, 4) : "-"; }

int cmd_costs(std::size_t n, std::size_t t_max, const std::string& csv, std::optional<std::size_t> t,
              const std::vector<std::size_t>& dims) {
    if (t) {
        require(dims.size() == 3, Errc::invalid_parameters, "--dims takes m,n,p");
        std::cout << "N=" << n << " T=" << *t << " A: " << dims[0] << "x" << dims[1] << ", B: " << dims[1] << "x"
                  << dims[2] << '\n';
        std::cout << std::left << std::setw(34) << "scheme" << std::setw(20) << "chi_UL" << std::setw(20) << "chi_DL"
                  << "note\n";
        for (const auto& row : cost_formulas(n, *t, dims[0], dims[1], dims[2]))
            std::cout << std::setw(34) << row.scheme << std::setw(20) << opt(row.chi_ul) << std::setw(20)
                      << opt(row.chi_dl) << row.note << '\n';
        return kOk;
    }
    const auto rows = upload_comparison(n, t_max);
    std::cout << "upload cost chi_UL, N=" << n << '\n';
    std::cout << std::left << std::setw(4) << "T" << std::setw(22) << "proposed" << std::setw(22) << "own-data"
              << std::setw(22) << "secure-matdot" << "row-by-column\n";
    auto cell = [](const std::optional<Rational>& r) { return r ? opt(r) + " (" + opt_dec(r) + ")" : "-"; };
    for (const auto& r : rows)
        std::cout << std::setw(4) << r.T << std::setw(22) << cell(r.proposed) << std::setw(22) << cell(r.own_data)
                  << std::setw(22) << cell(r.secure_matdot) << cell(r.row_by_column) << '\n';
    if (!csv.empty()) {
        std::ofstream o(csv);
        require(o.good(), Errc::invalid_parameters, "cannot write '" + csv + "'");
        o << "T,proposed,own_data,secure_matdot,row_by_column\n";
        for (const auto& r : rows)
            o << r.T << ',' << opt(r.proposed) << ',' << opt(r.own_data) << ',' << opt(r.secure_matdot) << ','
              << opt(r.row_by_column) << '\n';
    }
    return kOk;
}

struct AuditOptions {
    std::size_t n = 0, k = 0, t = 0, rows = 1, cols = 0;
    std::uint64_t q = 0;
    std::optional<std::size_t> colluders;
    std::string side = "left";
    bool statistical = false;
    std::uint64_t samples = kDefaultSamples;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void print_verdict(const SecrecyVerdict& v, const std::string& label) {
    std::cout << std::left << std::setw(6) << (v.pass ? "PASS" : "FAIL") << std::setw(46) << label << v.evidence
              << '\n';
}

int cmd_audit(const AuditOptions& a) {
    json all = json::array();
    bool ok = true;
    auto record = [&](const SecrecyVerdict& v, const std::string& label, bool want_pass) {
        print_verdict(v, label + (want_pass ? "" : " [negative control]"));
        ok = ok && v.pass == want_pass;
        json j = to_json(v);
        j["expected_pass"] = want_pass;
        all.push_back(j);
    };
    const std::uint64_t seed = resolve_seed(a.seed);
    if (a.n) {
        require(a.k >= 1 && a.q >= 2, Errc::invalid_parameters, "audit needs --k and --q with --n");
        const ShareParams p{a.n, a.k, a.t, side_from_name(a.side)};
        const std::size_t cols = a.cols ? a.cols : (p.side == Side::Left ? a.k : 1);
        const std::size_t rows = p.side == Side::Left ? a.rows : std::max(a.rows, a.k);
        const auto v = a.statistical ? secrecy_statistical(p, a.q, rows, cols, a.colluders, a.samples, seed)
                                     : secrecy_exhaustive(p, a.q, rows, cols, a.colluders);
        record(v, "server view", true);
    } else {
        struct Case {
            std::size_t N, K, T;
            std::uint64_t q;
            std::size_t rows, cols;
        };
        for (const Case& c : {Case{3, 1, 1, 7, 1, 1}, Case{5, 1, 2, 11, 1, 1}, Case{4, 2, 1, 5, 1, 2}}) {
            const ShareParams p{c.N, c.K, c.T, Side::Left};
            const std::string label = "(N,K,T,q)=(" + std::to_string(c.N) + "," + std::to_string(c.K) + "," +
                                      std::to_string(c.T) + "," + std::to_string(c.q) + ")";
            record(secrecy_exhaustive(p, c.q, c.rows, c.cols), label + " exhaustive", true);
            record(secrecy_exhaustive(p, c.q, c.rows, c.cols, c.T + 1), label + " T+1 colluders", false);
            const ShareParams pr{c.N, c.K, c.T, Side::Right};
            record(secrecy_exhaustive(pr, c.q, c.cols, c.rows), label + " right shares exhaustive", true);
        }
        record(secrecy_statistical({7, 3, 2, Side::Left}, 29, 1, 3, {}, a.samples, seed),
               "(7,3,2,29) statistical", true);
        record(secrecy_statistical({5, 1, 2, Side::Left}, 11, 1, 1, {}, a.samples, seed),
               "(5,1,2,11) statistical", true);
        record(secrecy_user_exhaustive(3, 1, 7, {{2, 3}, {3, 2}, {1, 6}}), "user view (N,T,q)=(3,1,7) exhaustive",
               true);
        record(secrecy_user_exhaustive(5, 1, 11, {{2, 3}, {3, 2}}), "user view (5,1,11) exhaustive", true);
        record(secrecy_user_statistical(5, 1, 11, {{2, 3}, {3, 2}}, std::min<std::uint64_t>(a.samples, 20000), seed),
               "user view (5,1,11) statistical", true);

        const auto f = make_field(11);
        const auto leak = raw_user_leakage(5, 1, leakage_demo_pairs(f, 3, 6));
        std::cout << std::setw(6) << (leak.mutual_information_bits > 0 ? "LEAK" : "NONE") << std::setw(46)
                  << "raw product shares (5,1,11), no re-sharing" << leak.evidence << '\n';
        all.push_back(to_json(leak));

        const auto alias = aliasing_terms(5, 4, 1, false);
        std::cout << std::setw(6) << (alias.empty() ? "NONE" : "ALIAS") << std::setw(46)
                  << "right shares with K=N-T, standard product";
        for (const auto& t : alias) std::cout << t.a_term << "*" << t.b_term << " ";
        std::cout << "hit the constant term\n";
        ok = ok && !alias.empty() && aliasing_terms(5, 3, 1, false).empty();
        all.push_back({{"check", "aliasing"}, {"N", 5}, {"K", 4}, {"T", 1}, {"aliases", alias.size()}});
    }
    if (!a.out.empty()) {
        std::filesystem::create_directories(a.out);
        write_json(std::filesystem::path(a.out) / "audit.json", all);
    }
    return ok ? kOk : kProtocol;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secure distributed matrix computation on a simulated server network"};
    app.require_subcommand(1);

    RunOptions s;
    std::map<std::string, CLI::App*> subs;
    auto add = [&](const std::string& name, const std::string& help) {
        auto* sub = app.add_subcommand(name, help);
        common(sub, s);
        subs[name] = sub;
        return sub;
    };

    auto* sdmm = add("sdmm", "two-source multiplication C = AB");
    sdmm->add_flag("--own-data", s.own_data, "the user holds both inputs and keeps the keys (K = N-T)");
    sdmm->add_flag("--usersecure", s.usersecure, "re-share the product before download");
    auto* chain = add("chain", "product of a chain of matrices from separate sources");
    chain->add_flag("--usersecure", s.usersecure, "re-share the product before download");
    auto* strag = add("straggler", "bivariate multiplication tolerating failed servers");
    strag->get_option("--n")->required(false)->description("total servers (default N1*N2)");
    strag->add_option("--k1", s.k1, "inner-dimension partitions");
    strag->add_option("--k2", s.k2, "row partitions of A");
    strag->add_option("--k3", s.k3, "column partitions of B");
    strag->add_option("--n2", s.n2, "number of x1-groups");
    strag->add_flag("--own-data", s.own_data, "own-data variant (N1 = K1+T)");
    strag->add_option("--fail", s.fail, "failed server ids")->delimiter(',');
    strag->add_option("--fail-group", s.fail_group, "failed x1-groups")->delimiter(',');
    add("invert", "matrix inverse by masking");
    auto* power = add("power", "matrix power A^r");
    power->add_option("--r", s.r, "exponent")->required();
    add("solve", "linear system AX = B");
    auto* newton = add("newton", "Newton iterations X <- X(2I - AX) from X0 (default X0: plaintext inverse)");
    newton->add_option("--k", s.k, "iterations");
    auto* poly = add("polyeval", "evaluate a matrix expression over inputs A, B, ...");
    poly->add_option("--expr", s.expr, "expression, e.g. \"A*B + 2*A^3 - inv(B)\"")->required();
    poly->add_flag("--usersecure", s.usersecure, "re-share a product result before download");
    add("pipeline", "multiplication with conversions on the servers (chi_UL = chi_DL = N/(N-T))");

    std::string descriptor_path, run_out;
    auto* run = app.add_subcommand("run", "replay a JSON protocol descriptor");
    run->add_option("descriptor", descriptor_path, "descriptor file")->required();
    run->add_option("--out", run_out, "output directory");

    std::size_t costs_n = 20, costs_tmax = 9;
    std::optional<std::size_t> costs_t;
    std::vector<std::size_t> costs_dims;
    std::string costs_csv;
    auto* costs = app.add_subcommand("costs", "closed-form upload-cost comparison table");
    costs->add_option("--n", costs_n, "number of servers")->capture_default_str();
    costs->add_option("--t-max", costs_tmax, "largest T in the table")->capture_default_str();
    costs->add_option("--csv", costs_csv, "also write the table as CSV");
    costs->add_option("--t", costs_t, "print every scheme's costs for this T instead");
    costs->add_option("--dims", costs_dims, "m,n,p for --t")->delimiter(',');

    AuditOptions au;
    auto* audit = app.add_subcommand("audit", "secrecy audits; without --n runs the standard table");
    audit->add_option("--n", au.n, "servers");
    audit->add_option("--k", au.k, "partitions");
    audit->add_option("--t", au.t, "threshold");
    audit->add_option("--q", au.q, "field modulus");
    audit->add_option("--rows", au.rows, "input rows");
    audit->add_option("--cols", au.cols, "input columns");
    audit->add_option("--colluders", au.colluders, "colluding set size (default T)");
    audit->add_option("--side", au.side, "left | right | right-own-data");
    audit->add_flag("--statistical", au.statistical, "sample keys instead of enumerating");
    audit->add_option("--samples", au.samples, "samples per input in statistical mode")->capture_default_str();
    audit->add_option("--seed", au.seed, "RNG seed (fallback: $SDMC_SEED, then 1)");
    audit->add_option("--out", au.out, "directory for audit.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*run) {
            std::ifstream in(descriptor_path);
            require(in.good(), Errc::parse_error, "cannot open '" + descriptor_path + "'");
            json d;
            try {
                d = json::parse(in);
            } catch (const json::exception& e) {
                fail(Errc::parse_error, descriptor_path + ": " + e.what());
            }
            return execute(d, run_out);
        }
        if (*costs) return cmd_costs(costs_n, costs_tmax, costs_csv, costs_t, costs_dims);
        if (*audit) return cmd_audit(au);

        if (*sdmm) {
            require(!(s.own_data && s.usersecure), Errc::invalid_parameters,
                    "--own-data and --usersecure are mutually exclusive");
            require(s.own_data ? s.n > s.t : s.n > 2 * s.t, Errc::invalid_parameters,
                    s.own_data ? "need N > T" : "need N > 2T");
            return execute(descriptor(s.own_data ? "own_data" : "sdmm2", s), s.out);
        }
        if (*strag) {
            if (s.n == 0) s.n = (s.own_data ? s.k1 + s.t : s.k1 + 2 * s.t) * s.n2;
            json d = descriptor("straggler", s);
            d["k1"] = s.k1;
            d["k2"] = s.k2;
            d["k3"] = s.k3;
            d["n2"] = s.n2;
            if (s.own_data) d["own_data"] = true;
            if (!s.fail.empty()) d["fail"] = s.fail;
            if (!s.fail_group.empty()) d["fail_group"] = s.fail_group;
            return execute(d, s.out);
        }
        if (*chain) return execute(descriptor("chain", s), s.out);
        if (*power) {
            json d = descriptor("power", s);
            d["r"] = s.r;
            return execute(d, s.out);
        }
        if (*newton) {
            json d = descriptor("newton", s);
            d["k"] = s.k;
            return execute(d, s.out);
        }
        if (*poly) {
            json d = descriptor("polyeval", s);
            d["expr"] = s.expr;
            return execute(d, s.out);
        }
        for (const char* name : {"invert", "solve", "pipeline"})
            if (*subs.at(name)) return execute(descriptor(name, s), s.out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kProtocol;
    }
    return kUsage;
}
