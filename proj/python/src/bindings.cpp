#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sdmc/audit.hpp"
#include "sdmc/error.hpp"
#include "sdmc/protocols.hpp"

namespace py = pybind11;
using namespace sdmc;

namespace {

using Rows = std::vector<std::vector<std::int64_t>>;

MatrixFq to_matrix(const FieldPtr& f, const Rows& rows) {
    require(!rows.empty() && !rows[0].empty(), Errc::invalid_parameters, "matrix must be non-empty");
    std::vector<std::int64_t> flat;
    for (const auto& r : rows) {
        require(r.size() == rows[0].size(), Errc::dimension_mismatch, "ragged matrix rows");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return MatrixFq::from_ints(f, rows.size(), rows[0].size(), flat);
}

Rows to_rows(const MatrixFq& m) {
    Rows out(m.rows(), std::vector<std::int64_t>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out[r][c] = static_cast<std::int64_t>(m(r, c).v);
    return out;
}

std::vector<Fe> to_fe(const Field& f, const std::vector<std::int64_t>& v) {
    std::vector<Fe> out;
    for (auto x : v) out.push_back(f.from_int(x));
    return out;
}

std::vector<std::int64_t> from_fe(const std::vector<Fe>& v) {
    std::vector<std::int64_t> out;
    for (auto x : v) out.push_back(static_cast<std::int64_t>(x.v));
    return out;
}

py::tuple product_run(const Rows& a, const Rows& b, std::uint64_t q, std::size_t n, std::size_t t,
                      std::uint64_t seed, const std::string& variant) {
    const auto f = make_field(q);
    const auto A = to_matrix(f, a), B = to_matrix(f, b);
    MatrixFq c;
    CostReport report;
    {
        py::gil_scoped_release release;
        SimNet net(variant == "own_data" ? 1 : 2, n, f, seed);
        if (variant == "own_data")
            c = sdmm2_own_data(net, A, B, t);
        else if (variant == "pipeline")
            c = optimal_cost_pipeline(net, A, B, t);
        else
            c = sdmm2(net, A, B, t, variant == "usersecure" ? Delivery::UserSecure : Delivery::Direct);
        report = net.report();
    }
    return py::make_tuple(to_rows(c), to_json(report).dump());
}

}  // namespace

PYBIND11_MODULE(_sdmc, m) {
    m.doc() = "Secure distributed matrix computation over prime fields";

    static py::exception<Error> error(m, "SdmcError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object args = py::make_tuple(std::string(errc_name(e.code())), std::string(e.what()));
            PyErr_SetObject(error.ptr(), args.ptr());
        }
    });

    m.def("find_field", [](std::uint64_t n, std::uint64_t min_q) { return find_field(n, min_q)->q(); },
          py::arg("n"), py::arg("min_q"), "Smallest prime q >= min_q with n | q-1.");
    m.def("primitive_root", [](std::uint64_t q, std::uint64_t n) { return make_field(q)->primitive_root(n).v; },
          py::arg("q"), py::arg("n"));
    m.def("dft", [](std::uint64_t q, const std::vector<std::int64_t>& c) {
        const auto f = make_field(q);
        return from_fe(dft(*f, to_fe(*f, c)));
    }, py::arg("q"), py::arg("coeffs"));
    m.def("idft", [](std::uint64_t q, const std::vector<std::int64_t>& e) {
        const auto f = make_field(q);
        return from_fe(idft(*f, to_fe(*f, e)));
    }, py::arg("q"), py::arg("evals"));

    m.def("share", [](const Rows& secret, std::uint64_t q, std::size_t n, std::size_t k, std::size_t t,
                      const std::string& side, std::uint64_t seed) {
        const auto f = make_field(q);
        RngStream rng(seed, 0);
        std::vector<Rows> out;
        for (const auto& s : make_shares(to_matrix(f, secret), {n, k, t, side_from_name(side)}, rng).first)
            out.push_back(to_rows(s.payload));
        return out;
    }, py::arg("secret"), py::arg("q"), py::arg("n"), py::arg("k"), py::arg("t"), py::arg("side") = "left",
       py::arg("seed") = 1);
    m.def("reconstruct", [](const std::vector<Rows>& payloads, std::uint64_t q, std::size_t k, std::size_t t,
                            const std::string& side) {
        const auto f = make_field(q);
        const ShareParams p{payloads.size(), k, t, side_from_name(side)};
        ShareSet set;
        for (std::size_t i = 0; i < payloads.size(); ++i) set.push_back({p, i + 1, to_matrix(f, payloads[i]), ""});
        return to_rows(decode_shares(set));
    }, py::arg("payloads"), py::arg("q"), py::arg("k"), py::arg("t"), py::arg("side") = "left");

    m.def("_product", &product_run, py::arg("a"), py::arg("b"), py::arg("q"), py::arg("n"), py::arg("t"),
          py::arg("seed"), py::arg("variant"));
    m.def("_run", [](const std::string& descriptor) {
        const auto d = nlohmann::json::parse(descriptor);
        ProtocolOutcome o;
        {
            py::gil_scoped_release release;
            o = run_protocol(d);
        }
        nlohmann::json out = {{"report", to_json(o.report)}};
        if (o.result) out["result"] = matrix_to_json(*o.result);
        if (o.expected) out["expected"] = matrix_to_json(*o.expected);
        return out.dump();
    }, py::arg("descriptor"));

    m.def("_upload_comparison", [](std::size_t n, std::size_t t_max) {
        nlohmann::json rows = nlohmann::json::array();
        auto cell = [](const std::optional<Rational>& r) { return r ? nlohmann::json(to_string(*r)) : nlohmann::json(); };
        for (const auto& r : upload_comparison(n, t_max))
            rows.push_back({{"t", r.T}, {"proposed", cell(r.proposed)}, {"own_data", cell(r.own_data)},
                            {"secure_matdot", cell(r.secure_matdot)}, {"row_by_column", cell(r.row_by_column)}});
        return rows.dump();
    }, py::arg("n"), py::arg("t_max"));
    m.def("_audit_exhaustive", [](std::size_t n, std::size_t k, std::size_t t, const std::string& side,
                                  std::uint64_t q, std::size_t rows, std::size_t cols,
                                  std::optional<std::size_t> colluders) {
        py::gil_scoped_release release;
        return to_json(secrecy_exhaustive({n, k, t, side_from_name(side)}, q, rows, cols, colluders)).dump();
    }, py::arg("n"), py::arg("k"), py::arg("t"), py::arg("side"), py::arg("q"), py::arg("rows"), py::arg("cols"),
       py::arg("colluders") = py::none());
}
