#include "sdmc/matrix.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sdmc/error.hpp"

namespace sdmc {

namespace {

std::string shape(const MatrixFq& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

}  // namespace

MatrixFq::MatrixFq(FieldPtr field, std::size_t rows, std::size_t cols)
    : field_(std::move(field)), rows_(rows), cols_(cols), data_(rows * cols) {}

MatrixFq::MatrixFq(FieldPtr field, std::size_t rows, std::size_t cols, std::vector<Fe> data)
    : field_(std::move(field)), rows_(rows), cols_(cols), data_(std::move(data)) {
    require(data_.size() == rows_ * cols_, Errc::length_mismatch,
            "matrix data length " + std::to_string(data_.size()) + " != " + std::to_string(rows_ * cols_));
    for (Fe x : data_) require(x.v < field_->q(), Errc::invalid_parameters, "entry not reduced mod q");
}

MatrixFq MatrixFq::zeros(FieldPtr field, std::size_t rows, std::size_t cols) {
    return MatrixFq(std::move(field), rows, cols);
}

MatrixFq MatrixFq::identity(FieldPtr field, std::size_t n) {
    MatrixFq m(std::move(field), n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Fe{1};
    return m;
}

MatrixFq MatrixFq::from_ints(FieldPtr field, std::size_t rows, std::size_t cols,
                             std::span<const std::int64_t> values) {
    require(values.size() == rows * cols, Errc::length_mismatch, "value count does not match shape");
    std::vector<Fe> data;
    data.reserve(values.size());
    for (auto v : values) data.push_back(field->from_int(v));
    return MatrixFq(std::move(field), rows, cols, std::move(data));
}

bool operator==(const MatrixFq& a, const MatrixFq& b) noexcept {
    if (!a.same_shape(b)) return false;
    if ((a.field_ == nullptr) != (b.field_ == nullptr)) return false;
    if (a.field_ && a.field_->q() != b.field_->q()) return false;
    return a.data_ == b.data_;
}

void require_same_field(const MatrixFq& a, const MatrixFq& b) {
    require(a.field_ptr() && b.field_ptr() && a.field().q() == b.field().q(), Errc::field_mismatch,
            "operands live in different fields");
}

MatrixFq mat_mul(const MatrixFq& a, const MatrixFq& b) {
    require_same_field(a, b);
    require(a.cols() == b.rows(), Errc::dimension_mismatch, "cannot multiply " + shape(a) + " by " + shape(b));
    const Field& f = a.field();
    MatrixFq c(a.field_ptr(), a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Fe aik = a(i, k);
            if (aik.v == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) = f.add(c(i, j), f.mul(aik, b(k, j)));
        }
    }
    return c;
}

MatrixFq mat_add(const MatrixFq& a, const MatrixFq& b) {
    require_same_field(a, b);
    require(a.same_shape(b), Errc::dimension_mismatch, "cannot add " + shape(a) + " and " + shape(b));
    MatrixFq c = a;
    const Field& f = a.field();
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] = f.add(a.data()[i], b.data()[i]);
    return c;
}

MatrixFq mat_sub(const MatrixFq& a, const MatrixFq& b) {
    require_same_field(a, b);
    require(a.same_shape(b), Errc::dimension_mismatch, "cannot subtract " + shape(b) + " from " + shape(a));
    MatrixFq c = a;
    const Field& f = a.field();
    for (std::size_t i = 0; i < c.size(); ++i) c.data()[i] = f.sub(a.data()[i], b.data()[i]);
    return c;
}

MatrixFq mat_scale(Fe s, const MatrixFq& a) {
    MatrixFq c = a;
    const Field& f = a.field();
    for (auto& x : c.data()) x = f.mul(s, x);
    return c;
}

void axpy_inplace(MatrixFq& a, Fe s, const MatrixFq& b) {
    require_same_field(a, b);
    require(a.same_shape(b), Errc::dimension_mismatch, "axpy shape mismatch " + shape(a) + " vs " + shape(b));
    const Field& f = a.field();
    auto dst = a.data();
    auto src = b.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = f.add(dst[i], f.mul(s, src[i]));
}

MatrixFq transpose(const MatrixFq& a) {
    MatrixFq t(a.field_ptr(), a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

BlockGrid grid_partition(const MatrixFq& a, std::size_t r, std::size_t c) {
    require(r >= 1 && c >= 1, Errc::invalid_parameters, "grid must have at least one block");
    require(a.rows() % r == 0, Errc::indivisible_dimension,
            std::to_string(a.rows()) + " rows not divisible by " + std::to_string(r));
    require(a.cols() % c == 0, Errc::indivisible_dimension,
            std::to_string(a.cols()) + " cols not divisible by " + std::to_string(c));
    const std::size_t br = a.rows() / r, bc = a.cols() / c;
    BlockGrid g{r, c, {}};
    g.blocks.reserve(r * c);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            MatrixFq blk(a.field_ptr(), br, bc);
            for (std::size_t x = 0; x < br; ++x)
                for (std::size_t y = 0; y < bc; ++y) blk(x, y) = a(i * br + x, j * bc + y);
            g.blocks.push_back(std::move(blk));
        }
    }
    return g;
}

MatrixFq grid_assemble(const BlockGrid& g) {
    require(!g.blocks.empty() && g.blocks.size() == g.block_rows * g.block_cols, Errc::invalid_parameters,
            "malformed block grid");
    const auto& first = g.blocks.front();
    for (const auto& b : g.blocks)
        require(b.same_shape(first), Errc::dimension_mismatch, "block grid tiles differ in shape");
    const std::size_t br = first.rows(), bc = first.cols();
    MatrixFq a(first.field_ptr(), br * g.block_rows, bc * g.block_cols);
    for (std::size_t i = 0; i < g.block_rows; ++i)
        for (std::size_t j = 0; j < g.block_cols; ++j) {
            const auto& blk = g.at(i, j);
            for (std::size_t x = 0; x < br; ++x)
                for (std::size_t y = 0; y < bc; ++y) a(i * br + x, j * bc + y) = blk(x, y);
        }
    return a;
}

std::vector<MatrixFq> partition_cols(const MatrixFq& a, std::size_t k) {
    return std::move(grid_partition(a, 1, k).blocks);
}

std::vector<MatrixFq> partition_rows(const MatrixFq& b, std::size_t k) {
    return std::move(grid_partition(b, k, 1).blocks);
}

MatrixFq concat_cols(std::span<const MatrixFq> blocks) {
    require(!blocks.empty(), Errc::invalid_parameters, "nothing to concatenate");
    std::size_t cols = 0;
    for (const auto& b : blocks) {
        require(b.rows() == blocks[0].rows(), Errc::dimension_mismatch, "row counts differ in concat");
        cols += b.cols();
    }
    MatrixFq out(blocks[0].field_ptr(), blocks[0].rows(), cols);
    std::size_t off = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, off + j) = b(i, j);
        off += b.cols();
    }
    return out;
}

MatrixFq stack_rows(std::span<const MatrixFq> blocks) {
    require(!blocks.empty(), Errc::invalid_parameters, "nothing to stack");
    std::size_t rows = 0;
    for (const auto& b : blocks) {
        require(b.cols() == blocks[0].cols(), Errc::dimension_mismatch, "column counts differ in stack");
        rows += b.rows();
    }
    MatrixFq out(blocks[0].field_ptr(), rows, blocks[0].cols());
    std::size_t off = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) out(off + i, j) = b(i, j);
        off += b.rows();
    }
    return out;
}

MatrixFq random_matrix(const FieldPtr& field, std::size_t rows, std::size_t cols, RngStream& rng) {
    MatrixFq m(field, rows, cols);
    for (auto& x : m.data()) x = rng.uniform(*field);
    return m;
}

MatrixFq pad_to(const MatrixFq& a, std::size_t rows, std::size_t cols) {
    require(rows >= a.rows() && cols >= a.cols(), Errc::invalid_parameters, "pad target smaller than matrix");
    MatrixFq out(a.field_ptr(), rows, cols);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    return out;
}

MatrixFq truncate_to(const MatrixFq& a, std::size_t rows, std::size_t cols) {
    require(rows <= a.rows() && cols <= a.cols(), Errc::invalid_parameters, "truncate target larger than matrix");
    MatrixFq out(a.field_ptr(), rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) out(i, j) = a(i, j);
    return out;
}

MatrixFq plaintext_solve(const MatrixFq& a, const MatrixFq& b) {
    require_same_field(a, b);
    require(a.rows() == a.cols(), Errc::dimension_mismatch, "coefficient matrix " + shape(a) + " not square");
    require(b.rows() == a.rows(), Errc::dimension_mismatch, "right-hand side " + shape(b) + " does not match");
    const Field& f = a.field();
    const std::size_t n = a.rows(), p = b.cols();
    MatrixFq aug = concat_cols(std::vector<MatrixFq>{a, b});
    const std::size_t w = n + p;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && aug(piv, col).v == 0) ++piv;
        require(piv < n, Errc::singular_matrix, "no pivot in column " + std::to_string(col));
        if (piv != col)
            for (std::size_t j = 0; j < w; ++j) std::swap(aug(piv, j), aug(col, j));
        const Fe inv = f.inv(aug(col, col));
        for (std::size_t j = 0; j < w; ++j) aug(col, j) = f.mul(aug(col, j), inv);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || aug(r, col).v == 0) continue;
            const Fe factor = aug(r, col);
            for (std::size_t j = 0; j < w; ++j) aug(r, j) = f.sub(aug(r, j), f.mul(factor, aug(col, j)));
        }
    }
    MatrixFq x(a.field_ptr(), n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) x(i, j) = aug(i, n + j);
    return x;
}

MatrixFq plaintext_inverse(const MatrixFq& a) {
    return plaintext_solve(a, MatrixFq::identity(a.field_ptr(), a.rows()));
}

MatrixFq mat_pow(const MatrixFq& a, std::uint64_t r) {
    require(a.rows() == a.cols(), Errc::dimension_mismatch, "power of non-square matrix");
    MatrixFq result = MatrixFq::identity(a.field_ptr(), a.rows());
    MatrixFq base = a;
    while (r) {
        if (r & 1) result = mat_mul(result, base);
        r >>= 1;
        if (r) base = mat_mul(base, base);
    }
    return result;
}

std::size_t rank(const MatrixFq& a) {
    const Field& f = a.field();
    MatrixFq m = a;
    std::size_t rk = 0;
    for (std::size_t col = 0; col < m.cols() && rk < m.rows(); ++col) {
        std::size_t piv = rk;
        while (piv < m.rows() && m(piv, col).v == 0) ++piv;
        if (piv == m.rows()) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(rk, j));
        const Fe inv = f.inv(m(rk, col));
        for (std::size_t r = rk + 1; r < m.rows(); ++r) {
            const Fe factor = f.mul(m(r, col), inv);
            if (factor.v == 0) continue;
            for (std::size_t j = col; j < m.cols(); ++j) m(r, j) = f.sub(m(r, j), f.mul(factor, m(rk, j)));
        }
        ++rk;
    }
    return rk;
}

nlohmann::json matrix_to_json(const MatrixFq& m) {
    nlohmann::json data = nlohmann::json::array();
    for (Fe x : m.data()) data.push_back(x.v);
    return {{"q", m.field().q()}, {"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

MatrixFq matrix_from_json(const nlohmann::json& j, const FieldPtr& field) {
    try {
        const auto q = j.at("q").get<std::uint64_t>();
        const auto rows = j.at("rows").get<std::size_t>();
        const auto cols = j.at("cols").get<std::size_t>();
        const auto& data = j.at("data");
        require(data.is_array() && data.size() == rows * cols, Errc::parse_error,
                "matrix data must hold rows*cols entries");
        FieldPtr fp = field ? field : make_field(q);
        require(fp->q() == q, Errc::field_mismatch,
                "matrix file declares q=" + std::to_string(q) + " but field is q=" + std::to_string(fp->q()));
        std::vector<Fe> values;
        values.reserve(data.size());
        for (const auto& v : data) {
            const auto x = v.get<std::uint64_t>();
            require(x < q, Errc::parse_error, "entry " + std::to_string(x) + " not below q");
            values.emplace_back(x);
        }
        return MatrixFq(fp, rows, cols, std::move(values));
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::parse_error, e.what());
    }
}

MatrixFq load_matrix(const std::string& path, const FieldPtr& field) {
    std::ifstream in(path);
    require(in.good(), Errc::parse_error, "cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(Errc::parse_error, path + ": " + e.what());
    }
    return matrix_from_json(j, field);
}

void save_matrix(const std::string& path, const MatrixFq& m) {
    std::ofstream out(path);
    require(out.good(), Errc::parse_error, "cannot write " + path);
    out << matrix_to_json(m).dump() << '\n';
}

std::string to_string(const MatrixFq& m) {
    std::ostringstream os;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << '[';
        for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j).v;
        os << "]\n";
    }
    return os.str();
}

}  // namespace sdmc
