#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdmc/field.hpp"
#include "sdmc/rng.hpp"

namespace sdmc {

/// Dense row-major matrix over F_q.
class MatrixFq {
public:
    MatrixFq() = default;
    MatrixFq(FieldPtr field, std::size_t rows, std::size_t cols);
    MatrixFq(FieldPtr field, std::size_t rows, std::size_t cols, std::vector<Fe> data);

    static MatrixFq zeros(FieldPtr field, std::size_t rows, std::size_t cols);
    static MatrixFq identity(FieldPtr field, std::size_t n);
    // Entries reduced mod q; row-major.
    static MatrixFq from_ints(FieldPtr field, std::size_t rows, std::size_t cols,
                              std::span<const std::int64_t> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    const FieldPtr& field_ptr() const noexcept { return field_; }
    const Field& field() const noexcept { return *field_; }

    Fe operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }
    Fe& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }

    std::span<const Fe> data() const noexcept { return data_; }
    std::span<Fe> data() noexcept { return data_; }

    bool same_shape(const MatrixFq& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    friend bool operator==(const MatrixFq& a, const MatrixFq& b) noexcept;

private:
    FieldPtr field_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Fe> data_;
};

/// r x c array of equally shaped tiles.
struct BlockGrid {
    std::size_t block_rows = 0;
    std::size_t block_cols = 0;
    std::vector<MatrixFq> blocks;  // row-major over the grid

    const MatrixFq& at(std::size_t i, std::size_t j) const { return blocks[i * block_cols + j]; }
    MatrixFq& at(std::size_t i, std::size_t j) { return blocks[i * block_cols + j]; }
};

void require_same_field(const MatrixFq& a, const MatrixFq& b);

MatrixFq mat_mul(const MatrixFq& a, const MatrixFq& b);
MatrixFq mat_add(const MatrixFq& a, const MatrixFq& b);
MatrixFq mat_sub(const MatrixFq& a, const MatrixFq& b);
MatrixFq mat_scale(Fe c, const MatrixFq& a);
MatrixFq transpose(const MatrixFq& a);

// a += c * b, in place.
void axpy_inplace(MatrixFq& a, Fe c, const MatrixFq& b);

std::vector<MatrixFq> partition_cols(const MatrixFq& a, std::size_t k);
std::vector<MatrixFq> partition_rows(const MatrixFq& b, std::size_t k);
MatrixFq concat_cols(std::span<const MatrixFq> blocks);
MatrixFq stack_rows(std::span<const MatrixFq> blocks);

BlockGrid grid_partition(const MatrixFq& a, std::size_t r, std::size_t c);
MatrixFq grid_assemble(const BlockGrid& grid);

MatrixFq random_matrix(const FieldPtr& field, std::size_t rows, std::size_t cols, RngStream& rng);

// Zero-pads to (rows, cols); both must be at least the current shape.
MatrixFq pad_to(const MatrixFq& a, std::size_t rows, std::size_t cols);
MatrixFq truncate_to(const MatrixFq& a, std::size_t rows, std::size_t cols);

/// X with AX = B by Gauss-Jordan elimination, pivot = first nonzero entry in
/// the column. Throws singular_matrix when some column has no pivot.
MatrixFq plaintext_solve(const MatrixFq& a, const MatrixFq& b);
MatrixFq plaintext_inverse(const MatrixFq& a);
MatrixFq mat_pow(const MatrixFq& a, std::uint64_t r);
std::size_t rank(const MatrixFq& a);

// {"q", "rows", "cols", "data"}; load validates every entry < q.
nlohmann::json matrix_to_json(const MatrixFq& m);
MatrixFq matrix_from_json(const nlohmann::json& j, const FieldPtr& field = nullptr);
MatrixFq load_matrix(const std::string& path, const FieldPtr& field = nullptr);
void save_matrix(const std::string& path, const MatrixFq& m);

std::string to_string(const MatrixFq& m);

}  // namespace sdmc
