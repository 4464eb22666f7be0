#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sdmc {

enum class Errc {
    invalid_parameters,
    dimension_mismatch,
    field_mismatch,
    indivisible_dimension,
    order_not_dividing,
    search_bound_exceeded,
    length_mismatch,
    duplicate_abscissa,
    insufficient_points,
    singular_matrix,
    missing_share,
    tag_mismatch,
    param_mismatch,
    illegal_conversion,
    insufficient_groups,
    state_space_too_large,
    parse_error,
};

std::string_view errc_name(Errc code) noexcept;

// All library failures are reported through this type; `code()` drives the
// CLI exit-status mapping.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, Errc code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace sdmc
