#include "sdmc/error.hpp"

namespace sdmc {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_parameters: return "invalid-parameters";
        case Errc::dimension_mismatch: return "dimension-mismatch";
        case Errc::field_mismatch: return "field-mismatch";
        case Errc::indivisible_dimension: return "indivisible-dimension";
        case Errc::order_not_dividing: return "order-not-dividing";
        case Errc::search_bound_exceeded: return "search-bound-exceeded";
        case Errc::length_mismatch: return "length-mismatch";
        case Errc::duplicate_abscissa: return "duplicate-abscissa";
        case Errc::insufficient_points: return "insufficient-points";
        case Errc::singular_matrix: return "singular-matrix";
        case Errc::missing_share: return "missing-share";
        case Errc::tag_mismatch: return "tag-mismatch";
        case Errc::param_mismatch: return "param-mismatch";
        case Errc::illegal_conversion: return "illegal-conversion";
        case Errc::insufficient_groups: return "insufficient-groups";
        case Errc::state_space_too_large: return "state-space-too-large";
        case Errc::parse_error: return "parse-error";
    }
    return "unknown";
}

}  // namespace sdmc
