#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdmc/matrix.hpp"
#include "sdmc/rational.hpp"
#include "sdmc/sharing.hpp"
#include "sdmc/simnet.hpp"

namespace sdmc {

enum class AuditMode { Exhaustive, Statistical };

struct SecrecyVerdict {
    std::string check;
    std::size_t N = 0, K = 0, T = 0;
    std::uint64_t q = 0;
    std::size_t rows = 0, cols = 0;
    std::size_t colluders = 0;
    Side side = Side::Left;
    AuditMode mode = AuditMode::Exhaustive;
    bool pass = false;
    std::uint64_t key_assignments = 0;  // per input (exhaustive) or samples per input (statistical)
    std::uint64_t inputs = 0;
    std::uint64_t colluding_sets = 0;
    double min_p_value = 1.0;  // statistical mode only
    std::string evidence;
};

nlohmann::json to_json(const SecrecyVerdict& v);

inline constexpr std::uint64_t kMaxKeyAssignments = 1'000'000;
inline constexpr std::uint64_t kMaxAuditStates = 20'000'000;
inline constexpr std::uint64_t kDefaultSamples = 100'000;
inline constexpr double kDefaultAlpha = 0.01;

/// Enumerates every input matrix of shape rows x cols and every key
/// assignment, and compares the views of every colluding set of size
/// `colluders` (default T). Passes iff each set's view distribution is uniform
/// and identical for all inputs. state_space_too_large beyond the caps above.
SecrecyVerdict secrecy_exhaustive(const ShareParams& p, std::uint64_t q, std::size_t rows, std::size_t cols,
                                  std::optional<std::size_t> colluders = {});

/// Sampled keys for two inputs (zero and a random matrix); chi-square
/// uniformity of each colluding set's view, projected onto as many leading
/// symbols as the sample size supports. Passes iff the smallest p-value
/// exceeds alpha divided by the number of tests.
SecrecyVerdict secrecy_statistical(const ShareParams& p, std::uint64_t q, std::size_t rows, std::size_t cols,
                                   std::optional<std::size_t> colluders = {}, std::uint64_t samples = kDefaultSamples,
                                   std::uint64_t seed = 1, double alpha = kDefaultAlpha);

/// Security against the user for 1x1 inputs embedded as A = [a 0 ...] (1 x K)
/// and B = b e_11 (K x (N-T)), K = N-2T, run through the user-secure round.
/// Both dealers' keys are enumerated; the N servers' re-sharing keys enter
/// the view linearly and are accounted for exactly as a uniform coset of
/// their span. The user's view distribution must be identical for all pairs,
/// which must share the product ab.
SecrecyVerdict secrecy_user_exhaustive(std::size_t N, std::size_t T, std::uint64_t q,
                                       const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs);

/// The same question answered by running the full network protocol with
/// independent seeds and a chi-square homogeneity test on hashed views.
SecrecyVerdict secrecy_user_statistical(std::size_t N, std::size_t T, std::uint64_t q,
                                        const std::vector<std::pair<std::uint64_t, std::uint64_t>>& pairs,
                                        std::uint64_t samples = kDefaultSamples, std::uint64_t seed = 1,
                                        double alpha = kDefaultAlpha);

struct LeakageReport {
    std::size_t N = 0, T = 0;
    std::uint64_t q = 0;
    std::size_t pairs = 0;
    std::uint64_t key_assignments = 0;
    double mutual_information_bits = 0.0;
    std::string evidence;
};

nlohmann::json to_json(const LeakageReport& r);

/// Exact mutual information between the choice among `pairs` (uniform, all
/// with the same product) and the N raw product shares the user receives
/// without the re-sharing round. All keys enumerated.
LeakageReport raw_user_leakage(std::size_t N, std::size_t T, const std::vector<std::pair<MatrixFq, MatrixFq>>& pairs);

/// Standard demonstration pairs: A = [1 0 0], B = [c 0 0]^T against
/// A = [1 1 0], B = [c-1 1 0]^T (same product c, different cross terms).
std::vector<std::pair<MatrixFq, MatrixFq>> leakage_demo_pairs(const FieldPtr& f, std::size_t K, std::uint64_t c);

struct AliasTerm {
    std::string a_term;
    std::string b_term;
    std::size_t a_exp = 0;
    std::size_t b_exp = 0;
};

/// Pairs of a left-polynomial term and a right-polynomial term whose
/// exponents sum to 0 mod N, other than the intended A_l B_l pairs (and
/// R_l S_l when `own_data`). Exponents follow the share layouts without the
/// admissibility checks, so inadmissible (N, K, T) can be examined.
std::vector<AliasTerm> aliasing_terms(std::size_t N, std::size_t K, std::size_t T, bool own_data);

// ---------------------------------------------------------------------------
// Closed-form costs.

Rational proposed_upload_cost(std::size_t N, std::size_t T);
// Download cost of the product shares for A: m x n, B: n x p with K parts.
// The first two cases normalize by mp, the n < min(m, p) case by n(m+p-n).
Rational proposed_download_cost(std::size_t N, std::size_t K, std::size_t m, std::size_t n, std::size_t p);
Rational secure_matdot_upload_cost(std::size_t N, std::size_t T);
// Largest K whose recovery threshold min(2K^2+2T-3, K^2+KT+T-2) fits in N.
std::optional<std::pair<std::size_t, Rational>> row_by_column_upload_cost(std::size_t N, std::size_t T);

struct CostRow {
    std::string scheme;
    std::optional<Rational> chi_ul;
    std::optional<Rational> chi_dl;
    std::string note;
};

std::vector<CostRow> cost_formulas(std::size_t N, std::size_t T, std::size_t m, std::size_t n, std::size_t p);

struct UploadComparisonRow {
    std::size_t T = 0;
    std::optional<Rational> proposed;
    std::optional<Rational> own_data;
    std::optional<Rational> secure_matdot;
    std::optional<Rational> row_by_column;
};

std::vector<UploadComparisonRow> upload_comparison(std::size_t N, std::size_t t_max);

struct FormulaCheck {
    bool pass = false;
    std::string detail;
};

FormulaCheck measured_vs_formula(const CostReport& report, std::optional<Rational> chi_ul,
                                 std::optional<Rational> chi_dl = {});

}  // namespace sdmc
