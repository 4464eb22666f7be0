#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdmc/matrix.hpp"
#include "sdmc/rng.hpp"

namespace sdmc {

// Product marks the evaluations of a product polynomial (the constant term is
// the secret); it is produced by servers, never by a dealer.
enum class Side { Left, Right, RightOwnData, BivariateA, BivariateB, Product };

std::string_view side_name(Side s) noexcept;
Side side_from_name(std::string_view name);

struct ShareParams {
    std::size_t N = 0;
    std::size_t K = 1;
    std::size_t T = 0;
    Side side = Side::Left;

    // Left: K+T <= N. Right: K+2T <= N. RightOwnData: K+T <= N.
    void validate() const;

    friend bool operator==(const ShareParams&, const ShareParams&) = default;
};

struct Share {
    ShareParams params;
    std::size_t server_index = 0;  // 1-based
    MatrixFq payload;
    std::string object_tag;
};

struct SecretKeyBundle {
    std::vector<MatrixFq> keys;
};

using ShareSet = std::vector<Share>;

/// Polynomial exponents (mod N) at which the K data blocks and T key blocks sit.
struct ExponentLayout {
    std::vector<std::size_t> data;
    std::vector<std::size_t> keys;
};

ExponentLayout exponent_layout(const ShareParams& p);

// Entrywise DFT / IDFT of a length-N sequence of equally shaped matrices.
std::vector<MatrixFq> evaluate_at_roots(std::span<const MatrixFq> coeffs);
std::vector<MatrixFq> interpolate_from_roots(std::span<const MatrixFq> evals);

/// Shares of `secret` with caller-supplied key blocks (T of them, shaped like
/// one data block). This is the deterministic core behind every dealer call.
ShareSet encode_shares(const MatrixFq& secret, const ShareParams& params, std::span<const MatrixFq> keys,
                       std::string tag = {});

std::pair<ShareSet, SecretKeyBundle> make_left_shares(const MatrixFq& a, std::size_t N, std::size_t K,
                                                      std::size_t T, RngStream& rng, std::string tag = {});
std::pair<ShareSet, SecretKeyBundle> make_right_shares(const MatrixFq& b, std::size_t N, std::size_t K,
                                                       std::size_t T, RngStream& rng, std::string tag = {});
std::pair<ShareSet, SecretKeyBundle> make_right_shares_own(const MatrixFq& b, std::size_t N, std::size_t K,
                                                           std::size_t T, RngStream& rng,
                                                           std::string tag = {});
std::pair<ShareSet, SecretKeyBundle> make_shares(const MatrixFq& secret, const ShareParams& params,
                                                 RngStream& rng, std::string tag = {});

/// Share of a public matrix with all keys zero; every server can compute its
/// own copy locally.
Share public_share(const MatrixFq& value, const ShareParams& params, std::size_t server_index,
                   std::string tag = {});

/// N^{-1} * sum of payloads: the constant coefficient mod x^N - 1.
MatrixFq reconstruct_constant(std::span<const Share> shares);

/// Entrywise IDFT of the N payloads, ordered by server index.
std::vector<MatrixFq> reconstruct_all_coeffs(std::span<const Share> shares);

/// Recovers the shared matrix from a complete Left / Right / RightOwnData /
/// Product share set.
MatrixFq decode_shares(std::span<const Share> shares);

Share share_add(const Share& a, const Share& b);
Share share_sub(const Share& a, const Share& b);
Share share_scale(Fe c, const Share& a);

ShareSet share_add(std::span<const Share> a, std::span<const Share> b);
ShareSet share_scale(Fe c, std::span<const Share> a);

nlohmann::json share_to_json(const Share& s);
Share share_from_json(const nlohmann::json& j, const FieldPtr& field = nullptr);

// ---------------------------------------------------------------------------
// Bivariate shares for straggler-tolerant multiplication.

/// A is a K2 x K1 block grid, B a K1 x K3 grid. Server (r, s) with r in
/// 0..N1-1, s in 1..N2 receives evaluations at (alpha_{N1}^r, beta_s) and has
/// id (s-1) N1 + r + 1.
struct BivariateLayout {
    std::size_t K1 = 1, K2 = 1, K3 = 1, T = 0;
    std::size_t N1 = 1, N2 = 1;
    std::vector<Fe> betas;
    bool own_data = false;

    static BivariateLayout make(const Field& f, std::size_t K1, std::size_t K2, std::size_t K3, std::size_t T,
                                std::size_t N2, bool own_data, std::vector<Fe> betas = {});

    void validate(const Field& f) const;
    std::size_t server_count() const noexcept { return N1 * N2; }
    std::size_t server_id(std::size_t r, std::size_t s) const noexcept { return (s - 1) * N1 + r + 1; }
    std::size_t group_of(std::size_t server_id) const noexcept { return (server_id - 1) / N1 + 1; }
};

// Default beta_s: the s-th smallest nonzero field element.
std::vector<Fe> default_betas(const Field& f, std::size_t n2);

std::pair<ShareSet, SecretKeyBundle> make_bivariate_shares_A(const MatrixFq& a, const BivariateLayout& layout,
                                                             RngStream& rng, std::string tag = {});
std::pair<ShareSet, SecretKeyBundle> make_bivariate_shares_B(const MatrixFq& b, const BivariateLayout& layout,
                                                             RngStream& rng, std::string tag = {});

// Key grids in row-major order: R is K2 x T, S is T x K3.
ShareSet encode_bivariate_A(const MatrixFq& a, const BivariateLayout& layout, std::span<const MatrixFq> r_keys,
                            std::string tag = {});
ShareSet encode_bivariate_B(const MatrixFq& b, const BivariateLayout& layout, std::span<const MatrixFq> s_keys,
                            std::string tag = {});

}  // namespace sdmc
