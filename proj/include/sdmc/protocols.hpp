#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sdmc/matrix.hpp"
#include "sdmc/sharing.hpp"
#include "sdmc/simnet.hpp"

namespace sdmc {

// How the servers hand a product to the user. Direct sends the raw product
// shares (the user averages them); UserSecure first runs the re-sharing round
// so that the user only sees (N, N-T, T) left shares of the result.
enum class Delivery { Direct, UserSecure };

// ---------------------------------------------------------------------------
// Server-side share operations. Each one that moves data opens exactly one
// communication round on `net`.

// Server i computes [[A]]_i^L [[B]]_i^R. One computation round.
ShareSet multiply_shares(SimNet& net, const ShareSet& left, const ShareSet& right, const std::string& tag);

// Every server shares its payload under `target` (Left or Right), all shares
// are exchanged, and each receiver averages: the result shares the constant
// coefficient of the input polynomial.
ShareSet reshare_product(SimNet& net, const ShareSet& product, const ShareParams& target, const std::string& tag);

// Re-sharing from product shares to (N, N-T, T) left shares.
ShareSet usersecure_round(SimNet& net, const ShareSet& product, std::size_t T, const std::string& tag = "C");

/// Converts (N, K1, T1) shares of either side into `target` shares. Left to
/// left and right to right are allowed only when K1 = 1 (illegal_conversion
/// otherwise). Product shares convert to either side.
ShareSet convert_shares(SimNet& net, const ShareSet& in, const ShareParams& target, const std::string& tag);

/// Left shares of A to `target` left shares of A^T.
ShareSet transpose_shares(SimNet& net, const ShareSet& left, const ShareParams& target, const std::string& tag);

/// Left shares of A^{-1} from right shares of a square A, by publishing a
/// masked product P = Phi A. Phi is the sum of one random matrix per server.
/// A singular P is retried with a fresh mask up to kMaskRetries times before
/// singular_matrix is reported.
inline constexpr int kMaskRetries = 32;
ShareSet masked_inverse(SimNet& net, const ShareSet& right, std::size_t T, const std::string& tag = "Ainv");

// Reconstruction phase helpers: gather every server's share at the user and
// decode. Missing shares (stragglers) surface as missing_share.
MatrixFq deliver(SimNet& net, const ShareSet& shares);

// ---------------------------------------------------------------------------
// Composable secret values on the servers. Every value is kept in whichever
// of the three forms it was produced in; the other forms are derived on
// demand (and cached) with the conversion rounds above. All shares use
// K = N - 2T.

class SecureEngine {
public:
    enum class Form { Left, Right, Product };

    class Value {
    public:
        std::size_t rows() const;
        std::size_t cols() const;
        const std::string& tag() const;

    private:
        friend class SecureEngine;
        struct State;
        std::shared_ptr<State> s_;
    };

    SecureEngine(SimNet& net, std::size_t T);

    std::size_t K() const noexcept { return K_; }
    std::size_t T() const noexcept { return T_; }
    SimNet& net() noexcept { return net_; }

    ShareParams params(Side side) const { return {net_.n(), K_, T_, side}; }

    // Sharing phase. `source` 0 means the user acts as dealer.
    Value upload(std::size_t source, const MatrixFq& m, Form form, const std::string& tag);
    Value adopt(ShareSet shares, Form form, std::size_t rows, std::size_t cols, const std::string& tag);

    const ShareSet& left(const Value& v);
    const ShareSet& right(const Value& v);

    Value mul(const Value& a, const Value& b);
    Value add(const Value& a, const Value& b);
    Value sub(const Value& a, const Value& b);
    Value scale(Fe c, const Value& a);
    Value add_public(const Value& a, const MatrixFq& m);
    Value transpose(const Value& a);
    Value inverse(const Value& a);
    Value power(const Value& a, std::uint64_t r);
    // Column concatenation of right-shared values.
    Value hconcat(std::span<const Value> parts);

    MatrixFq reveal(const Value& v, Delivery delivery = Delivery::Direct);

    std::size_t multiplications() const noexcept { return multiplications_; }

private:
    const ShareSet* cached(const Value& v, Form f) const;
    Value make(Form form, ShareSet shares, std::size_t rows, std::size_t cols, std::string tag);
    std::string fresh_tag(const std::string& base);

    SimNet& net_;
    std::size_t K_;
    std::size_t T_;
    std::size_t multiplications_ = 0;
    std::size_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// End-to-end protocols. Each uploads its inputs, records input/output sizes
// on `net` and returns the matrix the user reconstructs. Costs and rounds are
// read from net.report().

MatrixFq sdmm2(SimNet& net, const MatrixFq& a, const MatrixFq& b, std::size_t T,
               Delivery delivery = Delivery::Direct);

// The user deals both inputs with K = N - T, keeps the keys and subtracts
// sum R_l S_l from the averaged products.
MatrixFq sdmm2_own_data(SimNet& net, const MatrixFq& a, const MatrixFq& b, std::size_t T);

// Bivariate shares on servers 1..N1*N2 (any further servers stay idle).
// Failed servers are taken from net.failed(); insufficient_groups when fewer
// than K2*K3 complete groups report back.
MatrixFq straggler_sdmm(SimNet& net, const MatrixFq& a, const MatrixFq& b, const BivariateLayout& layout);

std::size_t straggler_group_threshold(const BivariateLayout& layout);
std::size_t straggler_worst_case_threshold(std::size_t n_servers, const BivariateLayout& layout);

MatrixFq chain_multiply(SimNet& net, std::span<const MatrixFq> chain, std::size_t T,
                        Delivery delivery = Delivery::Direct);

// A^r; only left shares of A are uploaded. Multiplication rounds equal
// floor(log2 r) + popcount(r) - 1.
MatrixFq exponentiate(SimNet& net, const MatrixFq& a, std::uint64_t r, std::size_t T);

MatrixFq secure_inverse(SimNet& net, const MatrixFq& a, std::size_t T);

// Newton steps X <- X (2I - A X) on secret shares of A and X0; returns X_k.
MatrixFq newton_inverse_rounds(SimNet& net, const MatrixFq& a, const MatrixFq& x0, std::size_t k, std::size_t T);

// X = A^{-1} B via masked inversion and one secure multiplication.
MatrixFq solve_linear(SimNet& net, const MatrixFq& a, const MatrixFq& b, std::size_t T);

// Upload and download both at N/(N-T): inputs arrive as (N, N-T, T) left
// shares, are converted to K = N-2T for the product and the result is
// re-shared to (N, N-T, T) before delivery.
MatrixFq optimal_cost_pipeline(SimNet& net, const MatrixFq& a, const MatrixFq& b, std::size_t T);

// ---------------------------------------------------------------------------
// Matrix expressions.

struct Expr {
    enum class Op { Input, Add, Sub, Scale, Mul, Transpose, Power, Inverse, HConcat };
    Op op = Op::Input;
    std::string name;          // Input
    std::int64_t scalar = 0;   // Scale
    std::uint64_t exponent = 0;  // Power
    std::vector<std::shared_ptr<const Expr>> args;
};
using ExprPtr = std::shared_ptr<const Expr>;

ExprPtr expr_input(std::string name);
ExprPtr expr_add(ExprPtr a, ExprPtr b);
ExprPtr expr_sub(ExprPtr a, ExprPtr b);
ExprPtr expr_scale(std::int64_t c, ExprPtr a);
ExprPtr expr_mul(ExprPtr a, ExprPtr b);
ExprPtr expr_transpose(ExprPtr a);
ExprPtr expr_power(ExprPtr a, std::uint64_t r);
ExprPtr expr_inverse(ExprPtr a);
ExprPtr expr_hconcat(std::vector<ExprPtr> parts);

/// Grammar: sums and differences of products; a product factor is a name, an
/// integer scalar, a parenthesized expression or one of inv(e), tr(e),
/// hcat(e, ...); postfix ^r raises to a power and ^-1 inverts. Example:
/// "A1^2*A2 + 2*inv(A3)".
ExprPtr parse_expression(const std::string& text);
std::string to_string(const Expr& e);
std::set<std::string> expression_inputs(const Expr& e);

// Plain evaluation over F_q.
MatrixFq eval_plain(const Expr& e, const std::map<std::string, MatrixFq>& inputs);

/// Secure evaluation. Inputs are uploaded as right shares, one source each
/// in name order; the network needs at least that many sources.
MatrixFq eval_matrix_polynomial(SimNet& net, const Expr& e, const std::map<std::string, MatrixFq>& inputs,
                                std::size_t T, Delivery delivery = Delivery::Direct);

// ---------------------------------------------------------------------------
// Descriptor replay.

struct ProtocolOutcome {
    std::optional<MatrixFq> result;
    std::optional<MatrixFq> expected;  // plain evaluation, when available
    CostReport report;
    MessageLog log;
};

/// Runs a protocol described as JSON:
///   {"protocol": "sdmm2" | "own_data" | "chain" | "straggler" | "invert" |
///                "power" | "newton" | "solve" | "polyeval" | "pipeline" | "noop",
///    "n": N, "t": T, "q": q, "seed": s, "inputs": [matrix, ...] or {name: matrix},
///    ...protocol options}
/// Matrices are inline matrix JSON objects or paths to such files.
ProtocolOutcome run_protocol(const nlohmann::json& descriptor);

}  // namespace sdmc
