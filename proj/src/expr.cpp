#include <cctype>
#include <map>
#include <optional>

#include "sdmc/error.hpp"
#include "sdmc/protocols.hpp"

namespace sdmc {

namespace {

ExprPtr node(Expr::Op op, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->args = std::move(args);
    return e;
}

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    ExprPtr parse() {
        auto e = sum();
        skip();
        require(pos_ == s_.size(), Errc::parse_error, "unexpected '" + s_.substr(pos_) + "'");
        require(!e.scalar, Errc::parse_error, "expression is a bare scalar");
        return e.expr;
    }

private:
    // A parsed item is either a matrix expression or a pending integer scalar.
    struct Item {
        ExprPtr expr;
        std::optional<std::int64_t> scalar;
    };

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    [[noreturn]] void error(const std::string& what) const {
        fail(Errc::parse_error, what + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
    }

    std::int64_t integer() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) error("expected an integer");
        return std::stoll(s_.substr(start, pos_ - start));
    }

    Item sum() {
        Item lhs = product();
        for (;;) {
            if (eat('+')) {
                lhs = {expr_add(matrix(lhs), matrix(product())), {}};
            } else if (eat('-')) {
                lhs = {expr_sub(matrix(lhs), matrix(product())), {}};
            } else {
                return lhs;
            }
        }
    }

    ExprPtr matrix(const Item& it) {
        if (it.scalar) error("scalar used where a matrix is required");
        return it.expr;
    }

    Item product() {
        Item lhs = postfix();
        while (eat('*')) {
            Item rhs = postfix();
            if (lhs.scalar && rhs.scalar)
                lhs = {nullptr, *lhs.scalar * *rhs.scalar};
            else if (lhs.scalar)
                lhs = {expr_scale(*lhs.scalar, rhs.expr), {}};
            else if (rhs.scalar)
                lhs = {expr_scale(*rhs.scalar, lhs.expr), {}};
            else
                lhs = {expr_mul(lhs.expr, rhs.expr), {}};
        }
        return lhs;
    }

    Item postfix() {
        Item it = primary();
        for (;;) {
            if (eat('^')) {
                if (eat('-')) {
                    if (integer() != 1) error("only ^-1 is supported for negative powers");
                    it = {expr_inverse(matrix(it)), {}};
                } else {
                    const auto r = integer();
                    if (r < 1) error("power must be at least 1");
                    it = {expr_power(matrix(it), static_cast<std::uint64_t>(r)), {}};
                }
            } else if (eat('\'')) {
                it = {expr_transpose(matrix(it)), {}};
            } else {
                return it;
            }
        }
    }

    Item primary() {
        skip();
        if (pos_ >= s_.size()) error("unexpected end of input");
        const char c = s_[pos_];
        if (eat('(')) {
            Item inner = sum();
            if (!eat(')')) error("expected ')'");
            return inner;
        }
        if (eat('-')) {
            Item inner = postfix();
            if (inner.scalar) return {nullptr, -*inner.scalar};
            return {expr_scale(-1, inner.expr), {}};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return {nullptr, integer()};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (eat('(')) {
                std::vector<ExprPtr> args;
                do args.push_back(matrix(sum()));
                while (eat(','));
                if (!eat(')')) error("expected ')'");
                if (name == "inv" && args.size() == 1) return {expr_inverse(args[0]), {}};
                if (name == "tr" && args.size() == 1) return {expr_transpose(args[0]), {}};
                if (name == "hcat") return {expr_hconcat(std::move(args)), {}};
                error("unknown function '" + name + "'");
            }
            return {expr_input(name), {}};
        }
        error(std::string("unexpected '") + c + "'");
    }

    std::string s_;
    std::size_t pos_ = 0;
};

using Memo = std::map<const Expr*, SecureEngine::Value>;

SecureEngine::Value eval_secure(SecureEngine& eng, const Expr& e, std::map<std::string, SecureEngine::Value>& inputs,
                                Memo& memo) {
    if (auto it = memo.find(&e); it != memo.end()) return it->second;
    const Field& f = eng.net().field();
    auto arg = [&](std::size_t k) { return eval_secure(eng, *e.args[k], inputs, memo); };
    SecureEngine::Value v;
    switch (e.op) {
        case Expr::Op::Input: {
            auto it = inputs.find(e.name);
            require(it != inputs.end(), Errc::invalid_parameters, "no input named '" + e.name + "'");
            v = it->second;
            break;
        }
        case Expr::Op::Add: v = eng.add(arg(0), arg(1)); break;
        case Expr::Op::Sub: v = eng.sub(arg(0), arg(1)); break;
        case Expr::Op::Scale: v = eng.scale(f.from_int(e.scalar), arg(0)); break;
        case Expr::Op::Mul: v = eng.mul(arg(0), arg(1)); break;
        case Expr::Op::Transpose: v = eng.transpose(arg(0)); break;
        case Expr::Op::Power: v = eng.power(arg(0), e.exponent); break;
        case Expr::Op::Inverse: v = eng.inverse(arg(0)); break;
        case Expr::Op::HConcat: {
            std::vector<SecureEngine::Value> parts;
            for (std::size_t k = 0; k < e.args.size(); ++k) parts.push_back(arg(k));
            v = eng.hconcat(parts);
            break;
        }
    }
    memo.emplace(&e, v);
    return v;
}

}  // namespace

ExprPtr expr_input(std::string name) {
    auto e = std::make_shared<Expr>();
    e->name = std::move(name);
    return e;
}
ExprPtr expr_add(ExprPtr a, ExprPtr b) { return node(Expr::Op::Add, {std::move(a), std::move(b)}); }
ExprPtr expr_sub(ExprPtr a, ExprPtr b) { return node(Expr::Op::Sub, {std::move(a), std::move(b)}); }
ExprPtr expr_mul(ExprPtr a, ExprPtr b) { return node(Expr::Op::Mul, {std::move(a), std::move(b)}); }
ExprPtr expr_transpose(ExprPtr a) { return node(Expr::Op::Transpose, {std::move(a)}); }
ExprPtr expr_inverse(ExprPtr a) { return node(Expr::Op::Inverse, {std::move(a)}); }
ExprPtr expr_hconcat(std::vector<ExprPtr> parts) { return node(Expr::Op::HConcat, std::move(parts)); }

ExprPtr expr_scale(std::int64_t c, ExprPtr a) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Scale;
    e->scalar = c;
    e->args = {std::move(a)};
    return e;
}

ExprPtr expr_power(ExprPtr a, std::uint64_t r) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Power;
    e->exponent = r;
    e->args = {std::move(a)};
    return e;
}

ExprPtr parse_expression(const std::string& text) { return Parser(text).parse(); }

std::string to_string(const Expr& e) {
    switch (e.op) {
        case Expr::Op::Input: return e.name;
        case Expr::Op::Add: return "(" + to_string(*e.args[0]) + " + " + to_string(*e.args[1]) + ")";
        case Expr::Op::Sub: return "(" + to_string(*e.args[0]) + " - " + to_string(*e.args[1]) + ")";
        case Expr::Op::Scale: return std::to_string(e.scalar) + "*" + to_string(*e.args[0]);
        case Expr::Op::Mul: return to_string(*e.args[0]) + "*" + to_string(*e.args[1]);
        case Expr::Op::Transpose: return "tr(" + to_string(*e.args[0]) + ")";
        case Expr::Op::Power: return to_string(*e.args[0]) + "^" + std::to_string(e.exponent);
        case Expr::Op::Inverse: return "inv(" + to_string(*e.args[0]) + ")";
        case Expr::Op::HConcat: {
            std::string s = "hcat(";
            for (std::size_t k = 0; k < e.args.size(); ++k) s += (k ? ", " : "") + to_string(*e.args[k]);
            return s + ")";
        }
    }
    return "?";
}

std::set<std::string> expression_inputs(const Expr& e) {
    std::set<std::string> out;
    if (e.op == Expr::Op::Input) out.insert(e.name);
    for (const auto& a : e.args) out.merge(expression_inputs(*a));
    return out;
}

MatrixFq eval_plain(const Expr& e, const std::map<std::string, MatrixFq>& inputs) {
    auto arg = [&](std::size_t k) { return eval_plain(*e.args[k], inputs); };
    switch (e.op) {
        case Expr::Op::Input: {
            auto it = inputs.find(e.name);
            require(it != inputs.end(), Errc::invalid_parameters, "no input named '" + e.name + "'");
            return it->second;
        }
        case Expr::Op::Add: return mat_add(arg(0), arg(1));
        case Expr::Op::Sub: return mat_sub(arg(0), arg(1));
        case Expr::Op::Scale: {
            auto m = arg(0);
            return mat_scale(m.field().from_int(e.scalar), m);
        }
        case Expr::Op::Mul: return mat_mul(arg(0), arg(1));
        case Expr::Op::Transpose: return transpose(arg(0));
        case Expr::Op::Power: return mat_pow(arg(0), e.exponent);
        case Expr::Op::Inverse: return plaintext_inverse(arg(0));
        case Expr::Op::HConcat: {
            std::vector<MatrixFq> parts;
            for (std::size_t k = 0; k < e.args.size(); ++k) parts.push_back(arg(k));
            return concat_cols(parts);
        }
    }
    fail(Errc::invalid_parameters, "unknown expression node");
}

MatrixFq eval_matrix_polynomial(SimNet& net, const Expr& e, const std::map<std::string, MatrixFq>& inputs,
                                std::size_t T, Delivery delivery) {
    SecureEngine eng(net, T);
    const auto used = expression_inputs(e);
    std::map<std::string, SecureEngine::Value> uploaded;
    std::size_t source = 0;
    for (const auto& [name, m] : inputs) {
        if (used.count(name) == 0) continue;
        uploaded.emplace(name, eng.upload(++source, m, SecureEngine::Form::Right, name));
    }
    Memo memo;
    return eng.reveal(eval_secure(eng, e, uploaded, memo), delivery);
}

}  // namespace sdmc
