#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace gfbp {

// Arithmetic formula over the variables n (state) and i (jump size).
//
// Grammar (version 1):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?        right associative, binds tighter than unary minus
//   primary := number | 'n' | 'i' | '(' expr ')'
//   number  := digits ['.' digits]
//
// Integer exponents are evaluated by repeated multiplication so that results do
// not depend on the platform pow().
class Expression {
public:
    static constexpr int grammar_version = 1;

    // Throws InputError with the offending column on malformed input.
    static Expression parse(std::string_view source);

    double operator()(double n, double i = 0.0) const;

    const std::string& source() const { return source_; }
    bool uses_n() const { return uses_n_; }
    bool uses_i() const { return uses_i_; }

private:
    struct Node {
        enum class Kind { Number, VarN, VarI, Neg, Add, Sub, Mul, Div, Pow } kind;
        double value = 0.0;
        int lhs = -1;
        int rhs = -1;
    };

    double eval(int node, double n, double i) const;

    std::string source_;
    std::shared_ptr<const std::vector<Node>> nodes_;
    int root_ = -1;
    bool uses_n_ = false;
    bool uses_i_ = false;

    friend class ExpressionParser;
};

}  // namespace gfbp
