#include "gfbp/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "gfbp/errors.hpp"

namespace gfbp {

class ExpressionParser {
public:
    explicit ExpressionParser(std::string_view src) : src_(src) {}

    Expression run() {
        Expression e;
        e.source_ = std::string(src_);
        int root = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected character");
        e.root_ = root;
        e.uses_n_ = uses_n_;
        e.uses_i_ = uses_i_;
        e.nodes_ = std::make_shared<const std::vector<Expression::Node>>(std::move(nodes_));
        return e;
    }

private:
    using Node = Expression::Node;
    using Kind = Node::Kind;

    [[noreturn]] void fail(const std::string& msg) const {
        throw InputError("formula '" + std::string(src_) + "': " + msg + " at column " +
                         std::to_string(pos_ + 1));
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    int push(Kind k, int lhs = -1, int rhs = -1, double v = 0.0) {
        nodes_.push_back(Node{k, v, lhs, rhs});
        return static_cast<int>(nodes_.size()) - 1;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = push(Kind::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = push(Kind::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    int parse_term() {
        int lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = push(Kind::Mul, lhs, parse_unary());
            } else if (accept('/')) {
                lhs = push(Kind::Div, lhs, parse_unary());
            } else {
                return lhs;
            }
        }
    }

    int parse_unary() {
        if (accept('-')) return push(Kind::Neg, parse_unary());
        return parse_power();
    }

    int parse_power() {
        int base = parse_primary();
        if (accept('^')) return push(Kind::Pow, base, parse_unary());
        return base;
    }

    int parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of formula");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            int inner = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (c == 'n') {
            ++pos_;
            uses_n_ = true;
            return push(Kind::VarN);
        }
        if (c == 'i') {
            ++pos_;
            uses_i_ = true;
            return push(Kind::VarI);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            if (pos_ < src_.size() && src_[pos_] == '.') {
                ++pos_;
                if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    fail("expected digits after '.'");
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
            std::string literal(src_.substr(start, pos_ - start));
            return push(Kind::Number, -1, -1, std::strtod(literal.c_str(), nullptr));
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::vector<Node> nodes_;
    bool uses_n_ = false;
    bool uses_i_ = false;
};

Expression Expression::parse(std::string_view source) {
    return ExpressionParser(source).run();
}

double Expression::operator()(double n, double i) const {
    return eval(root_, n, i);
}

namespace {

double integer_power(double base, long long e) {
    bool invert = e < 0;
    unsigned long long k = invert ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
    double result = 1.0;
    while (k) {
        if (k & 1ULL) result *= base;
        base *= base;
        k >>= 1;
    }
    return invert ? 1.0 / result : result;
}

}  // namespace

double Expression::eval(int idx, double n, double i) const {
    const Node& node = (*nodes_)[static_cast<std::size_t>(idx)];
    switch (node.kind) {
        case Node::Kind::Number: return node.value;
        case Node::Kind::VarN: return n;
        case Node::Kind::VarI: return i;
        case Node::Kind::Neg: return -eval(node.lhs, n, i);
        case Node::Kind::Add: return eval(node.lhs, n, i) + eval(node.rhs, n, i);
        case Node::Kind::Sub: return eval(node.lhs, n, i) - eval(node.rhs, n, i);
        case Node::Kind::Mul: return eval(node.lhs, n, i) * eval(node.rhs, n, i);
        case Node::Kind::Div: return eval(node.lhs, n, i) / eval(node.rhs, n, i);
        case Node::Kind::Pow: {
            double b = eval(node.lhs, n, i);
            double e = eval(node.rhs, n, i);
            if (e == std::trunc(e) && std::fabs(e) <= 1024.0) return integer_power(b, static_cast<long long>(e));
            return std::pow(b, e);
        }
    }
    return 0.0;
}

}  // namespace gfbp
