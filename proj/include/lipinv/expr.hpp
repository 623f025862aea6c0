/**
 * Minimal arithmetic expression compiler for norm-field declarations in
 * function-spec files: +, -, *, /, ^, parentheses, the variables x0..x9,
 * constants pi and e, and the unary functions exp, log, sin, cos, tan,
 * sqrt, abs. Compiles to a closure over the point vector.
 */

#ifndef LIPINV_EXPR_HPP
#define LIPINV_EXPR_HPP

#include <cctype>
#include <memory>

#include "core.hpp"

namespace lipinv {

using ScalarField = std::function<double(const Vec&)>;

namespace detail {

class ExprParser {
public:
    ExprParser(const std::string& text, int dim) : text_(text), dim_(dim) {}

    ScalarField parse()
    {
        ScalarField e = expr();
        skip_ws();
        require(pos_ == text_.size(), ErrorKind::ParseError,
                "unexpected trailing characters in expression: '" + text_.substr(pos_) + "'");
        return e;
    }

private:
    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek()
    {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    ScalarField expr()
    {
        ScalarField acc = term();
        for (;;) {
            if (eat('+')) {
                ScalarField rhs = term();
                acc = [acc, rhs](const Vec& x) { return acc(x) + rhs(x); };
            } else if (eat('-')) {
                ScalarField rhs = term();
                acc = [acc, rhs](const Vec& x) { return acc(x) - rhs(x); };
            } else {
                return acc;
            }
        }
    }

    ScalarField term()
    {
        ScalarField acc = power();
        for (;;) {
            if (eat('*')) {
                ScalarField rhs = power();
                acc = [acc, rhs](const Vec& x) { return acc(x) * rhs(x); };
            } else if (eat('/')) {
                ScalarField rhs = power();
                acc = [acc, rhs](const Vec& x) { return acc(x) / rhs(x); };
            } else {
                return acc;
            }
        }
    }

    ScalarField power()
    {
        ScalarField base = unary();
        if (eat('^')) {
            ScalarField exponent = power();  // right associative
            return [base, exponent](const Vec& x) { return std::pow(base(x), exponent(x)); };
        }
        return base;
    }

    ScalarField unary()
    {
        if (eat('-')) {
            ScalarField inner = unary();
            return [inner](const Vec& x) { return -inner(x); };
        }
        (void)eat('+');
        return primary();
    }

    ScalarField primary()
    {
        skip_ws();
        require(pos_ < text_.size(), ErrorKind::ParseError, "expression ends unexpectedly");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            ScalarField inner = expr();
            require(eat(')'), ErrorKind::ParseError, "missing closing parenthesis");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        fail(ErrorKind::ParseError, std::string("unexpected character '") + c + "' in expression");
    }

    ScalarField number()
    {
        const char* start = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(start, &end);
        require(end != start, ErrorKind::ParseError, "malformed number in expression");
        pos_ += static_cast<std::size_t>(end - start);
        return [v](const Vec&) { return v; };
    }

    ScalarField identifier()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        const std::string name = text_.substr(start, pos_ - start);
        if (name.size() == 2 && name[0] == 'x' && std::isdigit(static_cast<unsigned char>(name[1]))) {
            const int idx = name[1] - '0';
            require(idx < dim_, ErrorKind::ParseError,
                    "expression variable " + name + " exceeds the point dimension");
            return [idx](const Vec& x) { return x[idx]; };
        }
        if (name == "pi") return [](const Vec&) { return 3.14159265358979323846; };
        if (name == "e") return [](const Vec&) { return 2.71828182845904523536; };
        if (peek() == '(') {
            ++pos_;
            ScalarField arg = expr();
            require(eat(')'), ErrorKind::ParseError, "missing closing parenthesis after " + name);
            if (name == "exp") return [arg](const Vec& x) { return std::exp(arg(x)); };
            if (name == "log") return [arg](const Vec& x) { return std::log(arg(x)); };
            if (name == "sin") return [arg](const Vec& x) { return std::sin(arg(x)); };
            if (name == "cos") return [arg](const Vec& x) { return std::cos(arg(x)); };
            if (name == "tan") return [arg](const Vec& x) { return std::tan(arg(x)); };
            if (name == "sqrt") return [arg](const Vec& x) { return std::sqrt(arg(x)); };
            if (name == "abs") return [arg](const Vec& x) { return std::abs(arg(x)); };
            fail(ErrorKind::ParseError, "unknown function '" + name + "' in expression");
        }
        fail(ErrorKind::ParseError, "unknown identifier '" + name + "' in expression");
    }

    const std::string& text_;
    int dim_;
    std::size_t pos_ = 0;
};

}  // namespace detail

/** Compile an expression over x0..x{dim-1} into a scalar field closure. */
inline ScalarField compile_expression(const std::string& text, int dim)
{
    return detail::ExprParser(text, dim).parse();
}

}  // namespace lipinv

#endif  // LIPINV_EXPR_HPP
