#include <catch2/catch_amalgamated.hpp>

#include <lipinv/expr.hpp>

namespace {

using namespace lipinv;

double eval1(const std::string& text, double x)
{
    return compile_expression(text, 1)(make_vec({x}));
}

double eval2(const std::string& text, double x0, double x1)
{
    return compile_expression(text, 2)(make_vec({x0, x1}));
}

}  // namespace

TEST_CASE("arithmetic precedence and associativity", "[expr]")
{
    REQUIRE(eval1("1 + 2 * 3", 0.0) == 7.0);
    REQUIRE(eval1("(1 + 2) * 3", 0.0) == 9.0);
    REQUIRE(eval1("2 - 3 - 4", 0.0) == -5.0);    // left associative
    REQUIRE(eval1("12 / 3 / 2", 0.0) == 2.0);    // left associative
    REQUIRE(eval1("2 ^ 3 ^ 2", 0.0) == 512.0);   // right associative
    REQUIRE(eval1("-2 ^ 2", 0.0) == 4.0);        // unary binds the base
    REQUIRE(eval1("2 * -3", 0.0) == -6.0);
    REQUIRE(eval1("+5", 0.0) == 5.0);
}

TEST_CASE("variables index into the point", "[expr]")
{
    REQUIRE(eval2("x0", 3.5, -1.0) == 3.5);
    REQUIRE(eval2("x1", 3.5, -1.0) == -1.0);
    REQUIRE(eval2("x0 * x1 + 1", 2.0, 4.0) == 9.0);
}

TEST_CASE("named constants and functions", "[expr]")
{
    REQUIRE(eval1("pi", 0.0) == Catch::Approx(3.14159265358979323846).margin(0.0));
    REQUIRE(eval1("e", 0.0) == Catch::Approx(2.71828182845904523536).margin(0.0));
    REQUIRE(eval1("sin(pi / 2)", 0.0) == Catch::Approx(1.0));
    REQUIRE(eval1("cos(0)", 0.0) == 1.0);
    REQUIRE(eval1("exp(1)", 0.0) == Catch::Approx(std::exp(1.0)));
    REQUIRE(eval1("log(e)", 0.0) == Catch::Approx(1.0));
    REQUIRE(eval1("sqrt(2) ^ 2", 0.0) == Catch::Approx(2.0));
    REQUIRE(eval1("abs(0 - 3)", 0.0) == 3.0);
    REQUIRE(eval1("tan(0)", 0.0) == 0.0);
}

TEST_CASE("compiled closures track their argument", "[expr]")
{
    const ScalarField f = compile_expression("2 * x0 + sin(x0)", 1);
    for (double x : {-2.0, -0.5, 0.0, 1.0, 3.14159}) {
        REQUIRE(f(make_vec({x})) == Catch::Approx(2.0 * x + std::sin(x)).margin(1e-15));
    }
}

TEST_CASE("scientific-notation literals parse as one number", "[expr]")
{
    REQUIRE(eval1("1e-3", 0.0) == 1e-3);
    REQUIRE(eval1("2.5e2 + 0.5", 0.0) == 250.5);
    REQUIRE(eval1(".5 * 4", 0.0) == 2.0);
}

TEST_CASE("malformed expressions carry parse diagnostics", "[expr]")
{
    const std::vector<std::string> bad = {
        "",               // empty
        "1 +",            // dangling operator
        "(1 + 2",         // missing paren
        "foo(1)",         // unknown function
        "x7",             // variable beyond dimension (dim = 1 here)
        "bar",            // unknown identifier
        "1 2",            // trailing garbage
        "sin 1",          // function without parentheses is just an identifier
        "2 $ 3",          // stray character
    };
    for (const auto& text : bad) {
        try {
            compile_expression(text, 1)(make_vec({0.0}));
            FAIL("expected a parse failure for: " + text);
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::ParseError);
            REQUIRE_FALSE(std::string(e.what()).empty());
        }
    }
}

TEST_CASE("variable bounds follow the declared dimension", "[expr]")
{
    REQUIRE_NOTHROW(compile_expression("x0 + x1 + x2", 3));
    REQUIRE_THROWS_AS(compile_expression("x3", 3), Error);
}
