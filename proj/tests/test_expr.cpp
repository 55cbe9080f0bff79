#include <doctest.h>

#include <cmath>
#include <random>

#include "adveig/errors.hpp"
#include "adveig/expr.hpp"

using namespace adveig;
using namespace adveig::expr;

namespace {

std::string kind_of(const std::string& src) {
    try {
        parse(src);
    } catch (const Error& e) {
        return e.kind();
    }
    return "";
}

}  // namespace

TEST_CASE("tokenize basics") {
    auto toks = tokenize("cos(pi*x)");
    REQUIRE(toks.size() == 6);
    CHECK(toks[0].kind == TokenKind::Ident);
    CHECK(toks[0].text == "cos");
    CHECK(toks[1].kind == TokenKind::LParen);
    CHECK(toks[2].text == "pi");
    CHECK(toks[3].kind == TokenKind::Star);
    CHECK(toks[4].text == "x");
    CHECK(toks[5].kind == TokenKind::RParen);

    auto nums = tokenize("2.5e-1+x");
    REQUIRE(nums.size() == 3);
    CHECK(nums[0].kind == TokenKind::Number);
    CHECK(nums[0].number == 0.25);
    CHECK(nums[1].kind == TokenKind::Plus);
    CHECK(nums[2].text == "x");
}

TEST_CASE("illegal character reports its byte offset") {
    try {
        tokenize("x $ y");
        FAIL("expected IllegalCharacter");
    } catch (const Error& e) {
        CHECK(e.kind() == "IllegalCharacter");
        CHECK(std::string(e.what()).find("offset 2") != std::string::npos);
    }
}

TEST_CASE("precedence and associativity") {
    CHECK(parse("1+2*3").eval(0.0) == 7.0);
    CHECK(parse("-x^2").eval(2.0) == -4.0);
    CHECK(parse("2^3^2").eval(0.0) == 512.0);  // right-associative
    CHECK(parse("2^-3").eval(0.0) == 0.125);
    CHECK(parse("6/3/2").eval(0.0) == 1.0);
    CHECK(parse("1-2-3").eval(0.0) == -4.0);
}

TEST_CASE("parse errors") {
    CHECK(kind_of("sin(pi*x") == "UnbalancedParentheses");
    CHECK(kind_of("1+2)") == "UnbalancedParentheses");
    CHECK(kind_of("foo(x)") == "UnknownFunction");
    CHECK(kind_of("1 2") == "TrailingInput");
    CHECK(kind_of("1+") == "UnexpectedToken");
    CHECK(kind_of("()") == "UnexpectedToken");
    CHECK(kind_of("") == "UnexpectedToken");
}

TEST_CASE("evaluation") {
    CHECK(parse("cos(pi*x)").eval(0.0) == 1.0);
    const double v = parse("sin(pi*x)*sin(pi*y)").eval(0.5, 0.25, true);
    CHECK(v == doctest::Approx(std::sin(M_PI / 4)).epsilon(1e-14));
    CHECK(parse("abs(-3)+sqrt(4)+exp(0)+log(1)").eval(0.0) == 6.0);

    // arity guard: x alone is fine without y, y needs a 2D context
    CHECK(parse("x").eval(3.0, 0.0, false) == 3.0);
    try {
        parse("y").eval(0.0, 0.0, false);
        FAIL("expected MissingVariable");
    } catch (const Error& e) {
        CHECK(e.kind() == "MissingVariable");
    }
}

TEST_CASE("domain errors") {
    auto kind_of_eval = [](const std::string& src, double x) {
        try {
            parse(src).eval(x);
        } catch (const Error& e) {
            return e.kind();
        }
        return std::string();
    };
    CHECK(kind_of_eval("log(x)", -1.0) == "DomainError");
    CHECK(kind_of_eval("log(x)", 0.0) == "DomainError");
    CHECK(kind_of_eval("sqrt(x)", -1.0) == "DomainError");
    CHECK(kind_of_eval("x^0.5", -2.0) == "DomainError");
    CHECK(kind_of_eval("x^-1", 0.0) == "DomainError");
    CHECK(kind_of_eval("x^3", -2.0) == "");  // integer exponent of negative base is fine
}

TEST_CASE("print round trip evaluates identically") {
    const char* sources[] = {
        "1+2*3-4/5",
        "-x^2+sin(pi*x)*cos(pi*y)",
        "exp(-x*x-y*y)*(1+x)^2",
        "sqrt(abs(x-y))+2.5e-1",
        "cos(pi*(x-0.5))^4",
    };
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.01, 0.99);
    for (const char* src : sources) {
        Ast a = parse(src);
        Ast b = parse(a.print());
        for (int k = 0; k < 100; ++k) {
            const double x = U(rng), y = U(rng);
            CHECK(std::fabs(a.eval(x, y, true) - b.eval(x, y, true)) <= 1e-12);
        }
    }
}

TEST_CASE("deterministic evaluation") {
    Ast a = parse("sin(pi*x)*exp(y)-x^3/7");
    Ast b = parse("sin(pi*x)*exp(y)-x^3/7");
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const double x = U(rng), y = U(rng);
        CHECK(a.eval(x, y, true) == b.eval(x, y, true));  // bit-identical
    }
}
