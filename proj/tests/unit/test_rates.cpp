#include <gtest/gtest.h>

#include <cmath>

#include "gfbp/errors.hpp"
#include "gfbp/expression.hpp"
#include "gfbp/model_io.hpp"
#include "gfbp/rates.hpp"

using namespace gfbp;

TEST(Rates, GenericInstanceTotals) {
    RateModel m(1, 2, [](State n, int i) { return i == 1 ? static_cast<double>(n) : 1.0; });
    EXPECT_EQ(m.n0(), 1);
    EXPECT_DOUBLE_EQ(m.mu(1), 2.0);
    EXPECT_DOUBLE_EQ(m.mu(5), 6.0);
    EXPECT_EQ(m.effective_jump(1), 1);
    EXPECT_EQ(m.effective_jump(7), 2);
}

TEST(Rates, RejectsOutOfRangeJumpsAndStates) {
    RateModel m = presets::gfcp({1.0, 3.0});
    EXPECT_THROW(m.rate(0, 3), std::domain_error);
    EXPECT_THROW(m.rate(-1, 1), std::domain_error);
    RateModel bad(0, 1, [](State, int) { return -1.0; });
    EXPECT_THROW(bad.rate(0, 1), std::domain_error);
}

TEST(Rates, Presets) {
    RateModel t = presets::tfpp(2.5);
    EXPECT_EQ(t.n0(), 0);
    EXPECT_EQ(t.max_jump(), 1);
    EXPECT_DOUBLE_EQ(t.mu(10), 2.5);

    RateModel g = presets::gfcp({1.0, 3.0});
    EXPECT_EQ(g.max_jump(), 2);
    EXPECT_DOUBLE_EQ(g.mu(4), 4.0);

    RateModel f = presets::fpbp(std::vector<double>{1.0, 2.0, 3.0});
    EXPECT_EQ(f.n0(), 1);
    EXPECT_DOUBLE_EQ(f.mu(3), 3.0);
    EXPECT_THROW(f.mu(4), std::exception);
}

TEST(Rates, SpaceTimeFractionalTotalIsLambdaToBeta) {
    RateModel s = presets::stfpp(2.0, 0.5);
    EXPECT_TRUE(s.unbounded());
    EXPECT_NEAR(s.mu(0), std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(s.rate(0, 1), std::sqrt(2.0) * 0.5, 1e-15);
    RateModel one = presets::stfpp(3.0, 1.0);
    EXPECT_NEAR(one.rate(0, 1), 3.0, 1e-15);
}

TEST(Rates, ConvolutedTruncationReportsTail) {
    RateModel c = presets::cfpp([](int i) { return std::pow(0.5, i); });
    TotalRate tr = c.total_rate(0);
    EXPECT_NEAR(tr.value, 1.0, 1e-11);
    EXPECT_GT(tr.terms, 10);
    EXPECT_LT(tr.tail_bound, 1e-11);
}

TEST(Rates, DivergentRateSumIsReported) {
    RateModel d(0, std::nullopt, [](State, int i) { return 1.0 / i; }, RateOptions{1e-12, 2000});
    EXPECT_THROW(d.total_rate(0), ConvergenceError);
}

TEST(Rates, OrderSpec) {
    OrderSpec c = OrderSpec::constant(0.7);
    EXPECT_TRUE(c.is_constant());
    EXPECT_DOUBLE_EQ(c.alpha(123), 0.7);
    EXPECT_THROW(OrderSpec::constant(0.0), InputError);
    EXPECT_THROW(OrderSpec::constant(1.2), InputError);
    OrderSpec p = OrderSpec::per_state({{1, 0.6}, {2, 0.9}}, 0.5);
    EXPECT_FALSE(p.is_constant());
    EXPECT_DOUBLE_EQ(p.alpha(2), 0.9);
    EXPECT_DOUBLE_EQ(p.alpha(7), 0.5);
    OrderSpec strict = OrderSpec::per_state({{1, 0.6}});
    EXPECT_THROW(strict.alpha(2), std::exception);
}

TEST(Explosion, SquaredRatesPossiblyExplode) {
    RateModel m = presets::fpbp([](State n) { return static_cast<double>((n + 1) * (n + 1)); });
    ExplosionReport r = explosion_check(m, 10000);
    EXPECT_EQ(r.verdict, ExplosionVerdict::PossiblyExploding);
    EXPECT_EQ(r.partial_sums.size(), 10001u);
}

TEST(Explosion, LinearRatesDoNotExplode) {
    RateModel m(1, 2, [](State n, int i) { return i == 1 ? static_cast<double>(n) : 1.0; });
    EXPECT_EQ(explosion_check(m, 10000).verdict, ExplosionVerdict::NonExploding);
    EXPECT_EQ(explosion_check(presets::tfpp(1.0), 1000).verdict, ExplosionVerdict::NonExploding);
}

TEST(Expression, GrammarAndPrecedence) {
    EXPECT_DOUBLE_EQ(Expression::parse("n*(2-i) + (i-1)")(3, 1), 3.0);
    EXPECT_DOUBLE_EQ(Expression::parse("2^3^2")(0), 512.0);
    EXPECT_DOUBLE_EQ(Expression::parse("-2^2")(0), -4.0);
    EXPECT_DOUBLE_EQ(Expression::parse("(n+1)^2")(4), 25.0);
    EXPECT_DOUBLE_EQ(Expression::parse("2^(-i)")(0, 3), 0.125);
    EXPECT_DOUBLE_EQ(Expression::parse("1.5*n/3")(4), 2.0);
    EXPECT_TRUE(Expression::parse("n").uses_n());
    EXPECT_FALSE(Expression::parse("n").uses_i());
}

TEST(Expression, MalformedInputNamesColumn) {
    try {
        Expression::parse("n + * 2");
        FAIL();
    } catch (const InputError& e) {
        EXPECT_NE(std::string(e.what()).find("column"), std::string::npos);
    }
    EXPECT_THROW(Expression::parse("x"), InputError);
    EXPECT_THROW(Expression::parse("(n"), InputError);
}

TEST(ModelIo, RoundTripIsFixedPoint) {
    const char* docs[] = {
        R"({"kind": "preset", "name": "tfpp", "lambda": 2})",
        R"({"kind": "preset", "name": "gfcp", "lambdas": [1, 3]})",
        R"({"kind": "preset", "name": "fpbp", "rate": "n^2"})",
        R"({"kind": "formula", "n0": 1, "k": 2, "rates": ["n", "1"]})",
        R"({"kind": "table", "n0": 0, "k": 2, "rates": [[1, 3], [2, 3]], "extension": "repeat-last-row"})",
        R"({"kind": "preset", "name": "stfpp", "lambda": 1, "beta": 0.5})",
    };
    for (const char* d : docs) {
        RateModel m = parse_model(d);
        std::string once = serialize_model(m);
        std::string twice = serialize_model(parse_model(once));
        EXPECT_EQ(once, twice) << d;
    }
}

TEST(ModelIo, FormulaModelEvaluates) {
    RateModel m = parse_model(R"({"kind": "formula", "n0": 1, "k": 2, "rates": ["n", "1"]})");
    EXPECT_DOUBLE_EQ(m.rate(4, 1), 4.0);
    EXPECT_DOUBLE_EQ(m.rate(4, 2), 1.0);
    RateModel t = parse_model(R"({"kind": "table", "n0": 0, "k": 2, "rates": [[1, 3], [2, 3]], "extension": "repeat-last-row"})");
    EXPECT_DOUBLE_EQ(t.rate(0, 2), 3.0);
    EXPECT_DOUBLE_EQ(t.rate(9, 1), 2.0);
}

TEST(ModelIo, SyntaxErrorsCarryLineAndColumn) {
    try {
        parse_model("{\n  \"kind\": tfpp }");
        FAIL();
    } catch (const InputError& e) {
        std::string w = e.what();
        EXPECT_NE(w.find("line 2"), std::string::npos) << w;
        EXPECT_NE(w.find("column"), std::string::npos) << w;
    }
    EXPECT_THROW(parse_model(R"({"kind": "preset", "name": "nope"})"), InputError);
    EXPECT_THROW(parse_model(R"({"kind": "preset", "name": "tfpp", "lambda": 1, "k": 2})"), InputError);
}

TEST(ModelIo, OrderDocuments) {
    OrderSpec c = parse_order(R"({"alpha": 0.5})");
    EXPECT_DOUBLE_EQ(c.constant_alpha(), 0.5);
    OrderSpec p = parse_order(R"({"per_state": {"0": 0.5, "1": 0.9}, "fallback": 0.7})");
    EXPECT_DOUBLE_EQ(p.alpha(1), 0.9);
    EXPECT_DOUBLE_EQ(p.alpha(3), 0.7);
    EXPECT_EQ(serialize_order(parse_order(serialize_order(p))), serialize_order(p));
    EXPECT_THROW(parse_order(R"({"per_state": {"x": 0.5}})"), InputError);
}
