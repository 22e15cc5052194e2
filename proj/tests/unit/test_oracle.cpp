#include <gtest/gtest.h>

#include <cmath>

#include "gfbp/errors.hpp"
#include "gfbp/oracle.hpp"

using namespace gfbp;

namespace {

RateModel generic() {
    return RateModel(1, 2, [](State n, int i) { return i == 1 ? static_cast<double>(n) : 1.0; });
}

}  // namespace

TEST(Oracle, Rk4ReproducesPoisson) {
    SolverConfig c;
    c.step = 1e-3;
    c.n_max = 6;
    PmfTable t = solve_fractional_system(presets::tfpp(2.0), OrderSpec::constant(1.0), 1.0, c);
    EXPECT_EQ(t.source, "oracle");
    const PmfColumn& col = column_at(t, 1.0);
    double fact = 1.0;
    for (int n = 0; n <= 6; ++n) {
        if (n) fact *= n;
        EXPECT_NEAR(col.p[static_cast<std::size_t>(n)], std::exp(-2.0) * std::pow(2.0, n) / fact, 1e-12);
        EXPECT_TRUE(std::isnan(col.error[static_cast<std::size_t>(n)]));
    }
}

TEST(Oracle, SequentialAndSimultaneousRk4Coincide) {
    SolverConfig c;
    c.step = 1e-2;
    c.n_max = 8;
    PmfTable a = solve_fractional_system(generic(), OrderSpec::constant(1.0), 2.0, c);
    c.simultaneous = true;
    PmfTable b = solve_fractional_system(generic(), OrderSpec::constant(1.0), 2.0, c);
    for (std::size_t k = 0; k < a.columns.size(); ++k)
        for (std::size_t j = 0; j < a.columns[k].p.size(); ++j)
            EXPECT_NEAR(a.columns[k].p[j], b.columns[k].p[j], 1e-15);
}

TEST(Oracle, FractionalSolverMatchesAnalytic) {
    RateModel m = generic();
    OrderSpec o = OrderSpec::constant(0.8);
    SolverConfig c;
    c.step = 1e-3;
    c.n_max = 4;
    PmfTable t = solve_fractional_system(m, o, 1.0, c);
    const double times[] = {0.5, 1.0};
    PmfTable ref = pmf_grid(m, o, 5, times);
    for (std::size_t q = 0; q < 2; ++q) {
        const PmfColumn& col = column_at(t, times[q]);
        for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(col.p[j], ref.columns[q].p[j], 5e-6);
    }
}

TEST(Oracle, AbmAtOrderOneIsSecondOrder) {
    SolverConfig c;
    c.step = 1e-2;
    c.n_max = 3;
    c.scheme = Scheme::FractionalABM;
    const double times[] = {0.5, 1.0};
    RichardsonResult r = richardson_order(presets::tfpp(1.0), OrderSpec::constant(1.0), 1.0, c, times);
    EXPECT_NEAR(r.order, 2.0, 0.1);
}

TEST(Oracle, MemoryWindowChangesLittleForLongWindows) {
    RateModel m = generic();
    OrderSpec o = OrderSpec::constant(0.7);
    SolverConfig c;
    c.step = 1e-2;
    c.n_max = 3;
    PmfTable full = solve_fractional_system(m, o, 1.0, c);
    c.max_memory_terms = 100;
    PmfTable same = solve_fractional_system(m, o, 1.0, c);
    c.max_memory_terms = 10;
    PmfTable short_window = solve_fractional_system(m, o, 1.0, c);
    EXPECT_EQ(full.columns.back().p, same.columns.back().p);
    EXPECT_NE(full.columns.back().p, short_window.columns.back().p);
}

TEST(Oracle, InputValidation) {
    SolverConfig c;
    EXPECT_THROW(solve_fractional_system(generic(), OrderSpec::constant(0.5), -1.0, c), InputError);
    c.step = 0;
    EXPECT_THROW(solve_fractional_system(generic(), OrderSpec::constant(0.5), 1.0, c), InputError);
    c.step = 1e-2;
    c.scheme = Scheme::RK4;
    EXPECT_THROW(solve_fractional_system(generic(), OrderSpec::constant(0.5), 1.0, c), InputError);
    PmfTable t = solve_fractional_system(generic(), OrderSpec::constant(1.0), 1.0, c);
    EXPECT_THROW(column_at(t, 0.123), InputError);
}

TEST(Oracle, UnstableStepIsReported) {
    SolverConfig c;
    c.step = 0.5;
    c.n_max = 2;
    RateModel stiff = presets::tfpp(50.0);
    EXPECT_THROW(solve_fractional_system(stiff, OrderSpec::constant(1.0), 5.0, c), ConvergenceError);
}

TEST(Oracle, NumericLaplace) {
    Approx a = numeric_laplace([](double t) { return std::exp(-t); }, 2.0, 30.0);
    EXPECT_NEAR(a.value, 1.0 / 3.0, 1e-12);
    EXPECT_LT(a.error, 1e-10);
    EXPECT_THROW(numeric_laplace([](double) { return 1.0; }, -1.0, 10.0), InputError);
}

TEST(Oracle, ResidualOfPoissonTable) {
    RateModel m = presets::tfpp(1.0);
    std::vector<double> grid;
    for (int k = 0; k <= 2000; ++k) grid.push_back(k * 1e-3);
    PmfTable t = pmf_grid(m, OrderSpec::constant(1.0), 4, grid);
    ResidualReport r = caputo_residual(m, OrderSpec::constant(1.0), t);
    ASSERT_EQ(r.sup_residual.size(), 4u);
    for (double v : r.sup_residual) EXPECT_LT(v, 1e-6);
    EXPECT_FALSE(r.coarse_grid);
}

TEST(Oracle, ResidualFlagsCoarseGrids) {
    RateModel m = presets::tfpp(100.0);
    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k) grid.push_back(k * 0.05);
    PmfTable t = pmf_grid(m, OrderSpec::constant(0.9), 2, grid);
    EXPECT_TRUE(caputo_residual(m, OrderSpec::constant(0.9), t).coarse_grid);
}

TEST(Oracle, ResidualShrinksWithStep) {
    RateModel m = generic();
    OrderSpec o = OrderSpec::constant(0.7);
    auto sup = [&](double h) {
        std::vector<double> grid;
        for (int k = 0; k * h <= 1.0 + 1e-12; ++k) grid.push_back(k * h);
        ResidualOptions ro;
        ro.t_min = 0.5;
        ro.t_max = 1.0;
        return caputo_residual(m, o, pmf_grid(m, o, 1, grid), ro).sup_residual[0];
    };
    double coarse = sup(4e-3), fine = sup(2e-3);
    EXPECT_NEAR(std::log2(coarse / fine), 2.0 - 0.7, 0.15);
}
