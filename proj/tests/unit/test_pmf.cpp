#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gfbp/errors.hpp"
#include "gfbp/pmf.hpp"
#include "gfbp/special.hpp"

using namespace gfbp;

namespace {

RateModel generic() {
    return RateModel(1, 2, [](State n, int i) { return i == 1 ? static_cast<double>(n) : 1.0; });
}

struct PmfCase {
    double alpha;
    State n;
    double t, value;
};

// tests/oracles/pmf_reference.py (Talbot inversion of the Laplace recursion)
const PmfCase kGeneric[] = {
    {0.5, 1, 0.5, 0.33620400244634121285}, {0.5, 2, 0.5, 0.093176105735216878612},
    {0.5, 3, 0.5, 0.11266085154923208747}, {0.5, 4, 0.5, 0.074648058226932629052},
    {0.5, 1, 2, 0.18882128260393787334},   {0.5, 2, 2, 0.05926265395504417469},
    {0.5, 3, 2, 0.073237212820544344824},  {0.5, 4, 2, 0.053253687840494953171},
    {0.8, 1, 0.5, 0.34312274930181200754}, {0.8, 2, 0.5, 0.11689459675447215504},
    {0.8, 3, 0.5, 0.14212799637831396853}, {0.8, 4, 0.5, 0.096900397438951039034},
    {0.8, 1, 2, 0.092614475427524773701},  {0.8, 2, 2, 0.038149436535990675973},
    {0.8, 3, 2, 0.049039460824305278838},  {0.8, 4, 2, 0.041179834660983475267},
};

const PmfCase kGfcp[] = {
    {0.5, 0, 1, 0.13699945762506138989},
    {0.5, 1, 1, 0.032383506095021454781},
    {0.5, 2, 1, 0.10461595153003993511},
    {0.5, 3, 1, 0.046473781546599539077},
};

}  // namespace

TEST(Pmf, GenericInstanceFrozenValues) {
    RateModel m = generic();
    for (const auto& c : kGeneric) {
        PmfValue v = pmf(m, c.alpha, c.n, c.t);
        EXPECT_NEAR(v.value, c.value, 1e-12) << c.alpha << ' ' << c.n << ' ' << c.t;
        EXPECT_LT(v.error_bound, 1e-10);
    }
}

TEST(Pmf, GfcpFrozenValues) {
    RateModel m = presets::gfcp({1.0, 3.0});
    for (const auto& c : kGfcp) EXPECT_NEAR(pmf(m, c.alpha, c.n, c.t).value, c.value, 1e-12) << c.n;
}

TEST(Pmf, PoissonAtOrderOne) {
    RateModel m = presets::tfpp(1.5);
    const double t = 0.9, lt = 1.5 * t;
    double fact = 1.0;
    for (int n = 0; n <= 8; ++n) {
        if (n) fact *= n;
        EXPECT_NEAR(pmf(m, 1.0, n, t).value, std::exp(-lt) * std::pow(lt, n) / fact, 1e-14);
    }
}

TEST(Pmf, InitialConditionAndSurvival) {
    RateModel m = generic();
    EXPECT_DOUBLE_EQ(pmf(m, 0.6, 1, 0.0).value, 1.0);
    EXPECT_DOUBLE_EQ(pmf(m, 0.6, 3, 0.0).value, 0.0);
    PmfValue s = survival_first_wait(m, OrderSpec::constant(0.6), 1.4);
    EXPECT_NEAR(s.value, mittag_leffler(0.6, -2.0 * std::pow(1.4, 0.6)).value, 1e-14);
}

TEST(Pmf, ErrorsAndBudget) {
    RateModel m = generic();
    EXPECT_THROW(pmf(m, 0.5, 0, 1.0), InputError);
    EXPECT_THROW(pmf(m, 0.5, 2, -1.0), InputError);
    PmfOptions tight;
    tight.pattern_budget = 10;
    EXPECT_THROW(pmf(m, 0.5, 12, 1.0, tight), BudgetExceeded);
}

TEST(Pmf, KernelChoicesAgree) {
    RateModel m = generic();
    for (auto k : {KernelChoice::General, KernelChoice::Contour}) {
        PmfOptions o;
        o.kernel = k;
        for (State n = 1; n <= 6; ++n) {
            PmfValue forced = pmf(m, 0.7, n, 1.2, o);
            EXPECT_LE(std::abs(forced.value - pmf(m, 0.7, n, 1.2).value), forced.error_bound + 1e-11) << to_string(k);
        }
    }
}

TEST(Pmf, PathProfile) {
    RateModel m = generic();
    PathRateProfile p = path_profile(m, JumpPattern({2, 0, 1}));
    EXPECT_EQ(p.epochs.levels, (std::vector<int>{0, 2, 3}));
    EXPECT_EQ(p.mu, (std::vector<double>{2.0, 4.0, 5.0}));
    EXPECT_DOUBLE_EQ(p.jump_rate_product, 1.0 * 3.0);
}

TEST(Pmf, PerStateOrdersEqualToConstant) {
    RateModel m = generic();
    OrderSpec same = OrderSpec::per_state({}, 0.65);
    for (State n = 1; n <= 6; ++n)
        EXPECT_NEAR(pmf_state_dependent(m, same, n, 0.9).value, pmf(m, 0.65, n, 0.9).value, 1e-13);
}

TEST(Pmf, VariableOrderFrozenValues) {
    RateModel m = presets::fpbp([](State n) { return static_cast<double>(n); });
    OrderSpec o = OrderSpec::per_state({{1, 0.6}, {2, 0.9}, {3, 0.75}});
    const double ref[] = {0.41332734094310630052, 0.20703476916182297062, 0.11861866461232144216};
    for (State n = 1; n <= 3; ++n) EXPECT_NEAR(pmf_state_dependent(m, o, n, 1.0).value, ref[n - 1], 1e-11) << n;
}

TEST(Pmf, LaplaceTransforms) {
    RateModel m = generic();
    OrderSpec o = OrderSpec::constant(0.8);
    auto rec = laplace_recursive(m, o, 6, {1.3, 0.0});
    for (State n = 1; n <= 6; ++n) {
        double v = pmf_laplace(m, o, n, 1.3);
        EXPECT_NEAR(v, rec[static_cast<std::size_t>(n - 1)].real(), 1e-14 * std::max(1.0, v));
        EXPECT_NEAR(rec[static_cast<std::size_t>(n - 1)].imag(), 0.0, 1e-15);
    }
    // sum of transforms is 1/s
    auto big = laplace_recursive(presets::tfpp(1.0), o, 200, {2.0, 0.0});
    double total = 0;
    for (auto c : big) total += c.real();
    EXPECT_NEAR(total, 0.5, 1e-9);
}

TEST(PmfTable, DeficitAndMethodsAgree) {
    RateModel m = generic();
    OrderSpec o = OrderSpec::constant(0.8);
    const double times[] = {0.0, 0.5, 1.0};
    TableOptions automatic;
    automatic.mass_tolerance = 1e-6;
    TableOptions ct = automatic;
    ct.method = TableMethod::Contour;
    PmfTable a = pmf_table(m, o, times, automatic);
    PmfTable b = pmf_table(m, o, times, ct);
    ASSERT_EQ(a.columns.size(), 3u);
    EXPECT_EQ(a.columns[0].p.size(), 1u);
    EXPECT_FALSE(a.flagged());
    for (std::size_t q = 0; q < 3; ++q) {
        EXPECT_LE(a.columns[q].deficit, 1e-6);
        EXPECT_LE(b.columns[q].deficit, 1e-6);
        const std::size_t s = std::min(a.columns[q].p.size(), b.columns[q].p.size());
        for (std::size_t j = 0; j < s; ++j) EXPECT_NEAR(a.columns[q].p[j], b.columns[q].p[j], 1e-10);
    }
}

TEST(PmfTable, BudgetExhaustionIsFlagged) {
    RateModel m = generic();
    const double times[] = {2.0};
    TableOptions o;
    o.state_budget = 5;
    PmfTable t = pmf_table(m, OrderSpec::constant(0.5), times, o);
    EXPECT_TRUE(t.columns[0].budget_exhausted);
    EXPECT_TRUE(t.flagged());
    EXPECT_EQ(t.columns[0].p.size(), 5u);
}

TEST(PmfTable, CsvAndJson) {
    RateModel m = presets::tfpp(1.0);
    const double times[] = {0.0, 1.0};
    PmfTable t = pmf_grid(m, OrderSpec::constant(1.0), 2, times);
    std::ostringstream csv, js;
    write_csv(t, csv);
    EXPECT_EQ(csv.str().substr(0, 17), "t,n,p,error_bound");
    EXPECT_NE(csv.str().find("\n1,0,0.36787944117144"), std::string::npos) << csv.str();
    EXPECT_EQ(csv.str().find('\r'), std::string::npos);
    write_json(t, js);
    EXPECT_NE(js.str().find("\"source\""), std::string::npos);
    EXPECT_NE(js.str().find("\"columns\""), std::string::npos);
}
