#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "gfbp/detmath.hpp"
#include "gfbp/errors.hpp"
#include "gfbp/simulate.hpp"

using namespace gfbp;

namespace {

RateModel generic() {
    return RateModel(1, 2, [](State n, int i) { return i == 1 ? static_cast<double>(n) : 1.0; });
}

}  // namespace

TEST(Philox, KnownAnswers) {
    using B = Philox4x64::Block;
    EXPECT_EQ(Philox4x64::encrypt({0, 0, 0, 0}, {0, 0}),
              (B{0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL, 0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL}));
    EXPECT_EQ(Philox4x64::encrypt({1, 0, 0, 0}, {0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL}),
              (B{0xd96148ed4eef3177ULL, 0x3756c9977974e2e4ULL, 0xaca97084472822a9ULL, 0xf84393111bc816fcULL}));
}

TEST(Philox, StreamDrawsBlocksInCounterOrder) {
    Rng r(RngSpec{42, 7});
    const std::uint64_t expected[] = {0x2fd1bc0d2c8697bbULL, 0x8ee17f67a549bba6ULL, 0x1bdce1f847e7df47ULL,
                                      0xe123b6bbe4e89f03ULL, 0xa64064f34e84b9a3ULL, 0xe287959a866a08fdULL,
                                      0x8dc181f009b96c03ULL, 0xf3f6001d4fa83454ULL};
    for (std::uint64_t e : expected) EXPECT_EQ(r.next_u64(), e);
}

TEST(DetMath, LogMatchesLibrary) {
    for (double x : {1e-300, 3e-17, 0.1, 0.5, 0.70710678, 0.999999, 1.0, 1.5, 2.0, 10.0, 1e10, 1e300})
        EXPECT_NEAR(detmath::log(x), std::log(x), 4e-16 * std::max(1.0, std::abs(std::log(x)))) << x;
    EXPECT_EQ(detmath::log(1.0), 0.0);
    EXPECT_THROW(detmath::log(0.0), std::domain_error);
}

TEST(DetMath, NormalQuantile) {
    EXPECT_NEAR(detmath::normal_quantile(0.975), 1.959963984540054, 1e-14);
    EXPECT_NEAR(detmath::normal_quantile(0.5), 0.0, 1e-16);
    EXPECT_NEAR(detmath::normal_quantile(0.995), kWilson99, 1e-13);
    EXPECT_NEAR(detmath::normal_quantile(1e-10), -6.361340902404056, 1e-12);
    EXPECT_NEAR(detmath::normal_quantile(0.2), -detmath::normal_quantile(0.8), 1e-15);
}

TEST(Simulate, DeterministicPerSpec) {
    RateModel m = generic();
    SamplePath a = simulate_gbp(m, 2.0, RngSpec{9, 3});
    SamplePath b = simulate_gbp(m, 2.0, RngSpec{9, 3});
    SamplePath c = simulate_gbp(m, 2.0, RngSpec{9, 4});
    ASSERT_EQ(a.events.size(), b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        EXPECT_EQ(a.events[i].t, b.events[i].t);
        EXPECT_EQ(a.events[i].n, b.events[i].n);
    }
    EXPECT_FALSE(a.events.size() == c.events.size() && !a.events.empty() && a.events[0].t == c.events[0].t);
}

TEST(Simulate, PathInvariants) {
    RateModel m = generic();
    EnsembleConfig ec;
    ec.seed = 5;
    ec.samples = 500;
    for (const auto& p : simulate_ensemble(m, 1.5, ec)) {
        State prev_n = p.n0;
        double prev_t = 0.0;
        EXPECT_FALSE(p.guard_hit);
        for (const auto& e : p.events) {
            EXPECT_GT(e.t, prev_t);
            EXPECT_LE(e.t, 1.5);
            EXPECT_GE(e.n - prev_n, 1);
            EXPECT_LE(e.n - prev_n, 2);
            prev_t = e.t;
            prev_n = e.n;
        }
        EXPECT_EQ(p.state_at(0.0), p.n0);
    }
}

TEST(Simulate, TinyHorizonStaysAtStart) {
    SamplePath p = simulate_gbp(generic(), 1e-12, RngSpec{1, 1});
    EXPECT_TRUE(p.events.empty());
    EXPECT_EQ(p.final_state(), 1);
    EXPECT_THROW(simulate_gbp(generic(), 0.0, RngSpec{}), InputError);
    EXPECT_EQ(sample_gfbp_half(generic(), 1e-14, RngSpec{2, 2}).state, 1);
}

TEST(Simulate, PoissonMeanCount) {
    EnsembleConfig ec;
    ec.seed = 11;
    ec.samples = 100000;
    auto paths = simulate_ensemble(presets::tfpp(3.0), 1.0, ec);
    double mean = 0;
    for (const auto& p : paths) mean += static_cast<double>(p.final_state());
    mean /= 1e5;
    EXPECT_NEAR(mean, 3.0, 3 * std::sqrt(3.0 / 1e5));
}

TEST(Simulate, GuardFlagsExplodingPaths) {
    RateModel fast = presets::fpbp([](State n) { return std::pow(static_cast<double>(n), 3.0); });
    SimulationConfig cfg;
    cfg.max_events = 1000;
    SamplePath p = simulate_gbp(fast, 10.0, RngSpec{3, 0}, cfg);
    EXPECT_TRUE(p.guard_hit);
    EXPECT_EQ(p.events.size(), 1000u);
}

TEST(Simulate, UnboundedJumpsAreSampled) {
    RateModel s = presets::stfpp(1.0, 0.6);
    EnsembleConfig ec;
    ec.seed = 4;
    ec.samples = 2000;
    std::map<State, int> sizes;
    for (const auto& p : simulate_ensemble(s, 3.0, ec)) {
        State prev = 0;
        for (const auto& e : p.events) {
            ++sizes[e.n - prev];
            prev = e.n;
        }
    }
    EXPECT_GT(sizes.size(), 3u);
    EXPECT_GT(sizes[1], sizes[2]);
}

TEST(Simulate, WorkerCountDoesNotChangeResults) {
    EnsembleConfig one;
    one.seed = 77;
    one.samples = 300;
    one.workers = 1;
    EnsembleConfig four = one;
    four.workers = 4;
    auto a = simulate_ensemble(generic(), 1.0, one);
    auto b = simulate_ensemble(generic(), 1.0, four);
    std::ostringstream sa, sb;
    write_paths_jsonl(a, sa);
    write_paths_jsonl(b, sb);
    EXPECT_EQ(sa.str(), sb.str());
}

TEST(Simulate, ThreadCapFromEnvironment) {
    ::setenv("GFBP_THREADS", "2", 1);
    EXPECT_EQ(worker_count(8), 2u);
    EXPECT_EQ(worker_count(1), 1u);
    ::unsetenv("GFBP_THREADS");
    EXPECT_EQ(worker_count(3), 3u);
}

TEST(Simulate, BrownianClockVariance) {
    RateModel m = presets::tfpp(1.0);
    const double t = 0.7;
    const std::size_t N = 1000000;
    double sum = 0, sum2 = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double tau = sample_gfbp_half(m, t, RngSpec{13, i}).clock;
        sum += tau * tau;
        sum2 += tau * tau * tau * tau;
    }
    const double mean = sum / N;
    const double sd = std::sqrt((sum2 / N - mean * mean) / N);
    EXPECT_NEAR(mean, kClockVarianceFactor * t, 3 * sd);
}

TEST(Simulate, HoldingTimesPassKolmogorovSmirnov) {
    RateModel m = generic();
    for (State n : {1, 4}) {
        KsResult r = ks_exponential(holding_time_sample(m, n, 10000, RngSpec{21, static_cast<std::uint64_t>(n)}), m.mu(n));
        EXPECT_GT(r.p_value, 1e-3) << n;
    }
    KsResult wrong = ks_exponential(holding_time_sample(m, 1, 10000, RngSpec{21, 1}), 3.0);
    EXPECT_LT(wrong.p_value, 1e-3);
}

TEST(Empirical, SingleSample) {
    State s[] = {4};
    EmpiricalPmf e = empirical_pmf(s);
    EXPECT_EQ(e.n0, 4);
    EXPECT_DOUBLE_EQ(e.at(4), 1.0);
    EXPECT_DOUBLE_EQ(e.at(5), 0.0);
    EXPECT_THROW(empirical_pmf(std::span<const State>()), InputError);
}

TEST(Empirical, PoissonZeroClass) {
    EnsembleConfig ec;
    ec.seed = 3;
    ec.samples = 100000;
    auto st = states_at(simulate_ensemble(presets::tfpp(1.0), 1.0, ec), 1.0);
    EmpiricalPmf e = empirical_pmf(st);
    const Interval b = e.bands[0];
    EXPECT_LT(b.lower, std::exp(-1.0));
    EXPECT_GT(b.upper, std::exp(-1.0));
    EXPECT_LT(e.column(1.0).error[0], 0.005);
}

TEST(Empirical, MatchesIndependentHistogram) {
    EnsembleConfig ec;
    ec.seed = 8;
    ec.samples = 5000;
    auto st = states_at(simulate_ensemble(generic(), 1.0, ec), 0.6);
    std::map<State, int> hist;
    for (State s : st) ++hist[s];
    EmpiricalPmf e = empirical_pmf(st);
    for (const auto& [n, c] : hist) EXPECT_DOUBLE_EQ(e.at(n), c / 5000.0);
    double total = 0;
    for (double p : e.p) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
    PmfComparison self = compare_pmf(e, e.p, e.n0);
    EXPECT_DOUBLE_EQ(self.total_variation, 0.0);
    EXPECT_TRUE(self.outside_bands.empty());
}

TEST(Empirical, WilsonInterval) {
    Interval i = wilson_interval(0, 100);
    EXPECT_DOUBLE_EQ(i.lower, 0.0);
    EXPECT_GT(i.upper, 0.0);
    Interval h = wilson_interval(50, 100, 1.959963984540054);
    EXPECT_NEAR(h.lower, 0.4038315303659956, 1e-12);
    EXPECT_NEAR(h.upper, 0.5961684696340044, 1e-12);
}

TEST(Empirical, Exports) {
    std::vector<SamplePath> ps{simulate_gbp(presets::tfpp(5.0), 1.0, RngSpec{1, 0})};
    std::ostringstream js, csv;
    write_paths_jsonl(ps, js);
    write_ensemble_csv(ps, csv);
    EXPECT_EQ(js.str().rfind("{\"n0\":0,\"horizon\":1,", 0), 0u);
    EXPECT_EQ(js.str().back(), '\n');
    EXPECT_EQ(csv.str().rfind("path,events,final_state,guard_hit\n0,", 0), 0u);
}
