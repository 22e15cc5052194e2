#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "gfbp/philox.hpp"
#include "gfbp/pmf.hpp"
#include "gfbp/rates.hpp"

namespace gfbp {

struct RngSpec {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;
};

// Philox stream keyed by (seed, stream_id); the counter is the block index.
class Rng {
public:
    explicit Rng(RngSpec spec) : key_{spec.seed, spec.stream_id} {}

    std::uint64_t next_u64();
    // ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1)
    double uniform();
    double exponential(double rate);
    double normal();

private:
    Philox4x64::Key key_;
    std::uint64_t counter_ = 0;
    Philox4x64::Block block_{};
    int used_ = 4;
};

struct Event {
    double t = 0.0;
    State n = 0;
};

struct SamplePath {
    State n0 = 0;
    double horizon = 0.0;
    std::vector<Event> events;
    // the event guard stopped the path before the horizon
    bool guard_hit = false;

    State state_at(double t) const;
    State final_state() const { return events.empty() ? n0 : events.back().n; }
};

struct SimulationConfig {
    std::size_t max_events = 1'000'000;
};

// Exact jump-chain simulation: Exponential(total_rate(n)) holding times and
// jump size i with probability rate(n, i) / total_rate(n), drawn by inverse
// CDF.  Unbounded models keep summing rates past the truncation point until
// the draw is covered or max_terms is reached.  Throws InputError for a
// non-positive horizon.
SamplePath simulate_gbp(const RateModel& model, double horizon, RngSpec rng, const SimulationConfig& config = {});
SamplePath simulate_gbp(const RateModel& model, double horizon, Rng& rng, const SimulationConfig& config = {});

// The random clock of the order-1/2 process is |B(t)| for a Brownian motion
// with generator d^2/dx^2, whose variance at time t is this factor times t.
inline constexpr double kClockVarianceFactor = 2.0;

struct HalfSample {
    State state = 0;
    double clock = 0.0;
    bool guard_hit = false;
};

// State of the order-1/2 process at time t, as the jump chain observed at
// the random time |G|, G ~ Normal(0, 2t).
HalfSample sample_gfbp_half(const RateModel& model, double t, RngSpec rng, const SimulationConfig& config = {});

// Holding times drawn exactly as simulate_gbp draws them in state n.
std::vector<double> holding_time_sample(const RateModel& model, State n, std::size_t count, RngSpec rng);

// Worker count: `requested`, or the hardware concurrency when 0, capped by
// the GFBP_THREADS environment variable when set.
unsigned worker_count(unsigned requested = 0);

struct EnsembleConfig {
    std::uint64_t seed = 0;
    std::size_t samples = 1000;
    unsigned workers = 0;
    SimulationConfig simulation;
};

// Sample i uses stream i, so results do not depend on the worker count.
std::vector<SamplePath> simulate_ensemble(const RateModel& model, double horizon, const EnsembleConfig& config);
std::vector<HalfSample> sample_half_ensemble(const RateModel& model, double t, const EnsembleConfig& config);

std::vector<State> states_at(std::span<const SamplePath> paths, double t);

// z for a two-sided 99% interval
inline constexpr double kWilson99 = 2.5758293035489004;

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kWilson99);

// Relative frequencies of the states n0..max, with Wilson intervals; n0 is
// the smallest sample.
struct EmpiricalPmf {
    State n0 = 0;
    std::size_t samples = 0;
    std::vector<std::size_t> counts;
    std::vector<double> p;
    std::vector<Interval> bands;

    double at(State n) const;
    PmfColumn column(double t) const;
};

// Throws InputError for an empty sample.
EmpiricalPmf empirical_pmf(std::span<const State> samples, double z = kWilson99);

struct PmfComparison {
    double total_variation = 0.0;
    // states with reference p above the threshold whose p lies outside the band
    std::vector<State> outside_bands;
    std::size_t checked = 0;
};

// reference[j] is the probability of reference_n0 + j; states absent from
// either side count as probability 0.
PmfComparison compare_pmf(const EmpiricalPmf& empirical, std::span<const double> reference, State reference_n0,
                          double band_threshold = 0.005);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};

// One-sample Kolmogorov-Smirnov test against Exponential(rate).
KsResult ks_exponential(std::vector<double> draws, double rate);

// One JSON object per path: {"n0":..,"horizon":..,"guard_hit":..,"events":[{"t":..,"n":..}]}.
void write_paths_jsonl(std::span<const SamplePath> paths, std::ostream& out);
// header "path,events,final_state,guard_hit"
void write_ensemble_csv(std::span<const SamplePath> paths, std::ostream& out);
// header "n,count,p,wilson_lower,wilson_upper"
void write_empirical_csv(const EmpiricalPmf& pmf, std::ostream& out);

}  // namespace gfbp
