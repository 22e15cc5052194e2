#include "gfbp/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>

#include "gfbp/detmath.hpp"
#include "gfbp/errors.hpp"
#include "gfbp/format.hpp"

namespace gfbp {

std::uint64_t Rng::next_u64() {
    if (used_ == 4) {
        block_ = Philox4x64::encrypt({counter_, 0, 0, 0}, key_);
        ++counter_;
        used_ = 0;
    }
    return block_[static_cast<std::size_t>(used_++)];
}

double Rng::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::exponential(double rate) {
    return -detmath::log(uniform()) / rate;
}

double Rng::normal() {
    return detmath::normal_quantile(uniform());
}

State SamplePath::state_at(double t) const {
    State n = n0;
    for (const Event& e : events) {
        if (e.t > t) break;
        n = e.n;
    }
    return n;
}

namespace {

int draw_jump(const RateModel& model, State n, double mu, Rng& rng) {
    const double target = rng.uniform() * mu;
    const int last = model.max_jump() ? *model.max_jump() : model.options().max_terms;
    double cum = 0.0;
    for (int i = 1; i < last; ++i) {
        cum += model.rate(n, i);
        if (cum >= target) return i;
    }
    return last;
}

template <class Result, class Fn>
std::vector<Result> run_parallel(std::size_t count, unsigned workers, Fn&& fn) {
    std::vector<Result> out(count);
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count);
                return;
            }
        }
    };
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace

SamplePath simulate_gbp(const RateModel& model, double horizon, Rng& rng, const SimulationConfig& config) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("horizon must be positive and finite");
    SamplePath path;
    path.n0 = model.n0();
    path.horizon = horizon;
    State n = model.n0();
    double t = 0.0;
    for (;;) {
        const double mu = model.mu(n);
        t += rng.exponential(mu);
        if (t > horizon) break;
        if (path.events.size() >= config.max_events) {
            path.guard_hit = true;
            break;
        }
        n += draw_jump(model, n, mu, rng);
        path.events.push_back({t, n});
    }
    return path;
}

SamplePath simulate_gbp(const RateModel& model, double horizon, RngSpec spec, const SimulationConfig& config) {
    Rng rng(spec);
    return simulate_gbp(model, horizon, rng, config);
}

HalfSample sample_gfbp_half(const RateModel& model, double t, RngSpec spec, const SimulationConfig& config) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("t must be positive and finite");
    Rng rng(spec);
    HalfSample s;
    s.clock = std::fabs(rng.normal()) * std::sqrt(kClockVarianceFactor * t);
    s.state = model.n0();
    if (s.clock > 0.0) {
        SamplePath path = simulate_gbp(model, s.clock, rng, config);
        s.state = path.final_state();
        s.guard_hit = path.guard_hit;
    }
    return s;
}

std::vector<double> holding_time_sample(const RateModel& model, State n, std::size_t count, RngSpec spec) {
    Rng rng(spec);
    const double mu = model.mu(n);
    std::vector<double> out(count);
    for (double& x : out) x = rng.exponential(mu);
    return out;
}

unsigned worker_count(unsigned requested) {
    unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("GFBP_THREADS")) {
        try {
            long cap = std::stol(env);
            if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        } catch (const std::exception&) {
        }
    }
    return n;
}

std::vector<SamplePath> simulate_ensemble(const RateModel& model, double horizon, const EnsembleConfig& config) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InputError("horizon must be positive and finite");
    return run_parallel<SamplePath>(config.samples, worker_count(config.workers), [&](std::size_t i) {
        return simulate_gbp(model, horizon, RngSpec{config.seed, i}, config.simulation);
    });
}

std::vector<HalfSample> sample_half_ensemble(const RateModel& model, double t, const EnsembleConfig& config) {
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("t must be positive and finite");
    return run_parallel<HalfSample>(config.samples, worker_count(config.workers), [&](std::size_t i) {
        return sample_gfbp_half(model, t, RngSpec{config.seed, i}, config.simulation);
    });
}

std::vector<State> states_at(std::span<const SamplePath> paths, double t) {
    std::vector<State> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(p.state_at(t));
    return out;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) throw InputError("interval needs at least one trial");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double EmpiricalPmf::at(State n) const {
    if (n < n0 || n - n0 >= static_cast<State>(p.size())) return 0.0;
    return p[static_cast<std::size_t>(n - n0)];
}

PmfColumn EmpiricalPmf::column(double t) const {
    PmfColumn c;
    c.t = t;
    c.p = p;
    for (std::size_t j = 0; j < p.size(); ++j) c.error.push_back(std::max(bands[j].upper - p[j], p[j] - bands[j].lower));
    c.deficit = 0.0;
    c.contour_from = p.size();
    return c;
}

EmpiricalPmf empirical_pmf(std::span<const State> samples, double z) {
    if (samples.empty()) throw InputError("empirical pmf needs at least one sample");
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    EmpiricalPmf e;
    e.n0 = *lo;
    e.samples = samples.size();
    e.counts.assign(static_cast<std::size_t>(*hi - *lo) + 1, 0);
    for (State s : samples) ++e.counts[static_cast<std::size_t>(s - e.n0)];
    for (std::size_t c : e.counts) {
        e.p.push_back(static_cast<double>(c) / static_cast<double>(e.samples));
        e.bands.push_back(wilson_interval(c, e.samples, z));
    }
    return e;
}

PmfComparison compare_pmf(const EmpiricalPmf& empirical, std::span<const double> reference, State reference_n0,
                          double band_threshold) {
    PmfComparison r;
    const State lo = std::min(empirical.n0, reference_n0);
    const State hi = std::max(empirical.n0 + static_cast<State>(empirical.p.size()),
                              reference_n0 + static_cast<State>(reference.size()));
    double sum = 0.0;
    for (State n = lo; n < hi; ++n) {
        const State j = n - reference_n0;
        const double q = j >= 0 && j < static_cast<State>(reference.size()) ? reference[static_cast<std::size_t>(j)] : 0.0;
        const double p = empirical.at(n);
        sum += std::fabs(p - q);
        if (q > band_threshold) {
            ++r.checked;
            Interval band = wilson_interval(
                n >= empirical.n0 && n - empirical.n0 < static_cast<State>(empirical.counts.size())
                    ? empirical.counts[static_cast<std::size_t>(n - empirical.n0)]
                    : 0,
                empirical.samples);
            if (q < band.lower || q > band.upper) r.outside_bands.push_back(n);
        }
    }
    r.total_variation = 0.5 * sum;
    return r;
}

KsResult ks_exponential(std::vector<double> draws, double rate) {
    if (draws.empty()) throw InputError("KS test needs at least one draw");
    if (!(rate > 0.0)) throw InputError("rate must be positive");
    std::sort(draws.begin(), draws.end());
    const double n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const double f = -std::expm1(-rate * draws[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    const double sn = std::sqrt(n);
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double p = 1.0;
    if (lambda > 0.2) {
        double sum = 0.0;
        for (int k = 1; k <= 100; ++k) {
            const double term = std::exp(-2.0 * k * k * lambda * lambda);
            sum += (k % 2 ? term : -term);
            if (term < 1e-16 * std::fabs(sum)) break;
        }
        p = std::clamp(2.0 * sum, 0.0, 1.0);
    }
    return {d, p};
}

void write_paths_jsonl(std::span<const SamplePath> paths, std::ostream& out) {
    for (const auto& p : paths) {
        out << "{\"n0\":" << p.n0 << ",\"horizon\":" << format_json_number(p.horizon)
            << ",\"guard_hit\":" << (p.guard_hit ? "true" : "false") << ",\"events\":[";
        for (std::size_t i = 0; i < p.events.size(); ++i) {
            if (i) out << ',';
            out << "{\"t\":" << format_json_number(p.events[i].t) << ",\"n\":" << p.events[i].n << '}';
        }
        out << "]}\n";
    }
}

void write_ensemble_csv(std::span<const SamplePath> paths, std::ostream& out) {
    out << "path,events,final_state,guard_hit\n";
    for (std::size_t i = 0; i < paths.size(); ++i)
        out << i << ',' << paths[i].events.size() << ',' << paths[i].final_state() << ','
            << (paths[i].guard_hit ? 1 : 0) << '\n';
}

void write_empirical_csv(const EmpiricalPmf& pmf, std::ostream& out) {
    out << "n,count,p,wilson_lower,wilson_upper\n";
    for (std::size_t j = 0; j < pmf.p.size(); ++j)
        out << pmf.n0 + static_cast<State>(j) << ',' << pmf.counts[j] << ',' << format_number(pmf.p[j]) << ','
            << format_number(pmf.bands[j].lower) << ',' << format_number(pmf.bands[j].upper) << '\n';
}

}  // namespace gfbp
