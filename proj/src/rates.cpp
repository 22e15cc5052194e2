#include "gfbp/rates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "gfbp/errors.hpp"

namespace gfbp {

RateModel::RateModel(State n0, std::optional<int> max_jump, RateFn rate, RateOptions options)
    : n0_(n0), max_jump_(max_jump), rate_(std::move(rate)), options_(options) {
    if (n0 < 0) throw InputError("n0 must be non-negative");
    if (max_jump && *max_jump < 1) throw InputError("k must be a positive integer");
    if (!rate_) throw InputError("rate function is empty");
    if (!(options_.tail_tolerance > 0.0)) throw InputError("tail_tolerance must be positive");
    if (options_.max_terms < 2) throw InputError("max_terms must be at least 2");
}

int RateModel::effective_jump(int m) const {
    if (!max_jump_) return m;
    return std::min(*max_jump_, m);
}

double RateModel::rate(State n, int i) const {
    if (n < n0_) {
        std::ostringstream os;
        os << "rate requested for state " << n << " below n0 = " << n0_;
        throw std::domain_error(os.str());
    }
    if (i < 1 || (max_jump_ && i > *max_jump_)) {
        std::ostringstream os;
        os << "jump size " << i << " outside 1.." << (max_jump_ ? std::to_string(*max_jump_) : "inf");
        throw std::domain_error(os.str());
    }
    double r = rate_(n, i);
    if (!(r > 0.0) || !std::isfinite(r)) {
        std::ostringstream os;
        os << "rate(" << n << ", " << i << ") = " << r << " is not a positive finite number";
        throw std::domain_error(os.str());
    }
    return r;
}

TotalRate RateModel::total_rate(State n) const {
    if (max_jump_) {
        double sum = 0.0;
        for (int i = 1; i <= *max_jump_; ++i) sum += rate(n, i);
        return {sum, 0.0, *max_jump_};
    }
    if (exact_total_) {
        double v = exact_total_(n);
        if (!(v > 0.0) || !std::isfinite(v)) throw std::domain_error("exact total rate is not positive");
        return {v, 0.0, 0};
    }
    double sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= options_.max_terms; ++i) {
        double term = rate(n, i);
        sum += term;
        if (i > 1 && term < prev && term < options_.tail_tolerance * sum) {
            double ratio = term / prev;
            double tail = ratio < 1.0 ? term * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
            return {sum, tail, i};
        }
        prev = term;
    }
    std::ostringstream os;
    os << "jump-rate sum out of state " << n << " shows no decay after " << options_.max_terms
       << " terms; the model needs sum_i rate(n, i) < infinity";
    throw ConvergenceError(os.str(), sum, std::numeric_limits<double>::infinity());
}

RateModel RateModel::with_document(std::string document) const {
    RateModel copy = *this;
    copy.document_ = std::move(document);
    return copy;
}

RateModel RateModel::with_exact_total(TotalFn total) const {
    RateModel copy = *this;
    copy.exact_total_ = std::move(total);
    return copy;
}

// ---------------------------------------------------------------------------

namespace {

void check_order(double a, const std::string& where) {
    if (!(a > 0.0 && a <= 1.0)) {
        std::ostringstream os;
        os << "fractional order " << a << " for " << where << " is outside (0, 1]";
        throw InputError(os.str());
    }
}

}  // namespace

OrderSpec OrderSpec::constant(double alpha) {
    check_order(alpha, "all states");
    OrderSpec s;
    s.alpha_ = alpha;
    return s;
}

OrderSpec OrderSpec::per_state(std::map<State, double> orders, std::optional<double> fallback) {
    for (const auto& [n, a] : orders) check_order(a, "state " + std::to_string(n));
    if (fallback) check_order(*fallback, "the fallback order");
    if (orders.empty() && !fallback) throw InputError("per-state order spec is empty");
    OrderSpec s;
    s.per_state_ = true;
    s.orders_ = std::move(orders);
    s.fallback_ = fallback;
    return s;
}

double OrderSpec::alpha(State n) const {
    if (!per_state_) return alpha_;
    auto it = orders_.find(n);
    if (it != orders_.end()) return it->second;
    if (fallback_) return *fallback_;
    throw InputError("no fractional order given for state " + std::to_string(n));
}

double OrderSpec::constant_alpha() const {
    if (per_state_) throw std::logic_error("order spec is per-state");
    return alpha_;
}

// ---------------------------------------------------------------------------

std::string to_string(Preset p) {
    switch (p) {
        case Preset::TFPP: return "tfpp";
        case Preset::FPBP: return "fpbp";
        case Preset::GFCP: return "gfcp";
        case Preset::CFPP: return "cfpp";
        case Preset::STFPP: return "stfpp";
    }
    return "unknown";
}

Preset preset_from_string(const std::string& name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (Preset p : {Preset::TFPP, Preset::FPBP, Preset::GFCP, Preset::CFPP, Preset::STFPP})
        if (to_string(p) == lower) return p;
    throw InputError("unknown preset '" + name + "' (expected tfpp, fpbp, gfcp, cfpp or stfpp)");
}

namespace presets {

RateModel tfpp(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("TFPP requires lambda > 0");
    return RateModel(0, 1, [lambda](State, int) { return lambda; });
}

RateModel fpbp(std::function<double(State)> lambda_n) {
    if (!lambda_n) throw InputError("FPBP requires a rate sequence");
    return RateModel(1, 1, [f = std::move(lambda_n)](State n, int) { return f(n); });
}

RateModel fpbp(std::vector<double> lambdas) {
    if (lambdas.empty()) throw InputError("FPBP requires at least one rate");
    for (std::size_t j = 0; j < lambdas.size(); ++j)
        if (!(lambdas[j] > 0.0)) throw InputError("FPBP requires lambda_n > 0 (n = " + std::to_string(j + 1) + ")");
    auto table = std::make_shared<const std::vector<double>>(std::move(lambdas));
    return fpbp([table](State n) -> double {
        if (n < 1 || static_cast<std::size_t>(n) > table->size())
            throw std::domain_error("FPBP rate list has no entry for state " + std::to_string(n));
        return (*table)[static_cast<std::size_t>(n - 1)];
    });
}

RateModel gfcp(std::vector<double> lambdas) {
    if (lambdas.empty()) throw InputError("GFCP requires at least one rate");
    for (std::size_t j = 0; j < lambdas.size(); ++j)
        if (!(lambdas[j] > 0.0) || !std::isfinite(lambdas[j]))
            throw InputError("GFCP requires lambda_i > 0 (i = " + std::to_string(j + 1) + ")");
    int k = static_cast<int>(lambdas.size());
    auto table = std::make_shared<const std::vector<double>>(std::move(lambdas));
    return RateModel(0, k, [table](State, int i) { return (*table)[static_cast<std::size_t>(i - 1)]; });
}

RateModel cfpp(std::function<double(int)> beta, RateOptions options) {
    if (!beta) throw InputError("CFPP requires a beta sequence");
    double b0 = beta(0);
    if (!(b0 > 0.0) || !std::isfinite(b0)) throw InputError("CFPP requires beta_0 > 0");
    // Walk the sequence until it is negligible against beta_0, checking strict
    // decrease and that successive ratios settle below one.
    double prev = b0;
    double last_ratio = 1.0;
    int i = 1;
    for (; i <= options.max_terms; ++i) {
        double b = beta(i);
        if (!(b > 0.0)) throw InputError("CFPP requires beta_i > 0 (violated at i = " + std::to_string(i) + ")");
        if (!(b < prev))
            throw InputError("CFPP requires beta_i > beta_{i+1} (violated at i = " + std::to_string(i - 1) + ")");
        last_ratio = b / prev;
        prev = b;
        if (b < options.tail_tolerance * b0) break;
    }
    if (i > options.max_terms || !(last_ratio < 1.0 - 1e-6))
        throw InputError("CFPP requires lim beta_{i+1}/beta_i < 1");
    return RateModel(0, std::nullopt, [f = std::move(beta)](State, int j) { return f(j - 1) - f(j); }, options);
}

RateModel stfpp(double lambda, double beta, RateOptions options) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("STFPP requires lambda > 0");
    if (!(beta > 0.0 && beta <= 1.0)) throw InputError("STFPP requires beta in (0, 1]");
    if (beta == 1.0) return tfpp(lambda);
    // c_i = (-1)^(i+1) beta (beta-1) ... (beta-i+1) / i!, via c_i = c_{i-1} (i-1-beta) / i.
    std::vector<double> c;
    c.reserve(static_cast<std::size_t>(options.max_terms));
    double ci = beta;
    for (int i = 1; i <= options.max_terms; ++i) {
        if (i > 1) ci *= (static_cast<double>(i - 1) - beta) / static_cast<double>(i);
        if (!(ci > 0.0))
            throw InputError("STFPP rate for jump size " + std::to_string(i) + " is not positive");
        c.push_back(ci);
    }
    auto coeffs = std::make_shared<const std::vector<double>>(std::move(c));
    double scale = std::pow(lambda, beta);
    auto rate = [coeffs, scale, beta](State, int i) {
        std::size_t idx = static_cast<std::size_t>(i - 1);
        if (idx < coeffs->size()) return scale * (*coeffs)[idx];
        double v = coeffs->back();
        for (int j = static_cast<int>(coeffs->size()) + 1; j <= i; ++j)
            v *= (static_cast<double>(j - 1) - beta) / static_cast<double>(j);
        return scale * v;
    };
    // sum_i (-1)^(i+1) binom(beta, i) = 1 - (1 - 1)^beta = 1
    return RateModel(0, std::nullopt, rate, options).with_exact_total([scale](State) { return scale; });
}

}  // namespace presets

// ---------------------------------------------------------------------------

std::string to_string(ExplosionVerdict v) {
    switch (v) {
        case ExplosionVerdict::NonExploding: return "NonExploding";
        case ExplosionVerdict::PossiblyExploding: return "PossiblyExploding";
        case ExplosionVerdict::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

namespace {

// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size());
    if (x.size() < 2) return 0.0;
    double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        sxx += (x[j] - mx) * (x[j] - mx);
        sxy += (x[j] - mx) * (y[j] - my);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

// Number of jump sizes that contribute at state m for unbounded models.
int truncation_index(const RateModel& model, State m) {
    if (model.max_jump()) return *model.max_jump();
    TotalRate tr = model.total_rate(m);
    if (tr.terms > 0) return tr.terms;
    // exact totals: truncate the squared sum on its own
    double sum = 0.0;
    for (int i = 1; i <= model.options().max_terms; ++i) {
        double r = model.rate(m, i);
        sum += r;
        if (i > 1 && r < model.options().tail_tolerance * sum) return i;
    }
    return model.options().max_terms;
}

}  // namespace

ExplosionReport explosion_check(const RateModel& model, int terms, const ExplosionConfig& config) {
    if (terms < 1) throw InputError("explosion_check needs M >= 1");
    ExplosionReport report;
    report.partial_sums.reserve(static_cast<std::size_t>(terms) + 1);
    const State n0 = model.n0();
    std::vector<double> increments;
    increments.reserve(static_cast<std::size_t>(terms) + 1);
    double s = 0.0;
    for (State m = n0; m <= n0 + terms; ++m) {
        int kk = truncation_index(model, m);
        double inner = 0.0;
        for (int i = 1; i <= kk; ++i) {
            for (int j = 1; j <= i; ++j) {
                State state = m - j + 1;
                if (state < n0) break;
                double r = model.rate(state, i);
                inner += r * r;
            }
        }
        double inc = 1.0 / std::sqrt(inner);
        s += inc;
        increments.push_back(inc);
        report.partial_sums.push_back(s);
    }

    std::vector<double> lx, ls, linc;
    std::size_t half = report.partial_sums.size() / 2;
    for (std::size_t j = std::max<std::size_t>(half, 1); j < report.partial_sums.size(); ++j) {
        lx.push_back(std::log(static_cast<double>(j + 1)));
        ls.push_back(std::log(report.partial_sums[j]));
        linc.push_back(-std::log(increments[j]));
    }
    report.growth_exponent = fitted_slope(lx, ls);
    report.decay_exponent = fitted_slope(lx, linc);

    if (report.growth_exponent >= config.growth_exponent_threshold) {
        report.verdict = ExplosionVerdict::NonExploding;
    } else if (increments.back() < config.increment_tolerance) {
        report.verdict = ExplosionVerdict::PossiblyExploding;
    } else if (report.decay_exponent <= config.divergent_decay) {
        report.verdict = ExplosionVerdict::NonExploding;
    } else if (report.decay_exponent >= config.summable_decay) {
        report.verdict = ExplosionVerdict::PossiblyExploding;
    } else {
        report.verdict = ExplosionVerdict::Inconclusive;
    }
    return report;
}

}  // namespace gfbp
