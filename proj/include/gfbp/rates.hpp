#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gfbp {

using State = std::int64_t;

struct RateOptions {
    // Relative cutoff for truncating the jump-rate sum of an unbounded model.
    double tail_tolerance = 1e-12;
    // Terms examined before an unbounded rate sum is declared divergent.
    int max_terms = 100000;
};

// Sum of the jump rates out of one state.  For unbounded models `tail_bound`
// estimates the discarded tail and `terms` is the number of jump sizes summed.
struct TotalRate {
    double value = 0.0;
    double tail_bound = 0.0;
    int terms = 0;
};

// Jump-rate family rate(n, i) > 0 of a generalized birth process started at n0
// with jump sizes 1..k, or 1, 2, ... when k is unbounded.  Immutable.
class RateModel {
public:
    using RateFn = std::function<double(State n, int i)>;
    using TotalFn = std::function<double(State n)>;

    RateModel(State n0, std::optional<int> max_jump, RateFn rate, RateOptions options = {});

    State n0() const { return n0_; }
    std::optional<int> max_jump() const { return max_jump_; }
    bool unbounded() const { return !max_jump_.has_value(); }

    // Largest jump that can matter when m levels above n0 are reached: min(k, m).
    int effective_jump(int m) const;

    // Validated rate of a jump of size i out of state n.  Throws
    // std::domain_error for i outside 1..k, n < n0, or a non-positive value.
    double rate(State n, int i) const;

    TotalRate total_rate(State n) const;
    double mu(State n) const { return total_rate(n).value; }

    const RateOptions& options() const { return options_; }

    // Canonical JSON document this model was built from; empty for models
    // assembled in code.
    const std::string& document() const { return document_; }

    RateModel with_document(std::string document) const;
    // Replaces truncated summation for unbounded models by an exact total.
    RateModel with_exact_total(TotalFn total) const;

private:
    State n0_;
    std::optional<int> max_jump_;
    RateFn rate_;
    TotalFn exact_total_;
    RateOptions options_;
    std::string document_;
};

// Fractional order: one alpha for every state, or one per state.
class OrderSpec {
public:
    static OrderSpec constant(double alpha);
    static OrderSpec per_state(std::map<State, double> orders, std::optional<double> fallback = {});

    bool is_constant() const { return !per_state_; }
    double alpha(State n) const;
    // Throws std::logic_error for per-state specs.
    double constant_alpha() const;
    const std::map<State, double>& orders() const { return orders_; }
    std::optional<double> fallback() const { return fallback_; }

private:
    OrderSpec() = default;

    bool per_state_ = false;
    double alpha_ = 1.0;
    std::map<State, double> orders_;
    std::optional<double> fallback_;
};

enum class Preset { TFPP, FPBP, GFCP, CFPP, STFPP };

std::string to_string(Preset p);
// Case-insensitive; throws InputError for unknown names.
Preset preset_from_string(const std::string& name);

namespace presets {

// Time-fractional Poisson: n0 = 0, k = 1, rate lambda.
RateModel tfpp(double lambda);
// Fractional pure birth: n0 = k = 1, rate(n, 1) = lambda_n.
RateModel fpbp(std::function<double(State)> lambda_n);
// lambdas[0] is lambda_1; states past the list are rejected.
RateModel fpbp(std::vector<double> lambdas);
// Generalized fractional counting: n0 = 0, k = lambdas.size(), rate(n, i) = lambdas[i-1].
RateModel gfcp(std::vector<double> lambdas);
// Convoluted fractional Poisson: rate(n, i) = beta(i-1) - beta(i), unbounded k.
RateModel cfpp(std::function<double(int)> beta, RateOptions options = {});
// Space-time fractional Poisson: rate(n, i) = (-1)^(i+1) lambda^beta binom(beta, i),
// unbounded k; beta = 1 gives tfpp(lambda).
RateModel stfpp(double lambda, double beta, RateOptions options = {});

}  // namespace presets

enum class ExplosionVerdict { NonExploding, PossiblyExploding, Inconclusive };

std::string to_string(ExplosionVerdict v);

struct ExplosionConfig {
    // Slope of log S_M against log M claiming unbounded growth.
    double growth_exponent_threshold = 0.5;
    // Final increment below which the partial sums count as flat.
    double increment_tolerance = 1e-10;
    // Increments decaying like m^-p: p at or below this is treated as a
    // divergent p-series, p at or above `summable_decay` as convergent.
    double divergent_decay = 1.05;
    double summable_decay = 1.5;
};

struct ExplosionReport {
    ExplosionVerdict verdict = ExplosionVerdict::Inconclusive;
    // partial_sums[j] = S_{n0 + j}
    std::vector<double> partial_sums;
    double growth_exponent = 0.0;
    double decay_exponent = 0.0;
};

// Numerical classification of the non-explosion series
//   S_M = sum_{m=n0}^{n0+M} ( sum_{i=1}^{k} sum_{j=1}^{i} rate(m-j+1, i)^2 )^(-1/2).
// Terms referring to states below n0 are omitted.  Never a proof.
ExplosionReport explosion_check(const RateModel& model, int terms, const ExplosionConfig& config = {});

}  // namespace gfbp
