#include "gfbp/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include "gfbp/errors.hpp"
#include "gfbp/format.hpp"
#include "gfbp/special.hpp"

namespace gfbp {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;
constexpr double kInf = std::numeric_limits<double>::infinity();

class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Bound on |dK/dmu| for the inverse-transform kernels: the derivative is a
// convolution with a density of mass at most t^alpha / Gamma(1 + alpha).
double kernel_sensitivity(double alpha, double t) { return std::pow(t, alpha) / std::tgamma(1.0 + alpha); }

int level_count(State n, State n0) {
    if (n < n0) {
        std::ostringstream os;
        os << "state " << n << " is below n0 = " << n0;
        throw InputError(os.str());
    }
    State m = n - n0;
    if (m > std::numeric_limits<int>::max() / 2) throw InputError("state is too far above n0");
    return static_cast<int>(m);
}

void check_pattern_budget(int m, int k, const PmfOptions& options) {
    std::uint64_t count = theta_count(m, k);
    if (count > options.pattern_budget) {
        std::ostringstream os;
        os << "|Theta_" << m << "^" << k << "| = " << count << " exceeds the pattern budget of "
           << options.pattern_budget;
        throw BudgetExceeded(os.str(), static_cast<std::size_t>(count),
                             static_cast<std::size_t>(options.pattern_budget));
    }
}

// Everything a pattern sum needs about states n0..n0+m.
struct StateTable {
    int m = 0;
    int k = 1;
    std::vector<double> mu;
    std::vector<double> mu_tail;
    std::vector<double> alpha;
    // rate[j][i-1] = rate(n0 + j, i) for i <= min(k, m - j)
    std::vector<std::vector<double>> rate;

    StateTable(const RateModel& model, const OrderSpec& order, int levels) : m(levels) {
        k = model.effective_jump(std::max(m, 1));
        const State n0 = model.n0();
        for (int j = 0; j <= m; ++j) {
            TotalRate tr = model.total_rate(n0 + j);
            mu.push_back(tr.value);
            mu_tail.push_back(tr.tail_bound);
            alpha.push_back(order.alpha(n0 + j));
            std::vector<double> row;
            for (int i = 1; i <= std::min(k, m - j); ++i) row.push_back(model.rate(n0 + j, i));
            rate.push_back(std::move(row));
        }
    }
};

bool pairwise_separated(std::span<const double> mu, double tol) {
    double mmax = *std::max_element(mu.begin(), mu.end());
    for (std::size_t a = 0; a < mu.size(); ++a)
        for (std::size_t b = a + 1; b < mu.size(); ++b)
            if (std::abs(mu[a] - mu[b]) <= tol * mmax) return false;
    return true;
}

class PatternSum {
public:
    PatternSum(const RateModel& model, const OrderSpec& order, int m, double t, const PmfOptions& options)
        : states_(model, order, m), t_(t), options_(options) {
        if (t_ > 0.0) {
            ml_.resize(static_cast<std::size_t>(m) + 1);
            for (int j = 0; j <= m; ++j)
                ml_[static_cast<std::size_t>(j)] =
                    mittag_leffler(states_.alpha[static_cast<std::size_t>(j)],
                                   -states_.mu[static_cast<std::size_t>(j)] *
                                       std::pow(t_, states_.alpha[static_cast<std::size_t>(j)]));
        }
        double amin = *std::min_element(states_.alpha.begin(), states_.alpha.end());
        double amax = *std::max_element(states_.alpha.begin(), states_.alpha.end());
        sensitivity_ = std::max(kernel_sensitivity(amin, t_), kernel_sensitivity(amax, t_));
    }

    PmfValue run() {
        const int m = states_.m;
        check_pattern_budget(m, states_.k, options_);
        CompensatedSum sum;
        double err = 0.0, abs_sum = 0.0;
        std::vector<int> levels;
        std::vector<double> mu, alpha;
        for_each_jump_path(m, states_.k, [&](std::span<const int> jumps) {
            levels.assign(1, 0);
            double product = 1.0;
            for (int i : jumps) {
                product *= states_.rate[static_cast<std::size_t>(levels.back())][static_cast<std::size_t>(i - 1)];
                levels.push_back(levels.back() + i);
            }
            mu.clear();
            alpha.clear();
            double tails = 0.0;
            for (int l : levels) {
                mu.push_back(states_.mu[static_cast<std::size_t>(l)]);
                alpha.push_back(states_.alpha[static_cast<std::size_t>(l)]);
                tails += states_.mu_tail[static_cast<std::size_t>(l)];
            }
            Approx k = kernel(levels, mu, alpha, product);
            double contribution = product * k.value;
            sum.add(contribution);
            abs_sum += std::abs(contribution);
            err += product * (k.error + sensitivity_ * tails);
        });
        double v = sum.value();
        return {v, err + 2.0 * kUnit * abs_sum};
    }

private:
    Approx distinct_cached(const std::vector<int>& levels, const std::vector<double>& mu) const {
        const std::size_t n = mu.size();
        CompensatedSum sum;
        double err = 0.0, abs_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double prod = 1.0;
            for (std::size_t l = 0; l < n; ++l)
                if (l != i) prod *= mu[l] - mu[i];
            const Approx& e = ml_[static_cast<std::size_t>(levels[i])];
            double term = e.value / prod;
            sum.add(term);
            abs_sum += std::abs(term);
            err += e.error / std::abs(prod);
        }
        return {sum.value(), err + kUnit * (2.0 * static_cast<double>(n) + 4.0) * abs_sum, false};
    }

    Approx series(const std::vector<double>& mu, const std::vector<double>& alpha) const {
        try {
            return inv_lt_multi_order(alpha, mu, t_, options_.series_tolerance);
        } catch (const ConvergenceError& e) {
            return {e.partial_value(), kInf, true};
        }
    }

    Approx kernel(const std::vector<int>& levels, const std::vector<double>& mu, const std::vector<double>& alpha,
                  double product) const {
        if (t_ == 0.0) return {mu.size() == 1 ? 1.0 : 0.0, 0.0, false};
        const bool same_order = std::all_of(alpha.begin(), alpha.end(), [&](double a) { return a == alpha[0]; });
        const bool separated = pairwise_separated(mu, options_.degeneracy_tolerance);
        switch (options_.kernel) {
            case KernelChoice::Distinct:
                if (!same_order) throw InputError("the partial-fraction kernel needs one order along the path");
                if (!separated) return inv_lt_distinct(alpha[0], mu, t_, options_.degeneracy_tolerance);
                return distinct_cached(levels, mu);
            case KernelChoice::General:
                return series(mu, alpha);
            case KernelChoice::Contour:
                return inv_lt_contour(alpha, mu, t_, options_.contour_nodes);
            case KernelChoice::Auto:
                break;
        }
        const double tol = options_.kernel_tolerance;
        Approx best{0.0, kInf, true};
        auto consider = [&](const Approx& a) {
            if (a.error < best.error) best = a;
        };
        if (same_order && separated) consider(distinct_cached(levels, mu));
        if (!(product * best.error <= tol)) consider(series(mu, alpha));
        if (!(product * best.error <= tol)) consider(inv_lt_contour(alpha, mu, t_, options_.contour_nodes));
        return best;
    }

    StateTable states_;
    double t_;
    PmfOptions options_;
    std::vector<Approx> ml_;
    double sensitivity_ = 0.0;
};

PmfValue initial_state(const RateModel& model, double alpha, double t) {
    TotalRate tr = model.total_rate(model.n0());
    if (t == 0.0) return {1.0, 0.0};
    Approx e = mittag_leffler(alpha, -tr.value * std::pow(t, alpha));
    return {e.value, e.error + kernel_sensitivity(alpha, t) * tr.tail_bound};
}

PmfValue run_pattern_sum(const RateModel& model, const OrderSpec& order, State n, double t,
                         const PmfOptions& options) {
    int m = level_count(n, model.n0());
    if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("time must be finite and non-negative");
    if (m == 0) return initial_state(model, order.alpha(model.n0()), t);
    if (t == 0.0) return {0.0, 0.0};
    return PatternSum(model, order, m, t, options).run();
}

}  // namespace

std::string to_string(KernelChoice k) {
    switch (k) {
        case KernelChoice::Auto: return "auto";
        case KernelChoice::Distinct: return "distinct";
        case KernelChoice::General: return "general";
        case KernelChoice::Contour: return "contour";
    }
    return "auto";
}

PathRateProfile path_profile(const RateModel& model, const JumpPattern& x) {
    PathRateProfile p{x, epoch_set(x), {}, 1.0};
    const State n0 = model.n0();
    const auto& e = x.entries();
    for (int j = 0; j < x.size(); ++j) {
        int i = e[static_cast<std::size_t>(j)];
        if (i != 0) p.jump_rate_product *= model.rate(n0 + j, i);
    }
    for (int level : p.epochs.levels) p.mu.push_back(model.mu(n0 + level));
    return p;
}

PmfValue pmf(const RateModel& model, double alpha, State n, double t, const PmfOptions& options) {
    return run_pattern_sum(model, OrderSpec::constant(alpha), n, t, options);
}

PmfValue pmf_state_dependent(const RateModel& model, const OrderSpec& order, State n, double t,
                             const PmfOptions& options) {
    return run_pattern_sum(model, order, n, t, options);
}

PmfValue evaluate_pmf(const RateModel& model, const OrderSpec& order, State n, double t, const PmfOptions& options) {
    if (order.is_constant()) return pmf(model, order.constant_alpha(), n, t, options);
    return pmf_state_dependent(model, order, n, t, options);
}

PmfValue survival_first_wait(const RateModel& model, const OrderSpec& order, double t) {
    return evaluate_pmf(model, order, model.n0(), t);
}

double pmf_laplace(const RateModel& model, const OrderSpec& order, State n, double s, const PmfOptions& options) {
    int m = level_count(n, model.n0());
    if (!(s > 0.0) || !std::isfinite(s)) throw InputError("Laplace variable must be positive");
    StateTable st(model, order, m);
    std::vector<double> factor;
    for (int j = 0; j <= m; ++j)
        factor.push_back(1.0 / (std::pow(s, st.alpha[static_cast<std::size_t>(j)]) + st.mu[static_cast<std::size_t>(j)]));
    const double lead = std::pow(s, st.alpha[0] - 1.0);
    if (m == 0) return lead * factor[0];
    check_pattern_budget(m, st.k, options);
    CompensatedSum sum;
    for_each_jump_path(m, st.k, [&](std::span<const int> jumps) {
        int level = 0;
        double v = lead * factor[0];
        for (int i : jumps) {
            v *= st.rate[static_cast<std::size_t>(level)][static_cast<std::size_t>(i - 1)];
            level += i;
            v *= factor[static_cast<std::size_t>(level)];
        }
        sum.add(v);
    });
    return sum.value();
}

std::vector<std::complex<double>> laplace_recursive(const RateModel& model, const OrderSpec& order, State n_max,
                                                    std::complex<double> s) {
    const State n0 = model.n0();
    int m = level_count(n_max, n0);
    std::complex<double> logs = std::log(s);
    std::vector<std::complex<double>> out;
    out.reserve(static_cast<std::size_t>(m) + 1);
    for (int j = 0; j <= m; ++j) {
        State n = n0 + j;
        double a = order.alpha(n);
        std::complex<double> denom = std::exp(a * logs) + model.mu(n);
        std::complex<double> v;
        if (j == 0) {
            v = std::exp((a - 1.0) * logs);
        } else {
            for (int i = 1; i <= std::min(model.effective_jump(j), j); ++i)
                v += model.rate(n - i, i) * out[static_cast<std::size_t>(j - i)];
        }
        out.push_back(v / denom);
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string to_string(TableMethod m) {
    switch (m) {
        case TableMethod::Auto: return "auto";
        case TableMethod::PatternSum: return "pattern-sum";
        case TableMethod::Contour: return "contour";
    }
    return "auto";
}

bool PmfTable::flagged() const {
    return std::any_of(columns.begin(), columns.end(), [](const PmfColumn& c) { return c.budget_exhausted; });
}

namespace {

// Runs the Laplace recursion state by state at the nodes of two contour
// rules and inverts each new state.
class ContourMarch {
public:
    ContourMarch(const RateModel& model, const OrderSpec& order, double t, int nodes)
        : model_(model), order_(order) {
        ContourRule fine = contour_rule(t, nodes);
        ContourRule coarse = contour_rule(t, nodes - 2);
        fine_count_ = fine.nodes.size();
        nodes_ = fine.nodes;
        nodes_.insert(nodes_.end(), coarse.nodes.begin(), coarse.nodes.end());
        weights_ = fine.weights;
        weights_.insert(weights_.end(), coarse.weights.begin(), coarse.weights.end());
        for (auto s : nodes_) logs_.push_back(std::log(s));
        window_ = model.max_jump() ? static_cast<std::size_t>(*model.max_jump()) : 0;
        history_.resize(nodes_.size());
        powers_.resize(nodes_.size());
    }

    // Advances to state n0 + j (j must increase by one per call).
    PmfValue next(int j) {
        const State n = model_.n0() + j;
        const double a = order_.alpha(n);
        const double mu = model_.mu(n);
        rates_.clear();
        const int top = std::min(model_.effective_jump(std::max(j, 1)), j);
        for (int i = 1; i <= top; ++i) rates_.push_back(model_.rate(n - i, i));
        if (a != power_order_) {
            for (std::size_t q = 0; q < nodes_.size(); ++q) powers_[q] = std::exp(a * logs_[q]);
            power_order_ = a;
        }
        double fine = 0.0, coarse = 0.0, mag = 0.0;
        for (std::size_t q = 0; q < nodes_.size(); ++q) {
            auto& h = history_[q];
            std::complex<double> v;
            if (j == 0) {
                v = std::exp((a - 1.0) * logs_[q]);
            } else {
                for (int i = 1; i <= top; ++i) v += rates_[static_cast<std::size_t>(i - 1)] * at(h, j - i);
            }
            v /= powers_[q] + mu;
            push(h, v);
            std::complex<double> term = weights_[q] * v;
            if (q < fine_count_) {
                fine += term.imag();
                mag += std::abs(term.real()) + std::abs(term.imag());
            } else {
                coarse += term.imag();
            }
        }
        ++states_;
        return {fine, std::abs(fine - coarse) + 8.0 * kUnit * mag};
    }

private:
    std::complex<double> at(const std::vector<std::complex<double>>& h, int j) const {
        if (window_ == 0) return h[static_cast<std::size_t>(j)];
        return h[static_cast<std::size_t>(j) % window_];
    }

    void push(std::vector<std::complex<double>>& h, std::complex<double> v) const {
        if (window_ == 0 || h.size() < window_)
            h.push_back(v);
        else
            h[states_ % window_] = v;
    }

    const RateModel& model_;
    const OrderSpec& order_;
    std::vector<std::complex<double>> nodes_, weights_, logs_;
    std::size_t fine_count_ = 0;
    // ring size for bounded k, 0 to keep the whole history
    std::size_t window_ = 0;
    std::size_t states_ = 0;
    std::vector<std::vector<std::complex<double>>> history_;
    std::vector<double> rates_;
    std::vector<std::complex<double>> powers_;
    double power_order_ = -1.0;
};

}  // namespace

PmfTable pmf_table(const RateModel& model, const OrderSpec& order, std::span<const double> times,
                   const TableOptions& options) {
    if (!(options.mass_tolerance > 0.0)) throw InputError("mass tolerance must be positive");
    if (options.state_budget < 1) throw InputError("state budget must be at least 1");
    PmfTable table;
    table.n0 = model.n0();
    for (double t : times) {
        if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("time grid values must be finite and non-negative");
        PmfColumn col;
        col.t = t;
        if (t == 0.0) {
            col.p = {1.0};
            col.error = {0.0};
            col.contour_from = 1;
            table.columns.push_back(std::move(col));
            continue;
        }
        std::optional<ContourMarch> march;
        if (options.method != TableMethod::PatternSum) march.emplace(model, order, t, options.pmf.contour_nodes);
        col.contour_from = static_cast<std::size_t>(options.state_budget);
        CompensatedSum mass;
        bool reached = false;
        for (State j = 0; j < options.state_budget; ++j) {
            const int jj = static_cast<int>(j);
            PmfValue contour{};
            if (march) {
                contour = march->next(jj);
            }
            bool patterns = options.method == TableMethod::PatternSum ||
                            (options.method == TableMethod::Auto &&
                             theta_count(jj, model.effective_jump(std::max(jj, 1))) <= options.pattern_sum_limit);
            PmfValue v;
            if (patterns) {
                try {
                    v = evaluate_pmf(model, order, model.n0() + j, t, options.pmf);
                } catch (const BudgetExceeded&) {
                    break;
                }
            } else {
                v = contour;
                col.contour_from = std::min(col.contour_from, col.p.size());
            }
            col.p.push_back(v.value);
            col.error.push_back(v.error_bound);
            mass.add(v.value);
            col.deficit = 1.0 - mass.value();
            if (col.deficit <= options.mass_tolerance) {
                reached = true;
                break;
            }
        }
        col.contour_from = std::min(col.contour_from, col.p.size());
        col.budget_exhausted = !reached;
        table.columns.push_back(std::move(col));
    }
    return table;
}

PmfTable pmf_grid(const RateModel& model, const OrderSpec& order, int n_states, std::span<const double> times,
                  const PmfOptions& options) {
    if (n_states < 1) throw InputError("need at least one state");
    PmfTable table;
    table.n0 = model.n0();
    for (double t : times) {
        PmfColumn col;
        col.t = t;
        CompensatedSum mass;
        for (int j = 0; j < n_states; ++j) {
            PmfValue v = evaluate_pmf(model, order, model.n0() + j, t, options);
            col.p.push_back(v.value);
            col.error.push_back(v.error_bound);
            mass.add(v.value);
        }
        col.deficit = 1.0 - mass.value();
        col.contour_from = col.p.size();
        table.columns.push_back(std::move(col));
    }
    return table;
}

void write_csv(const PmfTable& table, std::ostream& out) {
    out << "t,n,p,error_bound\n";
    for (const auto& c : table.columns)
        for (std::size_t j = 0; j < c.p.size(); ++j)
            out << format_number(c.t) << ',' << table.n0 + static_cast<State>(j) << ',' << format_number(c.p[j])
                << ',' << format_number(c.error[j]) << '\n';
}

void write_json(const PmfTable& table, std::ostream& out) {
    out << "{\"source\":" << quote_json(table.source) << ",\"n0\":" << table.n0 << ",\"columns\":[";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        const auto& col = table.columns[c];
        if (c) out << ',';
        out << "{\"t\":" << format_json_number(col.t) << ",\"deficit\":" << format_json_number(col.deficit)
            << ",\"budget_exhausted\":" << (col.budget_exhausted ? "true" : "false") << ",\"p\":[";
        for (std::size_t j = 0; j < col.p.size(); ++j) out << (j ? "," : "") << format_json_number(col.p[j]);
        out << "],\"error_bound\":[";
        for (std::size_t j = 0; j < col.error.size(); ++j) out << (j ? "," : "") << format_json_number(col.error[j]);
        out << "]}";
    }
    out << "]}\n";
}

}  // namespace gfbp
