#include "gfbp/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>

#include "gfbp/combinat.hpp"
#include "gfbp/errors.hpp"

namespace gfbp {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;
constexpr double kCertifiedArgument = 50.0;

// Neumaier's compensated sum.
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

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        std::ostringstream os;
        os << "order alpha = " << alpha << " is outside (0, 1]";
        throw InputError(os.str());
    }
}

// |z|^j / Gamma(j alpha + 1)
double series_magnitude(double logz, double absz, int j, double alpha) {
    double arg = j * alpha + 1.0;
    if (arg < 170.0) {
        double num = std::pow(absz, j);
        double den = std::tgamma(arg);
        if (std::isfinite(num) && num > 0.0) return num / den;
    }
    return std::exp(j * logz - std::lgamma(arg));
}

struct SeriesResult {
    double value;
    double abs_sum;
    double error;
};

SeriesResult ml_series(double alpha, double z) {
    const double absz = std::abs(z);
    const double logz = std::log(absz);
    CompensatedSum sum;
    double abs_sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    double tail = 0.0;
    for (int j = 0; j < 20000; ++j) {
        double mag = series_magnitude(logz, absz, j, alpha);
        double term = (z < 0.0 && (j & 1)) ? -mag : mag;
        sum.add(term);
        abs_sum += mag;
        if (j > 0 && mag < prev && mag <= kUnit * 1e-3 * std::abs(sum.value())) {
            // the next ratio bounds every later one: the ratio sequence decreases
            double next = series_magnitude(logz, absz, j + 1, alpha);
            double r = next / mag;
            tail = r < 1.0 ? next / (1.0 - r) : next;
            break;
        }
        prev = mag;
    }
    double v = sum.value();
    return {v, abs_sum, tail + 4.0 * kUnit * (abs_sum + std::abs(v))};
}

Approx ml_integral(double alpha, double x) {
    using boost::math::quadrature::gauss_kronrod;
    const double pi = std::numbers::pi;
    const double c = std::cos(alpha * pi);
    const double s = std::sin(alpha * pi);
    const double inv_alpha = 1.0 / alpha;
    auto f = [&](double w) {
        double den = w * w + 2.0 * w * x * c + x * x;
        return std::exp(-std::pow(w, inv_alpha)) * x / den;
    };
    const double upper = std::pow(745.0, alpha);
    std::vector<double> cuts{0.0, upper, std::min(1.0, upper)};
    if (c < 0.0) {
        // the denominator is smallest near w = -x cos(a pi) with width ~ x sin(a pi)
        double centre = -x * c;
        double width = x * s;
        for (double p : {centre - 4.0 * width, centre - width, centre, centre + width, centre + 4.0 * width})
            if (p > 0.0 && p < upper) cuts.push_back(p);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    // exp(-w^(1/a)) is not smooth at w = 0, which tanh-sinh tolerates
    static thread_local boost::math::quadrature::tanh_sinh<double> endpoint_rule;
    double total = 0.0, err = 0.0;
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
        double e = 0.0;
        if (j == 0)
            total += endpoint_rule.integrate(f, cuts[j], cuts[j + 1], 1e-13, &e);
        else
            total += gauss_kronrod<double, 31>::integrate(f, cuts[j], cuts[j + 1], 12, 1e-13, &e);
        err += e;
    }
    double scale = s / (alpha * pi);
    double value = scale * total;
    return {value, scale * err + 16.0 * kUnit * std::abs(value), false};
}

// log(|z|^{1/alpha}) beyond which the alternating series loses all digits
constexpr double kSeriesExponentLimit = 18.0;

}  // namespace

Approx mittag_leffler(double alpha, double z) {
    check_alpha(alpha);
    if (!std::isfinite(z)) throw InputError("Mittag-Leffler argument must be finite");
    const bool reduced = std::abs(z) > kCertifiedArgument;
    if (z == 0.0) return {1.0, 0.0, false};
    if (alpha == 1.0) {
        double v = std::exp(z);
        return {v, 2.0 * kUnit * v * (1.0 + std::abs(z)), reduced};
    }
    if (z > 0.0 || std::pow(-z, 1.0 / alpha) <= kSeriesExponentLimit) {
        SeriesResult r = ml_series(alpha, z);
        if (z > 0.0 || r.error <= 1e-11 * std::abs(r.value))
            return {r.value, r.error, reduced || !std::isfinite(r.value)};
    }
    Approx a = ml_integral(alpha, -z);
    a.reduced_accuracy = reduced;
    return a;
}

Approx inv_lt_distinct(double alpha, std::span<const double> mu, double t, double degeneracy_tolerance) {
    check_alpha(alpha);
    const std::size_t n = mu.size();
    if (n == 0) throw InputError("inv_lt_distinct needs at least one rate");
    if (!(t >= 0.0)) throw InputError("time must be non-negative");
    double mmax = 0.0;
    for (double m : mu) {
        if (!(m > 0.0)) throw InputError("rates must be positive");
        mmax = std::max(mmax, m);
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (std::abs(mu[a] - mu[b]) <= degeneracy_tolerance * mmax) {
                std::ostringstream os;
                os << "rates " << mu[a] << " and " << mu[b]
                   << " are too close for partial fractions; use inv_lt_general";
                throw DegenerateRates(os.str());
            }
    if (t == 0.0) return {n == 1 ? 1.0 : 0.0, 0.0, false};
    const double ta = std::pow(t, alpha);
    CompensatedSum sum;
    double err = 0.0, abs_sum = 0.0;
    bool reduced = false;
    for (std::size_t i = 0; i < n; ++i) {
        double prod = 1.0;
        for (std::size_t l = 0; l < n; ++l)
            if (l != i) prod *= mu[l] - mu[i];
        Approx e = mittag_leffler(alpha, -mu[i] * ta);
        double term = e.value / prod;
        sum.add(term);
        abs_sum += std::abs(term);
        err += e.error / std::abs(prod);
        reduced = reduced || e.reduced_accuracy;
    }
    double v = sum.value();
    err += kUnit * (2.0 * static_cast<double>(n) + 4.0) * abs_sum;
    return {v, err, reduced};
}

namespace {

struct OrderGroup {
    double alpha;
    std::vector<double> scaled_mu;  // mu / mu_max
    int offset;                     // exponent count carried by the group at d = 0
    // h_d of scaled_mu for d = 0, 1, ...; dp holds the recurrence row for the last d
    std::vector<double> h;
    std::vector<double> dp;

    void extend() {
        if (h.empty()) {
            dp.assign(scaled_mu.size(), 1.0);
            h.push_back(1.0);
            return;
        }
        double running = 0.0;
        for (std::size_t j = 0; j < scaled_mu.size(); ++j) {
            running = running + scaled_mu[j] * dp[j];
            dp[j] = running;
        }
        h.push_back(running);
    }
};

double log_binomial(double top, double bottom) {
    return std::lgamma(top + 1.0) - std::lgamma(bottom + 1.0) - std::lgamma(top - bottom + 1.0);
}

// Visits every d in N^r with |d| = total, in lexicographic order.
template <class Visit>
void for_each_split(std::vector<int>& d, std::size_t pos, int remaining, Visit& visit) {
    if (pos + 1 == d.size()) {
        d[pos] = remaining;
        visit(d);
        return;
    }
    for (int v = remaining; v >= 0; --v) {
        d[pos] = v;
        for_each_split(d, pos + 1, remaining - v, visit);
    }
}

Approx grouped_series(std::span<const double> alphas, std::span<const double> mu, double t, double eps,
                      int max_terms) {
    const std::size_t n = mu.size();
    if (n == 0) throw InputError("inverse transform needs at least one rate");
    if (alphas.size() != n) throw InputError("one order per rate is required");
    if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("time must be finite and non-negative");
    double mmax = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        check_alpha(alphas[l]);
        if (!(mu[l] > 0.0) || !std::isfinite(mu[l])) throw InputError("rates must be positive and finite");
        mmax = std::max(mmax, mu[l]);
    }
    if (t == 0.0) return {n == 1 ? 1.0 : 0.0, 0.0, false};

    std::vector<OrderGroup> groups;
    for (std::size_t l = 0; l < n; ++l) {
        auto it = std::find_if(groups.begin(), groups.end(), [&](const OrderGroup& g) { return g.alpha == alphas[l]; });
        if (it == groups.end()) {
            groups.push_back(OrderGroup{alphas[l], {}, 0, {}, {}});
            it = groups.end() - 1;
        }
        it->scaled_mu.push_back(mu[l] / mmax);
        if (l > 0) it->offset += 1;
    }
    double base = 0.0, amin = 1.0;
    for (const auto& g : groups) {
        base += g.offset * g.alpha;
        amin = std::min(amin, g.alpha);
    }

    const double logt = std::log(t);
    const double logm = std::log(mmax);
    const double nn = static_cast<double>(n);
    CompensatedSum sum;
    double abs_sum = 0.0, rounding = 0.0;
    std::vector<int> d(groups.size(), 0);

    auto level_bound = [&](int level) {
        double elo = base + level * amin;
        return std::exp(log_binomial(level + nn - 1.0, nn - 1.0) + level * logm + elo * logt - std::lgamma(1.0 + elo));
    };

    for (int level = 0; level <= max_terms; ++level) {
        for (auto& g : groups) g.extend();
        const double sign = (level & 1) ? -1.0 : 1.0;
        auto visit = [&](const std::vector<int>& split) {
            double weight = 1.0, e = base;
            for (std::size_t g = 0; g < groups.size(); ++g) {
                weight *= groups[g].h[static_cast<std::size_t>(split[g])];
                e += split[g] * groups[g].alpha;
            }
            if (weight == 0.0) return;
            double lg = level * logm + e * logt - std::lgamma(1.0 + e);
            double mag = weight * std::exp(lg);
            sum.add(sign * mag);
            abs_sum += mag;
            rounding += mag * kUnit * (std::abs(lg) + level + nn + 4.0);
        };
        for_each_split(d, 0, level, visit);

        if (kUnit * abs_sum > 1e6) {
            // cancellation has destroyed every digit; let the caller switch method
            return {sum.value(), std::numeric_limits<double>::infinity(), true};
        }
        int next = level + 1;
        double elo = base + next * amin;
        if (boost::math::digamma(1.0 + elo) < logt) continue;
        double b = level_bound(next);
        double ratio = (next + nn) / (next + 1.0) * mmax * std::exp(amin * logt + std::lgamma(1.0 + elo) -
                                                                     std::lgamma(1.0 + elo + amin));
        if (ratio >= 1.0) continue;
        double tail = b / (1.0 - ratio);
        if (tail <= eps) {
            double v = sum.value();
            return {v, tail + rounding + kUnit * std::abs(v), false};
        }
    }
    std::ostringstream os;
    os << "inverse-transform series not certified after " << max_terms << " levels";
    throw ConvergenceError(os.str(), sum.value(), std::numeric_limits<double>::infinity());
}

}  // namespace

Approx inv_lt_general(double alpha, std::span<const double> mu, double t, double eps, int max_terms) {
    check_alpha(alpha);
    std::vector<double> alphas(mu.size(), alpha);
    return grouped_series(alphas, mu, t, eps, max_terms);
}

Approx inv_lt_multi_order(std::span<const double> alphas, std::span<const double> mu, double t, double eps,
                          int max_terms) {
    return grouped_series(alphas, mu, t, eps, max_terms);
}

ContourRule contour_rule(double t, int nodes) {
    if (!(t > 0.0)) throw InputError("contour inversion needs t > 0");
    if (nodes < 4) throw InputError("contour inversion needs at least 4 nodes");
    constexpr double a = 1.1721;
    const double h = 1.0818 / nodes;
    const double c = 4.4921 * nodes / t;
    const std::complex<double> I(0.0, 1.0);
    ContourRule rule;
    for (int k = 0; k <= nodes; ++k) {
        std::complex<double> w = I * (k * h) - a;
        std::complex<double> s = c * (1.0 + std::sin(w));
        std::complex<double> ds = I * c * std::cos(w);
        double half = (k == 0) ? 0.5 : 1.0;
        rule.nodes.push_back(s);
        rule.weights.push_back(half * (h / std::numbers::pi) * std::exp(s * t) * ds);
    }
    return rule;
}

namespace {

std::pair<double, double> apply_rule(const ContourRule& rule, const LaplaceFn& F) {
    double v = 0.0, mag = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        std::complex<double> term = rule.weights[k] * F(rule.nodes[k]);
        v += term.imag();
        mag += std::abs(term);
    }
    return {v, mag};
}

}  // namespace

Approx invert_laplace(const LaplaceFn& F, double t, int nodes) {
    auto [fine, mag] = apply_rule(contour_rule(t, nodes), F);
    auto [coarse, mag2] = apply_rule(contour_rule(t, nodes - 2), F);
    (void)mag2;
    return {fine, std::abs(fine - coarse) + 8.0 * kUnit * mag, false};
}

Approx inv_lt_contour(std::span<const double> alphas, std::span<const double> mu, double t, int nodes) {
    const std::size_t n = mu.size();
    if (n == 0 || alphas.size() != n) throw InputError("contour kernel needs one order per rate");
    for (std::size_t l = 0; l < n; ++l) {
        check_alpha(alphas[l]);
        if (!(mu[l] > 0.0)) throw InputError("rates must be positive");
    }
    if (!(t >= 0.0)) throw InputError("time must be non-negative");
    if (t == 0.0) return {n == 1 ? 1.0 : 0.0, 0.0, false};
    std::vector<double> a(alphas.begin(), alphas.end()), m(mu.begin(), mu.end());
    auto F = [a, m](std::complex<double> s) {
        std::complex<double> logs = std::log(s);
        std::complex<double> v = std::exp((a[0] - 1.0) * logs);
        for (std::size_t l = 0; l < a.size(); ++l) v /= std::exp(a[l] * logs) + m[l];
        return v;
    };
    return invert_laplace(F, t, nodes);
}

double partial_fraction_unity(double x, std::span<const double> lambdas) {
    const std::size_t n = lambdas.size();
    if (n < 2) throw InputError("partial_fraction_unity needs at least two values");
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            if (lambdas[a] == lambdas[b]) throw InputError("partial_fraction_unity needs distinct values");
    long double sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        long double term = 1.0L;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                term *= (static_cast<long double>(x) + lambdas[j]) /
                        (static_cast<long double>(lambdas[j]) - lambdas[i]);
        sum += term;
    }
    return static_cast<double>(sum);
}

double complete_homogeneous(std::span<const double> mu, int d) {
    if (d < 0) return 0.0;
    std::vector<double> row(mu.size(), 1.0);
    double h = 1.0;
    for (int level = 1; level <= d; ++level) {
        double running = 0.0;
        for (std::size_t j = 0; j < mu.size(); ++j) {
            running += mu[j] * row[j];
            row[j] = running;
        }
        h = running;
    }
    return mu.empty() ? (d == 0 ? 1.0 : 0.0) : h;
}

double omega_weight_sum(std::span<const double> mu, int i) {
    const int n = static_cast<int>(mu.size());
    double total = 0.0;
    for (const Composition& c : enumerate_omega(n, i)) {
        double p = 1.0;
        for (int j = 0; j < n; ++j) p *= std::pow(mu[static_cast<std::size_t>(j)], c.y[static_cast<std::size_t>(j)]);
        total += p;
    }
    return total;
}

}  // namespace gfbp
