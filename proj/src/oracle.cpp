#include "gfbp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "gfbp/errors.hpp"

namespace gfbp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Grid {
    std::size_t steps = 0;
    double h = 0.0;
};

Grid make_grid(double t_end, double step) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw InputError("t_end must be positive");
    if (!(step > 0.0)) throw InputError("step must be positive");
    double ratio = t_end / step;
    auto steps = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
    if (steps == 0) steps = 1;
    if (steps > 50'000'000) throw InputError("grid has too many steps");
    return {steps, t_end / static_cast<double>(steps)};
}

// Per-state coefficients of the truncated system.
struct System {
    std::vector<double> mu;
    std::vector<double> alpha;
    // inflow[j] = {(i, rate(n0+j-i, i))}
    std::vector<std::vector<std::pair<int, double>>> inflow;

    System(const RateModel& model, const OrderSpec& order, int n_max) {
        const State n0 = model.n0();
        for (int j = 0; j <= n_max; ++j) {
            mu.push_back(model.mu(n0 + j));
            alpha.push_back(order.alpha(n0 + j));
            std::vector<std::pair<int, double>> in;
            for (int i = 1; i <= std::min(model.effective_jump(std::max(j, 1)), j); ++i)
                in.emplace_back(i, model.rate(n0 + j - i, i));
            inflow.push_back(std::move(in));
        }
    }
};

// Scalar equation D^a y = -mu y + g(t), y(0) = y0, by the fractional
// Adams-Bashforth-Moulton scheme (PECE, one corrector pass).
std::vector<double> abm_scalar(double a, double mu, double y0, const std::vector<double>& g, double h,
                               std::optional<std::size_t> memory) {
    const std::size_t N = g.size() - 1;
    std::vector<double> B(N + 1), A(N + 1), y(N + 1), f(N + 1);
    for (std::size_t r = 0; r <= N; ++r) {
        double rr = static_cast<double>(r);
        B[r] = std::pow(rr + 1.0, a) - std::pow(rr, a);
        A[r] = std::pow(rr + 2.0, a + 1.0) + std::pow(rr, a + 1.0) - 2.0 * std::pow(rr + 1.0, a + 1.0);
    }
    const double pred_scale = std::pow(h, a) / (a * std::tgamma(a));
    const double corr_scale = std::pow(h, a) / std::tgamma(a + 2.0);
    y[0] = y0;
    f[0] = -mu * y0 + g[0];
    for (std::size_t k = 0; k < N; ++k) {
        const double kk = static_cast<double>(k);
        std::size_t first = 0;
        if (memory && k + 1 > *memory) first = k + 1 - *memory;
        double pred = 0.0, corr = 0.0;
        for (std::size_t i = first; i <= k; ++i) {
            pred += B[k - i] * f[i];
            if (i == 0)
                corr += (std::pow(kk, a + 1.0) - (kk - a) * std::pow(kk + 1.0, a)) * f[0];
            else
                corr += A[k - i] * f[i];
        }
        double yp = y0 + pred_scale * pred;
        double fp = -mu * yp + g[k + 1];
        y[k + 1] = y0 + corr_scale * (fp + corr);
        f[k + 1] = -mu * y[k + 1] + g[k + 1];
    }
    return y;
}

void check_range(const std::vector<double>& y, double tol, State n, double h) {
    for (double v : y)
        if (!(v >= -tol && v <= 1.0 + tol)) {
            std::ostringstream os;
            os << "solution for state " << n << " left [0, 1] (value " << v << ") at step " << h
               << "; refine the step";
            throw ConvergenceError(os.str(), v, std::abs(v));
        }
}

PmfTable to_table(const RateModel& model, const std::vector<std::vector<double>>& states, const Grid& grid) {
    PmfTable table;
    table.n0 = model.n0();
    table.source = "oracle";
    table.columns.resize(grid.steps + 1);
    for (std::size_t k = 0; k <= grid.steps; ++k) {
        PmfColumn& c = table.columns[k];
        c.t = static_cast<double>(k) * grid.h;
        double mass = 0.0;
        for (const auto& s : states) {
            c.p.push_back(s[k]);
            c.error.push_back(kNaN);
            mass += s[k];
        }
        c.deficit = 1.0 - mass;
        c.contour_from = c.p.size();
    }
    return table;
}

// RK4 stage arguments of one state: y, y + h/2 k1, y + h/2 k2, y + h k3 at each step.
struct Stages {
    std::vector<double> y1, y2, y3, y4;
};

std::vector<std::vector<double>> rk4_sequential(const System& sys, const Grid& grid) {
    const std::size_t N = grid.steps;
    const double h = grid.h;
    std::vector<Stages> stages(sys.mu.size());
    std::vector<std::vector<double>> out;
    for (std::size_t j = 0; j < sys.mu.size(); ++j) {
        Stages& st = stages[j];
        st.y1.resize(N);
        st.y2.resize(N);
        st.y3.resize(N);
        st.y4.resize(N);
        std::vector<double> y(N + 1);
        y[0] = j == 0 ? 1.0 : 0.0;
        const double mu = sys.mu[j];
        auto forcing = [&](std::vector<double> Stages::*which, std::size_t k) {
            double g = 0.0;
            for (const auto& [i, r] : sys.inflow[j]) g += r * (stages[j - static_cast<std::size_t>(i)].*which)[k];
            return g;
        };
        for (std::size_t k = 0; k < N; ++k) {
            double Y1 = y[k];
            double k1 = -mu * Y1 + forcing(&Stages::y1, k);
            double Y2 = y[k] + h / 2 * k1;
            double k2 = -mu * Y2 + forcing(&Stages::y2, k);
            double Y3 = y[k] + h / 2 * k2;
            double k3 = -mu * Y3 + forcing(&Stages::y3, k);
            double Y4 = y[k] + h * k3;
            double k4 = -mu * Y4 + forcing(&Stages::y4, k);
            y[k + 1] = y[k] + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
            st.y1[k] = Y1;
            st.y2[k] = Y2;
            st.y3[k] = Y3;
            st.y4[k] = Y4;
        }
        out.push_back(std::move(y));
    }
    return out;
}

std::vector<std::vector<double>> rk4_simultaneous(const System& sys, const Grid& grid) {
    const std::size_t N = grid.steps, S = sys.mu.size();
    const double h = grid.h;
    std::vector<std::vector<double>> out(S, std::vector<double>(N + 1, 0.0));
    std::vector<double> y(S, 0.0), Y(S), k1(S), k2(S), k3(S), k4(S);
    y[0] = 1.0;
    auto rhs = [&](const std::vector<double>& x, std::vector<double>& d) {
        for (std::size_t j = 0; j < S; ++j) {
            double g = 0.0;
            for (const auto& [i, r] : sys.inflow[j]) g += r * x[j - static_cast<std::size_t>(i)];
            d[j] = -sys.mu[j] * x[j] + g;
        }
    };
    for (std::size_t j = 0; j < S; ++j) out[j][0] = y[j];
    for (std::size_t k = 0; k < N; ++k) {
        rhs(y, k1);
        for (std::size_t j = 0; j < S; ++j) Y[j] = y[j] + h / 2 * k1[j];
        rhs(Y, k2);
        for (std::size_t j = 0; j < S; ++j) Y[j] = y[j] + h / 2 * k2[j];
        rhs(Y, k3);
        for (std::size_t j = 0; j < S; ++j) Y[j] = y[j] + h * k3[j];
        rhs(Y, k4);
        for (std::size_t j = 0; j < S; ++j) {
            y[j] = y[j] + h / 6 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
            out[j][k + 1] = y[j];
        }
    }
    return out;
}

}  // namespace

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::Auto: return "auto";
        case Scheme::RK4: return "rk4";
        case Scheme::FractionalABM: return "abm";
    }
    return "auto";
}

PmfTable solve_fractional_system(const RateModel& model, const OrderSpec& order, double t_end,
                                 const SolverConfig& config) {
    if (config.n_max < 0) throw InputError("n_max must be non-negative");
    if (config.max_memory_terms && *config.max_memory_terms == 0) throw InputError("memory window must be positive");
    Grid grid = make_grid(t_end, config.step);
    System sys(model, order, config.n_max);
    const bool all_one = std::all_of(sys.alpha.begin(), sys.alpha.end(), [](double a) { return a == 1.0; });
    Scheme scheme = config.scheme;
    if (scheme == Scheme::Auto) scheme = all_one ? Scheme::RK4 : Scheme::FractionalABM;
    if (scheme == Scheme::RK4 && !all_one) throw InputError("RK4 needs every order equal to 1");

    std::vector<std::vector<double>> states;
    if (scheme == Scheme::RK4) {
        states = config.simultaneous ? rk4_simultaneous(sys, grid) : rk4_sequential(sys, grid);
    } else {
        for (std::size_t j = 0; j < sys.mu.size(); ++j) {
            std::vector<double> g(grid.steps + 1, 0.0);
            for (const auto& [i, r] : sys.inflow[j]) {
                const auto& lower = states[j - static_cast<std::size_t>(i)];
                for (std::size_t k = 0; k <= grid.steps; ++k) g[k] += r * lower[k];
            }
            states.push_back(abm_scalar(sys.alpha[j], sys.mu[j], j == 0 ? 1.0 : 0.0, g, grid.h,
                                        config.max_memory_terms));
        }
    }
    for (std::size_t j = 0; j < states.size(); ++j)
        check_range(states[j], config.stability_tolerance, model.n0() + static_cast<State>(j), grid.h);
    return to_table(model, states, grid);
}

const PmfColumn& column_at(const PmfTable& table, double t) {
    if (table.columns.size() >= 2) {
        double h = table.columns[1].t - table.columns[0].t;
        double pos = (t - table.columns[0].t) / h;
        double k = std::round(pos);
        if (k >= 0 && k < static_cast<double>(table.columns.size()) && std::abs(pos - k) < 1e-9 * std::max(1.0, k))
            return table.columns[static_cast<std::size_t>(k)];
    } else if (table.columns.size() == 1 && table.columns[0].t == t) {
        return table.columns[0];
    }
    std::ostringstream os;
    os << "time " << t << " is not on the table grid";
    throw InputError(os.str());
}

RichardsonResult richardson_order(const RateModel& model, const OrderSpec& order, double t_end,
                                  const SolverConfig& config, std::span<const double> times) {
    SolverConfig c = config;
    PmfTable coarse = solve_fractional_system(model, order, t_end, c);
    c.step = config.step / 2;
    PmfTable mid = solve_fractional_system(model, order, t_end, c);
    c.step = config.step / 4;
    PmfTable fine = solve_fractional_system(model, order, t_end, c);
    RichardsonResult r;
    for (double t : times) {
        const auto& a = column_at(coarse, t);
        const auto& b = column_at(mid, t);
        const auto& f = column_at(fine, t);
        for (std::size_t j = 0; j < a.p.size(); ++j) {
            r.diff_coarse = std::max(r.diff_coarse, std::abs(a.p[j] - b.p[j]));
            r.diff_fine = std::max(r.diff_fine, std::abs(b.p[j] - f.p[j]));
        }
    }
    r.order = std::log2(r.diff_coarse / r.diff_fine);
    return r;
}

Approx numeric_laplace(const std::function<double(double)>& f, double s, double t_cut, double sup) {
    using boost::math::quadrature::gauss_kronrod;
    if (!(s > 0.0)) throw InputError("Laplace variable must be positive");
    if (!(t_cut > 0.0)) throw InputError("t_cut must be positive");
    auto g = [&](double t) { return std::exp(-s * t) * f(t); };
    static thread_local boost::math::quadrature::tanh_sinh<double> endpoint_rule;
    double total = 0.0, err = 0.0;
    double a = 0.0, b = std::min(1.0, t_cut);
    double e = 0.0;
    total += endpoint_rule.integrate(g, a, b, 1e-12, &e);
    err += e;
    while (b < t_cut) {
        a = b;
        b = std::min(2.0 * b, t_cut);
        total += gauss_kronrod<double, 21>::integrate(g, a, b, 10, 1e-12, &e);
        err += e;
    }
    if (!std::isfinite(err) || !std::isfinite(total))
        throw ConvergenceError("Laplace quadrature did not converge", total, err);
    double tail = sup * std::exp(-s * t_cut) / s;
    return {total, err + tail, false};
}

ResidualReport caputo_residual(const RateModel& model, const OrderSpec& order, const PmfTable& table,
                               const ResidualOptions& options) {
    const auto& cols = table.columns;
    if (cols.size() < 3) throw InputError("residual needs at least three time points");
    if (cols[0].t != 0.0) throw InputError("residual needs a grid starting at t = 0");
    const double h = cols[1].t - cols[0].t;
    for (std::size_t k = 1; k < cols.size(); ++k)
        if (std::abs((cols[k].t - cols[k - 1].t) - h) > 1e-9 * h) throw InputError("residual needs a uniform grid");
    if (table.n0 != model.n0()) throw InputError("table and model disagree on n0");
    std::size_t S = cols[0].p.size();
    for (const auto& c : cols) S = std::min(S, c.p.size());

    ResidualReport report;
    report.step = h;
    report.sup_residual.assign(S, 0.0);
    const std::size_t K = cols.size();
    for (std::size_t j = 0; j < S; ++j) {
        const State n = model.n0() + static_cast<State>(j);
        const double a = order.alpha(n);
        const double mu = model.mu(n);
        report.coarse_grid = report.coarse_grid || h * std::pow(mu, 1.0 / a) > options.coarse_threshold;
        std::vector<std::pair<std::size_t, double>> inflow;
        for (int i = 1; i <= std::min<State>(model.effective_jump(std::max<int>(static_cast<int>(j), 1)),
                                             static_cast<State>(j));
             ++i)
            inflow.emplace_back(j - static_cast<std::size_t>(i), model.rate(n - i, i));
        std::vector<double> weights;
        if (a < 1.0) {
            weights.resize(K);
            for (std::size_t r = 0; r < K; ++r)
                weights[r] = std::pow(static_cast<double>(r + 1), 1.0 - a) - std::pow(static_cast<double>(r), 1.0 - a);
        }
        const double scale = std::pow(h, -a) / std::tgamma(2.0 - a);
        auto p = [&](std::size_t k) { return cols[k].p[j]; };
        for (std::size_t k = 1; k < K; ++k) {
            double t = cols[k].t;
            if (t < options.t_min - 1e-12 || t > options.t_max + 1e-12) continue;
            double d;
            if (a < 1.0) {
                d = 0.0;
                for (std::size_t r = 0; r < k; ++r) d += weights[r] * (p(k - r) - p(k - r - 1));
                d *= scale;
            } else if (k + 1 < K) {
                d = (p(k + 1) - p(k - 1)) / (2.0 * h);
            } else {
                d = (3.0 * p(k) - 4.0 * p(k - 1) + p(k - 2)) / (2.0 * h);
            }
            double rhs = -mu * p(k);
            for (const auto& [lower, r] : inflow) rhs += r * cols[k].p[lower];
            report.sup_residual[j] = std::max(report.sup_residual[j], std::abs(d - rhs));
        }
    }
    return report;
}

}  // namespace gfbp
