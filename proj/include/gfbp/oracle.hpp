#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gfbp/pmf.hpp"
#include "gfbp/rates.hpp"
#include "gfbp/special.hpp"

namespace gfbp {

enum class Scheme { Auto, RK4, FractionalABM };
std::string to_string(Scheme s);

struct SolverConfig {
    // Grid spacing; t_end / step is rounded up to a whole number of steps and
    // the step shrunk to fit.
    double step = 1e-3;
    // States n0..n0+n_max are solved.
    int n_max = 10;
    // Memory window of the fractional sums in steps; unset keeps the full history.
    std::optional<std::size_t> max_memory_terms;
    // Auto picks RK4 when every order is 1 and FractionalABM otherwise.
    Scheme scheme = Scheme::Auto;
    // RK4 only: advance all states together instead of one state at a time.
    bool simultaneous = false;
    // Values outside [-tol, 1 + tol] abort the solve.
    double stability_tolerance = 1e-6;
};

// Direct numerical solution of the forward equations
//   D^alpha_n p(n, t) = -mu_n p(n, t) + sum_i rate(n-i, i) p(n-i, t),
// p(n0, 0) = 1, on a uniform grid.  The system is lower triangular, so the
// states are solved one after another, each as a scalar equation whose
// forcing comes from the states below it.  Fractional orders use the
// Adams-Bashforth-Moulton predictor-corrector with product-integration
// weights; order 1 may use classical RK4.  The table has one column per grid
// point, source "oracle" and NaN error bounds.
// Throws InputError for bad arguments and ConvergenceError when the solution
// leaves [0, 1] by more than the stability tolerance.
PmfTable solve_fractional_system(const RateModel& model, const OrderSpec& order, double t_end,
                                 const SolverConfig& config);

// Column of a table at time t (to within 1e-9 of the grid spacing); throws
// InputError when t is not a grid point.
const PmfColumn& column_at(const PmfTable& table, double t);

// Observed convergence order log2(|u_h - u_{h/2}| / |u_{h/2} - u_{h/4}|),
// with maxima over the given states and times.
struct RichardsonResult {
    double order = 0.0;
    double diff_coarse = 0.0;
    double diff_fine = 0.0;
};
RichardsonResult richardson_order(const RateModel& model, const OrderSpec& order, double t_end,
                                  const SolverConfig& config, std::span<const double> times);

// int_0^t_cut e^{-st} f(t) dt by adaptive quadrature (tanh-sinh on [0, 1],
// Gauss-Kronrod on dyadic pieces after that), plus the tail bound
// sup_f e^{-s t_cut} / s.  Throws ConvergenceError when the quadrature error
// estimate is not finite.
Approx numeric_laplace(const std::function<double(double)>& f, double s, double t_cut, double sup = 1.0);

struct ResidualOptions {
    double t_min = 0.1;
    double t_max = 2.0;
    // Flag the grid as coarse when step * max mu^(1/alpha) exceeds this.
    double coarse_threshold = 0.05;
};

struct ResidualReport {
    // sup over the window of |D^alpha p(n) - rhs(n)|, one entry per state n0 + j
    std::vector<double> sup_residual;
    double step = 0.0;
    bool coarse_grid = false;
};

// Caputo derivative of each tabulated state by L1 product integration
// (central differences at order 1), compared with the right-hand side of the
// forward equations.  The table needs uniformly spaced columns starting at 0.
ResidualReport caputo_residual(const RateModel& model, const OrderSpec& order, const PmfTable& table,
                               const ResidualOptions& options = {});

}  // namespace gfbp
