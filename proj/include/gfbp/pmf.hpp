#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gfbp/combinat.hpp"
#include "gfbp/rates.hpp"

namespace gfbp {

enum class KernelChoice { Auto, Distinct, General, Contour };
std::string to_string(KernelChoice k);

struct PmfOptions {
    // Largest |Theta_m^k| a single pmf evaluation may sum over.
    std::uint64_t pattern_budget = 2'000'000;
    // Relative gap below which two rate totals count as equal.
    double degeneracy_tolerance = 1e-8;
    // Tail target of the series kernels.
    double series_tolerance = 1e-16;
    // In Auto mode a path whose weighted kernel error exceeds this is
    // recomputed with the next method (distinct, series, contour) and the
    // most accurate result is kept.
    double kernel_tolerance = 1e-13;
    KernelChoice kernel = KernelChoice::Auto;
    int contour_nodes = 16;
};

struct PmfValue {
    double value = 0.0;
    double error_bound = 0.0;
};

// Rates along one jump path from n0 to n0 + m.
struct PathRateProfile {
    JumpPattern pattern;
    EpochSet epochs;
    // mu[l] = total_rate(n0 + epochs.levels[l])
    std::vector<double> mu;
    // prod_j rate(n0 + j, x_{j+1}) over the jumps of the path (zeros count as 1)
    double jump_rate_product = 1.0;
};

PathRateProfile path_profile(const RateModel& model, const JumpPattern& x);

// Transition probability P(X(t) = n | X(0) = n0) for a constant order, as a
// sum over jump patterns of path weight times inverse-transform kernel.
// Unbounded-k models use all patterns of Theta_m^m, and the truncation of
// their rate totals is added to the error bound.  Throws InputError for
// n < n0 or t < 0 and BudgetExceeded when |Theta| exceeds the budget.
PmfValue pmf(const RateModel& model, double alpha, State n, double t, const PmfOptions& options = {});

// Same with one order per state; each path uses the orders of the states it
// visits.  Falls back to pmf() when the visited orders coincide.
PmfValue pmf_state_dependent(const RateModel& model, const OrderSpec& order, State n, double t,
                             const PmfOptions& options = {});

// Dispatches on order.is_constant().
PmfValue evaluate_pmf(const RateModel& model, const OrderSpec& order, State n, double t,
                      const PmfOptions& options = {});

// P(W_1 > t) for the first waiting time: the pmf at n0.
PmfValue survival_first_wait(const RateModel& model, const OrderSpec& order, double t);

// Laplace transform of the pmf at real s > 0, summed over jump patterns.
double pmf_laplace(const RateModel& model, const OrderSpec& order, State n, double s,
                   const PmfOptions& options = {});

// Laplace transforms for states n0..n_max at complex s from the triangular
// recursion  P(n) = sum_i rate(n-i, i) P(n-i) / (s^alpha_n + mu_n),
// P(n0) = s^(alpha_n0 - 1) / (s^alpha_n0 + mu_n0).
std::vector<std::complex<double>> laplace_recursive(const RateModel& model, const OrderSpec& order,
                                                    State n_max, std::complex<double> s);

// ---------------------------------------------------------------------------

enum class TableMethod { Auto, PatternSum, Contour };
std::string to_string(TableMethod m);

struct TableOptions {
    double mass_tolerance = 1e-8;
    // Largest number of states per time point.
    State state_budget = 200000;
    // Auto sums patterns while |Theta_m^k| <= pattern_sum_limit and inverts
    // the Laplace recursion on the contour for larger m.
    TableMethod method = TableMethod::Auto;
    std::uint64_t pattern_sum_limit = 20000;
    PmfOptions pmf;
};

// One time point: p[j] and error[j] belong to state n0 + j.
struct PmfColumn {
    double t = 0.0;
    std::vector<double> p;
    std::vector<double> error;
    // 1 - sum p
    double deficit = 0.0;
    // the mass tolerance was not reached within the state budget
    bool budget_exhausted = false;
    // first index computed by contour inversion (p.size() if none)
    std::size_t contour_from = 0;
};

struct PmfTable {
    State n0 = 0;
    std::vector<PmfColumn> columns;
    std::string source = "pmf";

    bool flagged() const;
};

// States n0, n0+1, ... at each time until the deficit falls to the mass
// tolerance; exhausting the state budget flags the column instead of failing.
PmfTable pmf_table(const RateModel& model, const OrderSpec& order, std::span<const double> times,
                   const TableOptions& options = {});

// Fixed states n0..n0+n_states-1 at each time, by pattern sums.
PmfTable pmf_grid(const RateModel& model, const OrderSpec& order, int n_states, std::span<const double> times,
                  const PmfOptions& options = {});

// CSV: header "t,n,p,error_bound", one row per (time, state), LF endings.
void write_csv(const PmfTable& table, std::ostream& out);
// JSON object with source, n0 and one entry per time point.
void write_json(const PmfTable& table, std::ostream& out);

}  // namespace gfbp
