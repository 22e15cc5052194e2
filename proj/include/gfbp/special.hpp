#pragma once

#include <complex>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gfbp {

// A value with an estimate of its absolute error.  reduced_accuracy marks
// results outside the domain where the error estimate is certified.
struct Approx {
    double value = 0.0;
    double error = 0.0;
    bool reduced_accuracy = false;
};

// Thrown by inv_lt_distinct when two rates are closer than the degeneracy
// tolerance; the repeated-rate series (inv_lt_general) handles that case.
class DegenerateRates : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// E_{alpha,1}(z) = sum_j z^j / Gamma(j alpha + 1) for alpha in (0, 1].
// Power series with compensated summation while the alternating series is
// well conditioned, otherwise (z < 0) the real integral representation
//   E_a(-x) = sin(a pi)/(a pi) int_0^inf exp(-w^(1/a)) x / (w^2 + 2 w x cos(a pi) + x^2) dw
// evaluated by adaptive Gauss-Kronrod quadrature.  Results with |z| > 50 are
// flagged reduced_accuracy.  Throws InputError for alpha outside (0, 1] or
// non-finite z.
Approx mittag_leffler(double alpha, double z);

// Inverse Laplace transform of s^(alpha-1) / prod_j (s^alpha + mu_j) for
// pairwise distinct mu, by partial fractions:
//   sum_i E_alpha(-mu_i t^alpha) / prod_{l != i} (mu_l - mu_i).
// Throws DegenerateRates if two mu are within degeneracy_tolerance * max mu.
Approx inv_lt_distinct(double alpha, std::span<const double> mu, double t,
                       double degeneracy_tolerance = 1e-8);

// Same transform for arbitrary positive mu (repeats allowed), summed as
//   sum_{d >= 0} (-1)^d h_d(mu) t^(alpha (d+n-1)) / Gamma(alpha (d+n-1) + 1)
// where h_d is the complete homogeneous symmetric polynomial; this is the
// composition-indexed series with its inner sum collapsed.  Terms are added
// until the tail is certified below eps (the tail is dominated by
// C(d+n-1, n-1) mu_max^d t^(alpha(d+n-1)) / Gamma(.), whose term ratio is
// decreasing).  The returned error adds the tail bound and an estimate of the
// rounding error, which grows with mu_max t^alpha because the series
// alternates.  Throws ConvergenceError if max_terms are not enough.
Approx inv_lt_general(double alpha, std::span<const double> mu, double t, double eps = 1e-15,
                      int max_terms = 100000);

// Inverse Laplace transform of s^(alphas[0]-1) / prod_l (s^alphas[l] + mu[l]),
// one order per factor:
//   sum over y (y_1 >= 0, y_l >= 1) of (-1)^(|y|-n+1) prod mu_l^y_l / prod_{l>=2} mu_l
//       * t^E / Gamma(1 + E),   E = sum_l y_l alphas[l].
// Factors sharing an order are grouped and summed with h_d, as above.
Approx inv_lt_multi_order(std::span<const double> alphas, std::span<const double> mu, double t,
                          double eps = 1e-15, int max_terms = 100000);

// Numerical inversion f(t) of a transform F that is analytic off the
// negative real axis, by the trapezoid rule on the hyperbolic contour
// s(u) = c (1 + sin(i u - 1.1721)), c = 4.4921 N / t, step 1.0818 / N.
// The error estimate compares N nodes against N - 2 nodes and adds the
// rounding level of the largest term.
using LaplaceFn = std::function<std::complex<double>(std::complex<double>)>;
Approx invert_laplace(const LaplaceFn& F, double t, int nodes = 16);

// Contour nodes and weights so callers can evaluate transforms in bulk:
// f(t) ~= sum_k Im(weight_k * F(node_k)).
struct ContourRule {
    std::vector<std::complex<double>> nodes;
    std::vector<std::complex<double>> weights;
};
ContourRule contour_rule(double t, int nodes);

// The multi-order kernel above evaluated by contour inversion.
Approx inv_lt_contour(std::span<const double> alphas, std::span<const double> mu, double t,
                      int nodes = 16);

// sum_i prod_{j != i} (x + lambda_j) / (lambda_j - lambda_i), identically 1
// for distinct lambda.  Throws InputError on repeated lambda or n < 2.
double partial_fraction_unity(double x, std::span<const double> lambdas);

// Complete homogeneous symmetric polynomial h_d(mu), by the recurrence
// h_d(mu_1..mu_j) = h_d(mu_1..mu_{j-1}) + mu_j h_{d-1}(mu_1..mu_j).
double complete_homogeneous(std::span<const double> mu, int d);

// sum over Omega_n^i of prod mu_j^y_j by explicit enumeration (small i only).
double omega_weight_sum(std::span<const double> mu, int i);

}  // namespace gfbp
