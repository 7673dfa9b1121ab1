#pragma once

// Independent reference computations used by the unit tests, the acceptance
// suite and `spinflop selftest`. Nothing here calls the closed forms it is
// meant to check: integrals are done by periodic trapezoid quadrature and
// series are summed in long double.

#include <functional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "spinflop/stationary.hpp"

namespace spinflop::oracle {

inline constexpr int kNodes = 4096;

// (2 pi / n) sum_j f(2 pi j / n); spectrally accurate for smooth periodic f.
double trapezoid_periodic(const std::function<double(double)>& f, int nodes = kNodes);

// Power series of I_v summed in long double for a fixed number of terms.
long double bessel_i_series(int v, long double y, int terms = 120);

// (1/2pi) int cos(v a) exp(y cos a) da by trapezoid quadrature.
double bessel_i_quadrature(int v, double y, int nodes = kNodes);

struct QuadratureMoments {
    double normalizer = 0.0;  // int exp{...} dx
    double mass = 0.0;        // int q dx, should be 1
    double mean_cos = 0.0;
    double mean_sin = 0.0;
    double mean_cos2 = 0.0;
};

// Moments of exp{2 theta r cos(psi - x) + 2 h eta cos x} by quadrature.
QuadratureMoments moments_quadrature(const ModelParams& p, double r, double psi, int eta,
                                     int nodes = kNodes);

// F2 from its defining average of ratios of integrals.
double f2_quadrature(const ModelParams& p, double r, int nodes = kNodes);

// Variance of cos X under q^(0)(., +1), by quadrature.
double variance_cos_q0(double h, int nodes = kNodes);

// int sin^2 x q^(0)(x, +1) dx, by quadrature.
double mean_sin2_q0(double h, int nodes = kNodes);

// Cubic Taylor coefficient of f (odd in r) at 0 from f(d), f(2d), f(3d),
// fitting a r + b r^3 + c r^5. Returns b.
double cubic_coefficient_odd(const std::function<double(double)>& f, double d);

// Central difference.
double central_difference(const std::function<double(double)>& f, double x, double d);

using Rational = boost::multiprecision::cpp_rational;

// Left and right sides of the alternating binomial identity
// sum_l C(n,l) (-1)^{l+1} / ((m-l)! (m-n+l)!) for 0 <= n <= m.
Rational binomial_sum_lhs(int n, int m);
Rational binomial_sum_rhs(int n, int m);

// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

// Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

// sup |F_n - F| of a sample against a CDF.
double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf);

// CDF on [0, 2 pi] of a density tabulated by cumulative trapezoid on a fine grid.
std::function<double(double)> tabulated_cdf(const std::function<double(double)>& density,
                                            int cells = 1 << 16);

// Named pass/fail check with a one-line detail message.
struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Property suites shared by `spinflop selftest` and the acceptance suite.
Check check_moments_vs_quadrature(int tuples = 200, double tol = 1e-10);
Check check_normalization(int tuples = 200, double tol = 1e-10);
Check check_g_monotone(int points = 1000);
Check check_turan_grid();
Check check_recurrence(double tol = 1e-10);
Check check_series_vs_quadrature(double tol = 1e-10);
Check check_binomial_identity(int max_m = 12);

std::vector<Check> run_selftest();

}  // namespace spinflop::oracle
