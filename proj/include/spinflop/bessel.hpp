#pragma once

// Modified Bessel functions of the first kind I_v for small non-negative
// integer orders, plus the ratio R(y) = I_1(y)/I_0(y) and its derivatives.
//
// Everything here is a pure function; safe to call concurrently.

namespace spinflop::bessel {

// Below this argument the power series is summed directly; above it the
// exponentially scaled asymptotic expansion is used.
inline constexpr double kSeriesCutoff = 25.0;

// I_v(y). Accurate to ~1e-15 relative for v in 0..4, y in [0, 60].
// Throws DomainError for y < 0 or v < 0.
double bessel_i(int v, double y);

// exp(-y) * I_v(y). Never overflows.
double bessel_i_scaled(int v, double y);

// log I_v(y) for y > 0 (y = 0 allowed for v = 0).
double log_bessel_i(int v, double y);

// R(y) = I_1(y)/I_0(y). Odd in y, so negative arguments are accepted;
// R(0) = 0, 0 <= |R| < 1.
double ratio_i1_i0(double y);

// R'(y) = 1 - R(y)/y - R(y)^2, the variance of cos X under the density
// proportional to exp(y cos x). Even in y; R'(0) = 1/2.
double ratio_i1_i0_d1(double y);

// R''(y), the third central moment of cos X under exp(y cos x). Odd in y.
double ratio_i1_i0_d2(double y);

// g(z) = I_1(2 sqrt z) / (sqrt z * I_0(2 sqrt z)), g(0) = 1.
// Throws DomainError for z < 0.
double g(double z);

// Turan-type inequality I_v^2(y) - I_{v-n}(y) I_{v+n}(y) > 0.
// Throws DomainError when v - n < 0, v <= 0, n < 1 or y <= 0.
bool check_turan(int v, int n, double y);

}  // namespace spinflop::bessel
