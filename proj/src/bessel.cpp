#include "spinflop/bessel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spinflop/errors.hpp"

namespace spinflop::bessel {

namespace {

constexpr double kSeriesEps = 1e-17;
constexpr int kMaxTerms = 500;

void require_order(int v) {
    if (v < 0) throw DomainError("bessel: negative order " + std::to_string(v));
}

// S_v(q) = sum_k q^k v! / (k! (k+v)!), so that I_v(y) = (y/2)^v / v! * S_v(y^2/4).
double reduced_series(int v, double q) {
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < kMaxTerms; ++k) {
        term *= q / (static_cast<double>(k + 1) * static_cast<double>(k + 1 + v));
        sum += term;
        if (term < kSeriesEps * sum) break;
    }
    return sum;
}

// sqrt(2 pi y) * exp(-y) * I_v(y) from the large-argument expansion.
// Summation stops at the smallest term of the divergent tail.
double asymptotic_sum(int v, double y) {
    const double mu = 4.0 * v * v;
    double term = 1.0;
    double sum = 1.0;
    double previous = 1.0;
    for (int k = 1; k < kMaxTerms; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (8.0 * k * y);
        const double mag = std::fabs(term);
        if (mag > previous) break;
        sum += term;
        if (mag < kSeriesEps * std::fabs(sum)) break;
        previous = mag;
    }
    return sum;
}

double factorial(int v) {
    double f = 1.0;
    for (int i = 2; i <= v; ++i) f *= i;
    return f;
}

}  // namespace

double bessel_i(int v, double y) {
    require_order(v);
    if (!(y >= 0.0)) throw DomainError("bessel_i: negative argument");
    if (y <= kSeriesCutoff) {
        if (y == 0.0) return v == 0 ? 1.0 : 0.0;
        return std::pow(0.5 * y, v) / factorial(v) * reduced_series(v, 0.25 * y * y);
    }
    return std::exp(y) * asymptotic_sum(v, y) / std::sqrt(2.0 * std::numbers::pi * y);
}

double bessel_i_scaled(int v, double y) {
    require_order(v);
    if (!(y >= 0.0)) throw DomainError("bessel_i_scaled: negative argument");
    if (y <= kSeriesCutoff) return std::exp(-y) * bessel_i(v, y);
    return asymptotic_sum(v, y) / std::sqrt(2.0 * std::numbers::pi * y);
}

double log_bessel_i(int v, double y) {
    require_order(v);
    if (!(y >= 0.0)) throw DomainError("log_bessel_i: negative argument");
    if (y <= kSeriesCutoff) return std::log(bessel_i(v, y));
    return y + std::log(bessel_i_scaled(v, y));
}

double g(double z) {
    if (!(z >= 0.0)) throw DomainError("g: negative argument");
    if (z == 0.0) return 1.0;
    const double y = 2.0 * std::sqrt(z);
    if (y <= kSeriesCutoff) return reduced_series(1, z) / reduced_series(0, z);
    return asymptotic_sum(1, y) / asymptotic_sum(0, y) / std::sqrt(z);
}

double ratio_i1_i0(double y) {
    if (y < 0.0) return -ratio_i1_i0(-y);
    if (y == 0.0) return 0.0;
    if (y <= kSeriesCutoff) return 0.5 * y * g(0.25 * y * y);
    return asymptotic_sum(1, y) / asymptotic_sum(0, y);
}

double ratio_i1_i0_d1(double y) {
    const double a = std::fabs(y);
    const double r = ratio_i1_i0(a);
    return 1.0 - 0.5 * g(0.25 * a * a) - r * r;
}

double ratio_i1_i0_d2(double y) {
    if (y < 0.0) return -ratio_i1_i0_d2(-y);
    if (y < 1e-3) return y * (-3.0 / 8.0 + 5.0 / 24.0 * y * y);
    const double r = ratio_i1_i0(y);
    const double gz = g(0.25 * y * y);
    const double d1 = 1.0 - 0.5 * gz - r * r;
    return (gz - 1.0 + r * r) / y - 2.0 * r * d1;
}

bool check_turan(int v, int n, double y) {
    if (v <= 0 || n < 1) throw DomainError("check_turan: need v > 0 and n >= 1");
    if (v - n < 0) throw DomainError("check_turan: v - n must be non-negative");
    if (!(y > 0.0)) throw DomainError("check_turan: need y > 0");
    const double center = bessel_i_scaled(v, y);
    return center * center - bessel_i_scaled(v - n, y) * bessel_i_scaled(v + n, y) > 0.0;
}

}  // namespace spinflop::bessel
