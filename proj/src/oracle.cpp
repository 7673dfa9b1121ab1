#include "spinflop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "spinflop/bessel.hpp"

namespace spinflop::oracle {

double trapezoid_periodic(const std::function<double(double)>& f, int nodes) {
    const double dx = kTwoPi / nodes;
    double sum = 0.0;
    for (int j = 0; j < nodes; ++j) sum += f(j * dx);
    return sum * dx;
}

long double bessel_i_series(int v, long double y, int terms) {
    long double term = 1.0L;
    for (int i = 1; i <= v; ++i) term *= (y / 2.0L) / i;
    long double sum = term;
    const long double q = y * y / 4.0L;
    for (int k = 1; k < terms; ++k) {
        term *= q / (static_cast<long double>(k) * static_cast<long double>(k + v));
        sum += term;
    }
    return sum;
}

double bessel_i_quadrature(int v, double y, int nodes) {
    return trapezoid_periodic([&](double a) { return std::cos(v * a) * std::exp(y * std::cos(a)); },
                              nodes) /
           kTwoPi;
}

QuadratureMoments moments_quadrature(const ModelParams& p, double r, double psi, int eta, int nodes) {
    auto exponent = [&](double x) {
        return 2.0 * p.theta * r * std::cos(psi - x) + 2.0 * p.h * eta * std::cos(x);
    };
    const double dx = kTwoPi / nodes;
    double shift = -1e300;
    for (int j = 0; j < nodes; ++j) shift = std::max(shift, exponent(j * dx));

    double z = 0.0;
    double c = 0.0;
    double s = 0.0;
    double c2 = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const double x = j * dx;
        const double w = std::exp(exponent(x) - shift);
        z += w;
        c += std::cos(x) * w;
        s += std::sin(x) * w;
        c2 += std::cos(x) * std::cos(x) * w;
    }
    QuadratureMoments out;
    out.normalizer = z * dx * std::exp(shift);
    out.mass = 1.0;
    out.mean_cos = c / z;
    out.mean_sin = s / z;
    out.mean_cos2 = c2 / z;
    return out;
}

double f2_quadrature(const ModelParams& p, double r, int nodes) {
    // Psi = 0 reduces the exponent to 2 (theta r + h eta) cos x.
    const double plus = moments_quadrature(p, r, 0.0, +1, nodes).mean_cos;
    const double minus = moments_quadrature(p, r, 0.0, -1, nodes).mean_cos;
    return 0.5 * (plus + minus);
}

double variance_cos_q0(double h, int nodes) {
    const QuadratureMoments m = moments_quadrature({1.0, h}, 0.0, 0.0, +1, nodes);
    return m.mean_cos2 - m.mean_cos * m.mean_cos;
}

double mean_sin2_q0(double h, int nodes) {
    const QuadratureMoments m = moments_quadrature({1.0, h}, 0.0, 0.0, +1, nodes);
    return 1.0 - m.mean_cos2;
}

double cubic_coefficient_odd(const std::function<double(double)>& f, double d) {
    // f(kd) = a kd + b (kd)^3 + c (kd)^5, k = 1, 2, 3; eliminate a and c.
    const double f1 = f(d) / d;
    const double f2v = f(2.0 * d) / (2.0 * d);
    const double f3 = f(3.0 * d) / (3.0 * d);
    // g(k) = f(kd)/(kd) = a + b d^2 k^2 + c d^4 k^4, quadratic in u = k^2 at u = 1, 4, 9.
    // Coefficient of u from the Lagrange interpolant.
    const double u1 = 1.0;
    const double u2 = 4.0;
    const double u3 = 9.0;
    const double l1 = -(u2 + u3) / ((u1 - u2) * (u1 - u3));
    const double l2 = -(u1 + u3) / ((u2 - u1) * (u2 - u3));
    const double l3 = -(u1 + u2) / ((u3 - u1) * (u3 - u2));
    return (f1 * l1 + f2v * l2 + f3 * l3) / (d * d);
}

double central_difference(const std::function<double(double)>& f, double x, double d) {
    return (f(x + d) - f(x - d)) / (2.0 * d);
}

namespace {

Rational factorial(int n) {
    boost::multiprecision::cpp_int f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return Rational(f);
}

Rational binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

}  // namespace

Rational binomial_sum_lhs(int n, int m) {
    Rational sum = 0;
    for (int l = 0; l <= n; ++l) {
        const Rational sign = (l + 1) % 2 == 0 ? 1 : -1;
        sum += binomial(n, l) * sign / (factorial(m - l) * factorial(m - n + l));
    }
    return sum;
}

Rational binomial_sum_rhs(int n, int m) {
    if (n % 2 != 0) return 0;
    const int half = n / 2;
    Rational falling = 1;
    for (int k = half + 1; k <= n; ++k) falling *= k;
    const Rational sign = (half + 1) % 2 == 0 ? 1 : -1;
    return sign * falling / (factorial(m) * factorial(m - half));
}

double kolmogorov_q(double lambda) {
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, std::fabs(f - i / n), std::fabs((i + 1) / n - f)});
    }
    return d;
}

std::function<double(double)> tabulated_cdf(const std::function<double(double)>& density, int cells) {
    auto cum = std::make_shared<std::vector<double>>(cells + 1, 0.0);
    const double w = kTwoPi / cells;
    double prev = density(0.0);
    for (int c = 0; c < cells; ++c) {
        const double next = density((c + 1) * w);
        (*cum)[c + 1] = (*cum)[c] + 0.5 * (prev + next) * w;
        prev = next;
    }
    const double total = cum->back();
    for (double& v : *cum) v /= total;
    return [cum, w, cells](double x) {
        const double pos = std::clamp(x / w, 0.0, static_cast<double>(cells));
        const int c = std::min(static_cast<int>(pos), cells - 1);
        const double frac = pos - c;
        return (*cum)[c] + frac * ((*cum)[c + 1] - (*cum)[c]);
    };
}

namespace {

struct RandomTuple {
    ModelParams p;
    double r;
    double psi;
    int eta;
};

std::vector<RandomTuple> random_tuples(int count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<RandomTuple> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        RandomTuple t;
        t.p.theta = 10.0 * (1.0 - unit(gen));
        t.p.h = 10.0 * (1.0 - unit(gen));
        t.r = unit(gen);
        t.psi = kTwoPi * unit(gen);
        t.eta = unit(gen) < 0.5 ? -1 : 1;
        out.push_back(t);
    }
    return out;
}

std::string fmt_sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

}  // namespace

Check check_moments_vs_quadrature(int tuples, double tol) {
    double worst = 0.0;
    for (const RandomTuple& t : random_tuples(tuples, 0x5eed0001)) {
        const Moments closed = moments(t.p, OrderParameter(t.r, t.psi),
                                       t.eta > 0 ? FieldSign::Plus : FieldSign::Minus);
        const QuadratureMoments quad = moments_quadrature(t.p, t.r, t.psi, t.eta);
        worst = std::max({worst, std::fabs(closed.mean_cos - quad.mean_cos),
                          std::fabs(closed.mean_sin - quad.mean_sin)});
    }
    return {"moments closed form vs 4096-node quadrature", worst <= tol,
            std::to_string(tuples) + " tuples, max abs error " + fmt_sci(worst)};
}

Check check_normalization(int tuples, double tol) {
    double worst = 0.0;
    double worst_z = 0.0;
    for (const RandomTuple& t : random_tuples(tuples, 0x5eed0002)) {
        const FieldSign eta = t.eta > 0 ? FieldSign::Plus : FieldSign::Minus;
        const OrderParameter m(t.r, t.psi);
        const StationaryDensity d(t.p, m, eta);
        const double mass = trapezoid_periodic([&](double x) { return density_at(d, x); });
        worst = std::max(worst, std::fabs(mass - 1.0));
        const double z_quad = moments_quadrature(t.p, t.r, t.psi, t.eta).normalizer;
        worst_z = std::max(worst_z, std::fabs(normalizer(t.p, m, eta) / z_quad - 1.0));
    }
    return {"density normalization", worst <= tol && worst_z <= tol,
            "max |mass - 1| " + fmt_sci(worst) + ", max Z relative error " + fmt_sci(worst_z)};
}

Check check_g_monotone(int points) {
    const double lo = std::log(1e-6);
    const double hi = std::log(1e4);
    int failures = 0;
    double prev = bessel::g(std::exp(lo));
    for (int i = 1; i < points; ++i) {
        const double z = std::exp(lo + (hi - lo) * i / (points - 1));
        const double v = bessel::g(z);
        if (!(v < prev)) ++failures;
        prev = v;
    }
    return {"g strictly decreasing on log grid [1e-6, 1e4]", failures == 0,
            std::to_string(points) + " points, " + std::to_string(failures) + " violations"};
}

Check check_turan_grid() {
    int tested = 0;
    int failures = 0;
    for (int v : {1, 2, 3}) {
        for (int n : {1, 2}) {
            if (v - n < 0) continue;
            for (double y : {0.01, 0.1, 1.0, 10.0, 50.0}) {
                ++tested;
                if (!bessel::check_turan(v, n, y)) ++failures;
            }
        }
    }
    return {"Turan inequality grid", failures == 0,
            std::to_string(tested) + " cases, " + std::to_string(failures) + " violations"};
}

Check check_recurrence(double tol) {
    double worst = 0.0;
    for (int v : {0, 1, 2}) {
        for (int i = 0; i <= 200; ++i) {
            const double y = 0.1 + (50.0 - 0.1) * i / 200.0;
            const double iv = bessel::bessel_i(v, y);
            const double next = bessel::bessel_i(v + 1, y);
            const double deriv = v == 0 ? next : 0.5 * (bessel::bessel_i(v - 1, y) + next);
            worst = std::max(worst, std::fabs(y * deriv - v * iv - y * next) / iv);
        }
    }
    return {"recurrence y I_v' - v I_v = y I_{v+1}", worst <= tol,
            "max relative residual " + fmt_sci(worst)};
}

Check check_series_vs_quadrature(double tol) {
    double worst = 0.0;
    for (int v = 0; v <= 4; ++v) {
        for (int i = 0; i <= 120; ++i) {
            const double y = 60.0 * i / 120.0;
            // Quadrature error is absolute on the integrand scale exp(y) ~ I_0(y).
            const double scale = bessel::bessel_i(0, y);
            worst = std::max(worst, std::fabs(bessel::bessel_i(v, y) - bessel_i_quadrature(v, y)) / scale);
        }
    }
    return {"I_v evaluation vs integral definition", worst <= tol,
            "max error relative to I_0(y): " + fmt_sci(worst)};
}

Check check_binomial_identity(int max_m) {
    int tested = 0;
    int failures = 0;
    for (int m = 0; m <= max_m; ++m) {
        for (int n = 0; n <= m; ++n) {
            ++tested;
            if (binomial_sum_lhs(n, m) != binomial_sum_rhs(n, m)) ++failures;
        }
    }
    return {"alternating binomial sum identity (exact rationals)", failures == 0,
            std::to_string(tested) + " (n, m) pairs, " + std::to_string(failures) + " mismatches"};
}

std::vector<Check> run_selftest() {
    return {check_moments_vs_quadrature(), check_normalization(), check_g_monotone(),
            check_turan_grid(),            check_recurrence(),    check_series_vs_quadrature(),
            check_binomial_identity()};
}

}  // namespace spinflop::oracle
