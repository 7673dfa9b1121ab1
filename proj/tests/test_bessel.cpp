#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "spinflop/bessel.hpp"
#include "spinflop/errors.hpp"
#include "spinflop/oracle.hpp"

using namespace spinflop;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST_CASE("small arguments") {
    CHECK(bessel::bessel_i(0, 0.0) == 1.0);
    CHECK(bessel::bessel_i(1, 0.0) == 0.0);
    CHECK(bessel::bessel_i(3, 0.0) == 0.0);
    CHECK(bessel::ratio_i1_i0(0.0) == 0.0);
    CHECK(bessel::g(0.0) == 1.0);
    CHECK(bessel::g(1e-14) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("I_0(2) against a 30-term series") {
    const long double series = oracle::bessel_i_series(0, 2.0L, 30);
    CHECK(rel(bessel::bessel_i(0, 2.0), static_cast<double>(series)) < 1e-14);
    CHECK(bessel::bessel_i(0, 2.0) == doctest::Approx(2.2795853023360673).epsilon(1e-14));
}

TEST_CASE("orders 0..4 against Boost.Math on [0, 60]") {
    double worst = 0.0;
    for (int v = 0; v <= 4; ++v)
        for (double y = 0.01; y <= 60.0; y += 0.173) {
            const double ref = boost::math::cyl_bessel_i(v, y);
            worst = std::max(worst, rel(bessel::bessel_i(v, y), ref));
        }
    CHECK(worst < 1e-12);
}

TEST_CASE("series branch and asymptotic branch agree at the cutoff") {
    for (int v = 0; v <= 4; ++v) {
        const double below = bessel::bessel_i(v, std::nextafter(bessel::kSeriesCutoff, 0.0));
        const double above = bessel::bessel_i(v, std::nextafter(bessel::kSeriesCutoff, 100.0));
        CHECK(rel(below, above) < 1e-13);
    }
}

TEST_CASE("scaled values never overflow") {
    for (double y : {100.0, 700.0, 1000.0, 1e5}) {
        for (int v = 0; v <= 4; ++v) {
            const double s = bessel::bessel_i_scaled(v, y);
            CHECK(std::isfinite(s));
            CHECK(s > 0.0);
            CHECK(s < 1.0);
        }
        CHECK(bessel::log_bessel_i(0, y) == doctest::Approx(y + std::log(bessel::bessel_i_scaled(0, y))));
    }
    CHECK(bessel::log_bessel_i(2, 10.0) == doctest::Approx(std::log(boost::math::cyl_bessel_i(2, 10.0))).epsilon(1e-14));
}

TEST_CASE("ratio I_1/I_0") {
    const long double i1 = oracle::bessel_i_series(1, 3.0L);
    const long double i0 = oracle::bessel_i_series(0, 3.0L);
    CHECK(rel(bessel::ratio_i1_i0(3.0), static_cast<double>(i1 / i0)) < 1e-14);

    // 1 - 1/(2y) - 1/(8y^2) - 1/(8y^3) is the large-y expansion.
    const double y = 60.0;
    const double asym = 1.0 - 1.0 / (2 * y) - 1.0 / (8 * y * y) - 1.0 / (8 * y * y * y);
    CHECK(std::fabs(bessel::ratio_i1_i0(y) - asym) < 1e-6);
    CHECK(bessel::ratio_i1_i0(y) < 1.0);
    CHECK(1.0 - bessel::ratio_i1_i0(y) < 1e-2);
    CHECK(1.0 - bessel::ratio_i1_i0(600.0) < 1e-3);

    CHECK(bessel::ratio_i1_i0(-2.5) == -bessel::ratio_i1_i0(2.5));
    double prev = 0.0;
    for (double t = 0.05; t < 100.0; t *= 1.1) {
        const double r = bessel::ratio_i1_i0(t);
        CHECK(r > prev);
        CHECK(r < 1.0);
        prev = r;
    }
    CHECK(bessel::ratio_i1_i0(1e-8) == doctest::Approx(0.5e-8).epsilon(1e-10));
}

TEST_CASE("derivatives of the ratio against finite differences") {
    for (double y : {1e-4, 0.3, 1.0, 3.0, 7.5, 24.9, 25.1, 40.0}) {
        const double d = 1e-5 * std::max(1.0, y);
        const double fd1 = (bessel::ratio_i1_i0(y + d) - bessel::ratio_i1_i0(y - d)) / (2 * d);
        const double fd2 = (bessel::ratio_i1_i0_d1(y + d) - bessel::ratio_i1_i0_d1(y - d)) / (2 * d);
        CHECK(bessel::ratio_i1_i0_d1(y) == doctest::Approx(fd1).epsilon(1e-7));
        CHECK(std::fabs(bessel::ratio_i1_i0_d2(y) - fd2) < 1e-7 * std::max(1.0, std::fabs(fd2)));
    }
    CHECK(bessel::ratio_i1_i0_d1(0.0) == doctest::Approx(0.5));
    CHECK(bessel::ratio_i1_i0_d2(0.0) == 0.0);
    CHECK(bessel::ratio_i1_i0_d2(-1.3) == doctest::Approx(-bessel::ratio_i1_i0_d2(1.3)));
    CHECK(bessel::ratio_i1_i0_d1(-1.3) == doctest::Approx(bessel::ratio_i1_i0_d1(1.3)));
}

TEST_CASE("R' is the variance of cos under exp(y cos x)") {
    for (double y : {0.2, 1.0, 4.0, 12.0}) {
        const double z = oracle::trapezoid_periodic([&](double x) { return std::exp(y * std::cos(x)); });
        const double m1 = oracle::trapezoid_periodic([&](double x) { return std::cos(x) * std::exp(y * std::cos(x)); }) / z;
        const double m2 = oracle::trapezoid_periodic(
                              [&](double x) { return std::cos(x) * std::cos(x) * std::exp(y * std::cos(x)); }) / z;
        const double m3 = oracle::trapezoid_periodic([&](double x) {
                              const double c = std::cos(x) - m1;
                              return c * c * c * std::exp(y * std::cos(x));
                          }) / z;
        CHECK(bessel::ratio_i1_i0_d1(y) == doctest::Approx(m2 - m1 * m1).epsilon(1e-11));
        CHECK(bessel::ratio_i1_i0_d2(y) == doctest::Approx(m3).epsilon(1e-9));
    }
}

TEST_CASE("g") {
    CHECK(bessel::g(1.0) > bessel::g(2.0));
    CHECK(bessel::g(4.0) < bessel::g(3.9));
    const double s = std::sqrt(4.0);
    const long double ref = oracle::bessel_i_series(1, 2 * s) / (s * oracle::bessel_i_series(0, 2 * s));
    CHECK(rel(bessel::g(4.0), static_cast<double>(ref)) < 1e-14);
    CHECK(oracle::check_g_monotone(1000).passed);
    CHECK_THROWS_AS(bessel::g(-1e-3), DomainError);
}

TEST_CASE("Turan inequality") {
    CHECK(bessel::check_turan(1, 1, 2.0));
    CHECK(bessel::check_turan(2, 1, 0.5));
    CHECK(bessel::check_turan(1, 1, 1e-6));
    const auto grid = oracle::check_turan_grid();
    CHECK_MESSAGE(grid.passed, grid.detail);
    CHECK_THROWS_AS(bessel::check_turan(1, 2, 1.0), DomainError);
    CHECK_THROWS_AS(bessel::check_turan(0, 1, 1.0), DomainError);
    CHECK_THROWS_AS(bessel::check_turan(1, 1, 0.0), DomainError);
}

TEST_CASE("recurrence and integral definition") {
    const auto rec = oracle::check_recurrence(1e-10);
    CHECK_MESSAGE(rec.passed, rec.detail);
    const auto quad = oracle::check_series_vs_quadrature(1e-10);
    CHECK_MESSAGE(quad.passed, quad.detail);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(bessel::bessel_i(0, -1.0), DomainError);
    CHECK_THROWS_AS(bessel::bessel_i(-1, 1.0), DomainError);
    CHECK_THROWS_AS(bessel::bessel_i_scaled(0, -0.5), DomainError);
    CHECK_THROWS_AS(bessel::bessel_i(0, std::nan("")), DomainError);
}
