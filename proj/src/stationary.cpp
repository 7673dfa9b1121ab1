#include "spinflop/stationary.hpp"

#include <cmath>

#include "spinflop/bessel.hpp"
#include "spinflop/errors.hpp"

namespace spinflop {

using bessel::ratio_i1_i0;
using bessel::ratio_i1_i0_d1;
using bessel::ratio_i1_i0_d2;

void validate(const ModelParams& p) {
    if (!(std::isfinite(p.theta) && p.theta > 0.0))
        throw DomainError("model parameters: theta must be positive");
    if (!(std::isfinite(p.h) && p.h > 0.0))
        throw DomainError("model parameters: h must be positive");
}

double wrap_angle(double x) {
    double w = std::fmod(x, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    // fmod of a tiny negative number can round up to exactly 2 pi
    if (w >= kTwoPi) w = 0.0;
    return w;
}

OrderParameter::OrderParameter(double r_, double psi_) : r(r_), psi(wrap_angle(psi_)) {
    if (!(r_ >= 0.0 && r_ <= 1.0)) throw DomainError("order parameter: r must lie in [0, 1]");
}

double EffectiveField::modulus() const { return std::hypot(a, b); }

EffectiveField effective_field(const ModelParams& p, const OrderParameter& m, FieldSign eta) {
    return {p.theta * m.r * std::cos(m.psi) + p.h * sign_value(eta),
            p.theta * m.r * std::sin(m.psi)};
}

StationaryDensity::StationaryDensity(const ModelParams& p, const OrderParameter& m, FieldSign eta)
    : params_(p),
      order_(m),
      eta_(eta),
      field_(effective_field(p, m, eta)),
      log_z_(std::log(kTwoPi) + bessel::log_bessel_i(0, 2.0 * field_.modulus())) {}

double StationaryDensity::log_density(double x) const {
    return 2.0 * (field_.a * std::cos(x) + field_.b * std::sin(x)) - log_z_;
}

double StationaryDensity::operator()(double x) const { return std::exp(log_density(x)); }

double density_at(const StationaryDensity& d, double x) { return d(x); }

double normalizer(const ModelParams& p, const OrderParameter& m, FieldSign eta) {
    return kTwoPi * bessel::bessel_i(0, 2.0 * effective_field(p, m, eta).modulus());
}

double log_normalizer(const ModelParams& p, const OrderParameter& m, FieldSign eta) {
    return std::log(kTwoPi) + bessel::log_bessel_i(0, 2.0 * effective_field(p, m, eta).modulus());
}

Moments moments(const ModelParams& p, const OrderParameter& m, FieldSign eta) {
    const EffectiveField f = effective_field(p, m, eta);
    // R(2S)/S = g(S^2), finite at S = 0
    const double s = f.modulus();
    const double scale = bessel::g(s * s);
    return {f.a * scale, f.b * scale};
}

std::complex<double> order_map(const ModelParams& p, const OrderParameter& m) {
    const Moments plus = moments(p, m, FieldSign::Plus);
    const Moments minus = moments(p, m, FieldSign::Minus);
    return {0.5 * (plus.mean_cos + minus.mean_cos), 0.5 * (plus.mean_sin + minus.mean_sin)};
}

double self_consistency_defect(const ModelParams& p, const OrderParameter& m) {
    return std::abs(order_map(p, m) - m.complex());
}

double f1_tilde(const ModelParams& p, double r) {
    return p.theta * bessel::g(p.h * p.h + p.theta * p.theta * r * r);
}

double f2(const ModelParams& p, double r) {
    const double tr = p.theta * r;
    return 0.5 * (ratio_i1_i0(2.0 * (p.h + tr)) - ratio_i1_i0(2.0 * (p.h - tr)));
}

double f2_prime(const ModelParams& p, double r) {
    const double tr = p.theta * r;
    return p.theta * (ratio_i1_i0_d1(2.0 * (p.h + tr)) + ratio_i1_i0_d1(2.0 * (p.h - tr)));
}

double f2_second(const ModelParams& p, double r) {
    const double tr = p.theta * r;
    return 2.0 * p.theta * p.theta *
           (ratio_i1_i0_d2(2.0 * (p.h + tr)) - ratio_i1_i0_d2(2.0 * (p.h - tr)));
}

double f2_dtheta(const ModelParams& p, double r) {
    const double tr = p.theta * r;
    return r * (ratio_i1_i0_d1(2.0 * (p.h + tr)) + ratio_i1_i0_d1(2.0 * (p.h - tr)));
}

double f2_prime_dtheta(const ModelParams& p, double r) {
    const double tr = p.theta * r;
    const double up = 2.0 * (p.h + tr);
    const double down = 2.0 * (p.h - tr);
    return ratio_i1_i0_d1(up) + ratio_i1_i0_d1(down) +
           2.0 * tr * (ratio_i1_i0_d2(up) - ratio_i1_i0_d2(down));
}

double k_of_h(double h) {
    if (!(h > 0.0)) throw DomainError("k_of_h: h must be positive");
    // Homogeneous of degree zero in the I_v, so scaled values are used.
    const double y = 2.0 * h;
    const double i0 = bessel::bessel_i_scaled(0, y);
    const double i1 = bessel::bessel_i_scaled(1, y);
    const double i2 = bessel::bessel_i_scaled(2, y);
    const double i3 = bessel::bessel_i_scaled(3, y);
    const double i4 = bessel::bessel_i_scaled(4, y);
    const double i0_2 = i0 * i0;
    const double i1_2 = i1 * i1;
    const double numerator = -3.0 * i0_2 * i0_2 + i0_2 * i0 * (i4 - 8.0 * i2) +
                             i0_2 * (24.0 * i1_2 - 6.0 * i2 * i2 - 8.0 * i1 * i3) +
                             48.0 * i0 * i1_2 * i2 - 48.0 * i1_2 * i1_2;
    // The bracketed fraction is d^3 F2/dr^3 at r = 0 over theta^3; divide by 3!
    // to get the Taylor coefficient.
    return numerator / (i0_2 * i0_2) / 6.0;
}

}  // namespace spinflop
