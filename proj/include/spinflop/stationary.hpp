#pragma once

// Stationary densities of the mean-field dynamics
//
//   q(x, eta) = exp{2 theta r cos(psi - x) + 2 h eta cos x} / Z(eta)
//
// their first trigonometric moments in Bessel closed form, and the two
// scalar self-consistency maps used on the Psi = pi/2 and Psi = 0 branches.

#include <complex>
#include <numbers>

namespace spinflop {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Quenched field sign eta.
enum class FieldSign : int { Minus = -1, Plus = +1 };

constexpr double sign_value(FieldSign s) { return static_cast<int>(s); }

struct ModelParams {
    double theta = 1.0;  // coupling strength
    double h = 1.0;      // field intensity
};

// Throws DomainError unless theta > 0 and h > 0 (both finite).
void validate(const ModelParams& p);

// Reduce an angle into [0, 2 pi).
double wrap_angle(double x);

struct OrderParameter {
    double r = 0.0;
    double psi = 0.0;

    OrderParameter() = default;
    // psi is reduced mod 2 pi; r must lie in [0, 1].
    OrderParameter(double r_, double psi_);

    std::complex<double> complex() const { return std::polar(r, psi); }
};

// Effective field acting on one spin family: the exponent of q is
// 2 (a cos x + b sin x) with a = theta r cos psi + h eta, b = theta r sin psi.
struct EffectiveField {
    double a = 0.0;
    double b = 0.0;
    double modulus() const;  // S = |a + i b|
};

EffectiveField effective_field(const ModelParams& p, const OrderParameter& m, FieldSign eta);

class StationaryDensity {
public:
    StationaryDensity(const ModelParams& p, const OrderParameter& m, FieldSign eta);

    const ModelParams& params() const { return params_; }
    const OrderParameter& order() const { return order_; }
    FieldSign eta() const { return eta_; }
    double log_normalizer() const { return log_z_; }

    // log q(x, eta), evaluated without forming Z.
    double log_density(double x) const;
    double operator()(double x) const;

private:
    ModelParams params_;
    OrderParameter order_;
    FieldSign eta_;
    EffectiveField field_;
    double log_z_;
};

double density_at(const StationaryDensity& d, double x);

// Z(eta) = 2 pi I_0(2 S).
double normalizer(const ModelParams& p, const OrderParameter& m, FieldSign eta);
double log_normalizer(const ModelParams& p, const OrderParameter& m, FieldSign eta);

struct Moments {
    double mean_cos = 0.0;
    double mean_sin = 0.0;
};

// Integrals of cos x and sin x against q(., eta) in closed form.
Moments moments(const ModelParams& p, const OrderParameter& m, FieldSign eta);

// Right-hand side of the full self-consistency relation: the disorder average
// of the first trigonometric moment, as a complex number.
std::complex<double> order_map(const ModelParams& p, const OrderParameter& m);

// |order_map(m) - r e^{i psi}|.
double self_consistency_defect(const ModelParams& p, const OrderParameter& m);

// Perpendicular branch: F1~(r) = theta g(h^2 + theta^2 r^2). Strictly decreasing.
double f1_tilde(const ModelParams& p, double r);

// Parallel branch: F2(r) = [R(2(h + theta r)) - R(2(h - theta r))] / 2.
double f2(const ModelParams& p, double r);
double f2_prime(const ModelParams& p, double r);
double f2_second(const ModelParams& p, double r);
// dF2/dtheta and d(F2')/dtheta at fixed r.
double f2_dtheta(const ModelParams& p, double r);
double f2_prime_dtheta(const ModelParams& p, double r);

// Cubic Taylor coefficient of F2 at r = 0 in units of theta^3:
// F2(r) = theta c1(h) r + theta^3 K(h) r^3 + O(r^5).
double k_of_h(double h);

}  // namespace spinflop
