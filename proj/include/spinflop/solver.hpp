#pragma once

// Enumeration of stationary solutions, the critical curves theta_1, theta_2,
// theta_star and the constant h_bar, and the phase labels 0/2/4/6.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinflop/stationary.hpp"

namespace spinflop {

enum class Branch { Paramagnetic, Perp, Parallel };

std::string_view to_string(Branch b);

struct StationarySolution {
    OrderParameter order;
    Branch branch = Branch::Paramagnetic;
    double residual = 0.0;  // self-consistency defect of the full complex relation
};

struct SolverOptions {
    int scan_points = 2000;      // grid on (0, 1] for F2(r) - r
    int refine_factor = 10;      // local grid refinement near near-tangent segments
    double root_tol = 1e-12;     // bisection tolerance in r
    double theta_tol = 1e-8;     // bisection tolerance for theta_star
    double boundary_tol = 1e-6;  // distance to a curve below which a label is "boundary"
};

// theta_1(h) = h I_0(2h) / I_1(2h). Throws DomainError for h <= 0.
double theta1(double h);

// theta_2(h) = I_0^2 / (I_0^2 + I_0 I_2 - 2 I_1^2) at argument 2h.
double theta2(double h);

// Unique zero of k_of_h in [0.1, 1.0], bisected to 1e-10. Computed once.
double h_bar();

// Root r_+ in (0, 1) of F1~(r) = 1, or nothing when theta <= theta_1(h).
std::optional<double> solve_perp(const ModelParams& p, const SolverOptions& opt = {});

// All r > 0 with F2(r) = r, in descending order (r_bar first, then r_hat).
// May return more than two values if the sign-change scan finds them; callers
// that rely on the two-root bound should check.
std::vector<double> solve_parallel(const ModelParams& p, const SolverOptions& opt = {});

// Tangency value theta_star(h) in (theta_1, theta_2). Throws DomainError for h <= h_bar.
double theta_star(double h, const SolverOptions& opt = {});

// Convenience bundle of the three curves at one h.
struct CriticalCurves {
    double h = 0.0;
    double theta1 = 0.0;
    double theta2 = 0.0;
    std::optional<double> theta_star;  // only for h > h_bar
    double h_bar = 0.0;
};

CriticalCurves critical_curves(double h, const SolverOptions& opt = {});

// Label implied by the position of theta relative to the curves.
int label_from_curves(const CriticalCurves& c, double theta);

struct PhaseClassification {
    ModelParams params;
    int phase_label = 0;  // number of ferromagnetic solutions found
    int perp_pairs = 0;
    int parallel_pairs = 0;
    int curve_label = 0;  // label expected from the curve positions
    std::vector<StationarySolution> solutions;  // ferromagnetic only, mirror images included
    CriticalCurves curves;
    bool boundary = false;
    std::string warning;
};

// Throws NumericalError if more than two parallel roots are detected.
PhaseClassification classify(const ModelParams& p, const SolverOptions& opt = {});

// Solutions in `c` plus the paramagnetic one at psi = 0.
std::vector<StationarySolution> all_stationary_solutions(const PhaseClassification& c);

}  // namespace spinflop
