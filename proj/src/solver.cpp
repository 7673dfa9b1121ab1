#include "spinflop/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "spinflop/bessel.hpp"
#include "spinflop/errors.hpp"

namespace spinflop {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

void require_positive_h(double h, const char* who) {
    if (!(std::isfinite(h) && h > 0.0)) throw DomainError(std::string(who) + ": h must be positive");
}

// Bisection on [lo, hi] given f(lo); f(lo) and f(hi) must have opposite signs.
double bisect(const std::function<double(double)>& f, double lo, double hi, double f_lo,
              double tol) {
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Location of the maximum of a unimodal f on [lo, hi].
double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    return 0.5 * (lo + hi);
}

// Walk from `start` toward 0 until f has the requested sign.
std::optional<double> find_left_point(const std::function<double(double)>& f, double start,
                                      bool want_negative) {
    double r = start;
    for (int i = 0; i < 80; ++i) {
        r *= 0.5;
        const double v = f(r);
        if (want_negative ? v < 0.0 : v > 0.0) return r;
    }
    return std::nullopt;
}

}  // namespace

std::string_view to_string(Branch b) {
    switch (b) {
        case Branch::Paramagnetic: return "paramagnetic";
        case Branch::Perp: return "perp";
        case Branch::Parallel: return "parallel";
    }
    return "unknown";
}

double theta1(double h) {
    require_positive_h(h, "theta1");
    return 1.0 / bessel::g(h * h);
}

double theta2(double h) {
    require_positive_h(h, "theta2");
    return 0.5 / bessel::ratio_i1_i0_d1(2.0 * h);
}

double h_bar() {
    static const double value = [] {
        double lo = 0.1;
        double hi = 1.0;
        double k_lo = k_of_h(lo);
        if (!(k_lo < 0.0 && k_of_h(hi) > 0.0))
            throw NumericalError("h_bar: K(h) has no sign change on [0.1, 1.0]");
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            const double k_mid = k_of_h(mid);
            if ((k_mid < 0.0) == (k_lo < 0.0)) {
                lo = mid;
                k_lo = k_mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    }();
    return value;
}

std::optional<double> solve_perp(const ModelParams& p, const SolverOptions& opt) {
    validate(p);
    auto f = [&](double r) { return f1_tilde(p, r) - 1.0; };
    const double f0 = f(0.0);
    if (f0 <= 0.0) return std::nullopt;
    // F1~(1) < 1 always, since r F1~(r) is a moment of a density.
    return bisect(f, 0.0, 1.0, f0, opt.root_tol);
}

std::vector<double> solve_parallel(const ModelParams& p, const SolverOptions& opt) {
    validate(p);
    const int m = std::max(opt.scan_points, 4);
    auto d = [&](double r) { return f2(p, r) - r; };

    std::vector<double> grid(m + 1);
    std::vector<double> val(m + 1);
    for (int i = 0; i <= m; ++i) {
        grid[i] = static_cast<double>(i) / m;
        val[i] = i == 0 ? 0.0 : d(grid[i]);
    }

    std::vector<double> roots;

    // First cell (0, r_1]: d(0) = 0 exactly, so the sign near 0 comes from the slope.
    const double slope0 = f2_prime(p, 0.0) - 1.0;
    if (slope0 != 0.0 && (val[1] > 0.0) == (slope0 < 0.0) && val[1] != 0.0) {
        if (auto left = find_left_point(d, grid[1], slope0 < 0.0)) {
            roots.push_back(bisect(d, *left, grid[1], d(*left), opt.root_tol));
        }
    }

    for (int i = 1; i < m; ++i) {
        if (val[i + 1] == 0.0) {
            roots.push_back(grid[i + 1]);
        } else if (val[i] != 0.0 && (val[i] < 0.0) != (val[i + 1] < 0.0)) {
            roots.push_back(bisect(d, grid[i], grid[i + 1], val[i], opt.root_tol));
        }
    }

    // Interior extrema that stay on one side of zero on the grid may still hide
    // a close pair of roots; refine locally around them.
    const double cell = 1.0 / m;
    for (int i = 2; i < m; ++i) {
        const bool local_max = val[i] < 0.0 && val[i] >= val[i - 1] && val[i] >= val[i + 1];
        const bool local_min = val[i] > 0.0 && val[i] <= val[i - 1] && val[i] <= val[i + 1];
        if (!local_max && !local_min) continue;
        const double sign = local_max ? 1.0 : -1.0;
        const double lo = grid[i - 1];
        const double hi = grid[i + 1];

        // Finer grid first, then an exact extremum search if it still shows nothing.
        const int sub = std::max(opt.refine_factor, 2) * 2;
        std::vector<double> sub_roots;
        double prev_r = lo;
        double prev_v = val[i - 1];
        for (int k = 1; k <= sub; ++k) {
            const double r = lo + (hi - lo) * k / sub;
            const double v = k == sub ? val[i + 1] : d(r);
            if ((prev_v < 0.0) != (v < 0.0)) sub_roots.push_back(bisect(d, prev_r, r, prev_v, opt.root_tol));
            prev_r = r;
            prev_v = v;
        }
        if (sub_roots.empty()) {
            const double r_ext = golden_max([&](double r) { return sign * d(r); }, lo, hi,
                                            std::min(opt.root_tol, cell * 1e-6));
            const double v_ext = d(r_ext);
            if (sign * v_ext > 0.0) {
                sub_roots.push_back(bisect(d, lo, r_ext, val[i - 1], opt.root_tol));
                sub_roots.push_back(bisect(d, r_ext, hi, v_ext, opt.root_tol));
            }
        }
        roots.insert(roots.end(), sub_roots.begin(), sub_roots.end());
    }

    std::sort(roots.begin(), roots.end(), std::greater<>());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) { return std::fabs(a - b) < 1e-9; }),
                roots.end());
    return roots;
}

double theta_star(double h, const SolverOptions& opt) {
    require_positive_h(h, "theta_star");
    if (h <= h_bar()) throw DomainError("theta_star: defined only for h > h_bar");

    const double t2 = theta2(h);
    double lo = theta1(h);
    double hi = t2 * (1.0 - 1e-7);
    auto has_root = [&](double theta) { return !solve_parallel({theta, h}, opt).empty(); };
    if (has_root(lo) || !has_root(hi))
        throw NumericalError("theta_star: tangency is not bracketed by (theta_1, theta_2)");
    while (hi - lo > opt.theta_tol) {
        const double mid = 0.5 * (lo + hi);
        (has_root(mid) ? hi : lo) = mid;
    }

    // Newton polish on (F2(r) - r, F2'(r) - 1) starting from the pair midpoint.
    const std::vector<double> pair = solve_parallel({hi, h}, opt);
    double r = 0.0;
    for (double x : pair) r += x;
    r /= static_cast<double>(pair.size());
    double theta = hi;
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        const ModelParams q{theta, h};
        const double g1 = f2(q, r) - r;
        const double g2 = f2_prime(q, r) - 1.0;
        const double j11 = f2_prime(q, r) - 1.0;
        const double j12 = f2_dtheta(q, r);
        const double j21 = f2_second(q, r);
        const double j22 = f2_prime_dtheta(q, r);
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det)) break;
        const double dr = (g1 * j22 - g2 * j12) / det;
        const double dt = (j11 * g2 - j21 * g1) / det;
        r -= dr;
        theta -= dt;
        if (!(r > 0.0 && r < 1.0 && theta > 0.0)) break;
        if (std::fabs(dt) < 1e-14 * theta && std::fabs(dr) < 1e-13) {
            converged = true;
            break;
        }
    }
    if (converged && std::fabs(theta - 0.5 * (lo + hi)) < 10.0 * opt.theta_tol + 1e-6) return theta;
    return 0.5 * (lo + hi);
}

CriticalCurves critical_curves(double h, const SolverOptions& opt) {
    CriticalCurves c;
    c.h = h;
    c.theta1 = theta1(h);
    c.theta2 = theta2(h);
    c.h_bar = h_bar();
    if (h > c.h_bar) c.theta_star = theta_star(h, opt);
    return c;
}

int label_from_curves(const CriticalCurves& c, double theta) {
    if (theta <= c.theta1) return 0;
    if (theta > c.theta2) return 4;
    if (c.theta_star && theta > *c.theta_star) return 6;
    return 2;
}

PhaseClassification classify(const ModelParams& p, const SolverOptions& opt) {
    validate(p);
    PhaseClassification c;
    c.params = p;
    c.curves = critical_curves(p.h, opt);

    auto add = [&](double r, double psi, Branch b) {
        const OrderParameter m(r, psi);
        c.solutions.push_back({m, b, self_consistency_defect(p, m)});
    };

    if (const auto r_plus = solve_perp(p, opt)) {
        c.perp_pairs = 1;
        add(*r_plus, kHalfPi, Branch::Perp);
        add(*r_plus, 3.0 * kHalfPi, Branch::Perp);
    }
    const std::vector<double> parallel = solve_parallel(p, opt);
    if (parallel.size() > 2)
        throw NumericalError("classify: " + std::to_string(parallel.size()) +
                             " parallel roots detected, at most two expected");
    c.parallel_pairs = static_cast<int>(parallel.size());
    for (double r : parallel) {
        add(r, 0.0, Branch::Parallel);
        add(r, std::numbers::pi, Branch::Parallel);
    }

    c.phase_label = 2 * (c.perp_pairs + c.parallel_pairs);
    c.curve_label = label_from_curves(c.curves, p.theta);

    std::vector<std::string> near;
    if (std::fabs(p.theta - c.curves.theta1) <= opt.boundary_tol) near.emplace_back("theta_1");
    if (std::fabs(p.theta - c.curves.theta2) <= opt.boundary_tol) near.emplace_back("theta_2");
    if (c.curves.theta_star && std::fabs(p.theta - *c.curves.theta_star) <= opt.boundary_tol)
        near.emplace_back("theta_star");
    if (std::fabs(p.h - c.curves.h_bar) <= opt.boundary_tol) near.emplace_back("h_bar");
    if (!near.empty()) {
        c.boundary = true;
        c.warning = "within tolerance of critical curve";
        for (std::size_t i = 0; i < near.size(); ++i) c.warning += (i ? ", " : " ") + near[i];
        c.warning += "; solution count is numerically ill-posed";
    } else if (c.phase_label != c.curve_label) {
        c.warning = "solution count " + std::to_string(c.phase_label) +
                    " disagrees with curve label " + std::to_string(c.curve_label);
    }
    return c;
}

std::vector<StationarySolution> all_stationary_solutions(const PhaseClassification& c) {
    std::vector<StationarySolution> out;
    out.reserve(c.solutions.size() + 1);
    out.push_back({OrderParameter(0.0, 0.0), Branch::Paramagnetic, 0.0});
    out.insert(out.end(), c.solutions.begin(), c.solutions.end());
    return out;
}

}  // namespace spinflop
