#pragma once

// N-spin Langevin dynamics
//
//   dx_j = [theta r_N sin(psi_N - x_j) - h eta_j sin x_j] dt + dW_j
//
// under quenched dichotomic disorder, integrated by Euler-Maruyama with
// counter-based noise so serial and threaded runs agree bit for bit.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spinflop/solver.hpp"
#include "spinflop/stationary.hpp"

namespace spinflop {

enum class DisorderMode { Iid, Balanced };
enum class InitLaw { Uniform, Custom };

struct SimConfig {
    // theta and h may be zero here; negative values are rejected.
    ModelParams params{1.0, 1.0};
    int n = 2000;
    double dt = 0.01;
    long steps = 2000;
    std::uint64_t seed = 1;
    DisorderMode disorder = DisorderMode::Iid;
    InitLaw init = InitLaw::Uniform;
    // Initial density q0(x, eta) for InitLaw::Custom; need not be normalized.
    std::function<double(double, FieldSign)> init_density;
    int record_every = 10;
    int threads = 1;

    // Test hooks.
    double noise_scale = 1.0;
    bool drift_enabled = true;
    bool track_displacement = false;
};

// Throws DomainError on invalid fields. Returns a warning (possibly empty)
// when dt (theta + h) exceeds 0.2.
std::string validate(const SimConfig& cfg);

struct SpinEnsemble {
    std::vector<double> x;          // angles in [0, 2 pi)
    std::vector<FieldSign> eta;     // quenched
    std::vector<double> displacement;  // unwrapped x(t) - x(0), only when tracked
    double t = 0.0;
    long step_index = 0;
    double last_psi = 0.0;  // carried when r_N vanishes

    std::size_t size() const { return x.size(); }
};

// (r_N, psi_N) of the ensemble; psi falls back to e.last_psi when r_N <= 1e-12.
OrderParameter empirical_order(const SpinEnsemble& e);

SpinEnsemble init_ensemble(const SimConfig& cfg);

// One Euler-Maruyama step; returns the pre-step order parameter used for the drift.
OrderParameter step(SpinEnsemble& e, const SimConfig& cfg);

struct OrderTrajectory {
    std::vector<double> times;
    std::vector<double> r;
    std::vector<double> psi;

    std::size_t size() const { return times.size(); }
};

struct RunResult {
    SpinEnsemble final_state;
    OrderTrajectory trajectory;
};

// Records t = 0, every record_every steps, and the final state.
RunResult run(const SimConfig& cfg);

struct Histogram {
    int bins = 0;
    std::vector<double> mass;  // fraction of all spins per bin
    double bin_width() const;
    double density(int b) const { return mass[b] / bin_width(); }
};

// Bins [0, 2 pi) uniformly. With sign_filter, counts only that family but keeps
// the denominator at N, so masses sum to the selected fraction.
Histogram histogram(const SpinEnsemble& e, int bins, std::optional<FieldSign> sign_filter = {});

struct LimitComparison {
    double mean_r = 0.0;
    double predicted_r = 0.0;
    double r_error = 0.0;
    std::optional<double> psi_distance;  // absent for a paramagnetic prediction
    double mean_psi = 0.0;
    double second_half_drift = 0.0;
    bool equilibrated = true;
    bool pass = false;
};

struct LimitThresholds {
    double r = 0.05;
    double psi = 0.25;
    double drift = 0.02;
};

// Uses the second half of the trajectory. Mirror phases of the predicted
// branch count as matches.
LimitComparison empirical_vs_limit(const OrderTrajectory& traj, const StationarySolution& predicted,
                                   const LimitThresholds& thresholds = {});

// Shortest distance on the circle.
double circular_distance(double a, double b);

struct SnapshotHeader {
    int n = 0;
    double t = 0.0;
    std::uint64_t seed = 0;
    double theta = 0.0;
    double h = 0.0;
};

// One JSON header line, then n little-endian float64 angles, then n int8 signs.
void write_snapshot(const std::string& path, const SpinEnsemble& e, const SimConfig& cfg);
SpinEnsemble read_snapshot(const std::string& path, SnapshotHeader* header = nullptr);

}  // namespace spinflop
