#pragma once

// Free energy of the stationary family q(.; r, psi), up to an additive constant:
//
//   F = E_mu int [-(theta/2) r_q cos(psi_q - x) - h eta cos x] q dx
//     + (1/2) E_mu int q log(2 pi q) dx,
//
// where r_q e^{i psi_q} is the first moment of q itself. At self-consistent
// points r_q = r and psi_q = psi.

#include <vector>

#include "spinflop/solver.hpp"
#include "spinflop/stationary.hpp"

namespace spinflop {

inline constexpr int kQuadratureNodes = 4096;

double free_energy(const ModelParams& p, const OrderParameter& m, int nodes = kQuadratureNodes);

struct FreeEnergyValue {
    StationarySolution solution;
    double value = 0.0;
};

// Paramagnetic solution plus every solution in `c`, ascending. Mirror pairs
// are kept adjacent.
std::vector<FreeEnergyValue> rank_equilibria(const PhaseClassification& c,
                                             int nodes = kQuadratureNodes);

struct Landscape {
    int r_steps = 0;
    int psi_steps = 0;
    std::vector<double> r;       // r_steps values spanning [0, 1]
    std::vector<double> psi;     // psi_steps values spanning [0, 2 pi)
    std::vector<double> values;  // row-major: values[i * psi_steps + j] at (r[i], psi[j])

    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * psi_steps + j]; }
};

// Throws DomainError for grids smaller than 2.
Landscape landscape(const ModelParams& p, int r_steps, int psi_steps, int threads = 1,
                    int nodes = kQuadratureNodes);

}  // namespace spinflop
