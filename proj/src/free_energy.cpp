#include "spinflop/free_energy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "spinflop/errors.hpp"
#include "spinflop/parallel.hpp"

namespace spinflop {

namespace {

struct FamilyIntegrals {
    std::complex<double> first_moment;  // int e^{ix} q dx
    double field_energy = 0.0;          // int -h eta cos x q dx
    double entropy = 0.0;               // int q log(2 pi q) dx
    std::vector<double> q;              // nodal values of q, kept for the coupling term
};

FamilyIntegrals integrate_family(const ModelParams& p, const OrderParameter& m, FieldSign eta,
                                 int nodes) {
    const StationaryDensity density(p, m, eta);
    const double dx = kTwoPi / nodes;
    const double log_two_pi = std::log(kTwoPi);
    FamilyIntegrals out;
    out.q.resize(nodes);
    double c = 0.0;
    double s = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const double x = j * dx;
        const double log_q = density.log_density(x);
        const double q = std::exp(log_q);
        out.q[j] = q;
        c += std::cos(x) * q;
        s += std::sin(x) * q;
        out.field_energy += -p.h * sign_value(eta) * std::cos(x) * q;
        // 0 log 0 = 0
        if (q > 0.0) out.entropy += q * (log_two_pi + log_q);
    }
    out.first_moment = {c * dx, s * dx};
    out.field_energy *= dx;
    out.entropy *= dx;
    return out;
}

}  // namespace

double free_energy(const ModelParams& p, const OrderParameter& m, int nodes) {
    validate(p);
    if (nodes < 8) throw DomainError("free_energy: too few quadrature nodes");
    const FamilyIntegrals plus = integrate_family(p, m, FieldSign::Plus, nodes);
    const FamilyIntegrals minus = integrate_family(p, m, FieldSign::Minus, nodes);

    const std::complex<double> mq = 0.5 * (plus.first_moment + minus.first_moment);
    const double r_q = std::abs(mq);
    const double psi_q = r_q > 0.0 ? std::arg(mq) : 0.0;

    const double dx = kTwoPi / nodes;
    double coupling = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const double x = j * dx;
        coupling += std::cos(psi_q - x) * 0.5 * (plus.q[j] + minus.q[j]);
    }
    coupling *= -0.5 * p.theta * r_q * dx;

    const double field = 0.5 * (plus.field_energy + minus.field_energy);
    const double entropy = 0.5 * (0.5 * (plus.entropy + minus.entropy));
    return coupling + field + entropy;
}

std::vector<FreeEnergyValue> rank_equilibria(const PhaseClassification& c, int nodes) {
    const std::vector<StationarySolution> all = all_stationary_solutions(c);

    // Group mirror images (same branch, same r) so they stay adjacent after sorting.
    struct Group {
        std::vector<FreeEnergyValue> members;
        double key = 0.0;
    };
    std::vector<Group> groups;
    for (const StationarySolution& s : all) {
        const double value = free_energy(c.params, s.order, nodes);
        auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
            const StationarySolution& head = g.members.front().solution;
            return head.branch == s.branch && std::fabs(head.order.r - s.order.r) < 1e-12;
        });
        if (it == groups.end()) {
            groups.push_back({{{s, value}}, value});
        } else {
            it->members.push_back({s, value});
        }
    }
    for (Group& g : groups) {
        double sum = 0.0;
        for (const FreeEnergyValue& v : g.members) sum += v.value;
        g.key = sum / static_cast<double>(g.members.size());
        std::stable_sort(g.members.begin(), g.members.end(),
                         [](const FreeEnergyValue& a, const FreeEnergyValue& b) {
                             return a.solution.order.psi < b.solution.order.psi;
                         });
    }
    std::stable_sort(groups.begin(), groups.end(),
                     [](const Group& a, const Group& b) { return a.key < b.key; });

    std::vector<FreeEnergyValue> out;
    for (const Group& g : groups) out.insert(out.end(), g.members.begin(), g.members.end());
    return out;
}

Landscape landscape(const ModelParams& p, int r_steps, int psi_steps, int threads, int nodes) {
    validate(p);
    if (r_steps < 2 || psi_steps < 2) throw DomainError("landscape: grids must have at least 2 points");
    Landscape out;
    out.r_steps = r_steps;
    out.psi_steps = psi_steps;
    out.r.resize(r_steps);
    out.psi.resize(psi_steps);
    for (int i = 0; i < r_steps; ++i) out.r[i] = static_cast<double>(i) / (r_steps - 1);
    for (int j = 0; j < psi_steps; ++j) out.psi[j] = kTwoPi * j / psi_steps;
    out.values.assign(static_cast<std::size_t>(r_steps) * psi_steps, 0.0);

    parallel_for(static_cast<std::size_t>(r_steps), threads, [&](std::size_t i) {
        for (int j = 0; j < psi_steps; ++j) {
            // psi grid already lies in [0, 2 pi); build the struct directly to keep
            // the exact grid value
            OrderParameter m;
            m.r = out.r[i];
            m.psi = out.psi[j];
            out.values[i * psi_steps + j] = free_energy(p, m, nodes);
        }
    });
    return out;
}

}  // namespace spinflop
