#include "spinflop/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"

#include "spinflop/errors.hpp"
#include "spinflop/parallel.hpp"
#include "spinflop/philox.hpp"

namespace spinflop {

namespace {

// Stream tags carried in the last counter word.
enum Stream : std::uint32_t { kNoise = 0, kInitAngle = 1, kDisorder = 2, kShuffle = 3 };

Philox4x32::Block counter(std::size_t spin, long step, Stream stream) {
    const auto s = static_cast<std::uint64_t>(step);
    return {static_cast<std::uint32_t>(spin), static_cast<std::uint32_t>(s),
            static_cast<std::uint32_t>(s >> 32), stream};
}

// Inverse-CDF sampler for a density tabulated on a uniform grid of [0, 2 pi).
class GridSampler {
public:
    explicit GridSampler(const std::function<double(double)>& density, int cells = 4096)
        : cells_(cells), cdf_(cells + 1, 0.0) {
        const double w = kTwoPi / cells;
        for (int c = 0; c < cells; ++c) {
            const double v = density((c + 0.5) * w);
            if (!(v >= 0.0) || !std::isfinite(v))
                throw DomainError("init density must be finite and non-negative");
            cdf_[c + 1] = cdf_[c] + v;
        }
        if (!(cdf_.back() > 0.0)) throw DomainError("init density integrates to zero");
        for (double& c : cdf_) c /= cdf_[cells];
    }

    double sample(double u) const {
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const int c = std::clamp(static_cast<int>(it - cdf_.begin()) - 1, 0, cells_ - 1);
        const double lo = cdf_[c];
        const double hi = cdf_[c + 1];
        const double frac = hi > lo ? (u - lo) / (hi - lo) : 0.5;
        return wrap_angle((c + frac) * kTwoPi / cells_);
    }

private:
    int cells_;
    std::vector<double> cdf_;
};

}  // namespace

std::string validate(const SimConfig& cfg) {
    const auto& p = cfg.params;
    if (!(std::isfinite(p.theta) && p.theta >= 0.0)) throw DomainError("simulation: theta must be >= 0");
    if (!(std::isfinite(p.h) && p.h >= 0.0)) throw DomainError("simulation: h must be >= 0");
    if (cfg.n < 1) throw DomainError("simulation: n must be >= 1");
    if (!(std::isfinite(cfg.dt) && cfg.dt > 0.0)) throw DomainError("simulation: dt must be positive");
    if (cfg.steps < 1) throw DomainError("simulation: steps must be >= 1");
    if (cfg.record_every < 1) throw DomainError("simulation: record_every must be >= 1");
    if (cfg.init == InitLaw::Custom && !cfg.init_density)
        throw DomainError("simulation: custom init requires an initial density");
    if (cfg.dt * (p.theta + p.h) > 0.2)
        return "dt * (theta + h) = " + std::to_string(cfg.dt * (p.theta + p.h)) +
               " exceeds 0.2; Euler-Maruyama bias may be visible";
    return {};
}

OrderParameter empirical_order(const SpinEnsemble& e) {
    double c = 0.0;
    double s = 0.0;
    for (double x : e.x) {
        c += std::cos(x);
        s += std::sin(x);
    }
    const double n = static_cast<double>(e.x.size());
    const double r = std::min(1.0, std::hypot(c, s) / n);
    OrderParameter m;
    m.r = r;
    m.psi = r > 1e-12 ? wrap_angle(std::atan2(s, c)) : e.last_psi;
    return m;
}

SpinEnsemble init_ensemble(const SimConfig& cfg) {
    validate(cfg);
    const Philox4x32 rng(cfg.seed);
    const auto n = static_cast<std::size_t>(cfg.n);
    SpinEnsemble e;
    e.x.resize(n);
    e.eta.resize(n);

    if (cfg.disorder == DisorderMode::Iid) {
        for (std::size_t i = 0; i < n; ++i)
            e.eta[i] = uniform_pair(rng(counter(i, 0, kDisorder)))[0] < 0.5 ? FieldSign::Plus
                                                                            : FieldSign::Minus;
    } else {
        const std::size_t plus = (n + 1) / 2;
        for (std::size_t i = 0; i < n; ++i) e.eta[i] = i < plus ? FieldSign::Plus : FieldSign::Minus;
        for (std::size_t i = n; i-- > 1;) {
            const double u = uniform_pair(rng(counter(i, 0, kShuffle)))[0];
            const auto j = std::min(i, static_cast<std::size_t>(u * static_cast<double>(i + 1)));
            std::swap(e.eta[i], e.eta[j]);
        }
    }

    if (cfg.init == InitLaw::Uniform) {
        for (std::size_t i = 0; i < n; ++i)
            e.x[i] = wrap_angle(kTwoPi * uniform_pair(rng(counter(i, 0, kInitAngle)))[0]);
    } else {
        const GridSampler plus([&](double x) { return cfg.init_density(x, FieldSign::Plus); });
        const GridSampler minus([&](double x) { return cfg.init_density(x, FieldSign::Minus); });
        for (std::size_t i = 0; i < n; ++i) {
            const double u = uniform_pair(rng(counter(i, 0, kInitAngle)))[0];
            e.x[i] = (e.eta[i] == FieldSign::Plus ? plus : minus).sample(u);
        }
    }
    if (cfg.track_displacement) e.displacement.assign(n, 0.0);
    e.last_psi = empirical_order(e).psi;
    return e;
}

OrderParameter step(SpinEnsemble& e, const SimConfig& cfg) {
    const OrderParameter m = empirical_order(e);
    e.last_psi = m.psi;

    const Philox4x32 rng(cfg.seed);
    const double dt = cfg.dt;
    const double noise = cfg.noise_scale * std::sqrt(dt);
    const double coupling = cfg.drift_enabled ? cfg.params.theta * m.r : 0.0;
    const double field = cfg.drift_enabled ? cfg.params.h : 0.0;
    const bool track = !e.displacement.empty();
    const long k = e.step_index;

    parallel_for(e.size(), cfg.threads, [&](std::size_t i) {
        const double x = e.x[i];
        const double drift = coupling * std::sin(m.psi - x) - field * sign_value(e.eta[i]) * std::sin(x);
        const double increment = drift * dt + noise * normal_pair(rng(counter(i, k, kNoise)))[0];
        if (track) e.displacement[i] += increment;
        e.x[i] = wrap_angle(x + increment);
    });

    ++e.step_index;
    e.t = static_cast<double>(e.step_index) * dt;
    return m;
}

RunResult run(const SimConfig& cfg) {
    RunResult out{init_ensemble(cfg), {}};
    auto record = [&] {
        const OrderParameter m = empirical_order(out.final_state);
        out.trajectory.times.push_back(out.final_state.t);
        out.trajectory.r.push_back(m.r);
        out.trajectory.psi.push_back(m.psi);
    };
    record();
    for (long k = 1; k <= cfg.steps; ++k) {
        step(out.final_state, cfg);
        if (k % cfg.record_every == 0 || k == cfg.steps) record();
    }
    return out;
}

double Histogram::bin_width() const { return kTwoPi / bins; }

Histogram histogram(const SpinEnsemble& e, int bins, std::optional<FieldSign> sign_filter) {
    if (bins < 2) throw DomainError("histogram: need at least 2 bins");
    Histogram hist;
    hist.bins = bins;
    hist.mass.assign(bins, 0.0);
    if (e.x.empty()) return hist;
    const double weight = 1.0 / static_cast<double>(e.x.size());
    for (std::size_t i = 0; i < e.x.size(); ++i) {
        if (sign_filter && e.eta[i] != *sign_filter) continue;
        const int b = std::clamp(static_cast<int>(e.x[i] / kTwoPi * bins), 0, bins - 1);
        hist.mass[b] += weight;
    }
    return hist;
}

double circular_distance(double a, double b) {
    const double d = wrap_angle(a - b);
    return std::min(d, kTwoPi - d);
}

LimitComparison empirical_vs_limit(const OrderTrajectory& traj, const StationarySolution& predicted,
                                   const LimitThresholds& thresholds) {
    if (traj.size() < 4) throw DomainError("empirical_vs_limit: trajectory too short");
    const std::size_t begin = traj.size() / 2;
    const std::size_t mid = begin + (traj.size() - begin) / 2;

    auto mean_r = [&](std::size_t lo, std::size_t hi) {
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) sum += traj.r[i];
        return sum / static_cast<double>(hi - lo);
    };

    LimitComparison out;
    out.mean_r = mean_r(begin, traj.size());
    out.predicted_r = predicted.order.r;
    out.r_error = std::fabs(out.mean_r - out.predicted_r);
    out.second_half_drift = std::fabs(mean_r(mid, traj.size()) - mean_r(begin, mid));
    out.equilibrated = out.second_half_drift <= thresholds.drift;

    double c = 0.0;
    double s = 0.0;
    for (std::size_t i = begin; i < traj.size(); ++i) {
        c += std::cos(traj.psi[i]);
        s += std::sin(traj.psi[i]);
    }
    out.mean_psi = wrap_angle(std::atan2(s, c));

    bool psi_ok = true;
    if (predicted.branch != Branch::Paramagnetic) {
        const double psi = predicted.order.psi;
        out.psi_distance = std::min(circular_distance(out.mean_psi, psi),
                                    circular_distance(out.mean_psi, psi + std::numbers::pi));
        psi_ok = *out.psi_distance <= thresholds.psi;
    }
    out.pass = out.r_error <= thresholds.r && psi_ok && out.equilibrated;
    return out;
}

namespace {

template <class T>
T to_little_endian(T v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
        std::reverse(bytes.begin(), bytes.end());
        return std::bit_cast<T>(bytes);
    }
}

}  // namespace

void write_snapshot(const std::string& path, const SpinEnsemble& e, const SimConfig& cfg) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open snapshot file " + path);
    const nlohmann::json header = {
        {"n", e.size()},
        {"t", e.t},
        {"seed", cfg.seed},
        {"params", {{"theta", cfg.params.theta}, {"h", cfg.params.h}}},
        {"layout", "f64le x[n]; i8 eta[n]"},
    };
    out << header.dump() << '\n';
    for (double x : e.x) {
        const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(x));
        out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    for (FieldSign s : e.eta) {
        const auto v = static_cast<std::int8_t>(sign_value(s));
        out.write(reinterpret_cast<const char*>(&v), 1);
    }
    if (!out) throw std::runtime_error("failed writing snapshot " + path);
}

SpinEnsemble read_snapshot(const std::string& path, SnapshotHeader* header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot file " + path);
    std::string line;
    std::getline(in, line);
    const nlohmann::json j = nlohmann::json::parse(line);
    SnapshotHeader hdr;
    hdr.n = j.at("n").get<int>();
    hdr.t = j.at("t").get<double>();
    hdr.seed = j.at("seed").get<std::uint64_t>();
    hdr.theta = j.at("params").at("theta").get<double>();
    hdr.h = j.at("params").at("h").get<double>();

    SpinEnsemble e;
    e.t = hdr.t;
    e.x.resize(hdr.n);
    e.eta.resize(hdr.n);
    for (double& x : e.x) {
        std::uint64_t bits = 0;
        in.read(reinterpret_cast<char*>(&bits), sizeof bits);
        x = std::bit_cast<double>(to_little_endian(bits));
    }
    for (FieldSign& s : e.eta) {
        std::int8_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 1);
        s = v > 0 ? FieldSign::Plus : FieldSign::Minus;
    }
    if (!in) throw std::runtime_error("truncated snapshot " + path);
    if (header) *header = hdr;
    return e;
}

}  // namespace spinflop
