#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstring>
#include <filesystem>
#include <numbers>

#include "spinflop/errors.hpp"
#include "spinflop/oracle.hpp"
#include "spinflop/philox.hpp"
#include "spinflop/simulator.hpp"
#include "spinflop/solver.hpp"

using namespace spinflop;
using std::numbers::pi;

namespace {

SimConfig base(double theta, double h, int n, long steps, std::uint64_t seed = 1) {
    SimConfig cfg;
    cfg.params = {theta, h};
    cfg.n = n;
    cfg.steps = steps;
    cfg.seed = seed;
    return cfg;
}

std::vector<double> family(const SpinEnsemble& e, FieldSign s) {
    std::vector<double> out;
    for (std::size_t i = 0; i < e.size(); ++i)
        if (e.eta[i] == s) out.push_back(e.x[i]);
    return out;
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
    using B = Philox4x32::Block;
    CHECK(Philox4x32(0)(B{0, 0, 0, 0}) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32(0xffffffffffffffffull)(B{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}) ==
          B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    const std::uint64_t key = (static_cast<std::uint64_t>(0x299f31d0u) << 32) | 0xa4093822u;
    CHECK(Philox4x32(key)(B{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}) ==
          B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniform and normal helpers") {
    CHECK(to_open_unit(0, 0) > 0.0);
    CHECK(to_open_unit(0xffffffffu, 0xffffffffu) < 1.0);
    CHECK(to_open_unit(0xffffffffu, 0xffffffffu) > 0.999999);
    const Philox4x32 rng(42);
    double sum = 0.0, sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto z = normal_pair(rng({static_cast<std::uint32_t>(i), 0, 0, 9}));
        sum += z[0] + z[1];
        sq += z[0] * z[0] + z[1] * z[1];
    }
    CHECK(std::fabs(sum / (2 * n)) < 0.01);
    CHECK(std::fabs(sq / (2 * n) - 1.0) < 0.01);
}

TEST_CASE("config validation") {
    auto cfg = base(5.0, 1.5, 10, 10);
    CHECK(validate(cfg).empty());
    cfg.steps = 0;
    CHECK_THROWS_AS(validate(cfg), DomainError);
    cfg = base(-1.0, 1.5, 10, 10);
    CHECK_THROWS_AS(validate(cfg), DomainError);
    cfg = base(1.0, 1.5, 0, 10);
    CHECK_THROWS_AS(validate(cfg), DomainError);
    cfg = base(1.0, 1.5, 10, 10);
    cfg.dt = 0.0;
    CHECK_THROWS_AS(validate(cfg), DomainError);
    cfg = base(20.0, 5.0, 10, 10);
    CHECK_FALSE(validate(cfg).empty());
    cfg = base(1.0, 1.0, 10, 10);
    cfg.init = InitLaw::Custom;
    CHECK_THROWS_AS(validate(cfg), DomainError);
    CHECK(SimConfig{}.record_every == 10);
    CHECK(SimConfig{}.dt == 0.01);
    CHECK(SimConfig{}.disorder == DisorderMode::Iid);
}

TEST_CASE("disorder modes") {
    auto cfg = base(1.0, 1.0, 2000, 1);
    cfg.disorder = DisorderMode::Balanced;
    const auto e = init_ensemble(cfg);
    CHECK(std::count(e.eta.begin(), e.eta.end(), FieldSign::Plus) == 1000);
    cfg.n = 2001;
    const auto odd = init_ensemble(cfg);
    CHECK(std::count(odd.eta.begin(), odd.eta.end(), FieldSign::Plus) == 1001);
    // The balanced layout is shuffled, not blocked.
    CHECK(std::count(e.eta.begin(), e.eta.begin() + 1000, FieldSign::Plus) < 1100);
    CHECK(std::count(e.eta.begin(), e.eta.begin() + 1000, FieldSign::Plus) > 400);

    cfg = base(1.0, 1.0, 20000, 1);
    const auto iid = init_ensemble(cfg);
    const auto plus = std::count(iid.eta.begin(), iid.eta.end(), FieldSign::Plus);
    CHECK(std::abs(static_cast<double>(plus) - 10000.0) < 5 * std::sqrt(5000.0));
}

TEST_CASE("uniform initial law") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto e = init_ensemble(base(1.0, 1.0, 4000, 1, seed));
        CHECK(empirical_order(e).r < 5.0 / std::sqrt(4000.0));
        for (double x : e.x) {
            CHECK(x >= 0.0);
            CHECK(x < kTwoPi);
        }
        CHECK(oracle::ks_distance(e.x, [](double x) { return x / kTwoPi; }) < 0.04);
    }
}

TEST_CASE("custom initial law") {
    auto cfg = base(1.0, 1.0, 5000, 1);
    cfg.init = InitLaw::Custom;
    cfg.init_density = [](double x, FieldSign s) { return std::exp(2.0 * sign_value(s) * std::cos(x)); };
    const auto e = init_ensemble(cfg);
    for (FieldSign s : {FieldSign::Plus, FieldSign::Minus}) {
        const auto cdf = oracle::tabulated_cdf([s](double x) { return std::exp(2.0 * sign_value(s) * std::cos(x)); });
        CHECK(oracle::ks_distance(family(e, s), cdf) < 0.05);
    }
}

TEST_CASE("same seed, same ensemble; different seed, different ensemble") {
    const auto cfg = base(5.0, 1.5, 300, 1, 77);
    const auto a = init_ensemble(cfg);
    const auto b = init_ensemble(cfg);
    CHECK(a.x == b.x);
    CHECK(a.eta == b.eta);
    auto other = cfg;
    other.seed = 78;
    CHECK(init_ensemble(other).x != a.x);
}

TEST_CASE("single-step examples without noise") {
    auto cfg = base(0.0, 0.0, 5, 1);
    cfg.noise_scale = 0.0;
    auto e = init_ensemble(cfg);
    const auto before = e.x;
    step(e, cfg);
    CHECK(e.x == before);
    CHECK(e.t == doctest::Approx(0.01));
    CHECK(e.step_index == 1);

    cfg = base(0.0, 5.0, 1, 1);
    cfg.noise_scale = 0.0;
    e = init_ensemble(cfg);
    e.x = {2.5};
    e.eta = {FieldSign::Plus};
    for (int i = 0; i < 2000; ++i) step(e, cfg);
    CHECK(std::min(e.x[0], kTwoPi - e.x[0]) < 1e-8);

    cfg = base(3.0, 2.0, 2, 1);
    cfg.noise_scale = 0.0;
    e = init_ensemble(cfg);
    e.x = {0.0, pi};
    e.eta = {FieldSign::Plus, FieldSign::Minus};
    const OrderParameter m = step(e, cfg);
    CHECK(m.r < 1e-15);
    CHECK(std::min(e.x[0], kTwoPi - e.x[0]) < 1e-15);
    CHECK(e.x[1] == doctest::Approx(pi).epsilon(1e-15));
}

TEST_CASE("psi carried over when r_N vanishes") {
    SpinEnsemble e;
    e.x = {0.0, pi};
    e.eta = {FieldSign::Plus, FieldSign::Minus};
    e.last_psi = 1.25;
    CHECK(empirical_order(e).psi == 1.25);
    e.x = {0.3, 0.3};
    CHECK(empirical_order(e).psi == doctest::Approx(0.3));
}

TEST_CASE("run determinism, recording and threading") {
    auto cfg = base(5.0, 1.5, 1000, 200, 9);
    const auto a = run(cfg);
    const auto b = run(cfg);
    CHECK(a.trajectory.r == b.trajectory.r);
    CHECK(a.trajectory.psi == b.trajectory.psi);
    CHECK(a.final_state.x == b.final_state.x);
    CHECK(a.trajectory.size() == 21);
    CHECK(a.trajectory.times.front() == 0.0);
    CHECK(a.trajectory.times.back() == doctest::Approx(2.0));
    for (double r : a.trajectory.r) {
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
    }
    for (double x : a.final_state.x) {
        CHECK(x >= 0.0);
        CHECK(x < kTwoPi);
    }

    auto threaded = cfg;
    threaded.threads = 4;
    const auto c = run(threaded);
    CHECK(c.trajectory.r == a.trajectory.r);
    CHECK(c.final_state.x == a.final_state.x);

    auto odd = cfg;
    odd.steps = 25;
    odd.record_every = 10;
    const auto o = run(odd);
    REQUIRE(o.trajectory.size() == 4);
    CHECK(o.trajectory.times[3] == doctest::Approx(0.25));
}

TEST_CASE("noise has unit diffusion") {
    auto cfg = base(0.0, 0.0, 10000, 100, 5);
    cfg.drift_enabled = false;
    cfg.track_displacement = true;
    const auto res = run(cfg);
    const auto& d = res.final_state.displacement;
    REQUIRE(d.size() == 10000);
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    double var = 0.0;
    for (double v : d) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d.size() - 1);
    const double t = res.final_state.t;
    CHECK(t == doctest::Approx(1.0));
    CHECK(std::fabs(var / t - 1.0) < 0.05);
}

TEST_CASE("zero coupling relaxes to the single-site law") {
    auto cfg = base(0.0, 1.5, 2000, 2000, 21);
    cfg.disorder = DisorderMode::Balanced;
    const auto res = run(cfg);
    for (FieldSign s : {FieldSign::Plus, FieldSign::Minus}) {
        const double eta = sign_value(s);
        const auto cdf = oracle::tabulated_cdf([eta](double x) { return std::exp(3.0 * eta * std::cos(x)); });
        const double ks = oracle::ks_distance(family(res.final_state, s), cdf);
        CHECK_MESSAGE(ks < 0.05, "eta = " << eta << " KS = " << ks);
    }
}

TEST_CASE("histogram") {
    SpinEnsemble e;
    e.x.assign(100, 0.0);
    e.eta.assign(100, FieldSign::Plus);
    const auto h = histogram(e, 16);
    CHECK(h.mass[0] == doctest::Approx(1.0).epsilon(1e-14));
    for (int b = 1; b < 16; ++b) CHECK(h.mass[b] == 0.0);
    CHECK(h.density(0) == doctest::Approx(16.0 / kTwoPi));

    const int n = 20000;
    const int bins = 32;
    const auto u = init_ensemble(base(1.0, 1.0, n, 1, 4));
    const auto hu = histogram(u, bins);
    double total = 0.0;
    for (int b = 0; b < bins; ++b) {
        total += hu.mass[b];
        CHECK(std::fabs(bins * hu.mass[b] - 1.0) < 5.0 * std::sqrt(static_cast<double>(bins) / n));
    }
    CHECK(total == doctest::Approx(1.0));
    const auto hp = histogram(u, bins, FieldSign::Plus);
    const auto hm = histogram(u, bins, FieldSign::Minus);
    double tp = 0.0, tm = 0.0;
    for (int b = 0; b < bins; ++b) {
        tp += hp.mass[b];
        tm += hm.mass[b];
    }
    CHECK(tp + tm == doctest::Approx(1.0));
    CHECK(tp == doctest::Approx(std::count(u.eta.begin(), u.eta.end(), FieldSign::Plus) / static_cast<double>(n)));
    CHECK_THROWS_AS(histogram(u, 0), DomainError);
}

TEST_CASE("phase 6 histograms match the stationary density") {
    const ModelParams p{5.0, 1.5};
    auto cfg = base(p.theta, p.h, 5000, 2000, 13);
    cfg.disorder = DisorderMode::Balanced;
    auto e = init_ensemble(cfg);
    const int bins = 32;
    std::vector<double> acc_plus(bins, 0.0), acc_minus(bins, 0.0);
    int snaps = 0;
    std::complex<double> psi_acc = 0.0;
    for (long s = 1; s <= cfg.steps; ++s) {
        step(e, cfg);
        if (s > 1000 && s % 50 == 0) {
            const auto hp = histogram(e, bins, FieldSign::Plus);
            const auto hm = histogram(e, bins, FieldSign::Minus);
            for (int b = 0; b < bins; ++b) {
                acc_plus[b] += hp.mass[b];
                acc_minus[b] += hm.mass[b];
            }
            psi_acc += std::polar(1.0, empirical_order(e).psi);
            ++snaps;
        }
    }
    const double psi_emp = wrap_angle(std::arg(psi_acc));
    const double psi_pred = circular_distance(psi_emp, pi / 2) < circular_distance(psi_emp, 3 * pi / 2) ? pi / 2
                                                                                                       : 3 * pi / 2;
    const double rp = *solve_perp(p);
    const double w = kTwoPi / bins;
    for (FieldSign s : {FieldSign::Plus, FieldSign::Minus}) {
        const StationaryDensity q(p, {rp, psi_pred}, s);
        const auto& acc = s == FieldSign::Plus ? acc_plus : acc_minus;
        double l1 = 0.0;
        for (int b = 0; b < bins; ++b) {
            // Family mass is one half; rescale to a probability density.
            const double emp = 2.0 * acc[b] / snaps / w;
            double cell = 0.0;
            for (int k = 0; k < 16; ++k) cell += q((b + (k + 0.5) / 16) * w) / 16;
            l1 += std::fabs(emp - cell) * w;
        }
        CHECK_MESSAGE(l1 < 0.1, "L1 = " << l1);
    }
}

TEST_CASE("disorder reflection symmetry") {
    const ModelParams p{5.0, 1.5};
    std::vector<double> direct, mirrored;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto cfg = base(p.theta, p.h, 500, 500, seed);
        direct.push_back(run(cfg).trajectory.r.back());
        auto e = init_ensemble(cfg);
        for (std::size_t i = 0; i < e.size(); ++i) {
            e.x[i] = wrap_angle(pi - e.x[i]);
            e.eta[i] = e.eta[i] == FieldSign::Plus ? FieldSign::Minus : FieldSign::Plus;
        }
        for (long s = 0; s < cfg.steps; ++s) step(e, cfg);
        mirrored.push_back(empirical_order(e).r);
    }
    const auto ks = oracle::ks_two_sample(direct, mirrored);
    CHECK_MESSAGE(ks.p_value > 0.01, "KS = " << ks.statistic << " p = " << ks.p_value);
}

TEST_CASE("snapshot round trip") {
    auto cfg = base(5.0, 1.5, 257, 30, 3);
    const auto res = run(cfg);
    const auto path = (std::filesystem::temp_directory_path() / "spinflop_snapshot_test.bin").string();
    write_snapshot(path, res.final_state, cfg);
    SnapshotHeader h;
    const auto back = read_snapshot(path, &h);
    CHECK(back.x == res.final_state.x);
    CHECK(back.eta == res.final_state.eta);
    CHECK(h.n == 257);
    CHECK(h.seed == 3);
    CHECK(h.t == doctest::Approx(res.final_state.t));
    CHECK(h.theta == 5.0);
    CHECK(h.h == 1.5);
    CHECK(back.t == doctest::Approx(res.final_state.t));
    std::filesystem::remove(path);
    CHECK_THROWS(read_snapshot(path));
}

TEST_CASE("empirical_vs_limit") {
    auto cfg0 = base(0.5, 1.5, 2000, 2000, 1);
    cfg0.disorder = DisorderMode::Balanced;
    const auto run0 = run(cfg0);
    const StationarySolution para{};
    const auto c0 = empirical_vs_limit(run0.trajectory, para);
    CHECK(c0.pass);
    CHECK_FALSE(c0.psi_distance.has_value());

    const ModelParams p{5.0, 1.5};
    auto cfg6 = base(p.theta, p.h, 2000, 2000, 1);
    cfg6.disorder = DisorderMode::Balanced;
    const auto run6 = run(cfg6);
    const auto cls = classify(p);
    const StationarySolution* perp = nullptr;
    const StationarySolution* par = nullptr;
    for (const auto& s : cls.solutions) {
        if (s.branch == Branch::Perp && !perp) perp = &s;
        if (s.branch == Branch::Parallel && !par) par = &s;
    }
    REQUIRE(perp);
    REQUIRE(par);
    const auto good = empirical_vs_limit(run6.trajectory, *perp);
    CHECK(good.pass);
    CHECK(good.equilibrated);
    CHECK(*good.psi_distance < 0.25);
    const auto bad = empirical_vs_limit(run6.trajectory, *par);
    CHECK_FALSE(bad.pass);

    OrderTrajectory ramp;
    for (int i = 0; i < 100; ++i) {
        ramp.times.push_back(i);
        ramp.r.push_back(0.01 * i);
        ramp.psi.push_back(0.0);
    }
    const auto drift = empirical_vs_limit(ramp, para);
    CHECK_FALSE(drift.equilibrated);
    CHECK_FALSE(drift.pass);
    CHECK(circular_distance(0.1, kTwoPi - 0.1) == doctest::Approx(0.2));
}
