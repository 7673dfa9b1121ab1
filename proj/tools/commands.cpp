#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "CLI11.hpp"

#include "spinflop/errors.hpp"
#include "spinflop/free_energy.hpp"
#include "spinflop/oracle.hpp"
#include "spinflop/parallel.hpp"

namespace spinflop::cli {

using nlohmann::json;
namespace fs = std::filesystem;

ConfigError::ConfigError(int line, const std::string& field, const std::string& what)
    : UsageError(fmt::format("config line {}: field '{}': {}", line, field, what)),
      line_(line),
      field_(field) {}

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::ostream& out_of(const Context& ctx) { return ctx.out ? *ctx.out : std::cout; }
std::ostream& err_of(const Context& ctx) { return ctx.err ? *ctx.err : std::cerr; }

fs::path prepare(const Context& ctx, const std::string& name) {
    fs::create_directories(ctx.out_dir);
    return ctx.out_dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

json solver_json(const SolverOptions& o) {
    return {{"scan_points", o.scan_points},
            {"refine_factor", o.refine_factor},
            {"tol_root", o.root_tol},
            {"tol_theta", o.theta_tol},
            {"tol_boundary", o.boundary_tol}};
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json solution_json(const StationarySolution& s) {
    return {{"branch", std::string(to_string(s.branch))},
            {"r", s.order.r},
            {"psi", s.order.psi},
            {"residual", s.residual}};
}

std::string disorder_name(DisorderMode d) { return d == DisorderMode::Iid ? "iid" : "balanced"; }

double parse_double(int line, const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw ConfigError(line, key, "expected a number, got '" + value + "'");
    }
    if (used != value.size() || !std::isfinite(v))
        throw ConfigError(line, key, "expected a number, got '" + value + "'");
    return v;
}

long long parse_integer(int line, const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception&) {
        throw ConfigError(line, key, "expected an integer, got '" + value + "'");
    }
    if (used != value.size()) throw ConfigError(line, key, "expected an integer, got '" + value + "'");
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

void check_solver(const SolverOptions& o) {
    if (o.scan_points < 2) throw UsageError("--scan-points must be >= 2");
    if (o.refine_factor < 1) throw UsageError("--refine-factor must be >= 1");
    if (!(o.root_tol > 0.0) || !(o.theta_tol > 0.0) || !(o.boundary_tol >= 0.0))
        throw UsageError("tolerances must be positive");
}

}  // namespace

fs::path resolve_out_dir(const std::optional<std::string>& flag) {
    if (flag && !flag->empty()) return *flag;
    if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
    return fs::current_path();
}

json to_json(const Manifest& m) {
    json outputs = json::array();
    for (const auto& p : m.outputs) outputs.push_back(p.string());
    return {{"command", m.command},
            {"version", kVersion},
            {"parameters", m.parameters},
            {"seed", m.seed ? json(*m.seed) : json(nullptr)},
            {"outputs", outputs},
            {"wall_clock_seconds", m.wall_seconds}};
}

fs::path write_manifest(const Context& ctx, const Manifest& m) {
    const fs::path path = prepare(ctx, m.command + ".manifest.json");
    write_text(path, to_json(m).dump(2) + "\n");
    return path;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

std::string csv_number(double v) { return fmt::format("{}", v); }

std::string csv_row(const std::vector<std::string>& fields) {
    std::string row;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) row += ',';
        row += csv_field(fields[i]);
    }
    return row + "\r\n";
}

int cmd_curves(const CurvesArgs& a, const Context& ctx) {
    const Stopwatch clock;
    if (!(std::isfinite(a.h_min) && std::isfinite(a.h_max) && a.h_min > 0.0 && a.h_min < a.h_max))
        throw UsageError("curves: need 0 < h_min < h_max");
    if (a.steps < 2) throw UsageError("curves: steps must be >= 2");
    check_solver(a.solver);

    const double hb = h_bar();
    std::vector<CriticalCurves> rows(static_cast<std::size_t>(a.steps));
    std::vector<std::string> failures(rows.size());
    parallel_for(rows.size(), a.threads, [&](std::size_t i) {
        const double h = a.h_min + (a.h_max - a.h_min) * static_cast<double>(i) / (a.steps - 1);
        try {
            rows[i] = critical_curves(h, a.solver);
        } catch (const std::exception& ex) {
            rows[i].h = h;
            failures[i] = ex.what();
        }
    });

    std::string csv = csv_row({"h", "theta1", "theta2", "theta_star", "h_bar"});
    int failed = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& c = rows[i];
        if (!failures[i].empty()) {
            ++failed;
            err_of(ctx) << "curves: h = " << c.h << ": " << failures[i] << "\n";
            csv += csv_row({csv_number(c.h), "", "", "", csv_number(hb)});
            continue;
        }
        csv += csv_row({csv_number(c.h), csv_number(c.theta1), csv_number(c.theta2),
                        c.theta_star ? csv_number(*c.theta_star) : "", csv_number(hb)});
    }
    const fs::path path = prepare(ctx, "curves.csv");
    write_text(path, csv);

    Manifest m{"curves",
               {{"h_min", a.h_min}, {"h_max", a.h_max}, {"steps", a.steps}, {"threads", a.threads},
                {"solver", solver_json(a.solver)}},
               std::nullopt,
               {path},
               clock.seconds()};
    write_manifest(ctx, m);
    out_of(ctx) << "wrote " << path.string() << " (" << rows.size() << " rows, h_bar = "
                << fmt::format("{:.10f}", hb) << ")\n";
    return failed ? kExitNumerical : kExitOk;
}

json classify_json(const ClassifyArgs& a) {
    const ModelParams p{a.theta, a.h};
    const PhaseClassification c = classify(p, a.solver);
    const auto ranking = rank_equilibria(c, a.quad_nodes);

    json solutions = json::array();
    for (const auto& s : all_stationary_solutions(c)) solutions.push_back(solution_json(s));
    json ranked = json::array();
    for (const auto& fv : ranking) {
        json entry = solution_json(fv.solution);
        entry["free_energy"] = fv.value;
        ranked.push_back(entry);
    }
    json out = {{"h", a.h},
                {"theta", a.theta},
                {"phase", c.phase_label},
                {"perp_pairs", c.perp_pairs},
                {"parallel_pairs", c.parallel_pairs},
                {"curve_label", c.curve_label},
                {"curves",
                 {{"theta1", c.curves.theta1},
                  {"theta2", c.curves.theta2},
                  {"theta_star", optional_number(c.curves.theta_star)},
                  {"h_bar", c.curves.h_bar}}},
                {"solutions", solutions},
                {"free_energy_ranking", ranked},
                {"global_minimum", ranked.empty() ? json(nullptr) : ranked.front()},
                {"boundary", c.boundary},
                {"warning", c.warning.empty() ? json(nullptr) : json(c.warning)}};
    return out;
}

int cmd_classify(const ClassifyArgs& a, const Context& ctx) {
    const Stopwatch clock;
    if (!(std::isfinite(a.h) && a.h > 0.0)) throw UsageError("classify: h must be > 0");
    if (!(std::isfinite(a.theta) && a.theta > 0.0)) throw UsageError("classify: theta must be > 0");
    if (a.quad_nodes < 16) throw UsageError("classify: --quad-nodes must be >= 16");
    check_solver(a.solver);

    const json result = classify_json(a);
    const fs::path path = prepare(ctx, "classify.json");
    write_text(path, result.dump(2) + "\n");
    Manifest m{"classify",
               {{"h", a.h}, {"theta", a.theta}, {"quad_nodes", a.quad_nodes},
                {"solver", solver_json(a.solver)}},
               std::nullopt,
               {path},
               clock.seconds()};
    write_manifest(ctx, m);

    out_of(ctx) << "phase " << result["phase"].get<int>() << " at (h, theta) = (" << a.h << ", "
                << a.theta << ")\n";
    if (!result["warning"].is_null())
        err_of(ctx) << "warning: " << result["warning"].get<std::string>() << "\n";
    double worst = 0.0;
    for (const auto& s : result["solutions"]) worst = std::max(worst, s["residual"].get<double>());
    return worst <= 1e-9 ? kExitOk : kExitNumerical;
}

void apply_config_text(const std::string& text, SimulateArgs& args) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    SimConfig& cfg = args.config;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string body = trim(raw);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(line, body, "expected 'key = value'");
        std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        for (char& ch : key)
            if (ch == '-') ch = '_';
        if (key.empty()) throw ConfigError(line, "", "missing key");
        if (value.empty()) throw ConfigError(line, key, "missing value");

        if (key == "h") {
            cfg.params.h = parse_double(line, key, value);
        } else if (key == "theta") {
            cfg.params.theta = parse_double(line, key, value);
        } else if (key == "n") {
            const auto v = parse_integer(line, key, value);
            if (v < 1 || v > 100000000) throw ConfigError(line, key, "must be in [1, 1e8]");
            cfg.n = static_cast<int>(v);
        } else if (key == "dt") {
            cfg.dt = parse_double(line, key, value);
            if (!(cfg.dt > 0.0)) throw ConfigError(line, key, "must be positive");
        } else if (key == "steps") {
            cfg.steps = static_cast<long>(parse_integer(line, key, value));
            if (cfg.steps < 1) throw ConfigError(line, key, "must be >= 1");
        } else if (key == "seed") {
            const auto v = parse_integer(line, key, value);
            if (v < 0) throw ConfigError(line, key, "must be non-negative");
            cfg.seed = static_cast<std::uint64_t>(v);
        } else if (key == "disorder") {
            if (value == "iid") {
                cfg.disorder = DisorderMode::Iid;
            } else if (value == "balanced") {
                cfg.disorder = DisorderMode::Balanced;
            } else {
                throw ConfigError(line, key, "expected 'iid' or 'balanced', got '" + value + "'");
            }
        } else if (key == "record_every") {
            const auto v = parse_integer(line, key, value);
            if (v < 1) throw ConfigError(line, key, "must be >= 1");
            cfg.record_every = static_cast<int>(v);
        } else if (key == "threads") {
            const auto v = parse_integer(line, key, value);
            if (v < 1) throw ConfigError(line, key, "must be >= 1");
            cfg.threads = static_cast<int>(v);
        } else if (key == "bins") {
            const auto v = parse_integer(line, key, value);
            if (v < 2) throw ConfigError(line, key, "must be >= 2");
            args.bins = static_cast<int>(v);
        } else {
            throw ConfigError(line, key, "unknown key");
        }
    }
}

void apply_config_file(const fs::path& path, SimulateArgs& args) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << f.rdbuf();
    apply_config_text(buf.str(), args);
}

int cmd_simulate(const SimulateArgs& a, const Context& ctx) {
    const Stopwatch clock;
    const SimConfig& cfg = a.config;
    std::string warning;
    try {
        warning = validate(cfg);
    } catch (const DomainError& ex) {
        throw UsageError(ex.what());
    }
    if (a.bins < 2) throw UsageError("simulate: bins must be >= 2");
    check_solver(a.solver);
    if (!warning.empty()) err_of(ctx) << "warning: " << warning << "\n";

    const RunResult result = run(cfg);

    std::string traj = csv_row({"t", "r", "psi"});
    for (std::size_t i = 0; i < result.trajectory.size(); ++i)
        traj += csv_row({csv_number(result.trajectory.times[i]), csv_number(result.trajectory.r[i]),
                         csv_number(result.trajectory.psi[i])});
    const fs::path traj_path = prepare(ctx, "trajectory.csv");
    write_text(traj_path, traj);

    const Histogram plus = histogram(result.final_state, a.bins, FieldSign::Plus);
    const Histogram minus = histogram(result.final_state, a.bins, FieldSign::Minus);
    std::string hist = csv_row({"bin_lo", "bin_hi", "mass_plus", "mass_minus", "density_plus",
                                "density_minus"});
    const double w = plus.bin_width();
    for (int b = 0; b < a.bins; ++b)
        hist += csv_row({csv_number(b * w), csv_number((b + 1) * w), csv_number(plus.mass[b]),
                         csv_number(minus.mass[b]), csv_number(plus.density(b)),
                         csv_number(minus.density(b))});
    const fs::path hist_path = prepare(ctx, "histogram.csv");
    write_text(hist_path, hist);

    const fs::path snap_path = prepare(ctx, "snapshot.bin");
    write_snapshot(snap_path.string(), result.final_state, cfg);

    const OrderParameter final_order = empirical_order(result.final_state);
    json report = {{"final_r", final_order.r},
                   {"final_psi", final_order.psi},
                   {"final_t", result.final_state.t},
                   {"warning", warning.empty() ? json(nullptr) : json(warning)}};
    int code = kExitOk;
    if (result.trajectory.size() < 4) {
        report["phase"] = nullptr;
        report["prediction"] = nullptr;
        report["comparison"] = nullptr;
        report["pass"] = nullptr;
        report["note"] = "trajectory too short for a limit comparison (fewer than 4 records)";
    } else if (cfg.params.theta > 0.0 && cfg.params.h > 0.0) {
        const PhaseClassification c = classify(cfg.params, a.solver);
        const auto ranking = rank_equilibria(c);
        const StationarySolution& best = ranking.front().solution;
        const LimitComparison cmp = empirical_vs_limit(result.trajectory, best);
        report["phase"] = c.phase_label;
        report["prediction"] = solution_json(best);
        report["comparison"] = {{"mean_r", cmp.mean_r},
                                {"predicted_r", cmp.predicted_r},
                                {"r_error", cmp.r_error},
                                {"mean_psi", cmp.mean_psi},
                                {"psi_distance", optional_number(cmp.psi_distance)},
                                {"second_half_drift", cmp.second_half_drift},
                                {"equilibrated", cmp.equilibrated}};
        report["pass"] = cmp.pass;
        if (!cmp.equilibrated) code = kExitNumerical;
    } else {
        report["phase"] = nullptr;
        report["prediction"] = nullptr;
        report["comparison"] = nullptr;
        report["pass"] = nullptr;
        report["note"] = "no stationary prediction for theta = 0 or h = 0";
    }
    const fs::path report_path = prepare(ctx, "report.json");
    write_text(report_path, report.dump(2) + "\n");

    Manifest m{"simulate",
               {{"h", cfg.params.h},
                {"theta", cfg.params.theta},
                {"n", cfg.n},
                {"dt", cfg.dt},
                {"steps", cfg.steps},
                {"disorder", disorder_name(cfg.disorder)},
                {"record_every", cfg.record_every},
                {"threads", cfg.threads},
                {"bins", a.bins},
                {"solver", solver_json(a.solver)}},
               cfg.seed,
               {traj_path, hist_path, snap_path, report_path},
               clock.seconds()};
    write_manifest(ctx, m);

    out_of(ctx) << "final r = " << final_order.r << ", psi = " << final_order.psi;
    if (!report["pass"].is_null()) out_of(ctx) << ", limit check " << (report["pass"].get<bool>() ? "pass" : "fail");
    out_of(ctx) << "\n";
    return code;
}

int cmd_landscape(const LandscapeArgs& a, const Context& ctx) {
    const Stopwatch clock;
    if (!(std::isfinite(a.h) && a.h > 0.0)) throw UsageError("landscape: h must be > 0");
    if (!(std::isfinite(a.theta) && a.theta > 0.0)) throw UsageError("landscape: theta must be > 0");
    if (a.r_steps < 2 || a.psi_steps < 2) throw UsageError("landscape: grids must be >= 2");
    if (a.quad_nodes < 16) throw UsageError("landscape: --quad-nodes must be >= 16");

    const Landscape l = landscape({a.theta, a.h}, a.r_steps, a.psi_steps, a.threads, a.quad_nodes);
    std::string csv = csv_row({"r", "psi", "free_energy"});
    bool finite = true;
    for (int i = 0; i < l.r_steps; ++i)
        for (int j = 0; j < l.psi_steps; ++j) {
            finite = finite && std::isfinite(l.at(i, j));
            csv += csv_row({csv_number(l.r[i]), csv_number(l.psi[j]), csv_number(l.at(i, j))});
        }
    const fs::path path = prepare(ctx, "landscape.csv");
    write_text(path, csv);
    Manifest m{"landscape",
               {{"h", a.h}, {"theta", a.theta}, {"r_steps", a.r_steps}, {"psi_steps", a.psi_steps},
                {"threads", a.threads}, {"quad_nodes", a.quad_nodes}},
               std::nullopt,
               {path},
               clock.seconds()};
    write_manifest(ctx, m);
    out_of(ctx) << "wrote " << path.string() << " (" << l.values.size() << " rows)\n";
    return finite ? kExitOk : kExitNumerical;
}

int cmd_rplot(const RplotArgs& a, const Context& ctx) {
    const Stopwatch clock;
    if (!(std::isfinite(a.h) && a.h > 0.0)) throw UsageError("rplot: h must be > 0");
    if (!(std::isfinite(a.theta_min) && std::isfinite(a.theta_max) && a.theta_min > 0.0 &&
          a.theta_min < a.theta_max))
        throw UsageError("rplot: need 0 < theta_min < theta_max");
    if (a.steps < 2) throw UsageError("rplot: steps must be >= 2");
    check_solver(a.solver);

    struct Row {
        double theta = 0.0;
        double perp = 0.0;
        std::vector<double> parallel;
        std::string error;
    };
    std::vector<Row> rows(static_cast<std::size_t>(a.steps));
    parallel_for(rows.size(), a.threads, [&](std::size_t i) {
        Row& row = rows[i];
        row.theta = a.theta_min + (a.theta_max - a.theta_min) * static_cast<double>(i) / (a.steps - 1);
        try {
            const ModelParams p{row.theta, a.h};
            row.perp = solve_perp(p, a.solver).value_or(0.0);
            row.parallel = solve_parallel(p, a.solver);
            if (row.parallel.size() > 2) row.error = "more than two parallel roots";
        } catch (const std::exception& ex) {
            row.error = ex.what();
        }
    });

    std::string csv = csv_row({"theta", "r_perp", "r_par_bar", "r_par_hat"});
    int failed = 0;
    for (const Row& row : rows) {
        if (!row.error.empty()) {
            ++failed;
            err_of(ctx) << "rplot: theta = " << row.theta << ": " << row.error << "\n";
        }
        csv += csv_row({csv_number(row.theta), csv_number(row.perp),
                        row.parallel.size() >= 1 ? csv_number(row.parallel[0]) : "",
                        row.parallel.size() >= 2 ? csv_number(row.parallel[1]) : ""});
    }
    const fs::path path = prepare(ctx, "rplot.csv");
    write_text(path, csv);
    Manifest m{"rplot",
               {{"h", a.h}, {"theta_min", a.theta_min}, {"theta_max", a.theta_max},
                {"steps", a.steps}, {"threads", a.threads}, {"solver", solver_json(a.solver)}},
               std::nullopt,
               {path},
               clock.seconds()};
    write_manifest(ctx, m);
    out_of(ctx) << "wrote " << path.string() << " (" << rows.size() << " rows)\n";
    return failed ? kExitNumerical : kExitOk;
}

int cmd_selftest(const Context& ctx) {
    const auto checks = oracle::run_selftest();
    int failed = 0;
    for (const auto& c : checks) {
        out_of(ctx) << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        if (!c.passed) ++failed;
    }
    out_of(ctx) << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed ? kExitNumerical : kExitOk;
}

namespace {

void add_solver_flags(CLI::App* app, SolverOptions& o) {
    app->add_option("--tol-root", o.root_tol, "Root bisection tolerance in r")->capture_default_str();
    app->add_option("--tol-theta", o.theta_tol, "Bisection tolerance for theta_star")->capture_default_str();
    app->add_option("--tol-boundary", o.boundary_tol, "Distance to a curve flagged as boundary")
        ->capture_default_str();
    app->add_option("--scan-points", o.scan_points, "Grid size of the parallel-root scan")->capture_default_str();
    app->add_option("--refine-factor", o.refine_factor, "Refinement near near-tangent segments")
        ->capture_default_str();
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Mean-field XY spins in a dichotomic random field: stationary solutions, "
                 "phase diagram, free energy and particle simulation"};
    app.set_help_flag("--help", "Print this help message and exit");
    app.set_version_flag("--version", kVersion);
    app.fallthrough();
    app.require_subcommand(1);
    std::optional<std::string> out_flag;
    app.add_option("--out", out_flag, "Output directory (default $SPINFLOP_OUT_DIR or .)");

    CurvesArgs curves;
    auto* c_curves = app.add_subcommand("curves", "Critical curves theta1, theta2, theta_star over h");
    c_curves->add_option("--h-min", curves.h_min)->capture_default_str();
    c_curves->add_option("--h-max", curves.h_max)->capture_default_str();
    c_curves->add_option("--steps", curves.steps)->capture_default_str();
    c_curves->add_option("--threads", curves.threads)->capture_default_str();
    add_solver_flags(c_curves, curves.solver);

    ClassifyArgs cls;
    auto* c_classify = app.add_subcommand("classify", "Phase label, solutions and free-energy ranking");
    c_classify->add_option("--h", cls.h)->required();
    c_classify->add_option("--theta", cls.theta)->required();
    c_classify->add_option("--quad-nodes", cls.quad_nodes)->capture_default_str();
    add_solver_flags(c_classify, cls.solver);

    SimulateArgs sim;
    std::optional<std::string> config_path;
    SimConfig flags;
    std::string disorder = "iid";
    int bins = sim.bins;
    auto* c_sim = app.add_subcommand("simulate", "Euler-Maruyama run of the N-spin system");
    c_sim->add_option("--config", config_path, "key = value file; explicit flags override it");
    auto* o_h = c_sim->add_option("--h", flags.params.h)->capture_default_str();
    auto* o_theta = c_sim->add_option("--theta", flags.params.theta)->capture_default_str();
    auto* o_n = c_sim->add_option("--n", flags.n)->capture_default_str();
    auto* o_dt = c_sim->add_option("--dt", flags.dt)->capture_default_str();
    auto* o_steps = c_sim->add_option("--steps", flags.steps)->capture_default_str();
    auto* o_seed = c_sim->add_option("--seed", flags.seed)->capture_default_str();
    auto* o_dis = c_sim->add_option("--disorder", disorder)
                      ->check(CLI::IsMember({"iid", "balanced"}))
                      ->capture_default_str();
    auto* o_rec = c_sim->add_option("--record-every", flags.record_every)->capture_default_str();
    auto* o_thr = c_sim->add_option("--threads", flags.threads)->capture_default_str();
    auto* o_bins = c_sim->add_option("--bins", bins)->capture_default_str();
    add_solver_flags(c_sim, sim.solver);

    LandscapeArgs land;
    auto* c_land = app.add_subcommand("landscape", "Free energy on an (r, psi) grid");
    c_land->add_option("--h", land.h)->required();
    c_land->add_option("--theta", land.theta)->required();
    c_land->add_option("--r-steps", land.r_steps)->capture_default_str();
    c_land->add_option("--psi-steps", land.psi_steps)->capture_default_str();
    c_land->add_option("--threads", land.threads)->capture_default_str();
    c_land->add_option("--quad-nodes", land.quad_nodes)->capture_default_str();

    RplotArgs rp;
    auto* c_rplot = app.add_subcommand("rplot", "Stationary r on each branch against theta");
    c_rplot->add_option("--h", rp.h)->capture_default_str();
    c_rplot->add_option("--theta-min", rp.theta_min)->capture_default_str();
    c_rplot->add_option("--theta-max", rp.theta_max)->capture_default_str();
    c_rplot->add_option("--steps", rp.steps)->capture_default_str();
    c_rplot->add_option("--threads", rp.threads)->capture_default_str();
    add_solver_flags(c_rplot, rp.solver);

    auto* c_self = app.add_subcommand("selftest", "Closed forms against independent oracles");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
    }

    try {
        const Context ctx{resolve_out_dir(out_flag), &out, &err};
        if (*c_curves) return cmd_curves(curves, ctx);
        if (*c_classify) return cmd_classify(cls, ctx);
        if (*c_land) return cmd_landscape(land, ctx);
        if (*c_rplot) return cmd_rplot(rp, ctx);
        if (*c_self) return cmd_selftest(ctx);
        if (*c_sim) {
            if (config_path) apply_config_file(*config_path, sim);
            SimConfig& cfg = sim.config;
            if (o_h->count()) cfg.params.h = flags.params.h;
            if (o_theta->count()) cfg.params.theta = flags.params.theta;
            if (o_n->count()) cfg.n = flags.n;
            if (o_dt->count()) cfg.dt = flags.dt;
            if (o_steps->count()) cfg.steps = flags.steps;
            if (o_seed->count()) cfg.seed = flags.seed;
            if (o_dis->count())
                cfg.disorder = disorder == "balanced" ? DisorderMode::Balanced : DisorderMode::Iid;
            if (o_rec->count()) cfg.record_every = flags.record_every;
            if (o_thr->count()) cfg.threads = flags.threads;
            if (o_bins->count()) sim.bins = bins;
            return cmd_simulate(sim, ctx);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitUsage;
}

}  // namespace spinflop::cli
