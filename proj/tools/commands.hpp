#pragma once

// Subcommand implementations behind the `spinflop` executable. Each command
// writes its tables into an output directory together with one JSON manifest
// and returns the process exit code.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "spinflop/simulator.hpp"
#include "spinflop/solver.hpp"

namespace spinflop::cli {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutDirEnv = "SPINFLOP_OUT_DIR";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

// Invalid user input; the message is shown verbatim.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config-file problem, tagged with the offending line and field.
class ConfigError : public UsageError {
public:
    ConfigError(int line, const std::string& field, const std::string& what);
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

struct Context {
    std::filesystem::path out_dir;
    std::ostream* out = nullptr;  // stdout-like stream for summaries
    std::ostream* err = nullptr;
};

// --out if given, else $SPINFLOP_OUT_DIR, else the working directory.
std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag);

struct Manifest {
    std::string command;
    nlohmann::json parameters;
    std::optional<std::uint64_t> seed;
    std::vector<std::filesystem::path> outputs;
    double wall_seconds = 0.0;
};

nlohmann::json to_json(const Manifest& m);
std::filesystem::path write_manifest(const Context& ctx, const Manifest& m);

// RFC 4180 field formatting (CRLF line ends, quoted when needed).
std::string csv_field(const std::string& s);
std::string csv_number(double v);
std::string csv_row(const std::vector<std::string>& fields);

struct CurvesArgs {
    double h_min = 0.1;
    double h_max = 3.0;
    int steps = 30;
    SolverOptions solver;
    int threads = 1;
};
int cmd_curves(const CurvesArgs& args, const Context& ctx);

struct ClassifyArgs {
    double h = 1.0;
    double theta = 1.0;
    SolverOptions solver;
    int quad_nodes = 4096;
};
nlohmann::json classify_json(const ClassifyArgs& args);
int cmd_classify(const ClassifyArgs& args, const Context& ctx);

struct SimulateArgs {
    SimConfig config;
    int bins = 64;
    SolverOptions solver;
};
// Applies `key = value` lines (# comments) onto cfg. Throws ConfigError.
void apply_config_text(const std::string& text, SimulateArgs& args);
void apply_config_file(const std::filesystem::path& path, SimulateArgs& args);
int cmd_simulate(const SimulateArgs& args, const Context& ctx);

struct LandscapeArgs {
    double h = 1.0;
    double theta = 1.0;
    int r_steps = 51;
    int psi_steps = 72;
    int threads = 1;
    int quad_nodes = 4096;
};
int cmd_landscape(const LandscapeArgs& args, const Context& ctx);

struct RplotArgs {
    double h = 1.5;
    double theta_min = 0.5;
    double theta_max = 6.0;
    int steps = 56;
    SolverOptions solver;
    int threads = 1;
};
int cmd_rplot(const RplotArgs& args, const Context& ctx);

int cmd_selftest(const Context& ctx);

// Full command-line entry point.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace spinflop::cli
