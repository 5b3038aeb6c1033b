#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dsgda/measures.hpp"
#include "dsgda/solvers.hpp"

namespace dsgda {

enum class InitKind { Point, Grid, Random };

struct InitSpec {
    InitKind kind = InitKind::Point;
    Vec x, y;           // Point
    std::size_t n = 0;  // Grid / Random count
    bool operator==(const InitSpec&) const = default;
};

enum class ExportFormat { CSV, JSON };
std::string to_string(ExportFormat f);
ExportFormat parse_format(const std::string& s);

struct RunConfig {
    std::string name = "run";  // file stem for outputs
    std::string problem;
    Algorithm algorithm = Algorithm::DSGDA;
    AlgoParams params;
    InitSpec init;
    StoppingRule stop;
    std::uint64_t record_every = 1;
    std::string outputs;  // directory; empty means no files
    ExportFormat format = ExportFormat::CSV;
    ClassifyOptions classify;
    std::uint64_t seed = 0;

    bool operator==(const RunConfig&) const = default;
};

// Flat "key = value" text, one entry per line, '#' starts a comment.
// Keys: name, problem, algorithm, params.{c,alpha,beta,mu,r1,r2},
// init.x, init.y (comma-separated) or init = grid(n) | random(n),
// stop.{tol,max_iters,mode}, record.every_k, outputs, format,
// classify.{eps_stat,delta_rec,burn_in,min_loop,window}, seed.
// Unknown keys and malformed values raise ConfigError naming the key.
// Baselines: a missing params.c / params.alpha for gda or eg defaults to
// 1 / (2 max(L_x, L_y)).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);

// Checks the problem name, parameters for the algorithm, init feasibility.
void validate_config(const RunConfig& cfg);

// One config per initial point. grid(n) needs n = k^2 and places k interior
// lattice points per axis at lower + (i + 1)(upper - lower) / (k + 1).
// random(n) draws uniformly from X x Y with a generator seeded by (seed, index).
std::vector<RunConfig> expand_inits(const RunConfig& cfg);

struct RunResult {
    std::string name;
    OutcomeClass outcome;
    Termination termination = Termination::MaxIters;
    SmoothedState final_state;
    std::uint64_t iterations = 0;
    double gs_x = 0.0, gs_y = 0.0;
    double wall_time = 0.0;  // seconds; never written to exported files
    std::string trajectory_file;
    std::string error;  // set when the run failed inside a batch
    bool failed() const { return !error.empty(); }
};

// Runs a single-point config, classifies it and writes the trajectory when
// cfg.outputs is set. Errors propagate (NumericError carries the iterate).
RunResult run_config(const RunConfig& cfg, Trajectory* keep = nullptr);

// Runs every config (each must be single-point). Failures are recorded in
// RunResult::error and the batch continues. Results are in input order and do
// not depend on `parallelism`.
std::vector<RunResult> run_batch(const std::vector<RunConfig>& configs, unsigned parallelism = 1);

// Writes summary.csv: name, outcome, termination, iterations, x..., y..., gs_x, gs_y, error.
void write_summary(const std::vector<RunResult>& results, const std::filesystem::path& path);

// CSV columns: iter, x0.., y0.., z0.., v0.., gs_x, gs_y with %.17g values.
void export_trajectory(const Trajectory& traj, const std::filesystem::path& path, ExportFormat format);
Trajectory import_trajectory_csv(const std::filesystem::path& path);

// Built-in recipes.
struct Recipe {
    std::string name;
    std::string description;
    std::vector<RunConfig> runs;  // empty for scan/audit recipes
};
std::vector<std::string> recipe_names();
Recipe recipe(const std::string& name);

struct RecipeOptions {
    std::filesystem::path out = "results";
    std::optional<double> tol;
    std::optional<std::uint64_t> max_iters;
    ExportFormat format = ExportFormat::CSV;
    unsigned parallelism = 1;
    std::uint64_t seed = 0;
};

struct RecipeReport {
    std::vector<RunResult> results;
    std::vector<std::string> lines;  // human-readable summary
    bool ok = true;                 // recipe-specific expectation held
};

// Runs a recipe and writes its artifacts under opt.out.
RecipeReport run_recipe(const std::string& name, const RecipeOptions& opt);

// Scan recipes, exposed for tests.
void write_feasibility_csv(const std::filesystem::path& path, double L, double beta, double mu, int t_max);
struct RhoWitness {
    std::string problem;
    double x, y, rho, threshold;
};
std::vector<RhoWitness> write_rho_scans(const std::filesystem::path& dir, int resolution);

struct AuditRow {
    std::uint64_t iter;
    double lhs, rhs, margin, phi;
};
struct AuditOptions {
    std::uint64_t iterations = 500;
    GridSpec grid{401, 4};
    double scale = 1.0;  // r1 = 2 L scale, r2 = 2 lambda L scale
};
// DS-GDA run with stepsizes at their descent caps, plus the certificate at
// each step.
std::vector<AuditRow> descent_audit(const std::string& problem, const AuditOptions& opt, AlgoParams* used = nullptr);
AlgoParams audit_params(const MinimaxProblem& prob, double scale = 1.0);

}  // namespace dsgda
