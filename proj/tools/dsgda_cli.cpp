// Command-line front end: run configs, built-in recipes, parameter scans and
// pointwise measures. Exit status 0 on success, 1 on config or usage errors,
// 2 on numeric failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dsgda/analysis.hpp"
#include "dsgda/harness.hpp"
#include "dsgda/measures.hpp"
#include "dsgda/oracle.hpp"

using namespace dsgda;

namespace {

struct Flags {
    std::string out = "results";
    std::optional<double> tol;
    std::optional<std::uint64_t> max_iters;
    std::string format = "csv";
    unsigned parallel = 1;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--tol", f.tol, "stopping tolerance");
    sub->add_option("--max-iters", f.max_iters, "iteration cap");
    sub->add_option("--format", f.format, "trajectory format: csv or json");
    sub->add_option("--parallel", f.parallel, "batch worker threads");
    sub->add_option("--seed", f.seed, "seed for random init grids");
}

void print_result(const RunResult& r) {
    if (r.failed()) {
        std::cout << r.name << ": error: " << r.error << "\n";
        return;
    }
    std::cout << r.name << ": " << to_string(r.outcome.kind) << " (" << to_string(r.termination) << ") after "
              << r.iterations << " iterations; x = " << format_double(r.final_state.x[0])
              << ", y = " << format_double(r.final_state.y[0]) << "; gs = (" << format_double(r.gs_x) << ", "
              << format_double(r.gs_y) << ")\n";
}

int cmd_run(const std::string& path, const Flags& f, const CLI::App& sub) {
    const bool out_given = sub.count("--out") > 0;
    RunConfig cfg = load_config(path);
    if (out_given || cfg.outputs.empty()) cfg.outputs = f.out;
    if (f.tol) cfg.stop.tol = *f.tol;
    if (f.max_iters) cfg.stop.max_iters = *f.max_iters;
    if (sub.count("--format")) cfg.format = parse_format(f.format);
    if (sub.count("--seed")) cfg.seed = f.seed;
    validate_config(cfg);
    if (cfg.init.kind == InitKind::Point) {
        print_result(run_config(cfg));
        return 0;
    }
    auto results = run_batch(expand_inits(cfg), f.parallel);
    write_summary(results, std::filesystem::path(cfg.outputs) / (cfg.name + "-summary.csv"));
    int status = 0;
    for (const auto& r : results) {
        print_result(r);
        if (r.failed()) status = 2;
    }
    return status;
}

int cmd_recipe(const std::string& name, const Flags& f) {
    RecipeOptions opt;
    opt.out = f.out;
    opt.tol = f.tol;
    opt.max_iters = f.max_iters;
    opt.format = parse_format(f.format);
    opt.parallelism = f.parallel;
    opt.seed = f.seed;
    RecipeReport rep = run_recipe(name, opt);
    std::cout << "recipe " << name << "\n";
    for (const auto& l : rep.lines) std::cout << l << "\n";
    std::cout << "expectations: " << (rep.ok ? "met" : "NOT met") << "\n";
    for (const auto& r : rep.results)
        if (r.failed() && r.error.rfind("numeric:", 0) == 0) return 2;
    return 0;
}

int cmd_scan(double L, double beta, double mu, int t_max, const Flags& f) {
    std::filesystem::path path = std::filesystem::path(f.out) / "feasibility.csv";
    write_feasibility_csv(path, L, beta, mu, t_max);
    AlgoParams p = universal_params(L);
    auto [t1, t2] = universal_point(L, p);
    std::cout << "wrote " << path.string() << "\n";
    std::cout << "universal_params(" << format_double(L) << "): r = " << format_double(p.r1)
              << ", c = alpha = " << format_double(p.c) << ", beta = mu = " << format_double(p.beta) << "\n";
    std::cout << "(t1, t2) = (" << format_double(t1) << ", " << format_double(t2) << "), feasible at beta = "
              << format_double(beta) << ", mu = " << format_double(mu) << ": "
              << (feasible_point(L, beta, mu, t1, t2) ? "yes" : "no") << "\n";
    return 0;
}

int cmd_regularity(const std::string& problem) {
    MinimaxProblem prob = builtin(problem);
    std::cout << problem << ": L_x = " << format_double(prob.L_x) << ", L_y = " << format_double(prob.L_y) << "\n";
    auto star = known_stationary_point(problem);
    if (!star) {
        std::cout << "no known stationary point; weak MVI scan skipped\n";
        return 0;
    }
    RhoScan s = weak_mvi_rho(prob, star->first[0], star->second[0]);
    std::cout << "weak MVI: min rho " << format_double(s.min_rho) << " at (" << format_double(s.x) << ", "
              << format_double(s.y) << "), threshold " << format_double(s.threshold) << ": "
              << (s.min_rho < s.threshold ? "violated" : "holds") << "\n";
    if (prob.has_value() && prob.dim_x == 1 && prob.dim_y == 1) {
        KLScan k = kl_ratio_scan(prob, KLSide::Dual, 0.5, 201, GridSpec{401, 2});
        std::cout << "dual KL (theta = 1/2) on a 201x201 grid: tau >= " << format_double(k.tau) << " at ("
                  << format_double(k.x) << ", " << format_double(k.y) << ")\n";
    }
    return 0;
}

int cmd_measure(const std::string& problem, const std::string& point, std::optional<double> r1) {
    MinimaxProblem prob = builtin(problem);
    Vec v;
    std::stringstream ss(point);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("point: expected comma-separated numbers, got '" + point + "'");
        }
    }
    if (v.size() != prob.dim_x + prob.dim_y)
        throw ConfigError("point: expected " + std::to_string(prob.dim_x + prob.dim_y) + " coordinates");
    Vec x(v.begin(), v.begin() + static_cast<long>(prob.dim_x)), y(v.begin() + static_cast<long>(prob.dim_x), v.end());
    if (!prob.X.contains(x) || !prob.Y.contains(y)) throw ConfigError("point: outside X x Y");
    std::optional<double> r = r1;
    if (!r && prob.has_value() && prob.dim_x == 1 && prob.dim_y == 1) r = 2 * prob.L_x;
    StationarityReport rep = stationarity(prob, x, y, r);
    std::cout << "gs_x = " << format_double(rep.gs_x) << "\ngs_y = " << format_double(rep.gs_y) << "\n";
    if (rep.os) std::cout << "os (r1 = " << format_double(*r) << ") = " << format_double(*rep.os) << "\n";
    if (prob.dim_x == 1 && prob.dim_y == 1) {
        auto star = known_stationary_point(problem);
        if (star) {
            double rho = weak_mvi_rho_at(prob, star->first[0], star->second[0], x[0], y[0]);
            std::cout << "rho = " << format_double(rho) << "\n";
        }
    }
    return 0;
}

int cmd_show(const std::string& name) {
    Recipe r = recipe(name);
    std::cout << "# " << r.description << "\n";
    for (const auto& c : r.runs) std::cout << "\n" << serialize_config(c);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DS-GDA minimax solvers, measures and experiment recipes"};
    app.require_subcommand(1);
    Flags f;

    std::string config_path, recipe_name, problem, point;
    double L = 1.0, beta = 1.0 / 5000, mu = 1.0 / 5000;
    int t_max = 100;
    std::optional<double> r1;

    auto* run = app.add_subcommand("run", "run a config file");
    run->add_option("config", config_path, "config file")->required();
    add_common(run, f);

    std::string names;
    for (const auto& n : recipe_names()) names += " " + n;
    auto* rec = app.add_subcommand("recipe", "run a built-in recipe:" + names);
    rec->add_option("name", recipe_name, "recipe name")->required();
    add_common(rec, f);

    auto* scan = app.add_subcommand("scan-params", "feasibility scan of the descent coefficients");
    scan->add_option("--L", L, "smoothness constant");
    scan->add_option("--beta", beta, "z weight");
    scan->add_option("--mu", mu, "v weight");
    scan->add_option("--t-max", t_max, "scan 0..t-max in t1 and t2");
    add_common(scan, f);

    auto* reg = app.add_subcommand("check-regularity", "weak MVI and KL scans for a builtin");
    reg->add_option("problem", problem, "problem name")->required();

    auto* meas = app.add_subcommand("measure", "stationarity measures at a point");
    meas->add_option("problem", problem, "problem name")->required();
    meas->add_option("point", point, "x..., y... comma-separated")->required();
    meas->add_option("--r1", r1, "smoothing radius for the OS residual (default 2 L_x)");

    auto* show = app.add_subcommand("show-recipe", "print the configs of a recipe");
    show->add_option("name", recipe_name, "recipe name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*run) return cmd_run(config_path, f, *run);
        if (*rec) return cmd_recipe(recipe_name, f);
        if (*scan) return cmd_scan(L, beta, mu, t_max, f);
        if (*reg) return cmd_regularity(problem);
        if (*meas) return cmd_measure(problem, point, r1);
        if (*show) return cmd_show(recipe_name);
    } catch (const NumericError& e) {
        std::cerr << "numeric failure at iterate " << e.iterate() << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
