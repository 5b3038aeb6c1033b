// Built-in experiment recipes, parameter scans and the descent audit.
//
// Parameter sets for the hard examples came from a coarse grid search over
// stepsizes, radii and anchor weights, keeping a set whose run converged from
// the listed init. kl-nc-universal uses r1 = r2 = 0.125, c = alpha = 0.04,
// beta = mu = 0.8.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "dsgda/analysis.hpp"
#include "dsgda/harness.hpp"
#include "dsgda/oracle.hpp"

namespace dsgda {

namespace fs = std::filesystem;

namespace {

AlgoParams params(double c, double alpha, double beta, double mu, double r1, double r2) {
    AlgoParams p;
    p.c = c;
    p.alpha = alpha;
    p.beta = beta;
    p.mu = mu;
    p.r1 = r1;
    p.r2 = r2;
    return p;
}

RunConfig point_run(const std::string& name, const std::string& problem, Algorithm algo, const AlgoParams& p,
                    double x0, double y0, std::uint64_t max_iters) {
    RunConfig c;
    c.name = name;
    c.problem = problem;
    c.algorithm = algo;
    c.params = p;
    c.init.x = {x0};
    c.init.y = {y0};
    c.stop.max_iters = max_iters;
    return c;
}

RunConfig baseline_run(const std::string& name, const std::string& problem, Algorithm algo, double step, double x0,
                       double y0, std::uint64_t max_iters) {
    return point_run(name, problem, algo, params(step, step, 0, 0, 0, 0), x0, y0, max_iters);
}

using Check = std::function<bool(const std::vector<RunResult>&, std::vector<std::string>&)>;

struct Entry {
    std::string description;
    std::function<std::vector<RunConfig>()> runs;
    Check check;  // empty for scan recipes
};

const RunResult& find(const std::vector<RunResult>& rs, const std::string& name) {
    for (const auto& r : rs)
        if (r.name == name) return r;
    throw Error("recipe result '" + name + "' missing");
}

bool expect(std::vector<std::string>& lines, const RunResult& r, std::initializer_list<Outcome> allowed) {
    bool ok = !r.failed() && std::find(allowed.begin(), allowed.end(), r.outcome.kind) != allowed.end();
    std::string want;
    for (Outcome o : allowed) want += (want.empty() ? "" : " or ") + to_string(o);
    lines.push_back("  expect " + r.name + " " + want + ": " + (ok ? "ok" : "FAILED"));
    return ok;
}

constexpr std::uint64_t kCycleIters = 100'000;
constexpr std::uint64_t kConvergeIters = 1'000'000;

std::vector<RunConfig> bilinear_runs(int A) {
    std::string prob = "bilinear_coupled(" + std::to_string(A) + ")";
    std::string stem = "bilinear" + std::to_string(A);
    // Primal smoothing alone keeps the dual side as plain ascent.
    // The basin of the origin is narrow (about |x|, |y| <= 0.3 for A = 10 and
    // 0.5 for A = 11); both runs share the init.
    AlgoParams ds = params(0.03, 0.03, 0.01, 0.01, 22, 22);
    const double u0 = A == 10 ? 0.3 : 0.5;
    return {point_run(stem + "-dsgda", prob, Algorithm::DSGDA, ds, u0, u0, kConvergeIters),
            point_run(stem + "-sgda-primal", prob, Algorithm::SGDAPrimal, ds, u0, u0, kCycleIters)};
}

const std::map<std::string, Entry>& table() {
    static const std::map<std::string, Entry> t = {
        {"forsaken",
         {"forsaken: DS-GDA from (-1, 1.2) and from a 5x5 lattice; GDA from (-1, 1.2)",
          [] {
              AlgoParams ds = params(0.1, 0.1, 0.05, 0.05, 0.5, 0.5);
              std::vector<RunConfig> v{
                  point_run("forsaken-dsgda", "forsaken", Algorithm::DSGDA, ds, -1.0, 1.2, kConvergeIters),
                  baseline_run("forsaken-gda", "forsaken", Algorithm::GDA, 1 / 24.625, -1.0, 1.2, kCycleIters)};
              RunConfig grid = v[0];
              grid.name = "forsaken-grid";
              grid.init = InitSpec{InitKind::Grid, {}, {}, 25};
              for (auto& c : expand_inits(grid)) v.push_back(std::move(c));
              return v;
          },
          [](const std::vector<RunResult>& rs, std::vector<std::string>& lines) {
              bool ok = expect(lines, find(rs, "forsaken-dsgda"), {Outcome::Converged});
              ok &= expect(lines, find(rs, "forsaken-gda"), {Outcome::LimitCycle});
              int conv = 0, total = 0;
              for (const auto& r : rs)
                  if (r.name.rfind("forsaken-grid-", 0) == 0) {
                      ++total;
                      conv += !r.failed() && r.outcome.kind == Outcome::Converged;
                  }
              lines.push_back("  lattice converged " + std::to_string(conv) + "/" + std::to_string(total));
              return ok && conv == total;
          }}},
        {"bilinear-coupled-10",
         {"bilinear_coupled(10): DS-GDA and primal S-GDA from (0.3, 0.3)", [] { return bilinear_runs(10); },
          [](const std::vector<RunResult>& rs, std::vector<std::string>& lines) {
              expect(lines, find(rs, "bilinear10-sgda-primal"), {Outcome::LimitCycle, Outcome::MaxIters});
              return expect(lines, find(rs, "bilinear10-dsgda"), {Outcome::Converged});
          }}},
        {"bilinear-coupled-11",
         {"bilinear_coupled(11): DS-GDA and primal S-GDA from (0.5, 0.5)", [] { return bilinear_runs(11); },
          [](const std::vector<RunResult>& rs, std::vector<std::string>& lines) {
              bool ok = expect(lines, find(rs, "bilinear11-dsgda"), {Outcome::Converged});
              return expect(lines, find(rs, "bilinear11-sgda-primal"), {Outcome::LimitCycle}) && ok;
          }}},
        {"sixth-order",
         {"sixth_order: DS-GDA from (1, 1)",
          [] {
              return std::vector<RunConfig>{point_run("sixth-dsgda", "sixth_order", Algorithm::DSGDA,
                                                      params(0.1, 0.1, 0.2, 0.8, 20, 20), 1.0, 1.0,
                                                      kConvergeIters)};
          },
          [](const std::vector<RunResult>& rs, std::vector<std::string>& lines) {
              return expect(lines, find(rs, "sixth-dsgda"), {Outcome::Converged});
          }}},
        {"polar-game",
         {"polar_game: DS-GDA and extragradient from (0.6, 0.8) on the unit circle",
          [] {
              return std::vector<RunConfig>{
                  point_run("polar-dsgda", "polar_game", Algorithm::DSGDA, params(0.1, 0.1, 0.01, 0.01, 0.5, 0.5),
                            0.6, 0.8, kConvergeIters),
                  baseline_run("polar-eg", "polar_game", Algorithm::EG, 1.0 / 202, 0.6, 0.8, kCycleIters)};
          },
          [](const std::vector<RunResult>& rs, std::vector<std::string>& lines) {
              bool ok = expect(lines, find(rs, "polar-dsgda"), {Outcome::Converged});
              return expect(lines, find(rs, "polar-eg"), {Outcome::LimitCycle}) && ok;
          }}},
        {"kl-nc-universal",
         {"kl_nonconcave: DS-GDA with r1 = r2 = 0.125, c = alpha = 0.04, beta = mu = 0.8 from a 3x3 lattice",
          [] {
              RunConfig c = point_run("kl", "kl_nonconcave", Algorithm::DSGDA, params(0.04, 0.04, 0.8, 0.8, 0.125, 0.125),
                                      0, 0, kConvergeIters);
              c.init = InitSpec{InitKind::Grid, {}, {}, 9};
              return expand_inits(c);
          },
          [](const std::vector<RunResult>& rs, std::vector<std::string>& lines) {
              int good = 0;
              for (const auto& r : rs) {
                  bool near = !r.failed() && std::hypot(r.final_state.x[0], r.final_state.y[0]) <= 1e-3;
                  good += near && r.outcome.kind == Outcome::Converged;
              }
              lines.push_back("  within 1e-3 of the origin: " + std::to_string(good) + "/" + std::to_string(rs.size()));
              return good == static_cast<int>(rs.size());
          }}},
        {"wrong-smoothing",
         {"wrong_smoothing: primal S-GDA, dual S-GDA and DS-GDA from (0.5, 0.5)",
          [] {
              AlgoParams p = params(0.04, 0.04, 0.8, 0.8, 10, 10);
              return std::vector<RunConfig>{
                  point_run("wrong-sgda-primal", "wrong_smoothing", Algorithm::SGDAPrimal, p, 0.5, 0.5, kConvergeIters),
                  point_run("wrong-sgda-dual", "wrong_smoothing", Algorithm::SGDADual, p, 0.5, 0.5, kConvergeIters),
                  point_run("wrong-dsgda", "wrong_smoothing", Algorithm::DSGDA, p, 0.5, 0.5, kConvergeIters)};
          },
          [](const std::vector<RunResult>& rs, std::vector<std::string>& lines) {
              const RunResult &pr = find(rs, "wrong-sgda-primal"), &du = find(rs, "wrong-sgda-dual"),
                              &ds = find(rs, "wrong-dsgda");
              auto reached = [](const RunResult& r) { return !r.failed() && r.termination == Termination::Converged; };
              bool faster = reached(du) && (!reached(pr) || du.iterations < pr.iterations);
              lines.push_back("  dual S-GDA " + std::to_string(du.iterations) + " iterations, primal S-GDA " +
                              std::to_string(pr.iterations) + ": " + (faster ? "ok" : "FAILED"));
              lines.push_back(std::string("  DS-GDA reaches tol: ") + (reached(ds) ? "ok" : "FAILED"));
              return faster && reached(ds);
          }}},
        {"toy-gda-osc",
         {"toy_bilinear: GDA with c = alpha = 0.1 from (0.5, 0.5)",
          [] {
              return std::vector<RunConfig>{
                  baseline_run("toy-gda", "toy_bilinear", Algorithm::GDA, 0.1, 0.5, 0.5, 20'000)};
          },
          [](const std::vector<RunResult>& rs, std::vector<std::string>& lines) {
              return expect(lines, find(rs, "toy-gda"), {Outcome::LimitCycle, Outcome::MaxIters});
          }}},
        {"feasibility-scan", {"descent coefficients over 0 <= t1, t2 <= 100 with L = 1, beta = mu = 1/5000", {}, {}}},
        {"rho-scan", {"weak MVI rho over X x Y for bilinear_coupled(10), polar_game and sixth_order", {}, {}}},
        {"descent-audit", {"primal descent certificate along 500 DS-GDA iterates on kl_nonconcave", {}, {}}},
    };
    return t;
}

const Entry& entry(const std::string& name) {
    std::string key = name == "polar-on-cycle" ? "polar-game" : name;
    auto it = table().find(key);
    if (it == table().end()) throw ConfigError("unknown recipe '" + name + "'");
    return it->second;
}

}  // namespace

std::vector<std::string> recipe_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : table()) out.push_back(k);
    return out;
}

Recipe recipe(const std::string& name) {
    const Entry& e = entry(name);
    return Recipe{name, e.description, e.runs ? e.runs() : std::vector<RunConfig>{}};
}

// ---------------------------------------------------------------------------
// Scans

void write_feasibility_csv(const fs::path& path, double L, double beta, double mu, int t_max) {
    auto t = integer_range(0, t_max);
    FeasibilityMatrix m = feasibility_scan(L, beta, mu, t, t, false);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "t1,t2,feasible\n";
    for (std::size_t i = 0; i < m.t1.size(); ++i)
        for (std::size_t j = 0; j < m.t2.size(); ++j)
            out << format_double(m.t1[i]) << "," << format_double(m.t2[j]) << "," << (m.at(i, j) ? 1 : 0) << "\n";
}

std::vector<RhoWitness> write_rho_scans(const fs::path& dir, int resolution) {
    fs::create_directories(dir);
    std::vector<RhoWitness> out;
    for (const char* name : {"bilinear_coupled(10)", "polar_game", "sixth_order"}) {
        MinimaxProblem prob = builtin(name);
        auto star = known_stationary_point(name).value();
        RhoScan s = weak_mvi_rho(prob, star.first[0], star.second[0], resolution, true);
        std::string stem = name;
        stem.erase(std::remove_if(stem.begin(), stem.end(), [](char c) { return c == '(' || c == ')'; }), stem.end());
        std::ofstream f(dir / ("rho_" + stem + ".csv"), std::ios::binary);
        if (!f) throw Error("cannot write rho scan for " + stem);
        f << "x,y,rho\n";
        for (const auto& row : s.samples)
            f << format_double(row[0]) << "," << format_double(row[1]) << ","
              << (std::isnan(row[2]) ? std::string("nan") : format_double(row[2])) << "\n";
        out.push_back({name, s.x, s.y, s.min_rho, s.threshold});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Descent audit

AlgoParams audit_params(const MinimaxProblem& prob, double scale) {
    if (!(scale >= 1)) throw ParamError("audit_params: scale must be at least 1");
    const double L = prob.L_x, lambda = prob.lambda(), lL = lambda * L;
    AlgoParams p;
    p.r1 = 2 * L * scale;
    // r2 also has to clear the strong-concavity margin that constants() needs.
    p.r2 = std::max(2 * lL, 1.05 * (lL / (p.r1 - L) + 2) * lL) * scale;
    // Stay strictly inside the caps so rounding cannot flip a bound.
    const double shrink = 1 - 1e-9;
    p.c = std::min(4 / (3 * (L + p.r1)), 1 / (6 * lL)) * shrink;
    const double sigma = (2 * p.c * p.r1 + 1) / (p.c * (p.r1 - L));
    const double L_d = (lL / (p.r1 - L) + 2) * lL + p.r2;
    p.alpha = std::min({2 / (3 * lL * sigma * sigma), 1 / (6 * L_d), 1 / (5 * lambda * std::sqrt(lambda + 5) * L)}) *
              shrink;
    p.beta = shrink * std::min(24 * p.r1 / (360 * p.r1 + 5 * p.r1 * p.r1 * lambda + std::pow(2 * lL + 5 * p.r1, 2)),
                      p.alpha * lL * lL / (384 * p.r1 * (lambda + 5) * (lambda + 1) * (lambda + 1)));
    p.mu = shrink * std::min(2 * (lambda + 5) / (2 * (lambda + 5) + lL * lL), p.alpha * lL * lL / (64 * p.r2 * (lambda + 5)));
    return p;
}

std::vector<AuditRow> descent_audit(const std::string& problem, const AuditOptions& opt, AlgoParams* used) {
    MinimaxProblem prob = builtin(problem);
    AlgoParams p = audit_params(prob, opt.scale);
    ParamReport rep = check_descent_params(prob.L_x, prob.lambda(), p);
    if (!rep.ok()) throw ParamError("descent_audit: parameters fail " + rep.failures());
    if (used) *used = p;
    std::vector<AuditRow> rows;
    SmoothedState s = SmoothedState::anchored({0.5}, {0.5});
    for (std::uint64_t t = 0; t < opt.iterations; ++t) {
        SmoothedState next = dsgda_step(prob, p, s);
        DescentCertificate cert = descent_certificate(prob, p, s, next, opt.grid);
        rows.push_back({t, cert.lhs, cert.rhs, cert.margin, cert.phi_t});
        s = std::move(next);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Recipe runner

RecipeReport run_recipe(const std::string& name, const RecipeOptions& opt) {
    const Entry& e = entry(name);
    RecipeReport rep;
    const fs::path dir = opt.out / name;
    fs::create_directories(dir);

    if (name == "feasibility-scan") {
        const double b = 1.0 / 5000;
        write_feasibility_csv(dir / "feasibility.csv", 1.0, b, b, 100);
        FeasibilityMatrix m = feasibility_scan(1.0, b, b, integer_range(0, 100), integer_range(0, 100), false);
        FeasibilityMatrix rev = feasibility_scan(1.0, b, b, integer_range(0, 100), integer_range(0, 100), true);
        auto [t1, t2] = universal_point(1.0, universal_params(1.0));
        bool at_universal = feasible_point(1.0, b, b, t1, t2);
        rep.lines.push_back("  feasible points: " + std::to_string(m.count()) + " of " +
                            std::to_string(m.t1.size() * m.t2.size()));
        rep.lines.push_back("  universal point (t1, t2) = (" + format_double(t1) + ", " + format_double(t2) +
                            ") feasible: " + (at_universal ? "yes" : "no"));
        rep.lines.push_back(std::string("  order independent: ") + (m == rev ? "yes" : "no"));
        rep.ok = m.count() > 0 && at_universal && m == rev;
        return rep;
    }
    if (name == "rho-scan") {
        // Points where the weak MVI violation is easy to exhibit by hand.
        const std::map<std::string, std::pair<double, double>> probes = {
            {"bilinear_coupled(10)", {0.0, 1.0}}, {"polar_game", {0.8, 0.0}}, {"sixth_order", {-1.0, 0.5}}};
        for (const auto& w : write_rho_scans(dir, 201)) {
            MinimaxProblem prob = builtin(w.problem);
            auto star = known_stationary_point(w.problem).value();
            RhoScan fine = weak_mvi_rho(prob, star.first[0], star.second[0]);
            auto [px, py] = probes.at(w.problem);
            double at = weak_mvi_rho_at(prob, star.first[0], star.second[0], px, py);
            rep.lines.push_back("  " + w.problem + ": rho(" + format_double(px) + ", " + format_double(py) +
                                ") = " + format_double(at) + ", min rho " + format_double(fine.min_rho) + " at (" +
                                format_double(fine.x) + ", " + format_double(fine.y) + "), threshold " +
                                format_double(fine.threshold));
            rep.ok &= fine.min_rho < fine.threshold;
        }
        return rep;
    }
    if (name == "descent-audit") {
        AlgoParams p;
        AuditOptions ao;
        if (opt.max_iters) ao.iterations = *opt.max_iters;
        auto rows = descent_audit("kl_nonconcave", ao, &p);
        std::ofstream out(dir / "descent_audit.csv", std::ios::binary);
        if (!out) throw Error("cannot write descent audit");
        out << "iter,lhs,rhs,margin,phi\n";
        double worst = rows.empty() ? 0.0 : rows[0].margin;
        for (const auto& r : rows) {
            out << r.iter << "," << format_double(r.lhs) << "," << format_double(r.rhs) << ","
                << format_double(r.margin) << "," << format_double(r.phi) << "\n";
            worst = std::min(worst, r.margin);
        }
        rep.lines.push_back("  params c=" + format_double(p.c) + " alpha=" + format_double(p.alpha) +
                            " beta=" + format_double(p.beta) + " mu=" + format_double(p.mu) +
                            " r1=" + format_double(p.r1) + " r2=" + format_double(p.r2));
        rep.lines.push_back("  " + std::to_string(rows.size()) + " steps, worst margin " + format_double(worst));
        rep.ok = worst >= -1e-4;
        return rep;
    }

    std::vector<RunConfig> runs = e.runs();
    for (auto& c : runs) {
        if (opt.tol) c.stop.tol = *opt.tol;
        if (opt.max_iters) c.stop.max_iters = *opt.max_iters;
        c.format = opt.format;
        c.seed = opt.seed;
        c.outputs = dir.string();
    }
    rep.results = run_batch(runs, opt.parallelism);
    write_summary(rep.results, dir / "summary.csv");
    for (const auto& r : rep.results) {
        if (r.failed()) {
            rep.lines.push_back(r.name + ": error: " + r.error);
            continue;
        }
        rep.lines.push_back(r.name + ": " + to_string(r.outcome.kind) + " (stop: " + to_string(r.termination) + ") after " + std::to_string(r.iterations) +
                            " iterations, final (" + format_double(r.final_state.x[0]) + ", " +
                            format_double(r.final_state.y[0]) + "), gs (" + format_double(r.gs_x) + ", " +
                            format_double(r.gs_y) + ")");
    }
    rep.ok = e.check(rep.results, rep.lines);
    return rep;
}

}  // namespace dsgda
