#include "dsgda/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dsgda/analysis.hpp"

namespace dsgda {

namespace fs = std::filesystem;

std::string to_string(ExportFormat f) { return f == ExportFormat::CSV ? "csv" : "json"; }

ExportFormat parse_format(const std::string& s) {
    if (s == "csv") return ExportFormat::CSV;
    if (s == "json") return ExportFormat::JSON;
    throw ConfigError("format: expected csv or json, got '" + s + "'");
}

// ---------------------------------------------------------------------------
// Config text

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& v) {
    const char* begin = v.c_str();
    char* end = nullptr;
    double d = std::strtod(begin, &end);
    if (v.empty() || end != begin + v.size() || !std::isfinite(d))
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return d;
}

std::uint64_t parse_count(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(key + ": expected a nonnegative integer, got '" + v + "'");
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError(key + ": integer out of range: '" + v + "'");
    }
}

Vec parse_vector(const std::string& key, const std::string& v) {
    Vec out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(key, trim(item)));
    if (out.empty()) throw ConfigError(key + ": expected a comma-separated list of numbers");
    return out;
}

std::string join(const Vec& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
    return s;
}

bool uses(Algorithm a, const std::string& field) {
    if (field == "c" || field == "alpha") return true;
    switch (a) {
        case Algorithm::DSGDA: return true;
        case Algorithm::SGDAPrimal: return field == "r1" || field == "beta";
        case Algorithm::SGDADual: return field == "r2" || field == "mu";
        case Algorithm::GDA:
        case Algorithm::EG: return false;
    }
    return false;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (!kv.emplace(key, value).second) throw ConfigError(key + ": given more than once");
    }

    bool have_c = false, have_alpha = false, have_init = false;
    for (const auto& [key, value] : kv) {
        if (key == "name") cfg.name = value;
        else if (key == "problem") cfg.problem = value;
        else if (key == "algorithm") {
            try {
                cfg.algorithm = parse_algorithm(value);
            } catch (const ConfigError& e) {
                throw ConfigError(std::string("algorithm: ") + e.what());
            }
        }
        else if (key == "params.c") { cfg.params.c = parse_number(key, value); have_c = true; }
        else if (key == "params.alpha") { cfg.params.alpha = parse_number(key, value); have_alpha = true; }
        else if (key == "params.beta") cfg.params.beta = parse_number(key, value);
        else if (key == "params.mu") cfg.params.mu = parse_number(key, value);
        else if (key == "params.r1") cfg.params.r1 = parse_number(key, value);
        else if (key == "params.r2") cfg.params.r2 = parse_number(key, value);
        else if (key == "init.x") { cfg.init.x = parse_vector(key, value); have_init = true; }
        else if (key == "init.y") { cfg.init.y = parse_vector(key, value); have_init = true; }
        else if (key == "init") {
            auto open = value.find('(');
            if (open == std::string::npos || value.back() != ')')
                throw ConfigError("init: expected grid(n) or random(n), got '" + value + "'");
            std::string kind = value.substr(0, open);
            std::string n = value.substr(open + 1, value.size() - open - 2);
            if (kind == "grid") cfg.init.kind = InitKind::Grid;
            else if (kind == "random") cfg.init.kind = InitKind::Random;
            else throw ConfigError("init: expected grid(n) or random(n), got '" + value + "'");
            cfg.init.n = parse_count(key, trim(n));
            have_init = true;
        }
        else if (key == "stop.tol") cfg.stop.tol = parse_number(key, value);
        else if (key == "stop.max_iters") cfg.stop.max_iters = parse_count(key, value);
        else if (key == "stop.mode") {
            if (value == "proximal-gap") cfg.stop.mode = StopMode::ProximalGap;
            else if (value == "residual") cfg.stop.mode = StopMode::Residual;
            else throw ConfigError("stop.mode: expected proximal-gap or residual, got '" + value + "'");
        }
        else if (key == "record.every_k") cfg.record_every = parse_count(key, value);
        else if (key == "outputs") cfg.outputs = value;
        else if (key == "format") cfg.format = parse_format(value);
        else if (key == "classify.eps_stat") cfg.classify.eps_stat = parse_number(key, value);
        else if (key == "classify.delta_rec") cfg.classify.delta_rec = parse_number(key, value);
        else if (key == "classify.burn_in") cfg.classify.burn_in = parse_number(key, value);
        else if (key == "classify.min_loop") cfg.classify.min_loop = parse_count(key, value);
        else if (key == "classify.window") cfg.classify.window = parse_count(key, value);
        else if (key == "seed") cfg.seed = parse_count(key, value);
        else throw ConfigError(key + ": unknown key");
    }

    if (cfg.problem.empty()) throw ConfigError("problem: missing");
    if (!have_init) throw ConfigError("init: missing (init.x/init.y, grid(n) or random(n))");
    if (cfg.init.kind == InitKind::Point && kv.count("init"))
        throw ConfigError("init: give either init = ... or init.x/init.y");
    if (cfg.init.kind != InitKind::Point && (kv.count("init.x") || kv.count("init.y")))
        throw ConfigError("init: give either init = ... or init.x/init.y");
    if (cfg.init.kind == InitKind::Point && (cfg.init.x.empty() || cfg.init.y.empty()))
        throw ConfigError("init: both init.x and init.y are required");

    if (cfg.algorithm == Algorithm::GDA || cfg.algorithm == Algorithm::EG) {
        if (!have_c || (cfg.algorithm == Algorithm::GDA && !have_alpha)) {
            double s;
            try {
                s = baseline_stepsize(builtin(cfg.problem));
            } catch (const UnknownProblem& e) {
                throw ConfigError(std::string("problem: ") + e.what());
            }
            if (!have_c) cfg.params.c = s;
            if (!have_alpha) cfg.params.alpha = cfg.algorithm == Algorithm::EG ? cfg.params.c : s;
        }
        if (cfg.algorithm == Algorithm::EG && !have_alpha) cfg.params.alpha = cfg.params.c;
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "': file not found or unreadable");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "name = " << cfg.name << "\n";
    os << "problem = " << cfg.problem << "\n";
    os << "algorithm = " << to_string(cfg.algorithm) << "\n";
    os << "params.c = " << format_double(cfg.params.c) << "\n";
    os << "params.alpha = " << format_double(cfg.params.alpha) << "\n";
    os << "params.beta = " << format_double(cfg.params.beta) << "\n";
    os << "params.mu = " << format_double(cfg.params.mu) << "\n";
    os << "params.r1 = " << format_double(cfg.params.r1) << "\n";
    os << "params.r2 = " << format_double(cfg.params.r2) << "\n";
    switch (cfg.init.kind) {
        case InitKind::Point:
            os << "init.x = " << join(cfg.init.x) << "\n";
            os << "init.y = " << join(cfg.init.y) << "\n";
            break;
        case InitKind::Grid: os << "init = grid(" << cfg.init.n << ")\n"; break;
        case InitKind::Random: os << "init = random(" << cfg.init.n << ")\n"; break;
    }
    os << "stop.tol = " << format_double(cfg.stop.tol) << "\n";
    os << "stop.max_iters = " << cfg.stop.max_iters << "\n";
    os << "stop.mode = " << to_string(cfg.stop.mode) << "\n";
    os << "record.every_k = " << cfg.record_every << "\n";
    if (!cfg.outputs.empty()) os << "outputs = " << cfg.outputs << "\n";
    os << "format = " << to_string(cfg.format) << "\n";
    os << "classify.eps_stat = " << format_double(cfg.classify.eps_stat) << "\n";
    os << "classify.delta_rec = " << format_double(cfg.classify.delta_rec) << "\n";
    os << "classify.burn_in = " << format_double(cfg.classify.burn_in) << "\n";
    os << "classify.min_loop = " << cfg.classify.min_loop << "\n";
    os << "classify.window = " << cfg.classify.window << "\n";
    os << "seed = " << cfg.seed << "\n";
    return os.str();
}

void validate_config(const RunConfig& cfg) {
    MinimaxProblem prob;
    try {
        prob = builtin(cfg.problem);
    } catch (const UnknownProblem& e) {
        throw ConfigError(std::string("problem: ") + e.what());
    }
    const AlgoParams& p = cfg.params;
    auto need = [&](const char* field, double v, bool unit) {
        if (!uses(cfg.algorithm, field)) return;
        bool ok = unit ? (v > 0 && v <= 1) : (v > 0);
        if (!ok)
            throw ConfigError(std::string("params.") + field + (unit ? ": must lie in (0, 1]" : ": must be positive") +
                              " for " + to_string(cfg.algorithm));
    };
    need("c", p.c, false);
    if (cfg.algorithm != Algorithm::EG) need("alpha", p.alpha, false);
    need("r1", p.r1, false);
    need("r2", p.r2, false);
    need("beta", p.beta, true);
    need("mu", p.mu, true);
    if (!(cfg.stop.tol > 0)) throw ConfigError("stop.tol: must be positive");
    if (cfg.stop.max_iters < 1) throw ConfigError("stop.max_iters: must be at least 1");
    if (cfg.record_every < 1) throw ConfigError("record.every_k: must be at least 1");
    if (!(cfg.classify.burn_in >= 0 && cfg.classify.burn_in < 1)) throw ConfigError("classify.burn_in: must lie in [0, 1)");
    if (!(cfg.classify.eps_stat > 0)) throw ConfigError("classify.eps_stat: must be positive");
    if (!(cfg.classify.delta_rec > 0)) throw ConfigError("classify.delta_rec: must be positive");
    switch (cfg.init.kind) {
        case InitKind::Point:
            if (cfg.init.x.size() != prob.dim_x || cfg.init.y.size() != prob.dim_y)
                throw ConfigError("init: dimension does not match problem '" + cfg.problem + "'");
            if (!prob.X.contains(cfg.init.x) || !prob.Y.contains(cfg.init.y))
                throw ConfigError("init: point lies outside X x Y");
            break;
        case InitKind::Grid: {
            auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(cfg.init.n))));
            if (cfg.init.n == 0 || k * k != cfg.init.n) throw ConfigError("init: grid(n) needs a perfect square n > 0");
            if (prob.dim_x != 1 || prob.dim_y != 1) throw ConfigError("init: grid(n) needs 1-D blocks");
            break;
        }
        case InitKind::Random:
            if (cfg.init.n == 0) throw ConfigError("init: random(n) needs n > 0");
            break;
    }
}

namespace {

// Uniform [0, 1) from a generator seeded by (seed, index); independent of
// the standard library's distribution implementations.
struct IndexedUniform {
    std::mt19937_64 rng;
    IndexedUniform(std::uint64_t seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        rng.seed(seq);
    }
    double operator()() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
};

}  // namespace

std::vector<RunConfig> expand_inits(const RunConfig& cfg) {
    validate_config(cfg);
    if (cfg.init.kind == InitKind::Point) return {cfg};
    MinimaxProblem prob = builtin(cfg.problem);
    std::vector<RunConfig> out;
    auto add = [&](std::size_t idx, Vec x, Vec y) {
        RunConfig c = cfg;
        c.init = InitSpec{InitKind::Point, std::move(x), std::move(y), 0};
        c.name = cfg.name + "-" + std::to_string(idx);
        out.push_back(std::move(c));
    };
    if (cfg.init.kind == InitKind::Grid) {
        auto k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(cfg.init.n))));
        auto lattice = [k](double lo, double hi, std::size_t i) {
            return lo + static_cast<double>(i + 1) * (hi - lo) / static_cast<double>(k + 1);
        };
        std::size_t idx = 0;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j)
                add(idx++, {lattice(prob.X.lower[0], prob.X.upper[0], i)},
                    {lattice(prob.Y.lower[0], prob.Y.upper[0], j)});
    } else {
        for (std::size_t idx = 0; idx < cfg.init.n; ++idx) {
            IndexedUniform u(cfg.seed, idx);
            Vec x(prob.dim_x), y(prob.dim_y);
            for (std::size_t i = 0; i < x.size(); ++i)
                x[i] = prob.X.lower[i] + u() * (prob.X.upper[i] - prob.X.lower[i]);
            for (std::size_t i = 0; i < y.size(); ++i)
                y[i] = prob.Y.lower[i] + u() * (prob.Y.upper[i] - prob.Y.lower[i]);
            add(idx, std::move(x), std::move(y));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Export

namespace {

std::vector<std::string> csv_header(std::size_t nx, std::size_t ny) {
    std::vector<std::string> h{"iter"};
    for (const char* block : {"x", "y", "z", "v"}) {
        std::size_t n = (block[0] == 'x' || block[0] == 'z') ? nx : ny;
        for (std::size_t i = 0; i < n; ++i) h.push_back(block + std::to_string(i));
    }
    h.push_back("gs_x");
    h.push_back("gs_y");
    return h;
}

void ensure_parent(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

}  // namespace

void export_trajectory(const Trajectory& traj, const fs::path& path, ExportFormat format) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    if (format == ExportFormat::CSV) {
        auto h = csv_header(traj.dim_x(), traj.dim_y());
        for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
        out << "\n";
        for (std::size_t r = 0; r < traj.size(); ++r) {
            out << traj.iter(r);
            for (double v : traj.raw(r)) out << "," << format_double(v);
            auto gs = traj.gs(r);
            out << "," << format_double(gs.first) << "," << format_double(gs.second) << "\n";
        }
    } else {
        nlohmann::json j;
        j["dim_x"] = traj.dim_x();
        j["dim_y"] = traj.dim_y();
        j["termination"] = to_string(traj.termination);
        j["iterations"] = traj.iterations;
        auto rows = nlohmann::json::array();
        for (std::size_t r = 0; r < traj.size(); ++r) {
            SmoothedState s = traj.state(r);
            auto gs = traj.gs(r);
            rows.push_back({{"iter", traj.iter(r)}, {"x", s.x}, {"y", s.y}, {"z", s.z}, {"v", s.v},
                            {"gs_x", gs.first}, {"gs_y", gs.second}});
        }
        j["rows"] = std::move(rows);
        out << j.dump(1) << "\n";
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

Trajectory import_trajectory_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error("empty trajectory file '" + path.string() + "'");
    std::size_t nx = 0, ny = 0;
    {
        std::stringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) {
            if (col.size() > 1 && col[0] == 'x') ++nx;
            if (col.size() > 1 && col[0] == 'y') ++ny;
        }
    }
    if (line != [&] {
            auto h = csv_header(nx, ny);
            std::string s;
            for (std::size_t i = 0; i < h.size(); ++i) s += (i ? "," : "") + h[i];
            return s;
        }())
        throw Error("unexpected trajectory header in '" + path.string() + "'");
    Trajectory traj(nx, ny);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 3 + 2 * (nx + ny)) throw Error("malformed trajectory row in '" + path.string() + "'");
        SmoothedState s;
        std::size_t k = 1;
        auto take = [&](Vec& v, std::size_t n) {
            for (std::size_t i = 0; i < n; ++i) v.push_back(std::strtod(cells[k++].c_str(), nullptr));
        };
        take(s.x, nx);
        take(s.y, ny);
        take(s.z, nx);
        take(s.v, ny);
        double gx = std::strtod(cells[k].c_str(), nullptr), gy = std::strtod(cells[k + 1].c_str(), nullptr);
        traj.push(std::stoull(cells[0]), s, {gx, gy});
    }
    if (!traj.empty()) traj.iterations = traj.iter(traj.size() - 1);
    return traj;
}

// ---------------------------------------------------------------------------
// Running

RunResult run_config(const RunConfig& cfg, Trajectory* keep) {
    validate_config(cfg);
    if (cfg.init.kind != InitKind::Point) throw ConfigError("init: run_config needs a single initial point");
    MinimaxProblem prob = builtin(cfg.problem);
    auto t0 = std::chrono::steady_clock::now();
    Trajectory traj = run(prob, cfg.params, SmoothedState::anchored(cfg.init.x, cfg.init.y), cfg.stop,
                          cfg.algorithm, cfg.record_every);
    RunResult r;
    r.name = cfg.name;
    r.outcome = classify(prob, traj, cfg.classify);
    r.termination = traj.termination;
    r.iterations = traj.iterations;
    r.final_state = traj.final_state();
    std::tie(r.gs_x, r.gs_y) = traj.gs(traj.size() - 1);
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!cfg.outputs.empty()) {
        fs::path p = fs::path(cfg.outputs) / (cfg.name + (cfg.format == ExportFormat::CSV ? ".csv" : ".json"));
        export_trajectory(traj, p, cfg.format);
        r.trajectory_file = p.string();
    }
    if (keep) *keep = std::move(traj);
    return r;
}

std::vector<RunResult> run_batch(const std::vector<RunConfig>& configs, unsigned parallelism) {
    std::vector<RunResult> results(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) {
            try {
                results[i] = run_config(configs[i]);
            } catch (const NumericError& e) {
                results[i].name = configs[i].name;
                results[i].error = std::string("numeric: ") + e.what();
            } catch (const std::exception& e) {
                results[i].name = configs[i].name;
                results[i].error = e.what();
            }
        }
    };
    unsigned n = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(configs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return results;
}

void write_summary(const std::vector<RunResult>& results, const fs::path& path) {
    ensure_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << "name,outcome,termination,iterations,x,y,gs_x,gs_y,error\n";
    for (const auto& r : results) {
        out << r.name << ",";
        if (r.failed()) {
            out << ",,,,,,," << '"' << r.error << '"' << "\n";
            continue;
        }
        out << to_string(r.outcome.kind) << "," << to_string(r.termination) << "," << r.iterations << ","
            << join(r.final_state.x) << "," << join(r.final_state.y) << "," << format_double(r.gs_x) << ","
            << format_double(r.gs_y) << ",\n";
    }
}

}  // namespace dsgda
