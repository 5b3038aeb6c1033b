#include "dsgda/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "dsgda/measures.hpp"

namespace dsgda {

void AlgoParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0) || !std::isfinite(v)) throw ParamError(std::string("params.") + name + " must be positive");
    };
    positive(c, "c");
    positive(alpha, "alpha");
    positive(r1, "r1");
    positive(r2, "r2");
    if (!(beta > 0 && beta <= 1)) throw ParamError("params.beta must lie in (0, 1]");
    if (!(mu > 0 && mu <= 1)) throw ParamError("params.mu must lie in (0, 1]");
}

void StoppingRule::validate() const {
    if (!(tol > 0)) throw ParamError("stop.tol must be positive");
    if (max_iters < 1) throw ParamError("stop.max_iters must be at least 1");
}

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::DSGDA: return "dsgda";
        case Algorithm::SGDAPrimal: return "sgda-primal";
        case Algorithm::SGDADual: return "sgda-dual";
        case Algorithm::GDA: return "gda";
        case Algorithm::EG: return "eg";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& s) {
    for (Algorithm a : {Algorithm::DSGDA, Algorithm::SGDAPrimal, Algorithm::SGDADual, Algorithm::GDA, Algorithm::EG})
        if (to_string(a) == s) return a;
    throw ConfigError("unknown algorithm '" + s + "' (expected dsgda, sgda-primal, sgda-dual, gda or eg)");
}

std::string to_string(Termination t) { return t == Termination::Converged ? "converged" : "max-iters"; }

std::string to_string(StopMode m) { return m == StopMode::ProximalGap ? "proximal-gap" : "residual"; }

void Trajectory::push(std::uint64_t iter, const SmoothedState& s, std::pair<double, double> gs) {
    data_.insert(data_.end(), s.x.begin(), s.x.end());
    data_.insert(data_.end(), s.y.begin(), s.y.end());
    data_.insert(data_.end(), s.z.begin(), s.z.end());
    data_.insert(data_.end(), s.v.begin(), s.v.end());
    iters_.push_back(iter);
    gs_x_.push_back(gs.first);
    gs_y_.push_back(gs.second);
}

CSpan Trajectory::raw(std::size_t i) const {
    std::size_t w = 2 * (dim_x_ + dim_y_);
    return CSpan(data_.data() + i * w, w);
}

SmoothedState Trajectory::state(std::size_t i) const {
    CSpan r = raw(i);
    SmoothedState s;
    auto nx = static_cast<std::ptrdiff_t>(dim_x_), ny = static_cast<std::ptrdiff_t>(dim_y_);
    auto it = r.begin();
    s.x.assign(it, it + nx);
    it += nx;
    s.y.assign(it, it + ny);
    it += ny;
    s.z.assign(it, it + nx);
    it += nx;
    s.v.assign(it, it + ny);
    return s;
}

namespace {

// Shared Gauss-Seidel kernel. Pass r1 = 0 / r2 = 0 to drop a smoothing term.
void primal_dual_update(const MinimaxProblem& prob, double c, double alpha, double r1, double r2,
                        SmoothedState& s) {
    Vec g(prob.dim_x);
    prob.grad_x(s.x, s.y, g);
    for (std::size_t i = 0; i < g.size(); ++i) s.x[i] -= c * (g[i] + r1 * (s.x[i] - s.z[i]));
    project_inplace(prob.X, s.x);

    Vec h(prob.dim_y);
    prob.grad_y(s.x, s.y, h);
    for (std::size_t i = 0; i < h.size(); ++i) s.y[i] += alpha * (h[i] - r2 * (s.y[i] - s.v[i]));
    project_inplace(prob.Y, s.y);
}

void average(Vec& anchor, const Vec& target, double w) {
    for (std::size_t i = 0; i < anchor.size(); ++i) anchor[i] += w * (target[i] - anchor[i]);
}

void check_feasible_dims(const MinimaxProblem& prob, const SmoothedState& s) {
    prob.check_dims(s.x, s.y);
    if (s.z.size() != prob.dim_x || s.v.size() != prob.dim_y)
        throw DimensionError(prob.name + ": anchor dimensions do not match the problem");
}

double max_abs_diff(const Vec& a, const Vec& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

bool all_finite(const SmoothedState& s) {
    for (const Vec* v : {&s.x, &s.y, &s.z, &s.v})
        for (double a : *v)
            if (!std::isfinite(a)) return false;
    return true;
}

}  // namespace

SmoothedState dsgda_step(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s) {
    check_feasible_dims(prob, s);
    SmoothedState n = s;
    primal_dual_update(prob, p.c, p.alpha, p.r1, p.r2, n);
    average(n.z, n.x, p.beta);
    average(n.v, n.y, p.mu);
    return n;
}

SmoothedState sgda_step(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s, Side side) {
    check_feasible_dims(prob, s);
    SmoothedState n = s;
    if (side == Side::Primal) {
        n.v = n.y;
        primal_dual_update(prob, p.c, p.alpha, p.r1, 0.0, n);
        average(n.z, n.x, p.beta);
        n.v = n.y;
    } else {
        n.z = n.x;
        primal_dual_update(prob, p.c, p.alpha, 0.0, p.r2, n);
        average(n.v, n.y, p.mu);
        n.z = n.x;
    }
    return n;
}

SmoothedState gda_step(const MinimaxProblem& prob, double c, double alpha, const SmoothedState& s) {
    check_feasible_dims(prob, s);
    SmoothedState n = s;
    primal_dual_update(prob, c, alpha, 0.0, 0.0, n);
    return n;
}

SmoothedState eg_step(const MinimaxProblem& prob, double stepsize, const SmoothedState& s) {
    check_feasible_dims(prob, s);
    Vec gx = prob.gx(s.x, s.y), gy = prob.gy(s.x, s.y);
    Vec xb = s.x, yb = s.y;
    for (std::size_t i = 0; i < xb.size(); ++i) xb[i] -= stepsize * gx[i];
    for (std::size_t i = 0; i < yb.size(); ++i) yb[i] += stepsize * gy[i];
    project_inplace(prob.X, xb);
    project_inplace(prob.Y, yb);

    gx = prob.gx(xb, yb);
    gy = prob.gy(xb, yb);
    SmoothedState n = s;
    for (std::size_t i = 0; i < n.x.size(); ++i) n.x[i] -= stepsize * gx[i];
    for (std::size_t i = 0; i < n.y.size(); ++i) n.y[i] += stepsize * gy[i];
    project_inplace(prob.X, n.x);
    project_inplace(prob.Y, n.y);
    return n;
}

SmoothedState step(const MinimaxProblem& prob, Algorithm algo, const AlgoParams& p, const SmoothedState& s) {
    switch (algo) {
        case Algorithm::DSGDA: return dsgda_step(prob, p, s);
        case Algorithm::SGDAPrimal: return sgda_step(prob, p, s, Side::Primal);
        case Algorithm::SGDADual: return sgda_step(prob, p, s, Side::Dual);
        case Algorithm::GDA: return gda_step(prob, p.c, p.alpha, s);
        case Algorithm::EG: return eg_step(prob, p.c, s);
    }
    return s;
}

double baseline_stepsize(const MinimaxProblem& prob) { return 1.0 / (2.0 * std::max(prob.L_x, prob.L_y)); }

Trajectory run(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& init, const StoppingRule& stop,
               Algorithm algo, std::uint64_t record_every) {
    stop.validate();
    if (record_every < 1) throw ParamError("record every-k must be at least 1");
    check_feasible_dims(prob, init);
    if (!prob.X.contains(init.x) || !prob.Y.contains(init.y))
        throw ParamError("initial point lies outside X x Y");

    const bool x_anchored = algo == Algorithm::DSGDA || algo == Algorithm::SGDAPrimal;
    const bool y_anchored = algo == Algorithm::DSGDA || algo == Algorithm::SGDADual;

    Trajectory traj(prob.dim_x, prob.dim_y);
    SmoothedState s = init;
    if (!all_finite(s)) throw NumericError("non-finite value in the initial state", 0);
    auto gs = gs_residual(prob, s.x, s.y);
    traj.push(0, s, gs);

    bool done = gs.first < stop.tol && gs.second < stop.tol;
    if (stop.mode == StopMode::ProximalGap)
        done = done && max_abs_diff(s.x, s.z) < stop.tol && max_abs_diff(s.y, s.v) < stop.tol;
    if (done) {
        traj.termination = Termination::Converged;
        return traj;
    }

    for (std::uint64_t t = 0; t < stop.max_iters; ++t) {
        SmoothedState n = step(prob, algo, p, s);
        const std::uint64_t it = t + 1;
        if (!all_finite(n)) throw NumericError("non-finite value at iterate " + std::to_string(it), it);

        bool stop_now = false;
        bool need_gs = stop.mode == StopMode::Residual;
        if (stop.mode == StopMode::ProximalGap) {
            double gx = x_anchored ? max_abs_diff(n.x, n.z) : max_abs_diff(n.x, s.x);
            double gy = y_anchored ? max_abs_diff(n.y, n.v) : max_abs_diff(n.y, s.y);
            stop_now = gx < stop.tol && gy < stop.tol;
        }
        std::pair<double, double> r{0.0, 0.0};
        if (need_gs) {
            r = gs_residual(prob, n.x, n.y);
            stop_now = r.first < stop.tol && r.second < stop.tol;
        }
        const bool last = stop_now || it == stop.max_iters;
        s = std::move(n);
        if (last || it % record_every == 0) {
            if (!need_gs) r = gs_residual(prob, s.x, s.y);
            traj.push(it, s, r);
        }
        if (stop_now) {
            traj.termination = Termination::Converged;
            traj.iterations = it;
            return traj;
        }
    }
    traj.termination = Termination::MaxIters;
    traj.iterations = stop.max_iters;
    return traj;
}

}  // namespace dsgda
