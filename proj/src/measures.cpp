#include "dsgda/measures.hpp"

#include <algorithm>
#include <cmath>

#include "dsgda/analysis.hpp"

namespace dsgda {

namespace {

// dist(0, g + N_box(p)) for one block.
double normal_cone_residual(const BoxSet& box, CSpan p, const Vec& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double r;
        if (p[i] <= box.lower[i])
            r = std::max(0.0, -g[i]);
        else if (p[i] >= box.upper[i])
            r = std::max(0.0, g[i]);
        else
            r = std::abs(g[i]);
        s += r * r;
    }
    return std::sqrt(s);
}

double dist(CSpan a, CSpan b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

std::pair<double, double> gs_residual(const MinimaxProblem& prob, CSpan x, CSpan y) {
    prob.check_dims(x, y);
    if (!prob.X.contains(x) || !prob.Y.contains(y)) throw ParamError("gs_residual: point lies outside X x Y");
    Vec gx = prob.gx(x, y);
    Vec gy = prob.gy(x, y);
    for (double& v : gy) v = -v;
    return {normal_cone_residual(prob.X, x, gx), normal_cone_residual(prob.Y, y, gy)};
}

double os_residual(const MinimaxProblem& prob, double r1, CSpan x_hat, const GridSpec& g) {
    prob.require_value("os_residual");
    prob.require_scalar("os_residual");
    if (x_hat.size() != 1) throw DimensionError("os_residual: x_hat must have dimension 1");
    if (!(r1 > 0)) throw ParamError("os_residual: r1 must be positive");
    return std::abs(prox_point(prob, r1, x_hat[0], g).arg - x_hat[0]);
}

StationarityReport stationarity(const MinimaxProblem& prob, CSpan x, CSpan y, std::optional<double> r1,
                                const GridSpec& g) {
    StationarityReport r;
    std::tie(r.gs_x, r.gs_y) = gs_residual(prob, x, y);
    if (r1) r.os = os_residual(prob, *r1, x, g);
    r.x.assign(x.begin(), x.end());
    r.y.assign(y.begin(), y.end());
    return r;
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::Converged: return "converged";
        case Outcome::LimitCycle: return "limit-cycle";
        case Outcome::BoundaryStall: return "boundary-stall";
        case Outcome::MaxIters: return "max-iters";
    }
    return "?";
}

OutcomeClass classify(const MinimaxProblem& prob, const Trajectory& traj, const ClassifyOptions& opt) {
    if (traj.empty()) throw ParamError("classify: empty trajectory");
    OutcomeClass out;
    const std::size_t n = traj.size();
    std::tie(out.final_gs_x, out.final_gs_y) = traj.gs(n - 1);
    if (out.final_gs_x < opt.eps_stat && out.final_gs_y < opt.eps_stat) {
        out.kind = Outcome::Converged;
        return out;
    }

    // Recurrence search over the post-burn-in tail.
    const auto burn_iter = static_cast<std::uint64_t>(opt.burn_in * static_cast<double>(traj.iterations));
    std::size_t first = n > opt.window ? n - opt.window : 0;
    while (first < n && traj.iter(first) < burn_iter) ++first;
    const double far = opt.excursion * opt.delta_rec;
    for (std::size_t i = first; i < n; ++i) {
        auto gi = traj.gs(i);
        if (gi.first < opt.eps_stat && gi.second < opt.eps_stat) continue;
        CSpan si = traj.raw(i);
        double excursion = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            auto gj = traj.gs(j);
            if (gj.first < opt.eps_stat && gj.second < opt.eps_stat) break;
            double d = dist(traj.raw(j), si);
            if (traj.iter(j) - traj.iter(i) >= opt.min_loop && d < opt.delta_rec && excursion > far) {
                out.kind = Outcome::LimitCycle;
                out.loop_start = traj.iter(i);
                out.loop_length = traj.iter(j) - traj.iter(i);
                out.recurrence_distance = d;
                out.excursion = excursion;
                return out;
            }
            excursion = std::max(excursion, d);
        }
    }

    if (n >= 2) {
        SmoothedState last = traj.state(n - 1);
        double moved = 0.0;
        CSpan a = traj.raw(n - 1), b = traj.raw(n - 2);
        for (std::size_t k = 0; k < a.size(); ++k) moved = std::max(moved, std::abs(a[k] - b[k]));
        if ((prob.X.on_boundary(last.x) || prob.Y.on_boundary(last.y)) && moved <= 1e-12) {
            out.kind = Outcome::BoundaryStall;
            return out;
        }
    }
    out.kind = Outcome::MaxIters;
    return out;
}

GSBound gs_bound_check(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s_t,
                       const SmoothedState& s_next, const GridSpec& g) {
    ConstantSet k = constants(prob.L_x, prob.L_y, p.r1, p.r2, p.c, p.alpha);
    AuxPoints aux = aux_points(prob, p, s_t, g);

    const double dx = dist(s_next.x, s_t.x);
    const double dy = std::abs(s_t.y[0] - aux.y_plus);
    const double dz = dist(s_next.z, s_t.z);
    const double dv = dist(s_next.v, s_t.v);

    GSBound b;
    b.eps = std::max({dx / p.c, dy / p.alpha, dz / p.beta, dv / p.mu});
    std::tie(b.gs_x, b.gs_y) = gs_residual(prob, s_next.x, s_next.y);
    const double A1 = 1 / p.c + prob.L_x + p.r1 + prob.L_x * prob.L_y * p.alpha * k.sigma6;
    const double B1 = 1 / p.alpha + prob.L_y + p.r2;
    b.rho_x = A1 * p.c + p.r1 + prob.L_x * p.alpha;
    b.rho_y = B1 * p.alpha + B1 * prob.L_y * p.alpha * k.sigma6 * p.c + p.r2;
    auto part = [&](double gs, double rho) {
        if (gs == 0.0) return 0.0;
        return gs / (rho * b.eps);
    };
    b.ratio = std::max(part(b.gs_x, b.rho_x), part(b.gs_y, b.rho_y));
    return b;
}

}  // namespace dsgda
