#pragma once

// Brute-force grid oracles for the value functions, proximal maps and
// Lyapunov functions attached to F(x, y, z, v). Only 1-D blocks are
// supported; every entry point checks that the problem has payoff values.
//
// Search domains: x over X, y over Y, anchors z over X and v over Y (the
// convex hulls of the feasible sets, which are the boxes themselves).

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "dsgda/problems.hpp"
#include "dsgda/solvers.hpp"

namespace dsgda {

// A 1-D search evaluates `resolution` equally spaced points, then for each
// refinement level re-grids [best - h, best + h] with 21 points (spacing
// h / 10), h being the current spacing.
struct GridSpec {
    int resolution = 2001;
    int levels = 2;

    void validate() const;
    // Spacing of the last level on an interval of the given width.
    double spacing(double width) const;
};

struct Argopt {
    double arg = 0.0;
    double value = 0.0;
};

// Ties keep the earlier candidate: the smallest coordinate on the first pass,
// the incumbent during refinement.
template <class Fn>
Argopt grid_argmin(Fn&& fn, double lo, double hi, const GridSpec& g) {
    Argopt best{lo, fn(lo)};
    if (!(hi > lo)) return best;
    double h = (hi - lo) / (g.resolution - 1);
    for (int i = 1; i < g.resolution; ++i) {
        double x = (i == g.resolution - 1) ? hi : lo + i * h;
        double v = fn(x);
        if (v < best.value) best = {x, v};
    }
    for (int level = 0; level < g.levels; ++level) {
        double a = std::max(lo, best.arg - h), b = std::min(hi, best.arg + h);
        double step = (b - a) / 20;
        Argopt inc = best;
        for (int k = 0; k <= 20; ++k) {
            double x = (k == 20) ? b : a + k * step;
            double v = fn(x);
            if (v < inc.value) inc = {x, v};
        }
        best = inc;
        h /= 10;
    }
    return best;
}

template <class Fn>
Argopt grid_argmax(Fn&& fn, double lo, double hi, const GridSpec& g) {
    Argopt r = grid_argmin([&](double t) { return -fn(t); }, lo, hi, g);
    r.value = -r.value;
    return r;
}

// Scalar F(x, y, z, v).
double F1(const MinimaxProblem& prob, double r1, double r2, double x, double y, double z, double v);

// x(y,z,v) = argmin_x F and d(y,z,v) = min_x F.
Argopt argmin_x(const MinimaxProblem& prob, double r1, double r2, double y, double z, double v, const GridSpec& g);
// y(x,z,v) = argmax_y F and h(x,z,v) = max_y F.
Argopt argmax_y(const MinimaxProblem& prob, double r1, double r2, double x, double z, double v, const GridSpec& g);

// x(z,v) = argmin_x max_y F, y(z,v) = argmax_y F(x(z,v), y, z, v), and the
// saddle value min_x max_y F.
struct Saddle {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
};
Saddle saddle(const MinimaxProblem& prob, double r1, double r2, double z, double v, const GridSpec& g);

// p(z,v) = max_y d(y,z,v), nested with y outside.
double p_value(const MinimaxProblem& prob, double r1, double r2, double z, double v, const GridSpec& g);

// q(z) = max_v p(z,v). Since max_v of -(r2/2)(y - v)^2 is 0 at v = y, this is
// max_y phi(y, z) with phi(y, z) = min_x f(x, y) + (r1/2)(x - z)^2, and the
// maximizing v is the maximizing y. Returns (v(z), q(z)).
Argopt q_value(const MinimaxProblem& prob, double r1, double z, const GridSpec& g);

// g(v) = min_z p(z,v). Under minimax equality for F (r1 > L_x, r2 > L_y),
// p(z,v) = min_x psi(x,v) + (r1/2)(x - z)^2 with psi(x,v) = max_y f - (r2/2)(y - v)^2,
// so g(v) = min_x psi(x, v) and z(v) is that minimizer. Returns (z(v), g(v)).
Argopt g_value(const MinimaxProblem& prob, double r2, double v, const GridSpec& g);

// F_lower = min_z q(z) and F_upper = max_v g(v): one more level of nesting.
Argopt F_lower(const MinimaxProblem& prob, double r1, const GridSpec& g);
Argopt F_upper(const MinimaxProblem& prob, double r2, const GridSpec& g);

// x*(z) = argmin_x max_y f(x,y) + (r1/2)(x - z)^2, searched with x outside.
Argopt prox_point(const MinimaxProblem& prob, double r1, double z, const GridSpec& g);

struct ValueFunctions {
    double d = 0.0;  // at the state's y
    double p = 0.0;
    double q = 0.0;
    double h = 0.0;  // at the state's x
    double g = 0.0;
    std::optional<double> F_lower, F_upper;
};
ValueFunctions value_functions(const MinimaxProblem& prob, double r1, double r2, const SmoothedState& s,
                               const GridSpec& g, bool with_bounds = false);

struct LyapunovBreakdown {
    double F = 0.0, d = 0.0, p = 0.0, q = 0.0, Phi = 0.0;
    std::optional<double> F_lower;
    // Dual side, filled when requested.
    std::optional<double> h, g, F_upper, Psi;

    // (F - d) + (p - d) + (q - p) + (q - F_lower) + F_lower; needs F_lower.
    double phi_telescoped() const;
};

struct LyapunovOptions {
    bool with_lower = false;
    bool dual = false;
    bool with_upper = false;
};

LyapunovBreakdown lyapunov_phi(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s,
                               const GridSpec& g, LyapunovOptions opt = {});

struct AuxPoints {
    double x_y = 0.0;     // x(y,z,v)
    double y_plus = 0.0;  // y_+(z,v)
    double x_zv = 0.0;    // x(z,v)
    double y_zv = 0.0;    // y(z,v)
    double v_plus = 0.0;  // v + mu (y(z,v) - v)
    double v_z = 0.0;     // v(z)
};
AuxPoints aux_points(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s, const GridSpec& g);

struct DescentCertificate {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double phi_t = 0.0, phi_next = 0.0;
    double terms[5] = {0, 0, 0, 0, 0};  // the five rhs terms, the last one already negative
};

// Primal-side basic descent estimate between s_t and s_next = dsgda_step(s_t).
// Throws ParamError naming the failing hypothesis unless check_descent_params
// passes for (L_x, L_y / L_x, p).
DescentCertificate descent_certificate(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s_t,
                                       const SmoothedState& s_next, const GridSpec& g);

// Mirrored dual-side estimate built on Psi. Throws ParamError unless
// check_descent_params_dual passes.
DescentCertificate dual_descent_certificate(const MinimaxProblem& prob, const AlgoParams& p,
                                            const SmoothedState& s_t, const SmoothedState& s_next,
                                            const GridSpec& g);

struct ErrorBoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds(double tol) const { return lhs <= rhs + tol; }
};

// ||x(z+, v+(z+)) - x(z+, v(z+))||^2 against omega0 ||v+ - v||^(1/theta)
// (KL-tagged problems) or omega1 ||v+ - v|| (concave-tagged problems), where
// z+ is the next z produced by one DS-GDA step from `state`. theta and tau
// are only read in the KL case. Throws UnsupportedProblem for untagged
// problems.
ErrorBoundCheck proximal_error_bound_check(const MinimaxProblem& prob, const AlgoParams& p,
                                           const SmoothedState& state, double theta, double tau,
                                           const GridSpec& g);

}  // namespace dsgda
