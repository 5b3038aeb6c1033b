#include "dsgda/oracle.hpp"

#include <cmath>

#include "dsgda/analysis.hpp"

namespace dsgda {

void GridSpec::validate() const {
    if (resolution < 3) throw ParamError("grid resolution must be at least 3");
    if (levels < 0) throw ParamError("grid refinement levels must be nonnegative");
}

double GridSpec::spacing(double width) const { return width / (resolution - 1) / std::pow(10.0, levels); }

namespace {

void require_oracle(const MinimaxProblem& prob, const GridSpec& g, const char* op) {
    prob.require_value(op);
    prob.require_scalar(op);
    g.validate();
}

double xlo(const MinimaxProblem& p) { return p.X.lower[0]; }
double xhi(const MinimaxProblem& p) { return p.X.upper[0]; }
double ylo(const MinimaxProblem& p) { return p.Y.lower[0]; }
double yhi(const MinimaxProblem& p) { return p.Y.upper[0]; }

// min_x f(x, y) + (r1/2)(x - z)^2
Argopt phi_min(const MinimaxProblem& prob, double r1, double y, double z, const GridSpec& g) {
    return grid_argmin([&](double x) { return prob.value1(x, y) + 0.5 * r1 * (x - z) * (x - z); }, xlo(prob),
                       xhi(prob), g);
}

// max_y f(x, y) - (r2/2)(y - v)^2
Argopt psi_max(const MinimaxProblem& prob, double r2, double x, double v, const GridSpec& g) {
    return grid_argmax([&](double y) { return prob.value1(x, y) - 0.5 * r2 * (y - v) * (y - v); }, ylo(prob),
                       yhi(prob), g);
}

double sq(double a) { return a * a; }

}  // namespace

double F1(const MinimaxProblem& prob, double r1, double r2, double x, double y, double z, double v) {
    return prob.value1(x, y) + 0.5 * r1 * (x - z) * (x - z) - 0.5 * r2 * (y - v) * (y - v);
}

Argopt argmin_x(const MinimaxProblem& prob, double r1, double r2, double y, double z, double v, const GridSpec& g) {
    require_oracle(prob, g, "argmin_x");
    return grid_argmin([&](double x) { return F1(prob, r1, r2, x, y, z, v); }, xlo(prob), xhi(prob), g);
}

Argopt argmax_y(const MinimaxProblem& prob, double r1, double r2, double x, double z, double v, const GridSpec& g) {
    require_oracle(prob, g, "argmax_y");
    return grid_argmax([&](double y) { return F1(prob, r1, r2, x, y, z, v); }, ylo(prob), yhi(prob), g);
}

Saddle saddle(const MinimaxProblem& prob, double r1, double r2, double z, double v, const GridSpec& g) {
    require_oracle(prob, g, "saddle");
    // max_y F = psi_max(x, v) + (r1/2)(x - z)^2
    Argopt outer = grid_argmin(
        [&](double x) { return psi_max(prob, r2, x, v, g).value + 0.5 * r1 * (x - z) * (x - z); }, xlo(prob),
        xhi(prob), g);
    Argopt inner = psi_max(prob, r2, outer.arg, v, g);
    return {outer.arg, inner.arg, outer.value};
}

double p_value(const MinimaxProblem& prob, double r1, double r2, double z, double v, const GridSpec& g) {
    require_oracle(prob, g, "p_value");
    return grid_argmax([&](double y) { return phi_min(prob, r1, y, z, g).value - 0.5 * r2 * (y - v) * (y - v); },
                       ylo(prob), yhi(prob), g)
        .value;
}

Argopt q_value(const MinimaxProblem& prob, double r1, double z, const GridSpec& g) {
    require_oracle(prob, g, "q_value");
    return grid_argmax([&](double y) { return phi_min(prob, r1, y, z, g).value; }, ylo(prob), yhi(prob), g);
}

Argopt g_value(const MinimaxProblem& prob, double r2, double v, const GridSpec& g) {
    require_oracle(prob, g, "g_value");
    return grid_argmin([&](double x) { return psi_max(prob, r2, x, v, g).value; }, xlo(prob), xhi(prob), g);
}

Argopt F_lower(const MinimaxProblem& prob, double r1, const GridSpec& g) {
    require_oracle(prob, g, "F_lower");
    return grid_argmin([&](double z) { return q_value(prob, r1, z, g).value; }, xlo(prob), xhi(prob), g);
}

Argopt F_upper(const MinimaxProblem& prob, double r2, const GridSpec& g) {
    require_oracle(prob, g, "F_upper");
    return grid_argmax([&](double v) { return g_value(prob, r2, v, g).value; }, ylo(prob), yhi(prob), g);
}

Argopt prox_point(const MinimaxProblem& prob, double r1, double z, const GridSpec& g) {
    require_oracle(prob, g, "prox_point");
    return grid_argmin(
        [&](double x) {
            double m = grid_argmax([&](double y) { return prob.value1(x, y); }, ylo(prob), yhi(prob), g).value;
            return m + 0.5 * r1 * (x - z) * (x - z);
        },
        xlo(prob), xhi(prob), g);
}

ValueFunctions value_functions(const MinimaxProblem& prob, double r1, double r2, const SmoothedState& s,
                               const GridSpec& g, bool with_bounds) {
    require_oracle(prob, g, "value_functions");
    double x = s.x[0], y = s.y[0], z = s.z[0], v = s.v[0];
    ValueFunctions out;
    out.d = argmin_x(prob, r1, r2, y, z, v, g).value;
    out.p = p_value(prob, r1, r2, z, v, g);
    out.q = q_value(prob, r1, z, g).value;
    out.h = argmax_y(prob, r1, r2, x, z, v, g).value;
    out.g = g_value(prob, r2, v, g).value;
    if (with_bounds) {
        out.F_lower = F_lower(prob, r1, g).value;
        out.F_upper = F_upper(prob, r2, g).value;
    }
    return out;
}

double LyapunovBreakdown::phi_telescoped() const {
    double lo = F_lower.value();
    return (F - d) + (p - d) + (q - p) + (q - lo) + lo;
}

LyapunovBreakdown lyapunov_phi(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s,
                               const GridSpec& g, LyapunovOptions opt) {
    require_oracle(prob, g, "lyapunov_phi");
    double x = s.x[0], y = s.y[0], z = s.z[0], v = s.v[0];
    LyapunovBreakdown b;
    b.F = F1(prob, p.r1, p.r2, x, y, z, v);
    b.d = argmin_x(prob, p.r1, p.r2, y, z, v, g).value;
    b.p = p_value(prob, p.r1, p.r2, z, v, g);
    b.q = q_value(prob, p.r1, z, g).value;
    b.Phi = b.F - 2 * b.d + 2 * b.q;
    if (opt.with_lower) b.F_lower = F_lower(prob, p.r1, g).value;
    if (opt.dual || opt.with_upper) {
        b.h = argmax_y(prob, p.r1, p.r2, x, z, v, g).value;
        b.g = g_value(prob, p.r2, v, g).value;
    }
    if (opt.with_upper) {
        b.F_upper = F_upper(prob, p.r2, g).value;
        b.Psi = 2 * *b.h - b.F - 2 * *b.g + *b.F_upper;
    }
    return b;
}

AuxPoints aux_points(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s, const GridSpec& g) {
    require_oracle(prob, g, "aux_points");
    double y = s.y[0], z = s.z[0], v = s.v[0];
    AuxPoints a;
    a.x_y = argmin_x(prob, p.r1, p.r2, y, z, v, g).arg;
    double gy = prob.gy1(a.x_y, y) - p.r2 * (y - v);
    a.y_plus = std::clamp(y + p.alpha * gy, ylo(prob), yhi(prob));
    Saddle sd = saddle(prob, p.r1, p.r2, z, v, g);
    a.x_zv = sd.x;
    a.y_zv = sd.y;
    a.v_plus = v + p.mu * (sd.y - v);
    a.v_z = q_value(prob, p.r1, z, g).arg;
    return a;
}

DescentCertificate descent_certificate(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s_t,
                                       const SmoothedState& s_next, const GridSpec& g) {
    require_oracle(prob, g, "descent_certificate");
    ParamReport rep = check_descent_params(prob.L_x, prob.lambda(), p);
    if (!rep.ok()) throw ParamError("descent_certificate: parameters violate " + rep.failures());

    const double r1 = p.r1, r2 = p.r2;
    const double x0 = s_t.x[0], y0 = s_t.y[0], z0 = s_t.z[0], v0 = s_t.v[0];
    const double x1 = s_next.x[0], y1 = s_next.y[0], z1 = s_next.z[0], v1 = s_next.v[0];

    // Phi at both states; q(z^{t+1}) also yields v(z^{t+1}).
    Argopt q0 = q_value(prob, r1, z0, g);
    Argopt q1 = q_value(prob, r1, z1, g);
    double phi0 = F1(prob, r1, r2, x0, y0, z0, v0) - 2 * argmin_x(prob, r1, r2, y0, z0, v0, g).value + 2 * q0.value;
    double phi1 = F1(prob, r1, r2, x1, y1, z1, v1) - 2 * argmin_x(prob, r1, r2, y1, z1, v1, g).value + 2 * q1.value;

    double x_y = argmin_x(prob, r1, r2, y0, z0, v0, g).arg;
    double y_plus = std::clamp(y0 + p.alpha * (prob.gy1(x_y, y0) - r2 * (y0 - v0)), ylo(prob), yhi(prob));

    Saddle sd = saddle(prob, r1, r2, z1, v0, g);
    double v_plus = v0 + p.mu * (sd.y - v0);
    double x_a = saddle(prob, r1, r2, z1, q1.arg, g).x;
    double x_b = saddle(prob, r1, r2, z1, v_plus, g).x;

    DescentCertificate c;
    c.phi_t = phi0;
    c.phi_next = phi1;
    c.lhs = phi0 - phi1;
    c.terms[0] = r1 / 32 * sq(x1 - x0);
    c.terms[1] = r2 / 15 * sq(y0 - y_plus);
    c.terms[2] = r1 / (5 * p.beta) * sq(z0 - z1);
    c.terms[3] = r2 / (4 * p.mu) * sq(v_plus - v0);
    c.terms[4] = -4 * r1 * p.beta * sq(x_a - x_b);
    c.rhs = c.terms[0] + c.terms[1] + c.terms[2] + c.terms[3] + c.terms[4];
    c.margin = c.lhs - c.rhs;
    return c;
}

DescentCertificate dual_descent_certificate(const MinimaxProblem& prob, const AlgoParams& p,
                                            const SmoothedState& s_t, const SmoothedState& s_next,
                                            const GridSpec& g) {
    require_oracle(prob, g, "dual_descent_certificate");
    ParamReport rep = check_descent_params_dual(prob.L_x, prob.lambda(), p);
    if (!rep.ok()) throw ParamError("dual_descent_certificate: parameters violate " + rep.failures());

    const double r1 = p.r1, r2 = p.r2;
    const double x0 = s_t.x[0], y0 = s_t.y[0], z0 = s_t.z[0], v0 = s_t.v[0];
    const double x1 = s_next.x[0], y1 = s_next.y[0], z1 = s_next.z[0], v1 = s_next.v[0];

    // Psi up to the constant F_upper, which cancels in the difference.
    auto psi_shifted = [&](double x, double y, double z, double v, Argopt* gv) {
        Argopt gg = g_value(prob, r2, v, g);
        if (gv) *gv = gg;
        return 2 * argmax_y(prob, r1, r2, x, z, v, g).value - F1(prob, r1, r2, x, y, z, v) - 2 * gg.value;
    };
    Argopt g1;
    double psi0 = psi_shifted(x0, y0, z0, v0, nullptr);
    double psi1 = psi_shifted(x1, y1, z1, v1, &g1);

    double y_x = argmax_y(prob, r1, r2, x0, z0, v0, g).arg;
    double x_plus = std::clamp(x0 - p.c * (prob.gx1(x0, y_x) + r1 * (x0 - z0)), xlo(prob), xhi(prob));

    Saddle sd = saddle(prob, r1, r2, z0, v1, g);
    double z_plus = z0 + p.beta * (sd.x - z0);
    double y_a = saddle(prob, r1, r2, g1.arg, v1, g).y;
    double y_b = saddle(prob, r1, r2, z_plus, v1, g).y;

    DescentCertificate c;
    c.phi_t = psi0;
    c.phi_next = psi1;
    c.lhs = psi0 - psi1;
    c.terms[0] = r2 / 32 * sq(x0 - x_plus);
    c.terms[1] = r1 / 15 * sq(y0 - y1);
    c.terms[2] = r2 / (5 * p.mu) * sq(v0 - v1);
    c.terms[3] = r1 / (4 * p.beta) * sq(z_plus - z0);
    c.terms[4] = -4 * r2 * p.mu * sq(y_a - y_b);
    c.rhs = c.terms[0] + c.terms[1] + c.terms[2] + c.terms[3] + c.terms[4];
    c.margin = c.lhs - c.rhs;
    return c;
}

ErrorBoundCheck proximal_error_bound_check(const MinimaxProblem& prob, const AlgoParams& p,
                                           const SmoothedState& state, double theta, double tau,
                                           const GridSpec& g) {
    require_oracle(prob, g, "proximal_error_bound_check");
    if (prob.dual_regularity == DualRegularity::None)
        throw UnsupportedProblem("proximal_error_bound_check: '" + prob.name +
                                 "' carries no dual regularity tag (KL or concave)");
    SmoothedState next = dsgda_step(prob, p, state);
    const double z1 = next.z[0], v0 = state.v[0];

    Saddle sd = saddle(prob, p.r1, p.r2, z1, v0, g);
    double v_plus = v0 + p.mu * (sd.y - v0);
    double v_z = q_value(prob, p.r1, z1, g).arg;
    double x_a = saddle(prob, p.r1, p.r2, z1, v_plus, g).x;
    double x_b = saddle(prob, p.r1, p.r2, z1, v_z, g).x;

    ErrorBoundCheck out;
    out.lhs = sq(x_a - x_b);
    double dv = std::abs(v_plus - v0);
    if (prob.dual_regularity == DualRegularity::KL) {
        KLSpec kl{theta, tau, KLSide::Dual};
        out.rhs = omega0(prob.L_x, prob.L_y, p.r1, p.r2, p.mu, kl) * std::pow(dv, 1.0 / theta);
    } else {
        out.rhs = omega1(prob.L_x, prob.L_y, p.r1, p.r2, p.mu, prob.Y.diameter()) * dv;
    }
    return out;
}

}  // namespace dsgda
