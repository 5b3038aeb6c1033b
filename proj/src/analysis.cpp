#include "dsgda/analysis.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dsgda/measures.hpp"

namespace dsgda {

ConstantSet constants(double L_x, double L_y, double r1, double r2, double c, double alpha) {
    if (!(r1 > L_x)) throw ParamError("constants: requires r1 > L_x");
    if (!(r2 > (L_y / (r1 - L_x) + 2) * L_y)) throw ParamError("constants: requires r2 > (L_y/(r1-L_x)+2) L_y");
    if (!(c > 0) || !(alpha > 0)) throw ParamError("constants: requires c > 0 and alpha > 0");

    ConstantSet k;
    k.sigma1 = (L_y + r1 - L_x) / (r1 - L_x);
    k.sigma2 = r1 / (r1 - L_x);
    k.sigma3 = r1 * k.sigma1 / (r2 - L_y) + k.sigma2 / k.sigma1;
    k.sigma4 = (L_x + r2 - L_y) / (r2 - L_y);
    k.sigma5 = r2 / (r2 - L_y);
    k.L_d = L_y * k.sigma1 + L_y + r2;
    k.sigma6 = (2 * c * r1 + 1) / (c * r1 - c * L_x);
    k.sigma7 = (2 * alpha * r2 + 1) / (alpha * r2 - alpha * L_y);
    k.sigma8 = (1 + alpha * k.L_d) / (alpha * (r2 - L_y));
    k.sigma_prime = (2 * alpha * r2 + 1) / (alpha * (r2 - L_y));
    k.L_h = (L_x / (r2 - L_y) + 2) * L_x + r1;
    return k;
}

void KLSpec::validate() const {
    if (!(theta > 0 && theta < 1)) throw ParamError("KL exponent theta must lie in (0, 1)");
    if (!(tau > 0)) throw ParamError("KL modulus tau must be positive");
}

double omega0(double L_x, double L_y, double r1, double r2, double mu, const KLSpec& kl) {
    kl.validate();
    double base = r2 * (1 - mu) / mu + r2 * r2 / (r2 - L_y);
    return 2 / ((r1 - L_x) * kl.tau) * std::pow(base, 1 / kl.theta);
}

double omega1(double L_x, double L_y, double r1, double r2, double mu, double diam_Y) {
    return 4 * r2 * diam_Y / (r1 - L_x) * ((1 - mu) / mu + r2 / (r2 - L_y));
}

double omega2(double L_x, double L_y, double r1, double r2, double beta, const KLSpec& kl) {
    kl.validate();
    double base = r1 * (1 - beta) / beta + r1 * r1 / (r1 - L_x);
    return 2 / ((r2 - L_y) * kl.tau) * std::pow(base, 1 / kl.theta);
}

double omega3(double L_x, double L_y, double r1, double r2, double beta, double diam_X) {
    double sigma2 = r1 / (r1 - L_x);
    return 4 * r1 * diam_X / (r2 - L_y) * ((1 - beta) / beta + sigma2);
}

double dual_error_bound_kl(double L_x, double r1, double r2, const KLSpec& kl) {
    kl.validate();
    return 2 * std::pow(r2, 1 / kl.theta) / (kl.tau * (r1 - L_x));
}

double dual_error_bound_concave(double L_x, double r1, double diam_Y) { return 4 * r1 * diam_Y / (r1 - L_x); }

bool ParamReport::ok() const {
    for (const auto& b : bounds)
        if (!b.ok) return false;
    return true;
}

std::string ParamReport::failures() const {
    std::string s;
    for (const auto& b : bounds)
        if (!b.ok) s += (s.empty() ? "" : ", ") + b.name;
    return s;
}

namespace {

void add_upper(ParamReport& r, std::string name, double value, double limit) {
    r.bounds.push_back({std::move(name), value, limit, value > 0 && value <= limit});
}

void add_lower(ParamReport& r, std::string name, double value, double limit) {
    r.bounds.push_back({std::move(name), value, limit, value >= limit});
}

}  // namespace

ParamReport check_descent_params(double L, double lambda, const AlgoParams& p) {
    ParamReport r;
    const double lL = lambda * L;
    add_lower(r, "r1 >= 2L", p.r1, 2 * L);
    add_lower(r, "r2 >= 2 lambda L", p.r2, 2 * lL);
    add_upper(r, "c <= 4/(3(L+r1))", p.c, 4 / (3 * (L + p.r1)));
    add_upper(r, "c <= 1/(6 lambda L)", p.c, 1 / (6 * lL));
    const bool c_ok = r.bounds[2].ok && r.bounds[3].ok && p.r1 > L;
    if (c_ok) {
        double sigma = (2 * p.c * p.r1 + 1) / (p.c * (p.r1 - L));
        add_upper(r, "alpha <= 2/(3 lambda L sigma^2)", p.alpha, 2 / (3 * lL * sigma * sigma));
    } else {
        r.bounds.push_back({"alpha <= 2/(3 lambda L sigma^2) (sigma needs admissible c)", p.alpha, 0.0, false});
    }
    double L_d = (lL / (p.r1 - L) + 2) * lL + p.r2;
    add_upper(r, "alpha <= 1/(6 L_d)", p.alpha, p.r1 > L ? 1 / (6 * L_d) : 0.0);
    add_upper(r, "alpha <= 1/(5 lambda sqrt(lambda+5) L)", p.alpha, 1 / (5 * lambda * std::sqrt(lambda + 5) * L));
    add_upper(r, "beta <= 24r1/(360r1+5r1^2 lambda+(2 lambda L+5r1)^2)", p.beta,
              24 * p.r1 / (360 * p.r1 + 5 * p.r1 * p.r1 * lambda + std::pow(2 * lL + 5 * p.r1, 2)));
    add_upper(r, "beta <= alpha lambda^2 L^2/(384 r1 (lambda+5)(lambda+1)^2)", p.beta,
              p.alpha * lL * lL / (384 * p.r1 * (lambda + 5) * (lambda + 1) * (lambda + 1)));
    add_upper(r, "mu <= 2(lambda+5)/(2(lambda+5)+lambda^2 L^2)", p.mu,
              2 * (lambda + 5) / (2 * (lambda + 5) + lL * lL));
    add_upper(r, "mu <= alpha lambda^2 L^2/(64 r2 (lambda+5))", p.mu, p.alpha * lL * lL / (64 * p.r2 * (lambda + 5)));
    return r;
}

ParamReport check_descent_params_dual(double L, double lambda, const AlgoParams& p) {
    ParamReport r;
    const double lL = lambda * L;
    add_lower(r, "r1 >= 2L", p.r1, 2 * L);
    add_lower(r, "r2 >= 2 lambda L", p.r2, 2 * lL);
    add_upper(r, "alpha <= 4/(3(lambda L+r2))", p.alpha, 4 / (3 * (lL + p.r2)));
    add_upper(r, "alpha <= 1/(6L)", p.alpha, 1 / (6 * L));
    const bool a_ok = r.bounds[2].ok && r.bounds[3].ok && p.r2 > lL;
    if (a_ok) {
        double sp = (2 * p.alpha * p.r2 + 1) / (p.alpha * (p.r2 - lL));
        add_upper(r, "c <= 2/(3 L sigma'^2)", p.c, 2 / (3 * L * sp * sp));
    } else {
        r.bounds.push_back({"c <= 2/(3 L sigma'^2) (sigma' needs admissible alpha)", p.c, 0.0, false});
    }
    double L_h = (L / (p.r2 - lL) + 2) * L + p.r1;
    add_upper(r, "c <= 1/(6 L_h)", p.c, p.r2 > lL ? 1 / (6 * L_h) : 0.0);
    add_upper(r, "c <= 1/(5 sqrt(lambda+5) L)", p.c, 1 / (5 * std::sqrt(lambda + 5) * L));
    add_upper(r, "mu <= 24r2/(360r2+5r2^2 lambda+(2L+5r2)^2)", p.mu,
              24 * p.r2 / (360 * p.r2 + 5 * p.r2 * p.r2 * lambda + std::pow(2 * L + 5 * p.r2, 2)));
    add_upper(r, "mu <= c L^2/(384 r2 (lambda+5)(lambda+1)^2)", p.mu,
              p.c * L * L / (384 * p.r2 * (lambda + 5) * (lambda + 1) * (lambda + 1)));
    add_upper(r, "beta <= 2(lambda+5)/(2(lambda+5)+L^2)", p.beta, 2 * (lambda + 5) / (2 * (lambda + 5) + L * L));
    add_upper(r, "beta <= c L^2/(64 r1 (lambda+5))", p.beta, p.c * L * L / (64 * p.r1 * (lambda + 5)));
    return r;
}

AlgoParams universal_stepsizes(double L, double r, std::optional<double> beta_cap) {
    if (!(L > 0)) throw ParamError("universal parameters need L > 0");
    if (!(r > L)) throw ParamError("universal parameters need r > L");
    double L_d = (L / (r - L) + 2) * L + r;
    double c = std::min({4 / (3 * (L + r)), 1 / (6 * L), 1 / (6 * L_d), 1 / (5 * std::sqrt(6.0) * L)});
    double b = std::min({24 * r / (360 * r + 5 * r * r + std::pow(2 * L + 5 * r, 2)), c * L * L / (9216 * r),
                         12 / (12 + L * L), c * L * L / (384 * r)});
    if (beta_cap) b = std::min(b, *beta_cap);
    AlgoParams p;
    p.c = p.alpha = c;
    p.beta = p.mu = b;
    p.r1 = p.r2 = r;
    return p;
}

double universal_c_lower_bound(double L, double r) { return 8 * L / (3 * (r - L) * (r - L)); }

AlgoParams universal_params(double L, std::optional<double> r, std::optional<double> beta_cap) {
    if (!(L > 0)) throw ParamError("universal_params: L must be positive");
    auto admissible = [&](double rr, std::string* why) {
        AlgoParams p = universal_stepsizes(L, rr, beta_cap);
        if (!(universal_c_lower_bound(L, rr) < p.c)) {
            if (why) *why = "c = " + format_double(p.c) + " does not exceed 8L/(3(r-L)^2) = " +
                            format_double(universal_c_lower_bound(L, rr)) + "; increase r";
            return false;
        }
        ParamReport rep = check_descent_params(L, 1.0, p);
        if (!rep.ok()) {
            if (why) *why = "descent hypotheses fail: " + rep.failures();
            return false;
        }
        return true;
    };
    if (r) {
        std::string why;
        if (!admissible(*r, &why)) throw ParamError("universal_params: " + why);
        return universal_stepsizes(L, *r, beta_cap);
    }
    for (double t2 = 2.0; t2 <= 1000.0; t2 += 0.25) {
        double rr = t2 * L;
        if (rr > L && admissible(rr, nullptr)) return universal_stepsizes(L, rr, beta_cap);
    }
    throw ParamError("universal_params: no admissible r up to 1000 L");
}

std::pair<double, double> universal_point(double L, const AlgoParams& p) {
    return {1 / (p.c * p.r1), p.r1 / L};
}

std::optional<std::array<double, 4>> descent_coefficients(double L, double beta, double mu, double t1, double t2) {
    if (!(t1 > 0) || t2 < 2) return std::nullopt;
    const double r = t2 * L, c = 1 / (t1 * r), alpha = c;
    const double r1 = r, r2 = r, Lx = L, Ly = L;
    if (!(r1 > Lx) || !(r2 > (Ly / (r1 - Lx) + 2) * Ly)) return std::nullopt;
    ConstantSet k = constants(Lx, Ly, r1, r2, c, alpha);
    const double kappa = 2 * beta;
    const double s1 = 1 / c - (Lx + r1) / 2 - Ly;
    const double s2 = 1 / alpha + (r2 - Ly) / 2 - k.L_d - Ly * k.sigma6 * k.sigma6;
    const double s3 = r1 * ((2 - beta) / (2 * beta) - 2 * k.sigma2 - 1 / kappa);
    const double m = mu * (2 - mu) * r2;
    const double ks = r1 * kappa * k.sigma1 * k.sigma1;
    std::array<double, 4> out;
    out[0] = s1 - (12 * ks + s2 + 2 * m) * Ly * Ly * alpha * alpha * k.sigma6 * k.sigma6;
    out[1] = s2 / 2 - (12 * ks + 2 * m) * (1 + k.sigma8) * (1 + k.sigma8);
    out[2] = s3 - (m + 6 * ks) * k.sigma3 * k.sigma3;
    out[3] = (2 - mu) * r2 / (4 * mu) - 6 * ks * k.sigma5 * k.sigma5;
    return out;
}

bool feasible_point(double L, double beta, double mu, double t1, double t2) {
    auto c = descent_coefficients(L, beta, mu, t1, t2);
    if (!c) return false;
    for (double v : *c)
        if (!(v > 0)) return false;
    return true;
}

std::size_t FeasibilityMatrix::count() const {
    std::size_t n = 0;
    for (auto f : feasible) n += f;
    return n;
}

FeasibilityMatrix feasibility_scan(double L, double beta, double mu, const std::vector<double>& t1_values,
                                   const std::vector<double>& t2_values, bool reverse_order) {
    FeasibilityMatrix m;
    m.t1 = t1_values;
    m.t2 = t2_values;
    const std::size_t n1 = t1_values.size(), n2 = t2_values.size();
    m.feasible.assign(n1 * n2, 0);
    for (std::size_t k = 0; k < n1 * n2; ++k) {
        std::size_t idx = reverse_order ? n1 * n2 - 1 - k : k;
        std::size_t i = idx / n2, j = idx % n2;
        m.feasible[idx] = feasible_point(L, beta, mu, t1_values[i], t2_values[j]) ? 1 : 0;
    }
    return m;
}

std::vector<double> integer_range(int lo, int hi) {
    std::vector<double> v;
    for (int i = lo; i <= hi; ++i) v.push_back(i);
    return v;
}

double weak_mvi_rho_at(const MinimaxProblem& prob, double ux, double uy, double x, double y) {
    prob.require_scalar("weak_mvi_rho");
    double gx = prob.gx1(x, y), gy = -prob.gy1(x, y);
    double n2 = gx * gx + gy * gy;
    if (std::sqrt(n2) < 1e-12) return std::numeric_limits<double>::quiet_NaN();
    return (gx * (x - ux) + gy * (y - uy)) / n2;
}

RhoScan weak_mvi_rho(const MinimaxProblem& prob, double ux, double uy, int resolution, bool keep_samples) {
    prob.require_scalar("weak_mvi_rho");
    if (resolution < 3) throw ParamError("weak_mvi_rho: resolution must be at least 3");
    const double x0 = prob.X.lower[0], x1 = prob.X.upper[0], y0 = prob.Y.lower[0], y1 = prob.Y.upper[0];
    RhoScan out;
    out.threshold = -1 / (2 * std::max(prob.L_x, prob.L_y));
    out.min_rho = std::numeric_limits<double>::infinity();
    const double hx = (x1 - x0) / (resolution - 1), hy = (y1 - y0) / (resolution - 1);
    auto consider = [&](double x, double y) {
        double r = weak_mvi_rho_at(prob, ux, uy, x, y);
        if (std::isnan(r)) return r;
        if (r < out.min_rho) {
            out.min_rho = r;
            out.x = x;
            out.y = y;
        }
        return r;
    };
    for (int i = 0; i < resolution; ++i) {
        double x = i == resolution - 1 ? x1 : x0 + i * hx;
        for (int j = 0; j < resolution; ++j) {
            double y = j == resolution - 1 ? y1 : y0 + j * hy;
            double r = consider(x, y);
            if (keep_samples) out.samples.push_back({x, y, r});
        }
    }
    // one x10 refinement around the incumbent
    double cx = out.x, cy = out.y;
    for (int i = 0; i <= 20; ++i) {
        double x = std::clamp(cx - hx + i * hx / 10, x0, x1);
        for (int j = 0; j <= 20; ++j) consider(x, std::clamp(cy - hy + j * hy / 10, y0, y1));
    }
    return out;
}

std::pair<double, double> interaction_dominance(const MinimaxProblem& prob, double x, double y, double eta) {
    prob.require_scalar("interaction_dominance");
    if (!prob.has_second_derivs())
        throw UnsupportedProblem("interaction_dominance: '" + prob.name + "' has no second derivatives");
    Hessian h = prob.second_derivs(CSpan(&x, 1), CSpan(&y, 1));
    double fxx = h.xx[0], fxy = h.xy[0], fyx = h.yx[0], fyy = h.yy[0];
    double dx = eta - fyy, dy = eta + fxx;
    if (dx == 0.0 || dy == 0.0) throw ParamError("interaction_dominance: singular inner term at this eta");
    return {fxx + fxy * fyx / dx, -fyy + fyx * fxy / dy};
}

KLScan kl_ratio_scan(const MinimaxProblem& prob, KLSide side, double theta, int resolution, const GridSpec& inner) {
    prob.require_value("kl_ratio_scan");
    prob.require_scalar("kl_ratio_scan");
    inner.validate();
    if (!(theta > 0 && theta < 1)) throw ParamError("kl_ratio_scan: theta must lie in (0, 1)");
    const double x0 = prob.X.lower[0], x1 = prob.X.upper[0], y0 = prob.Y.lower[0], y1 = prob.Y.upper[0];
    const double hx = (x1 - x0) / (resolution - 1), hy = (y1 - y0) / (resolution - 1);
    KLScan out;
    out.tau = std::numeric_limits<double>::infinity();
    auto xs = [&](int i) { return i == resolution - 1 ? x1 : x0 + i * hx; };
    auto ys = [&](int j) { return j == resolution - 1 ? y1 : y0 + j * hy; };
    for (int i = 0; i < resolution; ++i) {
        // Dual side: outer loop over x, gap in y. Primal side: outer over y, gap in x.
        double fixed = side == KLSide::Dual ? xs(i) : ys(i);
        double best = side == KLSide::Dual
                          ? grid_argmax([&](double y) { return prob.value1(fixed, y); }, y0, y1, inner).value
                          : grid_argmin([&](double x) { return prob.value1(x, fixed); }, x0, x1, inner).value;
        for (int j = 0; j < resolution; ++j) {
            double x = side == KLSide::Dual ? fixed : xs(j);
            double y = side == KLSide::Dual ? ys(j) : fixed;
            double f = prob.value1(x, y);
            double gap = side == KLSide::Dual ? best - f : f - best;
            if (gap <= 1e-12 * (1 + std::abs(best))) {
                ++out.excluded;
                continue;
            }
            auto gs = gs_residual(prob, CSpan(&x, 1), CSpan(&y, 1));
            double dist = side == KLSide::Dual ? gs.second : gs.first;
            double ratio = dist / std::pow(gap, theta);
            if (ratio < out.tau) {
                out.tau = ratio;
                out.x = x;
                out.y = y;
            }
        }
    }
    return out;
}

}  // namespace dsgda
