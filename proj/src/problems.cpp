#include "dsgda/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace dsgda {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

BoxSet::BoxSet(Vec lo, Vec hi) : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size())
        throw DimensionError("box bounds have different lengths");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] <= upper[i]))
            throw ParamError("box lower bound exceeds upper bound at coordinate " + std::to_string(i));
}

BoxSet BoxSet::cube(std::size_t dim, double lo, double hi) {
    return BoxSet(Vec(dim, lo), Vec(dim, hi));
}

bool BoxSet::contains(CSpan p, double slack) const {
    if (p.size() != dim()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (!(p[i] >= lower[i] - slack && p[i] <= upper[i] + slack)) return false;
    return true;
}

bool BoxSet::on_boundary(CSpan p) const {
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] <= lower[i] || p[i] >= upper[i]) return true;
    return false;
}

double BoxSet::diameter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += (upper[i] - lower[i]) * (upper[i] - lower[i]);
    return std::sqrt(s);
}

void project_inplace(const BoxSet& box, Span p) {
    if (p.size() != box.dim())
        throw DimensionError("projection: point has length " + std::to_string(p.size()) +
                             ", box has dimension " + std::to_string(box.dim()));
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], box.lower[i], box.upper[i]);
}

Vec project(const BoxSet& box, CSpan p) {
    Vec out(p.begin(), p.end());
    project_inplace(box, out);
    return out;
}

void MinimaxProblem::check_dims(CSpan x, CSpan y) const {
    if (x.size() != dim_x || y.size() != dim_y)
        throw DimensionError(name + ": expected (" + std::to_string(dim_x) + ", " + std::to_string(dim_y) +
                             ") coordinates, got (" + std::to_string(x.size()) + ", " +
                             std::to_string(y.size()) + ")");
}

void MinimaxProblem::require_value(const char* op) const {
    if (!f) throw UnsupportedProblem(std::string(op) + ": problem '" + name + "' has no payoff values");
}

void MinimaxProblem::require_scalar(const char* op) const {
    if (dim_x != 1 || dim_y != 1)
        throw UnsupportedProblem(std::string(op) + ": only 1-D blocks are supported, '" + name + "' is " +
                                 std::to_string(dim_x) + "x" + std::to_string(dim_y));
}

double MinimaxProblem::value(CSpan x, CSpan y) const {
    require_value("value");
    check_dims(x, y);
    return f(x, y);
}

Vec MinimaxProblem::gx(CSpan x, CSpan y) const {
    check_dims(x, y);
    Vec g(dim_x);
    grad_x(x, y, g);
    return g;
}

Vec MinimaxProblem::gy(CSpan x, CSpan y) const {
    check_dims(x, y);
    Vec g(dim_y);
    grad_y(x, y, g);
    return g;
}

double MinimaxProblem::value1(double x, double y) const { return f(CSpan(&x, 1), CSpan(&y, 1)); }

double MinimaxProblem::gx1(double x, double y) const {
    double g = 0.0;
    grad_x(CSpan(&x, 1), CSpan(&y, 1), Span(&g, 1));
    return g;
}

double MinimaxProblem::gy1(double x, double y) const {
    double g = 0.0;
    grad_y(CSpan(&x, 1), CSpan(&y, 1), Span(&g, 1));
    return g;
}

SmoothedState SmoothedState::anchored(Vec x, Vec y) {
    SmoothedState s;
    s.z = x;
    s.v = y;
    s.x = std::move(x);
    s.y = std::move(y);
    return s;
}

namespace {

void check_state(const MinimaxProblem& prob, const SmoothedState& s) {
    prob.check_dims(s.x, s.y);
    if (s.z.size() != prob.dim_x || s.v.size() != prob.dim_y)
        throw DimensionError(prob.name + ": anchor dimensions do not match the problem");
}

double sqdist(CSpan a, CSpan b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

}  // namespace

double eval_F(const MinimaxProblem& prob, double r1, double r2, const SmoothedState& s) {
    check_state(prob, s);
    double val = prob.value(s.x, s.y);
    // Skip the quadratic terms when they vanish so that x = z, y = v gives f bit for bit.
    double px = sqdist(s.x, s.z);
    double py = sqdist(s.y, s.v);
    if (px != 0.0) val += 0.5 * r1 * px;
    if (py != 0.0) val -= 0.5 * r2 * py;
    return val;
}

Vec grad_F_x(const MinimaxProblem& prob, double r1, double, const SmoothedState& s) {
    check_state(prob, s);
    Vec g = prob.gx(s.x, s.y);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += r1 * (s.x[i] - s.z[i]);
    return g;
}

Vec grad_F_y(const MinimaxProblem& prob, double, double r2, const SmoothedState& s) {
    check_state(prob, s);
    Vec g = prob.gy(s.x, s.y);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] -= r2 * (s.y[i] - s.v[i]);
    return g;
}

// ---------------------------------------------------------------------------
// Builtins. All are scalar in x and y; the helpers below lift scalar kernels
// into the span-based interface.

namespace {

struct Scalar {
    double (*f)(double, double, double);
    double (*gx)(double, double, double);
    double (*gy)(double, double, double);
    void (*h)(double, double, double, double*);  // fxx, fxy, fyx, fyy
};

MinimaxProblem lift(std::string name, double box, double Lx, double Ly, Scalar k, double param = 0.0,
                    bool has_f = true) {
    MinimaxProblem p;
    p.name = std::move(name);
    p.dim_x = p.dim_y = 1;
    p.X = BoxSet::cube(1, -box, box);
    p.Y = BoxSet::cube(1, -box, box);
    p.L_x = Lx;
    p.L_y = Ly;
    if (has_f) p.f = [k, param](CSpan x, CSpan y) { return k.f(x[0], y[0], param); };
    p.grad_x = [k, param](CSpan x, CSpan y, Span out) { out[0] = k.gx(x[0], y[0], param); };
    p.grad_y = [k, param](CSpan x, CSpan y, Span out) { out[0] = k.gy(x[0], y[0], param); };
    p.second_derivs = [k, param](CSpan x, CSpan y) {
        double h[4];
        k.h(x[0], y[0], param, h);
        return Hessian{{h[0]}, {h[1]}, {h[2]}, {h[3]}};
    };
    return p;
}

// forsaken
double phi(double z) { return z * z / 4 - std::pow(z, 4) / 2 + std::pow(z, 6) / 6; }
double dphi(double z) { return z / 2 - 2 * z * z * z + std::pow(z, 5); }
double ddphi(double z) { return 0.5 - 6 * z * z + 5 * std::pow(z, 4); }

const Scalar kForsaken{
    [](double x, double y, double) { return x * (y - 0.45) + phi(x) - phi(y); },
    [](double x, double y, double) { return (y - 0.45) + dphi(x); },
    [](double x, double y, double) { return x - dphi(y); },
    [](double x, double y, double, double* h) {
        h[0] = ddphi(x);
        h[1] = h[2] = 1.0;
        h[3] = -ddphi(y);
    }};

// bilinearly coupled, g(z) = (z+1)(z-1)(z+3)(z-3) = (z^2-1)(z^2-9)
double quartic(double z) { return (z * z - 1) * (z * z - 9); }
double dquartic(double z) { return 4 * z * z * z - 20 * z; }
double ddquartic(double z) { return 12 * z * z - 20; }

const Scalar kBilinear{
    [](double x, double y, double A) { return quartic(x) + A * x * y - quartic(y); },
    [](double x, double y, double A) { return dquartic(x) + A * y; },
    [](double x, double y, double A) { return A * x - dquartic(y); },
    [](double x, double y, double A, double* h) {
        h[0] = ddquartic(x);
        h[1] = h[2] = A;
        h[3] = -ddquartic(y);
    }};

// sixth order: f = P * E with P = 4x^2 - w^2 - 0.1y^4, w = y - 3x + 0.05x^3,
// E = exp(-0.01(x^2+y^2)).
struct SixthParts {
    double P, Px, Py, Pxx, Pxy, Pyy, E;
};

SixthParts sixth_parts(double x, double y) {
    double w = y - 3 * x + 0.05 * x * x * x;
    double wx = -3 + 0.15 * x * x;
    double wxx = 0.3 * x;
    SixthParts s;
    s.P = 4 * x * x - w * w - 0.1 * std::pow(y, 4);
    s.Px = 8 * x - 2 * w * wx;
    s.Py = -2 * w - 0.4 * y * y * y;
    s.Pxx = 8 - 2 * wx * wx - 2 * w * wxx;
    s.Pxy = -2 * wx;
    s.Pyy = -2 - 1.2 * y * y;
    s.E = std::exp(-0.01 * (x * x + y * y));
    return s;
}

const Scalar kSixth{
    [](double x, double y, double) {
        auto s = sixth_parts(x, y);
        return s.P * s.E;
    },
    [](double x, double y, double) {
        auto s = sixth_parts(x, y);
        return s.E * (s.Px - 0.02 * x * s.P);
    },
    [](double x, double y, double) {
        auto s = sixth_parts(x, y);
        return s.E * (s.Py - 0.02 * y * s.P);
    },
    [](double x, double y, double, double* h) {
        auto s = sixth_parts(x, y);
        h[0] = s.E * (s.Pxx - 0.02 * s.P - 0.04 * x * s.Px + 0.0004 * x * x * s.P);
        h[1] = s.E * (s.Pxy - 0.02 * x * s.Py) - 0.02 * y * s.E * (s.Px - 0.02 * x * s.P);
        h[2] = h[1];
        h[3] = s.E * (s.Pyy - 0.02 * s.P - 0.04 * y * s.Py + 0.0004 * y * y * s.P);
    }};

// polar game: gradient field only. Phi(x, y) = x(r^2-1)(16r^2-9).
double polar_phi(double x, double y) {
    double r2 = x * x + y * y;
    return x * (r2 - 1) * (16 * r2 - 9);
}
double polar_phi_1(double x, double y) {
    double r2 = x * x + y * y;
    return (r2 - 1) * (16 * r2 - 9) + 2 * x * x * (16 * r2 - 9) + 32 * x * x * (r2 - 1);
}
double polar_phi_2(double x, double y) {
    double r2 = x * x + y * y;
    return x * (2 * y * (16 * r2 - 9) + 32 * y * (r2 - 1));
}

const Scalar kPolar{
    nullptr,
    [](double x, double y, double) { return polar_phi(x, y) - y; },
    [](double x, double y, double) { return -polar_phi(y, x) - x; },
    [](double x, double y, double, double* h) {
        h[0] = polar_phi_1(x, y);
        h[1] = polar_phi_2(x, y) - 1;
        h[2] = -polar_phi_2(y, x) - 1;
        h[3] = -polar_phi_1(y, x);
    }};

double sq(double a) { return a * a; }

const Scalar kKL{
    [](double x, double y, double) {
        return x * x + 3 * sq(std::sin(x)) * sq(std::sin(y)) - 4 * y * y - 10 * sq(std::sin(y));
    },
    [](double x, double y, double) { return 2 * x + 3 * std::sin(2 * x) * sq(std::sin(y)); },
    [](double x, double y, double) {
        return 3 * sq(std::sin(x)) * std::sin(2 * y) - 8 * y - 10 * std::sin(2 * y);
    },
    [](double x, double y, double, double* h) {
        h[0] = 2 + 6 * std::cos(2 * x) * sq(std::sin(y));
        h[1] = h[2] = 3 * std::sin(2 * x) * std::sin(2 * y);
        h[3] = 6 * sq(std::sin(x)) * std::cos(2 * y) - 8 - 20 * std::cos(2 * y);
    }};

const Scalar kConvexNonconcave{
    [](double x, double y, double) {
        return 2 * x * x - y * y + 4 * x * y + 4 * y * y * y / 3 - std::pow(y, 4) / 4;
    },
    [](double x, double y, double) { return 4 * x + 4 * y; },
    [](double x, double y, double) { return -2 * y + 4 * x + 4 * y * y - y * y * y; },
    [](double, double y, double, double* h) {
        h[0] = 4;
        h[1] = h[2] = 4;
        h[3] = -2 + 8 * y - 3 * y * y;
    }};

const Scalar kWrongSmoothing{
    [](double x, double y, double) {
        return 2 * x * x - y * y + 4 * x * std::pow(y, 6) + 4 * y * y * y / 3 - std::pow(y, 4) / 4;
    },
    [](double x, double y, double) { return 4 * x + 4 * std::pow(y, 6); },
    [](double x, double y, double) {
        return -2 * y + 24 * x * std::pow(y, 5) + 4 * y * y - y * y * y;
    },
    [](double x, double y, double, double* h) {
        h[0] = 4;
        h[1] = h[2] = 24 * std::pow(y, 5);
        h[3] = -2 + 120 * x * std::pow(y, 4) + 8 * y - 3 * y * y;
    }};

const Scalar kToy{
    [](double x, double y, double) { return x * y; },
    [](double, double y, double) { return y; },
    [](double x, double, double) { return x; },
    [](double, double, double, double* h) {
        h[0] = h[3] = 0.0;
        h[1] = h[2] = 1.0;
    }};

// Gradient-Lipschitz moduli, max of |second derivatives| over the box on a
// 1e-3 grid, rounded up where not exact.
constexpr double kForsakenL = 12.3125;            // |phi''(1.5)|
constexpr double kBilinearL = 172.0;              // |g''(4)|
constexpr double kSixthLx = 10.0;                 // |f_xx(0, 0)|
constexpr double kSixthLy = 6.5971;               // corner (2, 2)
constexpr double kPolarL = 101.0;                 // corner (1, 1)
const double kKLLx = 2 + 6 * sq(std::sin(1.0));   // f_xx(0, 1)
constexpr double kKLLy = 28.0;                    // |f_yy(0, 0)|
constexpr double kCncLx = 4.0;
constexpr double kCncLy = 13.0;                   // |f_yy(x, -1)|
constexpr double kWrongLx = 24.0;                 // |f_xy(x, 1)|
constexpr double kWrongLy = 133.0;                // |f_yy(-1, -1)|

bool parse_bilinear(const std::string& name, double& A) {
    const std::string head = "bilinear_coupled(";
    if (name.rfind(head, 0) != 0 || name.back() != ')') return false;
    std::string arg = name.substr(head.size(), name.size() - head.size() - 1);
    std::istringstream in(arg);
    in >> A;
    if (in.fail() || !in.eof() || !std::isfinite(A)) throw UnknownProblem("bad coupling in '" + name + "'");
    return true;
}

std::string format_coupling(double A) {
    std::ostringstream os;
    os.precision(17);
    os << A;
    return os.str();
}

}  // namespace

std::vector<std::string> builtin_names() {
    return {"forsaken",     "bilinear_coupled(A)", "sixth_order",     "polar_game",
            "kl_nonconcave", "convex_nonconcave",   "wrong_smoothing", "toy_bilinear"};
}

MinimaxProblem builtin(const std::string& name) {
    double A = 0.0;
    if (parse_bilinear(name, A)) {
        double L = std::max(kBilinearL, std::abs(A));
        return lift("bilinear_coupled(" + format_coupling(A) + ")", 4.0, L, L, kBilinear, A);
    }
    if (name == "forsaken") return lift(name, 1.5, kForsakenL, kForsakenL, kForsaken);
    if (name == "sixth_order") return lift(name, 2.0, kSixthLx, kSixthLy, kSixth);
    if (name == "polar_game") return lift(name, 1.0, kPolarL, kPolarL, kPolar, 0.0, false);
    if (name == "kl_nonconcave") {
        auto p = lift(name, 1.0, kKLLx, kKLLy, kKL);
        p.dual_regularity = DualRegularity::KL;
        return p;
    }
    if (name == "convex_nonconcave") return lift(name, 1.0, kCncLx, kCncLy, kConvexNonconcave);
    if (name == "wrong_smoothing") return lift(name, 1.0, kWrongLx, kWrongLy, kWrongSmoothing);
    if (name == "toy_bilinear") {
        auto p = lift(name, 1.0, 1.0, 1.0, kToy);
        p.dual_regularity = DualRegularity::Concave;
        return p;
    }

    std::string msg = "unknown problem '" + name + "'; available:";
    for (const auto& n : builtin_names()) msg += " " + n;
    throw UnknownProblem(msg);
}

std::optional<std::pair<Vec, Vec>> known_stationary_point(const std::string& name) {
    double A = 0.0;
    if (parse_bilinear(name, A)) return std::pair<Vec, Vec>{{0.0}, {0.0}};
    if (name == "forsaken")
        return std::pair<Vec, Vec>{{0.078026668738460073}, {0.41193385136581985}};
    if (name == "sixth_order" || name == "polar_game" || name == "kl_nonconcave" ||
        name == "convex_nonconcave" || name == "wrong_smoothing" || name == "toy_bilinear")
        return std::pair<Vec, Vec>{{0.0}, {0.0}};
    return std::nullopt;
}

namespace {

Vec sample_interior(const BoxSet& box, std::mt19937_64& rng, double margin) {
    Vec p(box.dim());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double w = box.upper[i] - box.lower[i];
        std::uniform_real_distribution<double> d(box.lower[i] + margin * w, box.upper[i] - margin * w);
        p[i] = d(rng);
    }
    return p;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

double fd_gradient_check(const MinimaxProblem& prob, int samples, double step, std::uint64_t seed) {
    prob.require_value("fd_gradient_check");
    if (!(step > 0)) throw ParamError("fd_gradient_check: step must be positive");
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        Vec x = sample_interior(prob.X, rng, 0.01);
        Vec y = sample_interior(prob.Y, rng, 0.01);
        Vec gx = prob.gx(x, y);
        Vec gy = prob.gy(x, y);
        for (std::size_t i = 0; i < x.size(); ++i) {
            Vec xp = x, xm = x;
            xp[i] += step;
            xm[i] -= step;
            double fd = (prob.f(xp, y) - prob.f(xm, y)) / (2 * step);
            worst = std::max(worst, rel_err(fd, gx[i]));
        }
        for (std::size_t i = 0; i < y.size(); ++i) {
            Vec yp = y, ym = y;
            yp[i] += step;
            ym[i] -= step;
            double fd = (prob.f(x, yp) - prob.f(x, ym)) / (2 * step);
            worst = std::max(worst, rel_err(fd, gy[i]));
        }
    }
    return worst;
}

LipschitzReport empirical_lipschitz(const MinimaxProblem& prob, int pairs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    LipschitzReport rep{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    auto norm_diff = [](const Vec& a, const Vec& b) { return std::sqrt(sqdist(a, b)); };
    for (int k = 0; k < pairs; ++k) {
        Vec x = sample_interior(prob.X, rng, 0.0), y = sample_interior(prob.Y, rng, 0.0);
        Vec x2 = sample_interior(prob.X, rng, 0.0), y2 = sample_interior(prob.Y, rng, 0.0);
        double dist = norm_diff(x, x2) + norm_diff(y, y2);
        rep.worst_x = std::max(rep.worst_x, norm_diff(prob.gx(x, y), prob.gx(x2, y2)) - prob.L_x * dist);
        rep.worst_y = std::max(rep.worst_y, norm_diff(prob.gy(x, y), prob.gy(x2, y2)) - prob.L_y * dist);
    }
    return rep;
}

}  // namespace dsgda
