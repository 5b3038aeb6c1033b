#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsgda/types.hpp"

namespace dsgda {

struct BoxSet {
    Vec lower;
    Vec upper;

    BoxSet() = default;
    BoxSet(Vec lo, Vec hi);
    static BoxSet cube(std::size_t dim, double lo, double hi);

    std::size_t dim() const { return lower.size(); }
    bool contains(CSpan p, double slack = 0.0) const;
    bool on_boundary(CSpan p) const;
    double diameter() const;
};

Vec project(const BoxSet& box, CSpan p);
void project_inplace(const BoxSet& box, Span p);

// Row-major second-derivative blocks: xx is dim_x*dim_x, xy is dim_x*dim_y,
// yx is dim_y*dim_x, yy is dim_y*dim_y.
struct Hessian {
    Vec xx, xy, yx, yy;
};

using ValueFn = std::function<double(CSpan x, CSpan y)>;
using GradFn = std::function<void(CSpan x, CSpan y, Span out)>;
using HessFn = std::function<Hessian(CSpan x, CSpan y)>;

// Regularity of y -> f(x, y) assumed by the proximal error bound.
enum class DualRegularity { None, KL, Concave };

struct MinimaxProblem {
    std::string name;
    std::size_t dim_x = 1;
    std::size_t dim_y = 1;
    BoxSet X;
    BoxSet Y;
    ValueFn f;  // empty for gradient-field problems
    GradFn grad_x;
    GradFn grad_y;
    HessFn second_derivs;  // optional
    double L_x = 0.0;
    double L_y = 0.0;
    DualRegularity dual_regularity = DualRegularity::None;

    double lambda() const { return L_y / L_x; }
    bool has_value() const { return static_cast<bool>(f); }
    bool has_second_derivs() const { return static_cast<bool>(second_derivs); }

    double value(CSpan x, CSpan y) const;
    Vec gx(CSpan x, CSpan y) const;
    Vec gy(CSpan x, CSpan y) const;

    // Scalar shortcuts for the 1-D case used by the grid oracles.
    double value1(double x, double y) const;
    double gx1(double x, double y) const;
    double gy1(double x, double y) const;

    void require_value(const char* op) const;
    void require_scalar(const char* op) const;
    void check_dims(CSpan x, CSpan y) const;
};

struct SmoothedState {
    Vec x, y, z, v;

    static SmoothedState anchored(Vec x, Vec y);  // z = x, v = y
    bool operator==(const SmoothedState&) const = default;
};

double eval_F(const MinimaxProblem& prob, double r1, double r2, const SmoothedState& s);
Vec grad_F_x(const MinimaxProblem& prob, double r1, double r2, const SmoothedState& s);
Vec grad_F_y(const MinimaxProblem& prob, double r1, double r2, const SmoothedState& s);

// Registry. Accepts plain names and "bilinear_coupled(A)".
MinimaxProblem builtin(const std::string& name);
std::vector<std::string> builtin_names();

// Stationary point quoted for each builtin, when one is known in closed form
// or to high precision.
std::optional<std::pair<Vec, Vec>> known_stationary_point(const std::string& name);

// Max relative error between analytic gradients and central differences at
// `samples` interior points drawn with the given seed. Relative error uses
// |a - b| / max(1, |a|, |b|) per component.
double fd_gradient_check(const MinimaxProblem& prob, int samples, double step, std::uint64_t seed);

// Worst violation of the gradient-Lipschitz moduli over random pairs:
// max over pairs of ||g(u) - g(u')|| - L (||x - x'|| + ||y - y'||), per block.
struct LipschitzReport {
    double worst_x = 0.0;
    double worst_y = 0.0;
};
LipschitzReport empirical_lipschitz(const MinimaxProblem& prob, int pairs, std::uint64_t seed);

}  // namespace dsgda
