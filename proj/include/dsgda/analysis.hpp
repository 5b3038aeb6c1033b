#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "dsgda/oracle.hpp"
#include "dsgda/problems.hpp"
#include "dsgda/solvers.hpp"

namespace dsgda {

struct ConstantSet {
    double sigma1 = 0, sigma2 = 0, sigma3 = 0, sigma4 = 0, sigma5 = 0, sigma6 = 0, sigma7 = 0, sigma8 = 0;
    double L_d = 0;
    double sigma_prime = 0;  // dual side, with L = L_x and lambda L = L_y
    double L_h = 0;
};

// Requires r1 > L_x, r2 > (L_y / (r1 - L_x) + 2) L_y and c, alpha > 0;
// throws ParamError naming the failing inequality otherwise.
ConstantSet constants(double L_x, double L_y, double r1, double r2, double c, double alpha);

enum class KLSide { Dual, Primal };

struct KLSpec {
    double theta = 0.5;
    double tau = 1.0;
    KLSide side = KLSide::Dual;
    void validate() const;
};

// Proximal error bound coefficients, L = L_x, lambda L = L_y.
double omega0(double L_x, double L_y, double r1, double r2, double mu, const KLSpec& kl);
double omega1(double L_x, double L_y, double r1, double r2, double mu, double diam_Y);
// Mirrored coefficients for the primal-side regularity case.
double omega2(double L_x, double L_y, double r1, double r2, double beta, const KLSpec& kl);
double omega3(double L_x, double L_y, double r1, double r2, double beta, double diam_X);

// Dual error bound ||x*(z) - x(z,v)||^2 <= w ||v - y(z,v)||^(1/theta):
// w = 2 r2^(1/theta) / (tau (r1 - L_x)) in the KL case,
// w = 4 r1 diam(Y) / (r1 - L_x) with exponent 1 in the concave case.
double dual_error_bound_kl(double L_x, double r1, double r2, const KLSpec& kl);
double dual_error_bound_concave(double L_x, double r1, double diam_Y);

struct BoundCheck {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool ok = false;
};

struct ParamReport {
    std::vector<BoundCheck> bounds;
    bool ok() const;
    std::string failures() const;  // comma-separated names of the failing bounds
};

// Hypotheses of the primal basic descent estimate. sigma in the alpha bound
// is evaluated with the candidate c once the c bounds hold; if they fail the
// sigma bound is reported as failed.
ParamReport check_descent_params(double L, double lambda, const AlgoParams& p);
// Mirrored hypotheses of the dual-side estimate.
ParamReport check_descent_params_dual(double L, double lambda, const AlgoParams& p);

// c = alpha and beta = mu for r1 = r2 = r, lambda = 1, without validation.
// beta_cap, when set, is an extra upper bound on beta = mu.
AlgoParams universal_stepsizes(double L, double r, std::optional<double> beta_cap = std::nullopt);

// Lower bound 8L / (3 (r - L)^2) that c must exceed.
double universal_c_lower_bound(double L, double r);

// With r given: universal_stepsizes(L, r), throwing ParamError when c does
// not exceed the lower bound or check_descent_params fails. Without r: the
// smallest r = t2 L with t2 in {2, 2.25, 2.5, ...} for which both hold.
AlgoParams universal_params(double L, std::optional<double> r = std::nullopt,
                            std::optional<double> beta_cap = std::nullopt);

// (t1, t2) with r = t2 L and c = 1 / (t1 r).
std::pair<double, double> universal_point(double L, const AlgoParams& p);

// The four leading coefficients of the basic descent estimate for lambda = 1,
// r1 = r2 = t2 L, c = alpha = 1 / (t1 r), kappa = 2 beta. Empty when the
// point violates t1 > 0, t2 >= 2 or the preconditions of constants().
std::optional<std::array<double, 4>> descent_coefficients(double L, double beta, double mu, double t1, double t2);
bool feasible_point(double L, double beta, double mu, double t1, double t2);

struct FeasibilityMatrix {
    std::vector<double> t1;  // rows
    std::vector<double> t2;  // columns
    std::vector<unsigned char> feasible;  // row-major
    bool at(std::size_t i, std::size_t j) const { return feasible[i * t2.size() + j] != 0; }
    std::size_t count() const;
    bool operator==(const FeasibilityMatrix&) const = default;
};

FeasibilityMatrix feasibility_scan(double L, double beta, double mu, const std::vector<double>& t1_values,
                                   const std::vector<double>& t2_values, bool reverse_order = false);
// lo, lo + 1, ..., hi
std::vector<double> integer_range(int lo, int hi);

// rho(u) = <G(u), u - u*> / ||G(u)||^2 with G = [grad_x f; -grad_y f].
// Returns NaN when ||G(u)|| < 1e-12.
double weak_mvi_rho_at(const MinimaxProblem& prob, double u_star_x, double u_star_y, double x, double y);

struct RhoScan {
    double min_rho = 0.0;
    double x = 0.0, y = 0.0;
    double threshold = 0.0;  // -1 / (2 L), L = max(L_x, L_y)
    std::vector<std::array<double, 3>> samples;  // (x, y, rho) on the base grid when requested
};

// Dense 2-D grid over X x Y, then one x10 refinement around the incumbent.
RhoScan weak_mvi_rho(const MinimaxProblem& prob, double u_star_x, double u_star_y, int resolution = 801,
                     bool keep_samples = false);

std::pair<double, double> interaction_dominance(const MinimaxProblem& prob, double x, double y, double eta);

struct KLScan {
    double tau = 0.0;  // infimum of residual / gap^theta over the grid
    double x = 0.0, y = 0.0;  // witness
    std::size_t excluded = 0;  // grid points with zero gap
};

// Empirical certificate on a resolution x resolution grid; inner max (dual)
// or min (primal) by the 1-D grid oracle on the `inner` grid. Points whose
// gap is below 1e-12 (1 + |optimal value|) are excluded.
KLScan kl_ratio_scan(const MinimaxProblem& prob, KLSide side, double theta, int resolution = 2001,
                     const GridSpec& inner = {});

}  // namespace dsgda
