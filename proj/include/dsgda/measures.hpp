#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "dsgda/oracle.hpp"
#include "dsgda/problems.hpp"
#include "dsgda/solvers.hpp"

namespace dsgda {

// Distance from 0 to grad + normal cone of the box, per block (Euclidean).
// The y block uses -grad_y f. Throws DimensionError / ParamError for
// mismatched or infeasible points.
std::pair<double, double> gs_residual(const MinimaxProblem& prob, CSpan x, CSpan y);

// ||x*(x_hat) - x_hat|| with the prox weight r1; accuracy is the oracle's
// final grid spacing on X.
double os_residual(const MinimaxProblem& prob, double r1, CSpan x_hat, const GridSpec& g = {});

struct StationarityReport {
    double gs_x = 0.0;
    double gs_y = 0.0;
    std::optional<double> os;
    Vec x, y;
};

StationarityReport stationarity(const MinimaxProblem& prob, CSpan x, CSpan y, std::optional<double> r1 = std::nullopt,
                                const GridSpec& g = {});

enum class Outcome { Converged, LimitCycle, BoundaryStall, MaxIters };
std::string to_string(Outcome o);

struct ClassifyOptions {
    double eps_stat = 1e-4;
    double delta_rec = 1e-3;
    double burn_in = 0.1;      // fraction of the trajectory's iterations
    std::uint64_t min_loop = 10;  // iterations
    std::size_t window = 20000;   // recorded states searched for recurrence
    double excursion = 10.0;      // the loop must leave the excursion * delta_rec ball
    bool operator==(const ClassifyOptions&) const = default;
};

struct OutcomeClass {
    Outcome kind = Outcome::MaxIters;
    std::uint64_t loop_length = 0;     // iterations between the recurring pair
    std::uint64_t loop_start = 0;
    double recurrence_distance = 0.0;
    double excursion = 0.0;
    double final_gs_x = 0.0, final_gs_y = 0.0;
};

// converged if the final GS pair is below eps_stat. Otherwise limit-cycle if,
// among the last `window` recorded states after burn-in, some state s_j comes
// back within delta_rec of an earlier s_i (distance over x, y, z, v) at an
// iteration lag of at least min_loop, the path in between leaves the
// excursion * delta_rec ball around s_i, and all residuals in between are at
// least eps_stat. Otherwise boundary-stall if the final point touches the box
// boundary and the last recorded step moved by at most 1e-12. Otherwise
// max-iters.
OutcomeClass classify(const MinimaxProblem& prob, const Trajectory& traj, const ClassifyOptions& opt = {});

// Certificate that (x^{t+1}, y^{t+1}) is a (rho eps)-GS point:
//   eps = max(||dx|| / c, ||y^t - y_+^t|| / alpha, ||dz|| / beta, ||dv|| / mu)
//   gs_x <= (A1 c + r1 + L_x alpha) eps with A1 = 1/c + L_x + r1 + L_x L_y alpha sigma6
//   gs_y <= (B1 alpha + B1 L_y alpha sigma6 c + r2) eps with B1 = 1/alpha + L_y + r2
// ratio = max(gs_x / (rho_x eps), gs_y / (rho_y eps)), 0/0 taken as 0.
struct GSBound {
    double ratio = 0.0;
    double gs_x = 0.0, gs_y = 0.0;
    double eps = 0.0;
    double rho_x = 0.0, rho_y = 0.0;
};
GSBound gs_bound_check(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s_t,
                       const SmoothedState& s_next, const GridSpec& g = {});

}  // namespace dsgda
