#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dsgda/problems.hpp"

namespace dsgda {

struct AlgoParams {
    double c = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double mu = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;

    // Throws ParamError unless c, alpha, r1, r2 > 0 and beta, mu in (0, 1].
    void validate() const;
    bool operator==(const AlgoParams&) const = default;
};

enum class StopMode { ProximalGap, Residual };

struct StoppingRule {
    double tol = 1e-6;
    std::uint64_t max_iters = 10'000'000;
    StopMode mode = StopMode::ProximalGap;

    void validate() const;
    bool operator==(const StoppingRule&) const = default;
};

enum class Algorithm { DSGDA, SGDAPrimal, SGDADual, GDA, EG };
enum class Side { Primal, Dual };
enum class Termination { Converged, MaxIters };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);  // dsgda | sgda-primal | sgda-dual | gda | eg
std::string to_string(Termination t);
std::string to_string(StopMode m);

// Recorded states are stored flat: each record holds x, y, z, v back to back.
// With record_every = 1 every iterate is kept, so size() == iterations + 1.
// Otherwise every k-th iterate plus the final one is kept.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::size_t dim_x, std::size_t dim_y) : dim_x_(dim_x), dim_y_(dim_y) {}

    std::size_t dim_x() const { return dim_x_; }
    std::size_t dim_y() const { return dim_y_; }
    std::size_t size() const { return iters_.size(); }
    bool empty() const { return iters_.empty(); }

    void push(std::uint64_t iter, const SmoothedState& s, std::pair<double, double> gs);
    SmoothedState state(std::size_t i) const;
    CSpan raw(std::size_t i) const;  // x, y, z, v concatenated
    std::uint64_t iter(std::size_t i) const { return iters_[i]; }
    std::pair<double, double> gs(std::size_t i) const { return {gs_x_[i], gs_y_[i]}; }
    SmoothedState final_state() const { return state(size() - 1); }

    Termination termination = Termination::MaxIters;
    std::uint64_t iterations = 0;

    bool operator==(const Trajectory&) const = default;

private:
    std::size_t dim_x_ = 0, dim_y_ = 0;
    std::vector<double> data_;
    std::vector<std::uint64_t> iters_;
    std::vector<double> gs_x_, gs_y_;
};

SmoothedState dsgda_step(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s);
SmoothedState sgda_step(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& s, Side side);
SmoothedState gda_step(const MinimaxProblem& prob, double c, double alpha, const SmoothedState& s);
SmoothedState eg_step(const MinimaxProblem& prob, double stepsize, const SmoothedState& s);

// One step of the chosen method. GDA uses (c, alpha); EG uses c as its
// stepsize; the S-GDA variants ignore the radius and weight of the frozen side.
SmoothedState step(const MinimaxProblem& prob, Algorithm algo, const AlgoParams& p, const SmoothedState& s);

// Default stepsize for the GDA and EG baselines: 1 / (2 max(L_x, L_y)).
double baseline_stepsize(const MinimaxProblem& prob);

// Iterates until the stopping rule fires.
//
// Proximal-gap mode: a smoothed block is done when its ||x - z||_inf (or
// ||y - v||_inf) is below tol; a block without an anchor (GDA, EG, the frozen
// side of S-GDA) uses the max-norm of the last displacement instead. At t = 0
// a state is accepted only if its GS residuals are below tol as well.
// Residual mode: stop when both GS residual components are below tol.
//
// Throws NumericError with the offending iterate index on NaN or inf.
Trajectory run(const MinimaxProblem& prob, const AlgoParams& p, const SmoothedState& init,
               const StoppingRule& stop, Algorithm algo = Algorithm::DSGDA, std::uint64_t record_every = 1);

}  // namespace dsgda
