#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "dsgda/measures.hpp"
#include "dsgda/solvers.hpp"

using namespace dsgda;

namespace {

AlgoParams make(double c, double alpha, double beta, double mu, double r1, double r2) {
    AlgoParams p;
    p.c = c;
    p.alpha = alpha;
    p.beta = beta;
    p.mu = mu;
    p.r1 = r1;
    p.r2 = r2;
    return p;
}

const AlgoParams kKL = make(0.04, 0.04, 0.8, 0.8, 0.125, 0.125);

}  // namespace

TEST(AlgoParams, Validate) {
    EXPECT_NO_THROW(kKL.validate());
    EXPECT_THROW(make(0, 0.1, 0.5, 0.5, 1, 1).validate(), ParamError);
    EXPECT_THROW(make(0.1, 0.1, 0, 0.5, 1, 1).validate(), ParamError);
    EXPECT_THROW(make(0.1, 0.1, 0.5, 1.5, 1, 1).validate(), ParamError);
    EXPECT_THROW(make(0.1, 0.1, 0.5, 0.5, -1, 1).validate(), ParamError);
    EXPECT_NO_THROW(make(0.1, 0.1, 1, 1, 1, 1).validate());
}

TEST(StoppingRule, Validate) {
    StoppingRule s;
    EXPECT_EQ(s.tol, 1e-6);
    EXPECT_EQ(s.max_iters, 10'000'000u);
    s.tol = 0;
    EXPECT_THROW(s.validate(), ParamError);
    s.tol = 1e-6;
    s.max_iters = 0;
    EXPECT_THROW(s.validate(), ParamError);
}

TEST(Algorithm, NamesRoundTrip) {
    for (Algorithm a : {Algorithm::DSGDA, Algorithm::SGDAPrimal, Algorithm::SGDADual, Algorithm::GDA, Algorithm::EG})
        EXPECT_EQ(parse_algorithm(to_string(a)), a);
    EXPECT_EQ(parse_algorithm("sgda-primal"), Algorithm::SGDAPrimal);
    EXPECT_THROW(parse_algorithm("adam"), ConfigError);
}

TEST(DsgdaStep, ToyHandValues) {
    // x+ = 1 - 0.1 (1 + 0) = 0.9; y+ = clamp(1 + 0.1 * 0.9) = 1;
    // z+ = 1 + 0.5 (0.9 - 1) = 0.95; v+ = 1.
    SmoothedState n = dsgda_step(builtin("toy_bilinear"), make(0.1, 0.1, 0.5, 0.5, 1, 1), {{1}, {1}, {1}, {1}});
    EXPECT_DOUBLE_EQ(n.x[0], 0.9);
    EXPECT_EQ(n.y[0], 1.0);
    EXPECT_DOUBLE_EQ(n.z[0], 0.95);
    EXPECT_EQ(n.v[0], 1.0);
}

TEST(DsgdaStep, UsesNewPrimalIterateInDualStep) {
    // On f = xy with y interior the y-step sees x+ = 0.9, not x = 1.
    SmoothedState n = dsgda_step(builtin("toy_bilinear"), make(0.1, 0.1, 0.5, 0.5, 1, 1), {{1}, {0}, {1}, {0}});
    EXPECT_DOUBLE_EQ(n.x[0], 1.0);  // grad_x = y = 0
    EXPECT_DOUBLE_EQ(n.y[0], 0.1);  // 0 + 0.1 * x+ with x+ = 1
    SmoothedState m = dsgda_step(builtin("toy_bilinear"), make(0.1, 0.1, 0.5, 0.5, 1, 1), {{1}, {0.5}, {1}, {0.5}});
    EXPECT_DOUBLE_EQ(m.x[0], 0.95);
    EXPECT_DOUBLE_EQ(m.y[0], 0.5 + 0.1 * 0.95);
}

TEST(DsgdaStep, FixedPoints) {
    SmoothedState zero{{0}, {0}, {0}, {0}};
    EXPECT_EQ(dsgda_step(builtin("kl_nonconcave"), kKL, zero), zero);
    EXPECT_EQ(dsgda_step(builtin("toy_bilinear"), kKL, zero), zero);
    auto fs = known_stationary_point("forsaken").value();
    SmoothedState s = SmoothedState::anchored(fs.first, fs.second);
    SmoothedState n = dsgda_step(builtin("forsaken"), make(0.1, 0.1, 0.5, 0.5, 1, 1), s);
    EXPECT_NEAR(n.x[0], s.x[0], 1e-15);
    EXPECT_NEAR(n.y[0], s.y[0], 1e-15);
}

TEST(DsgdaStep, FixedPointHasZeroResidual) {
    // Any exact fixed point of the map: x = z, y = v and GS residual 0.
    MinimaxProblem toy = builtin("toy_bilinear");
    for (double x : {-1.0, 0.0, 1.0})
        for (double y : {-1.0, 0.0, 1.0}) {
            SmoothedState s = SmoothedState::anchored({x}, {y});
            if (dsgda_step(toy, kKL, s) == s) {
                auto gs = gs_residual(toy, s.x, s.y);
                EXPECT_LE(gs.first, 1e-12);
                EXPECT_LE(gs.second, 1e-12);
            }
        }
}

TEST(Reduction, PrimalSgdaIsDsgdaWithoutDualSmoothing) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    MinimaxProblem prob = builtin("convex_nonconcave");
    AlgoParams p = make(0.05, 0.07, 0.3, 0.6, 8, 3);
    for (int i = 0; i < 200; ++i) {
        double x = u(rng), y = u(rng), z = u(rng);
        SmoothedState s{{x}, {y}, {z}, {y}};
        AlgoParams q = p;
        q.r2 = 0;
        SmoothedState a = sgda_step(prob, p, s, Side::Primal);
        SmoothedState b = dsgda_step(prob, q, s);
        EXPECT_EQ(a.x, b.x);
        EXPECT_EQ(a.y, b.y);
        EXPECT_EQ(a.z, b.z);
        EXPECT_EQ(a.v, a.y);  // v follows y
    }
}

TEST(Reduction, DualSgdaMirrorsPrimal) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1);
    MinimaxProblem prob = builtin("kl_nonconcave");
    AlgoParams p = make(0.05, 0.07, 0.3, 0.6, 8, 3);
    for (int i = 0; i < 200; ++i) {
        double x = u(rng), y = u(rng), v = u(rng);
        SmoothedState s{{x}, {y}, {x}, {v}};
        AlgoParams q = p;
        q.r1 = 0;
        SmoothedState a = sgda_step(prob, p, s, Side::Dual);
        SmoothedState b = dsgda_step(prob, q, s);
        EXPECT_EQ(a.x, b.x);
        EXPECT_EQ(a.y, b.y);
        EXPECT_EQ(a.v, b.v);
        EXPECT_EQ(a.z, a.x);
    }
}

TEST(Reduction, GdaIsDsgdaWithoutSmoothing) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    MinimaxProblem prob = builtin("forsaken");
    for (int i = 0; i < 200; ++i) {
        double x = u(rng), y = u(rng);
        SmoothedState s = SmoothedState::anchored({x}, {y});
        SmoothedState a = gda_step(prob, 0.03, 0.05, s);
        SmoothedState b = dsgda_step(prob, make(0.03, 0.05, 0.5, 0.5, 0, 0), s);
        EXPECT_EQ(a.x, b.x);
        EXPECT_EQ(a.y, b.y);
        EXPECT_EQ(a.z, s.z);  // carried unchanged
        EXPECT_EQ(a.v, s.v);
    }
}

TEST(GdaStep, ToyOscillates) {
    MinimaxProblem toy = builtin("toy_bilinear");
    SmoothedState s = SmoothedState::anchored({0.5}, {0.5});
    double prev = std::hypot(0.5, 0.5);
    bool increased = false;
    for (int t = 0; t < 200; ++t) {
        s = gda_step(toy, 0.1, 0.1, s);
        double d = std::hypot(s.x[0], s.y[0]);
        increased = increased || d > prev;
        prev = d;
    }
    EXPECT_TRUE(increased);
    EXPECT_GT(prev, 0.1);
}

TEST(EgStep, ToyHandValues) {
    // G(u) = (y, -x). u = (1, 1): half step (0.9, 1); G = (1, -0.9);
    // full step (1 - 0.1, 1 + 0.09) clamped to (0.9, 1).
    SmoothedState n = eg_step(builtin("toy_bilinear"), 0.1, SmoothedState::anchored({1}, {1}));
    EXPECT_DOUBLE_EQ(n.x[0], 0.9);
    EXPECT_EQ(n.y[0], 1.0);
    // Interior: u = (0.2, -0.3): G = (-0.3, -0.2), half (0.23, -0.28),
    // G(half) = (-0.28, -0.23), full (0.228, -0.277).
    SmoothedState m = eg_step(builtin("toy_bilinear"), 0.1, SmoothedState::anchored({0.2}, {-0.3}));
    EXPECT_NEAR(m.x[0], 0.228, 1e-15);
    EXPECT_NEAR(m.y[0], -0.277, 1e-15);
}

TEST(EgStep, InteriorZeroOfFieldIsFixed) {
    SmoothedState s = SmoothedState::anchored({0}, {0});
    EXPECT_EQ(eg_step(builtin("polar_game"), 0.01, s), s);
}

TEST(Baseline, DefaultStepsize) {
    EXPECT_EQ(baseline_stepsize(builtin("forsaken")), 1 / 24.625);
    EXPECT_EQ(baseline_stepsize(builtin("kl_nonconcave")), 1.0 / 56);
}

TEST(Run, KLConvergesToOrigin) {
    for (double x0 : {-0.9, -0.3, 0.4, 0.8})
        for (double y0 : {-0.7, 0.2, 0.95}) {
            Trajectory t = run(builtin("kl_nonconcave"), kKL, SmoothedState::anchored({x0}, {y0}), StoppingRule{});
            EXPECT_EQ(t.termination, Termination::Converged);
            SmoothedState f = t.final_state();
            EXPECT_LE(std::hypot(f.x[0], f.y[0]), 1e-3) << x0 << "," << y0;
        }
}

TEST(Run, ToyFromOriginConvergesImmediately) {
    Trajectory t = run(builtin("toy_bilinear"), kKL, SmoothedState::anchored({0}, {0}), StoppingRule{});
    EXPECT_EQ(t.termination, Termination::Converged);
    EXPECT_EQ(t.iterations, 0u);
    EXPECT_EQ(t.size(), 1u);
}

TEST(Run, ForsakenConvergesNearStationaryPoint) {
    Trajectory t = run(builtin("forsaken"), make(0.1, 0.1, 0.05, 0.05, 0.5, 0.5),
                       SmoothedState::anchored({-1.0}, {1.2}), StoppingRule{});
    EXPECT_EQ(t.termination, Termination::Converged);
    EXPECT_EQ(t.iterations, 538u);  // frozen from a run of this implementation
    SmoothedState f = t.final_state();
    EXPECT_NEAR(f.x[0], 0.08, 0.005);
    EXPECT_NEAR(f.y[0], 0.41, 0.005);
}

TEST(Run, TrajectoryLengthAndSubsampling) {
    MinimaxProblem kl = builtin("kl_nonconcave");
    SmoothedState init = SmoothedState::anchored({0.5}, {0.5});
    Trajectory full = run(kl, kKL, init, StoppingRule{});
    EXPECT_EQ(full.size(), full.iterations + 1);
    for (std::size_t i = 0; i < full.size(); ++i) EXPECT_EQ(full.iter(i), i);

    Trajectory sub = run(kl, kKL, init, StoppingRule{}, Algorithm::DSGDA, 10);
    EXPECT_EQ(sub.iterations, full.iterations);
    EXPECT_EQ(sub.size(), full.iterations / 10 + 1 + (full.iterations % 10 != 0));
    for (std::size_t i = 0; i < sub.size(); ++i) EXPECT_EQ(sub.state(i), full.state(sub.iter(i)));
    EXPECT_EQ(sub.final_state(), full.final_state());
    EXPECT_EQ(sub.gs(sub.size() - 1), full.gs(full.size() - 1));
}

TEST(Run, RecordedResidualsMatchMeasures) {
    MinimaxProblem prob = builtin("forsaken");
    StoppingRule stop;
    stop.max_iters = 200;
    Trajectory t = run(prob, make(0.1, 0.1, 0.05, 0.05, 0.5, 0.5), SmoothedState::anchored({-1.0}, {1.2}), stop);
    for (std::size_t i = 0; i < t.size(); ++i) {
        SmoothedState s = t.state(i);
        EXPECT_EQ(t.gs(i), gs_residual(prob, s.x, s.y));
    }
}

TEST(Run, Deterministic) {
    MinimaxProblem prob = builtin("sixth_order");
    AlgoParams p = make(0.1, 0.1, 0.2, 0.8, 20, 20);
    Trajectory a = run(prob, p, SmoothedState::anchored({1}, {1}), StoppingRule{});
    Trajectory b = run(prob, p, SmoothedState::anchored({1}, {1}), StoppingRule{});
    EXPECT_TRUE(a == b);
}

TEST(Run, EveryIterateStaysFeasible) {
    StoppingRule stop;
    stop.max_iters = 3000;
    struct Case {
        const char* problem;
        Algorithm algo;
        AlgoParams p;
        double x0, y0;
    };
    const Case cases[] = {
        {"forsaken", Algorithm::GDA, make(0.2, 0.2, 0, 0, 0, 0), -1.0, 1.2},
        {"toy_bilinear", Algorithm::GDA, make(0.5, 0.5, 0, 0, 0, 0), 0.9, 0.9},
        {"polar_game", Algorithm::EG, make(0.05, 0.05, 0, 0, 0, 0), 0.6, 0.8},
        {"bilinear_coupled(11)", Algorithm::SGDAPrimal, make(0.03, 0.03, 0.01, 0.01, 22, 22), 3.5, -3.5},
        {"wrong_smoothing", Algorithm::SGDADual, make(0.2, 0.2, 0.8, 0.8, 1, 1), 0.9, -0.9},
        {"sixth_order", Algorithm::DSGDA, make(0.3, 0.3, 0.5, 0.5, 1, 1), 1.9, -1.9},
    };
    for (const auto& c : cases) {
        MinimaxProblem prob = builtin(c.problem);
        Trajectory t = run(prob, c.p, SmoothedState::anchored({c.x0}, {c.y0}), stop, c.algo);
        for (std::size_t i = 0; i < t.size(); ++i) {
            SmoothedState s = t.state(i);
            ASSERT_TRUE(prob.X.contains(s.x) && prob.Y.contains(s.y)) << c.problem << " iterate " << t.iter(i);
        }
    }
}

TEST(Run, AnchorsStayInBoxHull) {
    MinimaxProblem prob = builtin("bilinear_coupled(10)");
    StoppingRule stop;
    stop.max_iters = 2000;
    Trajectory t = run(prob, make(0.03, 0.03, 0.01, 0.01, 22, 22), SmoothedState::anchored({3.9}, {-3.9}), stop);
    for (std::size_t i = 0; i < t.size(); ++i) {
        SmoothedState s = t.state(i);
        EXPECT_TRUE(prob.X.contains(s.z) && prob.Y.contains(s.v));
    }
}

TEST(Run, PrimalSgdaCyclesOnBilinear) {
    StoppingRule stop;
    stop.max_iters = 100000;
    Trajectory t = run(builtin("bilinear_coupled(11)"), make(0.03, 0.03, 0.01, 0.01, 22, 22),
                       SmoothedState::anchored({0.5}, {0.5}), stop, Algorithm::SGDAPrimal);
    EXPECT_EQ(t.termination, Termination::MaxIters);
}

TEST(Run, WrongSmoothingDualSideIsFaster) {
    MinimaxProblem prob = builtin("wrong_smoothing");
    AlgoParams p = make(0.04, 0.04, 0.8, 0.8, 10, 10);
    SmoothedState init = SmoothedState::anchored({0.5}, {0.5});
    Trajectory primal = run(prob, p, init, StoppingRule{}, Algorithm::SGDAPrimal);
    Trajectory dual = run(prob, p, init, StoppingRule{}, Algorithm::SGDADual);
    ASSERT_EQ(dual.termination, Termination::Converged);
    ASSERT_EQ(primal.termination, Termination::Converged);
    EXPECT_LT(dual.iterations, primal.iterations);
    EXPECT_EQ(primal.iterations, 184u);  // frozen
    EXPECT_EQ(dual.iterations, 175u);
}

TEST(Run, ResidualModeStopsOnGS) {
    MinimaxProblem kl = builtin("kl_nonconcave");
    StoppingRule stop;
    stop.mode = StopMode::Residual;
    stop.tol = 1e-8;
    Trajectory t = run(kl, kKL, SmoothedState::anchored({0.5}, {0.5}), stop);
    ASSERT_EQ(t.termination, Termination::Converged);
    auto last = t.gs(t.size() - 1);
    EXPECT_LT(last.first, 1e-8);
    EXPECT_LT(last.second, 1e-8);
    auto before = t.gs(t.size() - 2);
    EXPECT_FALSE(before.first < 1e-8 && before.second < 1e-8);
}

TEST(Run, ProximalGapNeedsResidualAtStart) {
    // Anchored start has zero proximal gap but is not stationary.
    StoppingRule stop;
    stop.max_iters = 5;
    Trajectory t = run(builtin("toy_bilinear"), kKL, SmoothedState::anchored({0.5}, {0.5}), stop);
    EXPECT_GT(t.iterations, 0u);
}

TEST(Run, InfeasibleInitRejected) {
    EXPECT_THROW(run(builtin("toy_bilinear"), kKL, SmoothedState::anchored({1.5}, {0}), StoppingRule{}), ParamError);
    EXPECT_THROW(run(builtin("toy_bilinear"), kKL, SmoothedState::anchored({0, 0}, {0}), StoppingRule{}),
                 DimensionError);
}

TEST(Run, NonFiniteValueReportsIterate) {
    MinimaxProblem prob;
    prob.name = "blows_up";
    prob.X = BoxSet::cube(1, -1, 1);
    prob.Y = BoxSet::cube(1, -1, 1);
    // Pushes x up by c per step and returns NaN once x passes 0.55: x reaches
    // 0.6 at iterate 6, so iterate 7 is the first non-finite one.
    prob.grad_x = [](CSpan x, CSpan, Span out) {
        out[0] = x[0] > 0.55 ? std::numeric_limits<double>::quiet_NaN() : -1.0;
    };
    prob.grad_y = [](CSpan, CSpan, Span out) { out[0] = 0.0; };
    prob.L_x = prob.L_y = 1;
    try {
        run(prob, make(0.1, 0.1, 0.5, 0.5, 1, 1), SmoothedState::anchored({0}, {0}), StoppingRule{},
            Algorithm::GDA);
        FAIL() << "expected NumericError";
    } catch (const NumericError& e) {
        EXPECT_EQ(e.iterate(), 7u);
        EXPECT_NE(std::string(e.what()).find("7"), std::string::npos);
    }
}
