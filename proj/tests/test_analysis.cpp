#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "dsgda/analysis.hpp"

using namespace dsgda;

namespace {

// f = x^2 - y^2 on [-1,1]^2: gap in y is y^2 and the projected-gradient
// residual is 2|y|, so residual / gap^(1/2) = 2 everywhere off y = 0.
MinimaxProblem square_saddle() {
    MinimaxProblem p;
    p.name = "square_saddle";
    p.X = BoxSet::cube(1, -1, 1);
    p.Y = BoxSet::cube(1, -1, 1);
    p.f = [](CSpan x, CSpan y) { return x[0] * x[0] - y[0] * y[0]; };
    p.grad_x = [](CSpan x, CSpan, Span g) { g[0] = 2 * x[0]; };
    p.grad_y = [](CSpan, CSpan y, Span g) { g[0] = -2 * y[0]; };
    p.L_x = p.L_y = 2;
    return p;
}

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

}  // namespace

TEST(Constants, HandValues) {
    ConstantSet k = constants(1, 1, 2, 4, 0.1, 0.1);
    EXPECT_EQ(k.sigma1, 2.0);
    EXPECT_EQ(k.sigma2, 2.0);
    EXPECT_DOUBLE_EQ(k.sigma5, 4.0 / 3);
    EXPECT_EQ(k.L_d, 7.0);
    EXPECT_DOUBLE_EQ(k.sigma6, 14.0);  // (0.4 + 1) / (0.2 - 0.1)
    // sigma3 = r1 sigma1 / (r2 - L_y) + sigma2 / sigma1 = 4/3 + 1
    EXPECT_DOUBLE_EQ(k.sigma3, 7.0 / 3);
    // sigma4 = (L_x + r2 - L_y) / (r2 - L_y) = 4/3
    EXPECT_DOUBLE_EQ(k.sigma4, 4.0 / 3);
    // sigma7 = (0.8 + 1) / (0.4 - 0.1) = 6, sigma8 = (1 + 0.7) / 0.3
    EXPECT_DOUBLE_EQ(k.sigma7, 6.0);
    EXPECT_DOUBLE_EQ(k.sigma8, 1.7 / 0.3);
    EXPECT_DOUBLE_EQ(k.sigma_prime, 6.0);
    // L_h = (L_x / (r2 - L_y) + 2) L_x + r1 = 1/3 + 2 + 2
    EXPECT_DOUBLE_EQ(k.L_h, 13.0 / 3);
}

TEST(Constants, LargeRadiusLimit) {
    ConstantSet k = constants(1, 1, 1e9, 1e9, 0.1, 0.1);
    EXPECT_NEAR(k.sigma1, 1.0, 1e-8);
    EXPECT_NEAR(k.sigma2, 1.0, 1e-8);
}

TEST(Constants, InvariantsOnRandomInputs) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.1, 10);
    for (int i = 0; i < 500; ++i) {
        double Lx = u(rng), Ly = u(rng);
        double r1 = Lx * (1 + u(rng));
        double r2 = (Ly / (r1 - Lx) + 2) * Ly * (1 + u(rng) / 10);
        ConstantSet k = constants(Lx, Ly, r1, r2, u(rng) / 100, u(rng) / 100);
        EXPECT_GE(k.sigma2, 1.0);
        EXPECT_GE(k.sigma5, 1.0);
        for (double v : {k.sigma1, k.sigma2, k.sigma3, k.sigma4, k.sigma5, k.sigma6, k.sigma7, k.sigma8, k.L_d,
                         k.sigma_prime, k.L_h}) {
            EXPECT_TRUE(std::isfinite(v));
            EXPECT_GT(v, 0.0);
        }
    }
}

TEST(Constants, PreconditionsNamed) {
    try {
        constants(1, 1, 1, 4, 0.1, 0.1);
        FAIL();
    } catch (const ParamError& e) {
        EXPECT_NE(std::string(e.what()).find("r1 > L_x"), std::string::npos);
    }
    try {
        constants(1, 1, 2, 3, 0.1, 0.1);
        FAIL();
    } catch (const ParamError& e) {
        EXPECT_NE(std::string(e.what()).find("r2 >"), std::string::npos);
    }
    EXPECT_THROW(constants(1, 1, 2, 4, 0, 0.1), ParamError);
}

TEST(ErrorBoundCoefficients, HandValues) {
    KLSpec kl{0.5, 1.0, KLSide::Dual};
    // 2 / (1 * 1) * (4 * 1 + 16/3)^2
    EXPECT_NEAR(omega0(1, 1, 2, 4, 0.5, kl), 2 * (28.0 / 3) * (28.0 / 3), 1e-12);
    // 4 * 4 * 2 / 1 * (1 + 4/3)
    EXPECT_NEAR(omega1(1, 1, 2, 4, 0.5, 2), 32 * 7.0 / 3, 1e-12);
    // mirrored: 2 / (3 * 1) * (2 * 1 + 4)^2 with r1 = 2, r2 = 4, L_y = 1
    EXPECT_NEAR(omega2(1, 1, 2, 4, 0.5, kl), 2.0 / 3 * 36, 1e-12);
    // 4 * 2 * 2 / 3 * (1 + 2)
    EXPECT_NEAR(omega3(1, 1, 2, 4, 0.5, 2), 16.0, 1e-12);
    EXPECT_EQ(dual_error_bound_concave(1, 2, 2), 16.0);
    EXPECT_EQ(dual_error_bound_kl(1, 2, 4, kl), 32.0);
    EXPECT_THROW(omega0(1, 1, 2, 4, 0.5, KLSpec{1.0, 1.0}), ParamError);
    EXPECT_THROW(omega0(1, 1, 2, 4, 0.5, KLSpec{0.5, 0.0}), ParamError);
}

TEST(DescentParams, ReportsFailures) {
    ParamReport big_c = check_descent_params(1, 1, make(1, 1e-3, 1e-9, 1e-9, 2, 2));
    EXPECT_FALSE(big_c.ok());
    EXPECT_NE(big_c.failures().find("c <= 4/(3(L+r1))"), std::string::npos);

    ParamReport small_r = check_descent_params(1, 1, make(1e-3, 1e-3, 1e-9, 1e-9, 1, 2));
    EXPECT_FALSE(small_r.ok());
    EXPECT_NE(small_r.failures().find("r1 >= 2L"), std::string::npos);
}

TEST(DescentParams, UniversalFormulaAtRadiusTwo) {
    // c = alpha = 1/30 at r = 2: sigma = (4/30 + 1) / (1/30) = 34, so the
    // alpha <= 2/(3 sigma^2) bound fails while every other bound holds.
    ParamReport r = check_descent_params(1, 1, make(1.0 / 30, 1.0 / 30, 1e-9, 1e-9, 2, 2));
    EXPECT_EQ(r.failures(), "alpha <= 2/(3 lambda L sigma^2)");
    // At the automatically chosen radius the same formula passes.
    EXPECT_TRUE(check_descent_params(1, 1, universal_stepsizes(1, 19.75, 1e-9)).ok());
}

TEST(Universal, StepsizesAtRadiusTwo) {
    AlgoParams p = universal_stepsizes(1, 2);
    EXPECT_DOUBLE_EQ(p.c, 1.0 / 30);
    EXPECT_EQ(p.alpha, p.c);
    // min{48/884, (1/30)/18432, 12/13, (1/30)/768}
    EXPECT_DOUBLE_EQ(p.beta, 1.0 / 552960);
    EXPECT_EQ(p.mu, p.beta);
    // 8L / (3 (r - L)^2) = 8/3 is not below 1/30.
    EXPECT_THROW(universal_params(1, 2.0), ParamError);
}

TEST(Universal, AutoRadius) {
    // Smallest r on the 0.25 L lattice with 8L/(3(r-L)^2) < c: r = 19.75,
    // c = 50/6541, beta = 25/595283328 (exact rational evaluation).
    AlgoParams p = universal_params(1);
    EXPECT_EQ(p.r1, 19.75);
    EXPECT_EQ(p.r2, 19.75);
    EXPECT_NEAR(p.c, 50.0 / 6541, 1e-17);
    EXPECT_NEAR(p.beta, 25.0 / 595283328, 1e-22);
    EXPECT_TRUE(check_descent_params(1, 1, p).ok());
    auto [t1, t2] = universal_point(1, p);
    EXPECT_EQ(t2, 19.75);
    EXPECT_NEAR(t1, 6541.0 / 50 / 19.75, 1e-9);
}

TEST(Universal, Homogeneous) {
    for (double L : {0.1, 1.0, 10.0}) {
        AlgoParams p = universal_params(L);
        EXPECT_TRUE(check_descent_params(L, 1, p).ok()) << L;
        EXPECT_GT(p.c, universal_c_lower_bound(L, p.r1));
        AlgoParams q = universal_params(2 * L);
        EXPECT_NEAR(q.c, p.c / 2, 1e-15 * p.c);
        EXPECT_EQ(q.r1, 2 * p.r1);
    }
    EXPECT_THROW(universal_params(0), ParamError);
}

TEST(Universal, BetaCap) {
    AlgoParams p = universal_params(1, std::nullopt, 1e-12);
    EXPECT_EQ(p.beta, 1e-12);
    EXPECT_EQ(p.mu, 1e-12);
}

TEST(Feasibility, CoefficientsAtSamplePoints) {
    // Independent evaluation of the four coefficients at L = 1,
    // beta = mu = 2e-4.
    auto a = descent_coefficients(1, 2e-4, 2e-4, 3, 50);
    ASSERT_TRUE(a);
    EXPECT_NEAR((*a)[0], 123.38808058769264, 1e-8);
    EXPECT_NEAR((*a)[1], 40.61653554412869, 1e-8);
    EXPECT_NEAR((*a)[2], 124872.35524737189, 1e-6);
    EXPECT_NEAR((*a)[3], 124987.36990010581, 1e-6);
    EXPECT_TRUE(feasible_point(1, 2e-4, 2e-4, 3, 50));
    EXPECT_FALSE(feasible_point(1, 2e-4, 2e-4, 50, 50));  // second coefficient negative
    EXPECT_FALSE(descent_coefficients(1, 2e-4, 2e-4, 3, 1.5).has_value());
    EXPECT_FALSE(descent_coefficients(1, 2e-4, 2e-4, 0, 50).has_value());
}

TEST(Feasibility, ScanCountAndOrder) {
    auto axis = integer_range(0, 100);
    ASSERT_EQ(axis.size(), 101u);
    EXPECT_EQ(axis.front(), 0.0);
    EXPECT_EQ(axis.back(), 100.0);
    FeasibilityMatrix m = feasibility_scan(1, 2e-4, 2e-4, axis, axis);
    EXPECT_EQ(m.count(), 2242u);  // independent recomputation of the grid
    for (std::size_t i = 0; i < m.t1.size(); ++i)
        for (std::size_t j = 0; j < m.t2.size(); ++j)
            if (m.t2[j] < 2) EXPECT_FALSE(m.at(i, j));
    EXPECT_TRUE(feasibility_scan(1, 2e-4, 2e-4, axis, axis, true) == m);
}

TEST(Rho, WitnessValues) {
    EXPECT_NEAR(weak_mvi_rho_at(builtin("bilinear_coupled(10)"), 0, 0, 0, 1), -4.0 / 89, 1e-12);
    EXPECT_NEAR(weak_mvi_rho_at(builtin("polar_game"), 0, 0, 0.8, 0), -0.3722, 1e-4);
    // Frozen from this implementation; cross-checked by a symbolic evaluation.
    EXPECT_NEAR(weak_mvi_rho_at(builtin("sixth_order"), 0, 0, -1, 0.5), -0.0455019, 1e-6);
}

TEST(Rho, ZeroFieldIsNaNAndRotationIsZero) {
    EXPECT_TRUE(std::isnan(weak_mvi_rho_at(builtin("toy_bilinear"), 0, 0, 0, 0)));
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 100; ++i) {
        double x = u(rng), y = u(rng);
        EXPECT_NEAR(weak_mvi_rho_at(builtin("toy_bilinear"), 0, 0, x, y), 0.0, 1e-15);
    }
    // At u = u* with G nonzero the inner product vanishes.
    EXPECT_EQ(weak_mvi_rho_at(builtin("forsaken"), 0.3, 0.2, 0.3, 0.2), 0.0);
}

TEST(Rho, ScanFindsViolation) {
    RhoScan s = weak_mvi_rho(builtin("bilinear_coupled(10)"), 0, 0, 201);
    EXPECT_DOUBLE_EQ(s.threshold, -1.0 / 344);
    EXPECT_LE(s.min_rho, -4.0 / 89 + 1e-12);
    EXPECT_LT(s.min_rho, s.threshold);
    EXPECT_NEAR(weak_mvi_rho_at(builtin("bilinear_coupled(10)"), 0, 0, s.x, s.y), s.min_rho, 1e-15);
    RhoScan kept = weak_mvi_rho(builtin("toy_bilinear"), 0, 0, 11, true);
    EXPECT_EQ(kept.samples.size(), 121u);
}

TEST(Interaction, HandValues) {
    const double eta = 12.3125;
    auto f = interaction_dominance(builtin("forsaken"), 1, 0, eta);
    EXPECT_NEAR(f.first, 0.5 - 6 + 5 + 1 / (eta + 0.5), 1e-12);
    EXPECT_LT(f.first, 0.0);
    auto p = interaction_dominance(builtin("polar_game"), 0.8, 0, 101);
    EXPECT_NEAR(p.first, 1 / (101 - 279.0 / 625) - 779.0 / 125, 1e-10);
    auto t = interaction_dominance(builtin("toy_bilinear"), 0.3, -0.4, 2);
    EXPECT_EQ(t.first, 0.5);
    EXPECT_EQ(t.second, 0.5);
}

TEST(Interaction, MonotoneInEta) {
    MinimaxProblem prob = builtin("forsaken");
    double prev = std::numeric_limits<double>::infinity();
    for (double eta = 13; eta < 100; eta += 1) {
        double v = interaction_dominance(prob, 1, 0, eta).first;
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_THROW(interaction_dominance(builtin("toy_bilinear"), 0, 0, 0), ParamError);
}

TEST(KLScan, SquareSaddleModulus) {
    KLScan d = kl_ratio_scan(square_saddle(), KLSide::Dual, 0.5, 101);
    EXPECT_NEAR(d.tau, 2.0, 1e-6);
    EXPECT_GE(d.tau, std::sqrt(2.0));
    EXPECT_EQ(d.excluded, 101u);  // the y = 0 column
    KLScan p = kl_ratio_scan(square_saddle(), KLSide::Primal, 0.5, 101);
    EXPECT_NEAR(p.tau, 2.0, 1e-6);
    EXPECT_EQ(p.excluded, 101u);
}

TEST(KLScan, KLProblemCertified) {
    KLScan s = kl_ratio_scan(builtin("kl_nonconcave"), KLSide::Dual, 0.5, 101, GridSpec{401, 2});
    EXPECT_GT(s.tau, 0.0);
    EXPECT_TRUE(std::isfinite(s.tau));
    EXPECT_THROW(kl_ratio_scan(builtin("kl_nonconcave"), KLSide::Dual, 1.0, 11), ParamError);
}
