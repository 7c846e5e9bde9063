#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qg/coupling.hpp"
#include "qg/ergodics.hpp"

using namespace qg;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Rig {
    GridPtr g = make_grid(kTwoPi, 16);
    ModelParams p;
    NoiseSpec spec;
    ControlSpec cs;
    Rig(double noise = 1e-5) {
        p.grid = g;
        p.weights = LayerWeights(1, 1, 1, 1);
        p.nu = 0.05;
        p.r = 0.5;
        p.dt = 0.01;
        cs.a = p.r;
        cs.n = 1;
        while (!(p.nu - 2.0 * cs.a / g->lambda_n(cs.n) > 0.0)) ++cs.n;
        spec = NoiseSpec::power_law(*g, noise, 1.0, cs.n);
    }
    SpectralField2L state(std::uint64_t seed, double V) const {
        Rng rng(seed, stream_id(StreamRole::initial_state, 0));
        SpectralField2L q = vorticity_from_streamfunction(random_field(g, rng, 3.0), p.weights);
        q *= std::sqrt(V / triple_norm_minus1_sq(q, p.weights));
        return q;
    }
};

TEST(Control, ValidationNamesCondition) {
    Rig s;
    EXPECT_NO_THROW(s.cs.validate(s.p, s.spec));
    ControlSpec small = s.cs;
    small.n = 1;
    try {
        small.validate(s.p, s.spec);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("condition_n"), std::string::npos);
    }
    const auto short_noise = NoiseSpec::power_law(*s.g, 1e-5, 1.0, s.cs.n - 1);
    try {
        s.cs.validate(s.p, short_noise);
        FAIL();
    } catch (const std::invalid_argument& e) {
        EXPECT_NE(std::string(e.what()).find("range-Q"), std::string::npos);
    }
    ControlSpec zero = s.cs;
    zero.a = 0.0;
    EXPECT_THROW(zero.validate(s.p, s.spec), std::invalid_argument);
}

TEST(Control, VanishesOnCoincidentAndHighModeDifferences) {
    Rig s;
    const Stepper st(s.p, s.spec);
    const auto x = s.state(1, 1.0);
    EXPECT_EQ(norm_Hk_sq(control_G(x, x, s.cs, st), 0), 0.0);
    SpectralField2L y = x;
    add_real_mode(y.layer[0], *s.g, s.cs.n + 3, 0.7);
    add_real_mode(y.layer[1], *s.g, s.cs.n + 5, -0.2);
    // ψ1 of a layer-2 perturbation leaks only into the same wavenumber, still above n
    EXPECT_LE(norm_Hk_sq(control_G(x, y, s.cs, st), 0), 1e-30);
}

TEST(Control, RangeBoundOnRandomPairs) {
    Rig s;
    const Stepper st(s.p, s.spec);
    const double lam = s.g->lambda_n(s.cs.n);
    for (int i = 0; i < 100; ++i) {
        const auto x = s.state(2 * i, 1.0 + i), y = s.state(2 * i + 1, 0.5);
        const double G = control_norm_sq(control_G(x, y, s.cs, st), s.p.weights);
        const double xi = triple_norm_minus1_sq(x - y, s.p.weights);
        EXPECT_LE(G, s.cs.a * s.cs.a * lam * xi * (1.0 + 1e-10));
    }
}

TEST(Control, SingleModeCostIncrement) {
    Rig s;
    ScalarField G = ScalarField::zeros(s.g);
    add_real_mode(G.c, *s.g, 3, 0.4);
    const auto spec = NoiseSpec::from_list({1.0, 1.0, 0.25});
    EXPECT_NEAR(girsanov_increment(G, spec, 3, 0.01), 0.01 * 0.16 / 0.25, 1e-17);
}

TEST(Coupled, CoincidentStartStaysCoincident) {
    Rig s(1e-3);
    const Stepper st(s.p, s.spec);
    const auto x = s.state(3, 1.0);
    Rng rng(5, 0);
    const auto rec = run_coupled(x, x, st, s.cs, 1.0, rng);
    EXPECT_EQ(rec.final_state.X.layer[0], rec.final_state.Y.layer[0]);
    EXPECT_EQ(rec.final_state.X.layer[1], rec.final_state.Y.layer[1]);
    EXPECT_EQ(rec.cost.back(), 0.0);
    for (double v : rec.xi_V) EXPECT_EQ(v, 0.0);
}

TEST(Coupled, XMatchesUncontrolledTrajectory) {
    Rig s(1e-3);
    const Stepper st(s.p, s.spec);
    const auto x = s.state(3, 1.0), y = s.state(4, 1.0);
    Rng a(5, 0), b(5, 0);
    const auto rec = run_coupled(x, y, st, s.cs, 0.5, a);
    const auto solo = integrate(x, st, 0.5, b);
    EXPECT_EQ(rec.V_X, solo.step_V);
    EXPECT_EQ(rec.X, solo.X);
}

TEST(GirsanovBound, Limits) {
    EXPECT_EQ(girsanov_cost_bound(2.0, 3.0, 0.5, 0.0, 1.0, 1.0, 0.0, 4.0), 0.0);
    const double inf_t = girsanov_cost_bound(2.0, 3.0, 0.5, 1.0, 1.0, 0.0, 0.0, 1e6);
    EXPECT_DOUBLE_EQ(inf_t, 12.0);
    EXPECT_LT(girsanov_cost_bound(2.0, 3.0, 0.5, 1.0, 1.0, 0.0, 0.0, 1.0), inf_t);
    EXPECT_THROW(girsanov_cost_bound(2.0, 3.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0), std::invalid_argument);
    const LayerWeights w(2, 1, 0.5, 1);
    EXPECT_DOUBLE_EQ(qinv_norm_sq(NoiseSpec::from_list({4.0, 0.5}), 2, w), 1.0);
}

// Synchronisation, the pathwise contraction inequality and the realised Girsanov
// cost against its bound, on a small grid.
TEST(Coupled, SynchronisesAndRespectsBounds) {
    Rig s;
    const Stepper st(s.p, s.spec);
    const double k0 = measure_bilinear_constant(s.g, s.p.weights, 300, 1).k0;
    const auto k = compute_constants({s.p, s.spec, s.cs, k0, std::nullopt});
    ASSERT_GT(k.chi, 0.0);
    const double c = s.cs.a * s.cs.a * k.lambda_n;
    const double qinv = qinv_norm_sq(s.spec, s.cs.n, s.p.weights);
    std::vector<double> ratios;
    for (int seed = 0; seed < 8; ++seed) {
        const auto x = s.state(100 + seed, 1e-2), y = s.state(200 + seed, 1e-2);
        Rng rng(seed, stream_id(StreamRole::trajectory, 0));
        const auto rec = run_coupled(x, y, st, s.cs, 10.0 / s.p.r, rng);
        ASSERT_FALSE(rec.blew_up);
        EXPECT_GE(contraction_inequality_slack(rec, k.kappa0, k.kappa1), 0.0);
        ratios.push_back(std::sqrt(rec.xi_V.back() / rec.xi_V0));
        const double Xi = 2.0 * s.p.weights.h1 * rec.xi_sup(k.gamma);
        const double bound = girsanov_cost_bound(c, qinv, k.chi, rec.xi_V0, k.upsilon, rec.V_X0, Xi, 10.0 / s.p.r);
        EXPECT_LE(rec.cost.back(), bound);
        for (double v : rec.a3_ratio) EXPECT_LE(v, 1.0 + 1e-10);
    }
    std::sort(ratios.begin(), ratios.end());
    EXPECT_LT(ratios[ratios.size() / 2], 0.1);
}

}  // namespace
