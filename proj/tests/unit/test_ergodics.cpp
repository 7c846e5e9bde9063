#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qg/ergodics.hpp"

using namespace qg;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

SpectralField2L make_state(GridPtr g, const LayerWeights& w, std::uint64_t seed, double V) {
    Rng rng(seed, stream_id(StreamRole::initial_state, 0));
    SpectralField2L q = vorticity_from_streamfunction(random_field(g, rng, 3.0), w);
    q *= std::sqrt(V / triple_norm_minus1_sq(q, w));
    return q;
}

ModelParams model(GridPtr g, double nu, double r) {
    ModelParams p;
    p.grid = g;
    p.weights = LayerWeights(1, 1, 1, 1);
    p.nu = nu;
    p.r = r;
    p.dt = 0.01;
    return p;
}

std::size_t smallest_n(const ModelParams& p, double a) {
    std::size_t n = 1;
    while (n < p.grid->num_modes() && !(p.nu - 2.0 * a / p.grid->lambda_n(n) > 0.0)) ++n;
    return n;
}

TEST(Formulas, SpotChecks) {
    EXPECT_EQ(tv_bound_small(1.0, 0.5), std::min(1.0, std::cbrt(2.0)));
    EXPECT_NEAR(tv_bound_large(0.0, 0.5), 1.0 - 1.0 / 48.0, 1e-15);
    EXPECT_EQ(alpha0_formula(2.0, 1.0), 0.5);
    EXPECT_NEAR(kappa2_formula(1.0, 1.0, 1.0, 0.25), 0.5, 1e-15);
}

TEST(Formulas, TotalVariationBounds) {
    EXPECT_EQ(tv_bound_small(0.0, 0.5), 0.0);
    EXPECT_NEAR(tv_bound_small(1e-3, 0.5), std::cbrt(2.0) * 1e-2, 1e-15);
    double prev = tv_bound_large(0.0, 0.5);
    for (double M : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
        const double v = tv_bound_large(M, 0.5);
        EXPECT_GE(v, prev);
        // exp(-(2^1.5 M)^2) underflows for large M, so only <= 1 survives rounding
        if (M <= 1.0) {
            EXPECT_LT(v, 1.0);
        }
        EXPECT_LE(v, 1.0);
        prev = v;
    }
    EXPECT_THROW(tv_bound_small(-1.0, 0.5), std::invalid_argument);
    EXPECT_THROW(tv_bound_large(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(tv_bound_large(1.0, 1.5), std::invalid_argument);
}

TEST(Formulas, Alpha0AndKappa2Cases) {
    EXPECT_NEAR(alpha0_formula(6.0, 1.0), 0.25, 1e-15);
    EXPECT_EQ(alpha0_formula(6.0, std::numeric_limits<double>::infinity()), 0.5);
    EXPECT_EQ(kappa2_formula(0.3, 0.0, 1.0, 5.0), 0.3);
}

TEST(Semimetric, ThetaExamples) {
    SemimetricParams sp{0.25, 2.0, 1.0};
    EXPECT_NEAR(theta_from_norms(1.0, 1.0, sp), std::exp(0.5), 1e-15);
    EXPECT_EQ(theta_from_norms(0.0, 3.0, sp), 0.0);
    auto g = make_grid(kTwoPi, 16);
    const LayerWeights w(1, 1, 1, 1);
    const auto x = make_state(g, w, 1, 2.0);
    const auto zero = SpectralField2L::zeros(g);
    EXPECT_EQ(theta_alpha(x, x, sp, w), 0.0);
    EXPECT_NEAR(theta_alpha(zero, x, sp, w), std::pow(2.0, 0.25), 1e-14);
}

TEST(Semimetric, DNExamples) {
    EXPECT_DOUBLE_EQ(d_N_from_thetas(0.3, 0.4, 2.0), 0.6);
    EXPECT_EQ(d_N_from_thetas(5.0, 7.0, 1.0), 1.0);
    auto g = make_grid(kTwoPi, 16);
    const LayerWeights w(1, 1, 1, 1);
    const SemimetricParams sp{0.2, 1.0, 3.0};
    const auto x = make_state(g, w, 2, 1.0), y = make_state(g, w, 3, 0.5);
    EXPECT_EQ(d_N(x, x, sp, w), 0.0);
    EXPECT_EQ(d_tilde(x, x, sp, w), 0.0);
    EXPECT_EQ(d_N(x, make_state(g, w, 4, 1e4), sp, w), 1.0);
    // recompute from physical-space quantities
    const double dv = triple_norm_minus1_sq(x - y, w);
    const double vx = triple_norm_minus1_sq(x, w), vy = triple_norm_minus1_sq(y, w);
    const double txy = std::pow(dv, 0.2) * std::exp(0.2 * vx), tyx = std::pow(dv, 0.2) * std::exp(0.2 * vy);
    const double dn = std::min({1.0, 3.0 * txy, 3.0 * tyx});
    EXPECT_NEAR(d_N(x, y, sp, w), dn, 1e-14);
    EXPECT_NEAR(d_tilde(x, y, sp, w), std::sqrt(dn * (1.0 + vx + vy)), 1e-14);
}

TEST(Semimetric, ParamsValidation) {
    EXPECT_NO_THROW((SemimetricParams{0.1, 1.0, 1.0}.validate(0.5)));
    EXPECT_THROW((SemimetricParams{0.5, 1.0, 1.0}.validate(0.5)), std::invalid_argument);
    EXPECT_THROW((SemimetricParams{0.1, 0.0, 1.0}.validate(0.5)), std::invalid_argument);
    EXPECT_THROW((SemimetricParams{0.1, 1.0, 0.5}.validate(0.5)), std::invalid_argument);
}

TEST(Semimetric, Properties) {
    auto g = make_grid(kTwoPi, 16);
    const LayerWeights w(1, 1, 1, 1);
    const SemimetricParams sp{0.15, 1.5, 2.0};
    for (int i = 0; i < 50; ++i) {
        const auto x = make_state(g, w, 1000 + i, 0.05 * (i + 1)), y = make_state(g, w, 2000 + i, 0.3);
        const double d = d_N(x, y, sp, w);
        EXPECT_EQ(d, d_N(y, x, sp, w));
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
        EXPECT_GT(d, 0.0);
        const double c = 0.5 + 0.05 * i;
        SpectralField2L cx = x, cy = y;
        cx *= c;
        cy *= c;
        const double expect = std::pow(c, 2.0 * sp.alpha) *
                              std::exp(sp.alpha * sp.upsilon * (c * c - 1.0) * triple_norm_minus1_sq(x, w)) *
                              theta_alpha(x, y, sp, w);
        EXPECT_NEAR(theta_alpha(cx, cy, sp, w), expect, 1e-12 * expect);
    }
}

TEST(Formulas, Alpha0Bound) {
    Rng rng(5, 0);
    for (int i = 0; i < 1000; ++i) {
        const double ups = 1e-3 + 10.0 * rng.uniform(), gam = 1e-3 + 10.0 * rng.uniform();
        const double a0 = alpha0_formula(ups, gam);
        EXPECT_LE(a0, 0.5);
        EXPECT_LT(a0, 2.0 * gam / ups);
    }
}

TEST(CouplingBound, CoincidentStartAndDecay) {
    const SemimetricParams sp{0.2, 1.0, 2.0};
    const auto b0 = wasserstein_coupling_bound({0.0, 0.0}, {0.1, 0.2}, 0.0, sp, 0.5, 1.0);
    EXPECT_EQ(b0.total, 0.0);
    const auto b1 = wasserstein_coupling_bound({0.1, 0.3}, {0.1, 0.2}, 0.5, sp, 0.5, 1.0);
    const auto b2 = wasserstein_coupling_bound({0.1, 0.3}, {0.1, 0.2}, 0.5, sp, 0.5, 1e4);
    EXPECT_GT(b1.decay_term, 0.0);
    EXPECT_LT(b2.decay_term, 1e-300);
    EXPECT_NEAR(b1.delta, 0.25, 1e-15);
    EXPECT_NEAR(b1.C_Xi, 0.5 * (std::exp(0.02) + std::exp(0.04)), 1e-15);
}

TEST(Assignment, MatchesBruteForce) {
    Rng rng(11, 0);
    for (std::size_t n = 1; n <= 6; ++n) {
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<double> c(n * n);
            for (double& v : c) v = rng.uniform() * 10.0;
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            double best = std::numeric_limits<double>::infinity();
            do {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += c[i * n + perm[i]];
                best = std::min(best, s);
            } while (std::next_permutation(perm.begin(), perm.end()));
            const auto m = solve_assignment(c, n);
            std::vector<std::size_t> sorted = m;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(sorted[i], i);
            double got = 0.0;
            for (std::size_t i = 0; i < n; ++i) got += c[i * n + m[i]];
            EXPECT_NEAR(got, best, 1e-12);
        }
    }
}

TEST(Assignment, EmpiricalWasserstein) {
    auto g = make_grid(kTwoPi, 8);
    const LayerWeights w(1, 1, 1, 1);
    std::vector<SpectralField2L> a, b;
    for (int i = 0; i < 5; ++i) a.push_back(make_state(g, w, i, 1.0 + i));
    auto dist = [&](const SpectralField2L& x, const SpectralField2L& y) {
        return std::sqrt(triple_norm_minus1_sq(x - y, w));
    };
    EXPECT_EQ(empirical_wasserstein(a, a, dist), 0.0);
    b = a;
    std::reverse(b.begin(), b.end());
    EXPECT_EQ(empirical_wasserstein(a, b, dist), 0.0);
    EXPECT_NEAR(empirical_wasserstein({a[0]}, {a[3]}, dist), dist(a[0], a[3]), 1e-15);
    b.pop_back();
    EXPECT_THROW(empirical_wasserstein(a, b, dist), std::invalid_argument);
    EXPECT_THROW(solve_assignment({1.0, 2.0}, 2), std::invalid_argument);
}

TEST(Assignment, NoWorseThanAnyFixedPermutation) {
    Rng rng(13, 0);
    const std::size_t n = 40;
    std::vector<double> c(n * n);
    for (double& v : c) v = rng.uniform();
    const auto m = solve_assignment(c, n);
    double opt = 0.0;
    for (std::size_t i = 0; i < n; ++i) opt += c[i * n + m[i]];
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int rep = 0; rep < 200; ++rep) {
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[static_cast<std::size_t>(rng.uniform() * (i + 1))]);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += c[i * n + perm[i]];
        EXPECT_LE(opt, s + 1e-12);
    }
}

TEST(Assignment, LargeSamplesAreSubsampledReproducibly) {
    auto g = make_grid(kTwoPi, 8);
    const LayerWeights w(1, 1, 1, 1);
    std::vector<SpectralField2L> a, b;
    for (int i = 0; i < 150; ++i) {
        a.push_back(make_state(g, w, i, 1.0));
        b.push_back(make_state(g, w, 500 + i, 1.0));
    }
    std::size_t calls = 0;
    auto dist = [&](const SpectralField2L& x, const SpectralField2L& y) {
        ++calls;
        return std::sqrt(triple_norm_minus1_sq(x - y, w));
    };
    const double w1 = empirical_wasserstein(a, b, dist, 7);
    EXPECT_EQ(calls, kMaxAssignmentSamples * kMaxAssignmentSamples);
    EXPECT_EQ(empirical_wasserstein(a, b, dist, 7), w1);
    EXPECT_NE(empirical_wasserstein(a, b, dist, 8), w1);
}

TEST(Constants, HandValues) {
    auto g = make_grid(kTwoPi, 16);
    ModelParams p = model(g, 0.05, 0.5);
    const std::size_t n = smallest_n(p, 0.5);
    const auto spec = NoiseSpec::power_law(*g, 1e-4, 1.0, n);
    const auto k = compute_constants({p, spec, {0.5, n}, 0.07, std::nullopt});
    const double a0 = 1.0 + 2.0 * 1.0 / 1.0;
    EXPECT_DOUBLE_EQ(k.a0, a0);
    EXPECT_DOUBLE_EQ(k.kappa0, 2.0 * 0.5 / a0);
    EXPECT_DOUBLE_EQ(k.kappa0_stated, 1.0);
    EXPECT_DOUBLE_EQ(k.kB, 0.07 * 0.07 / 0.1);
    EXPECT_DOUBLE_EQ(k.kappa1, 2.0 * k.kB);
    EXPECT_DOUBLE_EQ(k.gamma, 0.05 / (4.0 * spec.trace()));
    EXPECT_NEAR(k.kappa2, 0.025, 1e-15);
    EXPECT_DOUBLE_EQ(k.upsilon, k.kappa1 / k.kappa2);
    EXPECT_DOUBLE_EQ(k.chi, k.kappa0 - k.upsilon * k.kappa3);
    EXPECT_DOUBLE_EQ(k.gamma1, 0.05 / a0);
    // T_Q by direct summation of the inversion diagonal
    double tq = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
        const double lam = g->lambda_n(m);
        tq += spec.sigma(m) * (lam + 1.0) / (lam * (lam + 2.0));
    }
    EXPECT_NEAR(k.TQ, tq, 1e-15 * tq);
    EXPECT_TRUE(k.conditions_pass());
}

TEST(Constants, QuietLimitAndFailures) {
    auto g = make_grid(kTwoPi, 16);
    ModelParams p = model(g, 0.05, 0.5);
    const std::size_t n = smallest_n(p, 0.5);
    const auto k = compute_constants({p, NoiseSpec(), {0.5, n}, 0.07, std::nullopt});
    EXPECT_EQ(k.r0, 0.0);
    EXPECT_EQ(k.kappa2, 0.05);
    EXPECT_TRUE(std::isinf(k.gamma));
    EXPECT_EQ(k.alpha0, 0.5);
    EXPECT_FALSE(k.flags.range_Q);
    EXPECT_EQ(k.to_json()["gamma"], "inf");

    const auto spec = NoiseSpec::power_law(*g, 1e-2, 1.0, n);
    const double gmax = p.nu / (2.0 * spec.trace());
    EXPECT_THROW(compute_constants({p, spec, {0.5, n}, 0.07, gmax}), std::invalid_argument);

    const auto low = compute_constants({p, spec, {0.5, 1}, 0.07, std::nullopt});
    const auto failed = low.failed_conditions();
    EXPECT_NE(std::find(failed.begin(), failed.end(), "condition_n"), failed.end());
}

TEST(Constants, FlagsMatchRecomputation) {
    auto g = make_grid(kTwoPi, 16);
    Rng rng(21, 0);
    for (int i = 0; i < 3; ++i) {
        ModelParams p = model(g, 0.02 + 0.1 * rng.uniform(), 0.1 + rng.uniform());
        p.forcing = ScalarField::zeros(g);
        add_real_mode(p.forcing.c, *g, 2, rng.uniform());
        const double a = 0.05 + 0.5 * rng.uniform();
        const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 40);
        const auto spec = NoiseSpec::power_law(*g, 1e-3 * rng.uniform(), 1.0, 30);
        const double k0 = 0.1 * rng.uniform();
        const auto k = compute_constants({p, spec, {a, n}, k0, std::nullopt});

        const double lam1 = 1.0, lamn = g->lambda_n(n), a0 = 3.0;
        const double kB = k0 * k0 / (2.0 * p.nu);
        const double fterm = norm_Hk_sq(p.forcing, -2) / p.nu;
        const double K = k.TQ + fterm;
        const double gamma = p.nu / (4.0 * spec.trace());
        const double k2 = p.nu - 2.0 * gamma * spec.trace();
        const double chi = 2.0 * std::min(a, p.r) / a0 - (2.0 * kB / k2) * K;
        EXPECT_NEAR(k.forcing_term, fterm, 1e-14);
        EXPECT_EQ(k.flags.range_Q, n <= 30);
        EXPECT_EQ(k.flags.condition_n, p.nu - 2.0 * a / lamn > 0.0);
        EXPECT_EQ(k.flags.r_gt_r0, p.r > 2.0 * kB / p.nu * K);
        EXPECT_EQ(k.flags.viscosity_variant,
                  2.0 * p.r + lam1 / a0 * (p.nu - 2.0 * p.r / lamn) > 4.0 * kB / p.nu * K);
        EXPECT_EQ(k.flags.rate_dominance, chi > 0.0);
        EXPECT_NEAR(k.chi, chi, 1e-12);
    }
}

TEST(Constants, ViscosityFlagIndependentOfFriction) {
    auto g = make_grid(kTwoPi, 16);
    ModelParams p = model(g, 0.05, 0.0);
    const std::size_t n = smallest_n(p, 0.1);
    const auto spec = NoiseSpec::power_law(*g, 1e-4, 1.0, n);
    const auto k = compute_constants({p, spec, {0.1, n}, 1e-3, std::nullopt});
    EXPECT_TRUE(k.flags.viscosity_variant);
    EXPECT_FALSE(k.flags.r_gt_r0);
    EXPECT_EQ(k.kappa0, 0.0);
    EXPECT_FALSE(k.flags.rate_dominance);
}

TEST(Assumptions, RequiresSixteenRuns) {
    std::vector<CoupledRecord> runs(15);
    EXPECT_THROW(check_assumptions(runs, ErgodicityConstants{}, LayerWeights(1, 1, 1, 1)),
                 std::invalid_argument);
}

TEST(Assumptions, TailCheck) {
    const auto pts = martingale_tail_check(std::vector<double>(100, 0.0), 1.0);
    ASSERT_EQ(pts.size(), 6u);
    for (const auto& tp : pts) {
        EXPECT_EQ(tp.empirical, 0.0);
        EXPECT_TRUE(tp.pass);
    }
    const auto bad = martingale_tail_check(std::vector<double>(100, 100.0), 1.0);
    EXPECT_FALSE(bad[0].pass);
}

// Without noise or forcing, runs started from coincident states pass every check.
TEST(Assumptions, QuietCoincidentRunsPass) {
    auto g = make_grid(kTwoPi, 16);
    ModelParams p = model(g, 0.05, 0.5);
    const std::size_t n = smallest_n(p, 0.5);
    const Stepper st(p, NoiseSpec());
    const ControlSpec cs{0.5, n};
    const auto k = compute_constants({p, NoiseSpec(), cs, 0.07, std::nullopt});
    std::vector<CoupledRecord> runs;
    for (int i = 0; i < 16; ++i) {
        const auto x = make_state(g, p.weights, i, 0.1);
        CoupledRecord rec;
        CoupledState s{x, x, 0.0, 0.0};
        rec.V_X0 = triple_norm_minus1_sq(x, p.weights);
        double D = 0.0;
        for (int j = 1; j <= 50; ++j) {
            CoupledStepInfo info;
            step_coupled(s, st, cs, st.draw(*std::make_unique<Rng>(0, 0)), &info);
            D += p.dt * info.ledger.dissipation;
            rec.times.push_back(j * p.dt);
            rec.xi_V.push_back(0.0);
            rec.cost.push_back(s.girsanov_cost);
            rec.G_sq.push_back(info.G_sq);
            rec.a3_ratio.push_back(info.a3_ratio);
            rec.V_X.push_back(triple_norm_minus1_sq(s.X, p.weights));
            rec.diss_integral.push_back(D);
            rec.X.push_back(0.0);
            rec.QV.push_back(0.0);
        }
        EXPECT_EQ(s.girsanov_cost, 0.0);
        runs.push_back(rec);
    }
    const auto rep = check_assumptions(runs, k, p.weights);
    EXPECT_TRUE(rep.A1.pass);
    EXPECT_TRUE(rep.A2.pass) << rep.A2.detail.dump();
    EXPECT_TRUE(rep.A3.pass);
    EXPECT_TRUE(rep.A4.pass) << rep.A4.detail.dump();
    const auto j = rep.to_json();
    for (const char* key : {"A1", "A2", "A3", "A4"}) {
        ASSERT_TRUE(j.contains(key));
        EXPECT_TRUE(j[key]["pass"].is_boolean());
        EXPECT_TRUE(j[key].contains("worst_slack"));
    }
}

std::vector<CoupledRecord> coupled_runs(const Stepper& st, const ControlSpec& cs, double T, int count,
                                        double V0) {
    const LayerWeights& w = st.params().weights;
    std::vector<CoupledRecord> runs(count);
    parallel_for(count, 4, [&](std::size_t i) {
        const auto x = make_state(st.params().grid, w, 100 + i, V0);
        const auto y = make_state(st.params().grid, w, 500 + i, V0);
        Rng rng(3, stream_id(StreamRole::trajectory, i));
        runs[i] = run_coupled(x, y, st, cs, T, rng);
    });
    return runs;
}

TEST(Assumptions, PassingConfigPasses) {
    auto g = make_grid(kTwoPi, 16);
    const ModelParams p = model(g, 0.05, 0.5);
    const ControlSpec cs{0.5, smallest_n(p, 0.5)};
    const auto spec = NoiseSpec::power_law(*g, 1e-5, 1.0, cs.n);
    const Stepper st(p, spec);
    const double k0 = measure_bilinear_constant(g, p.weights, 300, 1).k0;
    const auto k = compute_constants({p, spec, cs, k0, std::nullopt});
    ASSERT_TRUE(k.conditions_pass());
    const auto rep = check_assumptions(coupled_runs(st, cs, 4.0, 16, 1e-2), k, p.weights);
    EXPECT_TRUE(rep.all_pass()) << rep.to_json().dump();
}

TEST(Assumptions, NegativeControlFailsA1) {
    auto g = make_grid(kTwoPi, 16);
    const ModelParams p = model(g, 1e-3, 0.0);
    const ControlSpec cs{0.01, smallest_n(p, 0.01)};
    const auto spec = NoiseSpec::power_law(*g, 1e-5, 1.0, cs.n);
    const Stepper st(p, spec);
    const double k0 = measure_bilinear_constant(g, p.weights, 300, 1).k0;
    const auto k = compute_constants({p, spec, cs, k0, std::nullopt});
    EXPECT_FALSE(k.conditions_pass());
    const auto rep = check_assumptions(coupled_runs(st, cs, 1.0, 16, 1e-2), k, p.weights);
    EXPECT_FALSE(rep.A1.pass);
}

TEST(Contraction, RejectsCoincidentStart) {
    auto g = make_grid(kTwoPi, 8);
    const Stepper st(model(g, 0.1, 0.1), NoiseSpec());
    const auto x = make_state(g, LayerWeights(1, 1, 1, 1), 1, 1.0);
    EXPECT_THROW(contraction_factor(x, x, st, {0.1, 1.0, 1.0}, {0.1}, {}), std::invalid_argument);
}

TEST(Contraction, DissipativeFactorBelowOneAndDecreasing) {
    auto g = make_grid(kTwoPi, 16);
    const ModelParams p = model(g, 0.5, 0.5);
    const Stepper st(p, NoiseSpec::power_law(*g, 1e-4, 1.0, 20));
    const auto x = make_state(g, p.weights, 1, 1.0), y = make_state(g, p.weights, 2, 1.0);
    const auto est = contraction_factor(x, y, st, {0.2, 1.0, 1.0}, {0.5, 1.0, 2.0}, {16, 4, 4});
    ASSERT_EQ(est.rho.size(), 3u);
    EXPECT_LT(est.rho[0], 1.0);
    EXPECT_GT(est.rho[0], est.rho[1]);
    EXPECT_GT(est.rho[1], est.rho[2]);
}

TEST(SpectralGap, ObservablesAndDuality) {
    auto g = make_grid(kTwoPi, 16);
    const ModelParams p = model(g, 0.5, 0.5);
    const Stepper st(p, NoiseSpec::power_law(*g, 1e-4, 1.0, 20));
    std::vector<SpectralField2L> probes;
    for (int i = 0; i < 3; ++i) probes.push_back(make_state(g, p.weights, 10 + i, 0.5 + i));
    auto obs = default_observables(p.weights);
    obs.push_back({"capped_norm", [w = p.weights](const SpectralField2L& q) {
                       return std::min(std::sqrt(triple_norm_minus1_sq(q, w)), 1.0);
                   }});
    const SemimetricParams sp{0.2, 1.0, 1.0};
    const auto res = spectral_gap_check(obs, probes, st, sp, 1.0, 1.0, {16, 5, 4});
    ASSERT_EQ(res.size(), obs.size());
    for (const auto& r : res) {
        if (r.name == "constant") {
            EXPECT_TRUE(r.skipped);
            continue;
        }
        EXPECT_TRUE(std::isfinite(r.seminorm)) << r.name;
        EXPECT_LE(r.duality_gap, r.W * (1.0 + 1e-12)) << r.name;
        EXPECT_TRUE(r.pass) << r.name << " seminorm " << r.seminorm << " Pt " << r.seminorm_Pt << " bound " << r.bound;
    }
}

}  // namespace
