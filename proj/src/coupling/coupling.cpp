#include <algorithm>
#include <cmath>
#include <limits>

#include "qg/coupling.hpp"

namespace qg {

void ControlSpec::validate(const ModelParams& p, const NoiseSpec& spec) const {
    const Grid& g = *p.grid;
    if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("control: gain a must be positive");
    if (n < 1 || n > g.num_modes())
        throw std::invalid_argument("control: n must lie in [1, " + std::to_string(g.num_modes()) + "]");
    for (std::size_t m = 1; m <= n; ++m)
        if (!(spec.sigma(m) > 0.0))
            throw std::invalid_argument("range-Q violated: controlled mode " + std::to_string(m) +
                                        " has zero noise variance");
    if (!(p.nu - 2.0 * a / g.lambda_n(n) > 0.0))
        throw std::invalid_argument("condition_n violated: nu - 2a/lambda_n = " +
                                    std::to_string(p.nu - 2.0 * a / g.lambda_n(n)) + " <= 0");
}

ScalarField control_G(const SpectralField2L& x, const SpectralField2L& y, const ControlSpec& c,
                      const Stepper& s) {
    require_same_grid(*x.grid, *y.grid);
    const SpectralField2L d = s.psi_of(x - y);
    ScalarField lap{x.grid, d.layer[0]};
    for (std::size_t f = 0; f < lap.c.size(); ++f) lap.c[f] *= -c.a * x.grid->k2(f);
    return project_low(lap, c.n);
}

double control_norm_sq(const ScalarField& G, const LayerWeights& w) {
    return w.h1 * norm_Hk_sq(G, 0);
}

double girsanov_increment(const ScalarField& G, const NoiseSpec& spec, std::size_t n, double dt) {
    double s = 0.0;
    for (std::size_t m = 1; m <= n; ++m) {
        const double g = real_coefficient(G.c, *G.grid, m);
        if (g != 0.0) s += g * g / spec.sigma(m);
    }
    return dt * s;
}

void step_coupled(CoupledState& s, const Stepper& st, const ControlSpec& c, const NoiseIncrement& dW,
                  CoupledStepInfo* info) {
    const LayerWeights& w = st.params().weights;
    const double dt = st.params().dt;
    const ScalarField G = control_G(s.X, s.Y, c, st);
    if (info) {
        info->G_sq = control_norm_sq(G, w);
        info->xi_V0 = triple_norm_minus1_sq_psi(st.psi_of(s.X - s.Y), w);
        const double lam = st.params().grid->lambda_n(c.n);
        info->a3_ratio = info->xi_V0 > 0.0 ? info->G_sq / (c.a * c.a * lam * info->xi_V0) : 0.0;
    }
    s.girsanov_cost += girsanov_increment(G, st.noise(), c.n, dt);
    st.step(s.X, dW, nullptr, info ? &info->ledger : nullptr);
    st.step(s.Y, dW, &G, nullptr);
    s.t += dt;
}

double qinv_norm_sq(const NoiseSpec& spec, std::size_t n, const LayerWeights& w) {
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m <= n; ++m) mn = std::min(mn, spec.sigma(m));
    if (!(mn > 0.0)) throw std::invalid_argument("range-Q violated: zero variance among controlled modes");
    return 1.0 / (w.h1 * mn);
}

double girsanov_cost_bound(double c, double qinv_sq, double chi, double xi0_V, double upsilon,
                           double V_x0, double Xi, double t) {
    if (!(chi > 0.0)) throw std::invalid_argument("girsanov bound: chi must be positive");
    return c * qinv_sq / chi * xi0_V * std::exp(upsilon * (V_x0 + Xi)) * -std::expm1(-chi * t);
}

double CoupledRecord::xi_sup(double gamma) const {
    double best = 0.0;
    for (std::size_t k = 0; k < X.size(); ++k) best = std::max(best, QV[k] == 0.0 ? X[k] : X[k] - gamma * QV[k]);
    return best;
}

CoupledRecord run_coupled(const SpectralField2L& x0, const SpectralField2L& y0, const Stepper& s,
                          const ControlSpec& c, double T, Rng& rng) {
    c.validate(s.params(), s.noise());
    const double dt = s.params().dt;
    const std::size_t n = step_count(T, dt);
    const LayerWeights& w = s.params().weights;

    CoupledRecord rec;
    CoupledState st{x0, y0, 0.0, 0.0};
    rec.xi_V0 = triple_norm_minus1_sq_psi(s.psi_of(x0 - y0), w);
    rec.V_X0 = triple_norm_minus1_sq_psi(s.psi_of(x0), w);
    double D = 0.0, X = 0.0, QV = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const NoiseIncrement dW = s.draw(rng);
        CoupledStepInfo info;
        CoupledState next = st;
        step_coupled(next, s, c, dW, &info);
        if (!next.X.all_finite() || !next.Y.all_finite()) {
            rec.blew_up = true;
            break;
        }
        st = std::move(next);
        D += dt * info.ledger.dissipation;
        X += info.ledger.dX;
        QV += info.ledger.dQV;
        rec.times.push_back(k * dt);
        rec.xi_V.push_back(triple_norm_minus1_sq_psi(s.psi_of(st.X - st.Y), w));
        rec.cost.push_back(st.girsanov_cost);
        rec.G_sq.push_back(info.G_sq);
        rec.a3_ratio.push_back(info.a3_ratio);
        rec.V_X.push_back(triple_norm_minus1_sq_psi(s.psi_of(st.X), w));
        rec.diss_integral.push_back(D);
        rec.X.push_back(X);
        rec.QV.push_back(QV);
    }
    rec.final_state = std::move(st);
    return rec;
}

}  // namespace qg
