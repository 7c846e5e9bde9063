#include <algorithm>
#include <cmath>

#include "qg/ergodics.hpp"

namespace qg {

void SemimetricParams::validate(double alpha0) const {
    if (!(alpha > 0.0) || !(alpha < alpha0))
        throw std::invalid_argument("semimetric: alpha must lie in (0, alpha0=" + std::to_string(alpha0) + ")");
    if (!(upsilon > 0.0) || !std::isfinite(upsilon))
        throw std::invalid_argument("semimetric: upsilon must be positive");
    if (!(N_scale >= 1.0) || !std::isfinite(N_scale))
        throw std::invalid_argument("semimetric: N must be >= 1");
}

double lyapunov_V(const SpectralField2L& q, const LayerWeights& w) {
    return triple_norm_minus1_sq(q, w);
}

double theta_from_norms(double diff_V, double x_V, const SemimetricParams& sp) {
    if (diff_V == 0.0) return 0.0;
    return std::pow(diff_V, sp.alpha) * std::exp(sp.alpha * sp.upsilon * x_V);
}

double theta_alpha(const SpectralField2L& x, const SpectralField2L& y, const SemimetricParams& sp,
                   const LayerWeights& w) {
    return theta_from_norms(lyapunov_V(x - y, w), lyapunov_V(x, w), sp);
}

double d_N_from_thetas(double txy, double tyx, double N_scale) {
    return std::min({N_scale * txy, N_scale * tyx, 1.0});
}

double d_N(const SpectralField2L& x, const SpectralField2L& y, const SemimetricParams& sp,
           const LayerWeights& w) {
    const double dv = lyapunov_V(x - y, w);
    return d_N_from_thetas(theta_from_norms(dv, lyapunov_V(x, w), sp),
                           theta_from_norms(dv, lyapunov_V(y, w), sp), sp.N_scale);
}

double d_tilde(const SpectralField2L& x, const SpectralField2L& y, const SemimetricParams& sp,
               const LayerWeights& w) {
    const double dv = lyapunov_V(x - y, w);
    const double vx = lyapunov_V(x, w), vy = lyapunov_V(y, w);
    const double dn = d_N_from_thetas(theta_from_norms(dv, vx, sp), theta_from_norms(dv, vy, sp), sp.N_scale);
    return std::sqrt(dn * (1.0 + vx + vy));
}

namespace {
void check_tv_args(double M, double delta) {
    if (!(M >= 0.0)) throw std::invalid_argument("tv bound: M must be non-negative");
    if (!(delta > 0.0) || !(delta <= 1.0)) throw std::invalid_argument("tv bound: delta must lie in (0, 1]");
}
}  // namespace

double tv_bound_small(double M, double delta) {
    check_tv_args(M, delta);
    return std::min(1.0, std::pow(2.0, (1.0 - delta) / (1.0 + delta)) * std::pow(M, 1.0 / (1.0 + delta)));
}

double tv_bound_large(double M, double delta) {
    check_tv_args(M, delta);
    const double e = std::exp(-std::pow(std::pow(2.0, 2.0 - delta) * M, 1.0 / delta));
    return 1.0 - std::min(0.125, e) / 6.0;
}

CouplingBound wasserstein_coupling_bound(const std::vector<double>& costs,
                                         const std::vector<double>& xi_A2, double theta0,
                                         const SemimetricParams& sp, double chi, double t) {
    if (costs.empty() || xi_A2.empty()) throw std::invalid_argument("coupling bound: empty sample");
    CouplingBound b;
    b.delta = sp.alpha / (1.0 - sp.alpha);
    double m = 0.0;
    for (double c : costs) m += std::pow(std::max(c, 0.0), b.delta);
    b.M_delta = m / static_cast<double>(costs.size());
    b.tv_term = std::min(tv_bound_small(b.M_delta, b.delta), tv_bound_large(b.M_delta, b.delta));
    double cx = 0.0, cx2 = 0.0;
    for (double x : xi_A2) {
        const double e = std::exp(sp.upsilon * sp.alpha * x);
        cx += e;
        cx2 += e * e;
    }
    const double nx = static_cast<double>(xi_A2.size());
    b.C_Xi = cx / nx;
    b.C_Xi_se = nx > 1.0 ? std::sqrt(std::max(0.0, cx2 / nx - b.C_Xi * b.C_Xi) / (nx - 1.0)) : 0.0;
    b.theta0 = theta0;
    b.decay_term = sp.N_scale * b.C_Xi * theta0 * std::exp(-chi * sp.alpha * t);
    b.total = b.tv_term + b.decay_term;
    return b;
}

}  // namespace qg
