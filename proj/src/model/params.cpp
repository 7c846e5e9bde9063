#include <cmath>
#include <string>

#include "qg/model.hpp"

namespace qg {

double PhysicalParams::reduced_gravity() const {
    const double rho0 = 0.5 * (rho1 + rho2);
    return g * (rho2 - rho1) / rho0;
}

void PhysicalParams::validate() const {
    for (double v : {f0, g, rho1, rho2, h1, h2})
        if (!std::isfinite(v)) throw std::invalid_argument("physical params: non-finite value");
    if (!(g > 0) || !(h1 > 0) || !(h2 > 0) || !(rho1 > 0))
        throw std::invalid_argument("physical params: g, h1, h2, rho1 must be positive");
    if (!(rho1 < rho2))
        throw std::invalid_argument("physical params: stable stratification requires rho1 < rho2");
    if (f0 == 0.0) throw std::invalid_argument("physical params: f0 must be nonzero");
}

LayerWeights PhysicalParams::weights() const {
    validate();
    const double gp = reduced_gravity();
    return LayerWeights(h1, h2, f0 * f0 / (gp * h1), f0 * f0 / (gp * h2));
}

NoiseSpec NoiseSpec::power_law(const Grid& g, double c, double s, std::size_t k_max) {
    if (k_max > g.num_modes())
        throw std::invalid_argument("noise: k_max=" + std::to_string(k_max) + " exceeds the " +
                                    std::to_string(g.num_modes()) + " resolved modes");
    if (!(c >= 0.0) || !std::isfinite(s))
        throw std::invalid_argument("noise: amplitude must be non-negative");
    std::vector<double> sig(k_max);
    for (std::size_t m = 1; m <= k_max; ++m) sig[m - 1] = c * std::pow(g.lambda_n(m), -s);
    return from_list(std::move(sig));
}

NoiseSpec NoiseSpec::from_list(std::vector<double> sigma) {
    for (double v : sigma)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("noise: variances must be finite and non-negative");
    NoiseSpec n;
    n.sigma_ = std::move(sigma);
    return n;
}

double NoiseSpec::trace() const {
    double s = 0.0;
    for (double v : sigma_) s += v;
    return s;
}

void NoiseSpec::validate(const Grid& g) const {
    if (sigma_.size() > g.num_modes())
        throw std::invalid_argument("noise: more variances than resolved modes");
}

void ModelParams::validate() const {
    if (!grid) throw std::invalid_argument("model: grid missing");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("model: nu must be positive");
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("model: r must be non-negative");
    if (!std::isfinite(beta)) throw std::invalid_argument("model: beta must be finite");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("model: dt must be positive");
    if (forcing.grid) {
        require_same_grid(*grid, *forcing.grid);
        const Grid& g = *grid;
        if (std::abs(forcing.c[0]) != 0.0)
            throw std::invalid_argument("model: forcing must have zero mean");
        for (std::size_t f = 1; f < g.size(); ++f) {
            if (!g.active(f) && std::abs(forcing.c[f]) != 0.0)
                throw std::invalid_argument("model: forcing must lie in the dealiased band");
            if (std::abs(forcing.c[f] - std::conj(forcing.c[g.conjugate(f)])) != 0.0)
                throw std::invalid_argument("model: forcing must be a real field");
        }
    }
}

ScalarField ModelParams::forcing_or_zero() const {
    return forcing.grid ? forcing : ScalarField::zeros(grid);
}

double inversion_a11(double lambda, const LayerWeights& w) {
    return (lambda + w.F2) / (lambda * (lambda + w.F1 + w.F2));
}

double noise_trace_TQ(const Grid& g, const LayerWeights& w, const NoiseSpec& spec) {
    double s = 0.0;
    for (std::size_t m = 1; m <= spec.n_active(); ++m)
        s += spec.sigma(m) * inversion_a11(g.lambda_n(m), w);
    return w.h1 * s;
}

}  // namespace qg
