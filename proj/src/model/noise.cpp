#include <cmath>

#include "qg/model.hpp"

namespace qg {

NoiseIncrement noise_increment(GridPtr g, const NoiseSpec& spec, double dt, Rng& rng) {
    NoiseIncrement inc{SpectralField2L::zeros(g), std::vector<double>(spec.n_active())};
    for (std::size_t m = 1; m <= spec.n_active(); ++m) {
        // draw even when the variance is zero so streams stay aligned across specs
        const double z = rng.normal();
        const double a = std::sqrt(spec.sigma(m) * dt) * z;
        inc.coeff[m - 1] = a;
        if (a != 0.0) add_real_mode(inc.field.layer[0], *g, m, a);
    }
    return inc;
}

}  // namespace qg
