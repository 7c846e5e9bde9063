#include <algorithm>
#include <cmath>
#include <limits>

#include "qg/ergodics.hpp"

namespace qg {

double alpha0_formula(double upsilon, double gamma) {
    if (std::isinf(gamma)) return 0.5;
    return std::min(0.5, 2.0 * gamma / (upsilon + 2.0 * gamma));
}

double kappa2_formula(double nu, double trQ, double lambda1, double gamma) {
    if (trQ == 0.0) return nu;
    return nu - 2.0 * gamma * trQ / (lambda1 * lambda1);
}

ErgodicityConstants compute_constants(const ConstantsInput& in) {
    const ModelParams& p = in.model;
    p.validate();
    const Grid& g = *p.grid;
    const LayerWeights& w = p.weights;
    const ControlSpec& c = in.control;
    if (c.n < 1 || c.n > g.num_modes()) throw std::invalid_argument("constants: control n out of range");
    if (!(in.k0 >= 0.0) || !std::isfinite(in.k0)) throw std::invalid_argument("constants: k0 must be finite");

    ErgodicityConstants k;
    k.lambda1 = g.lambda1();
    k.lambda_n = g.lambda_n(c.n);
    k.a0 = w.a0(g);
    k.k0 = in.k0;
    k.kB = in.k0 * in.k0 / (2.0 * p.nu);
    k.TrQ = in.noise.trace();
    k.TQ = noise_trace_TQ(g, w, in.noise);
    k.forcing_term = p.forcing.grid ? w.h1 * norm_Hk_sq(p.forcing, -2) / p.nu : 0.0;

    const double m = std::min(c.a, p.r);
    const double nu_eff = p.nu - 2.0 * c.a / k.lambda_n;
    k.kappa0 = 2.0 * m / k.a0;
    k.kappa0_stated = 2.0 * p.r;
    k.kappa0_viscous = (2.0 * m + k.lambda1 * std::max(0.0, nu_eff)) / k.a0;
    k.kappa1 = 2.0 * k.kB;

    if (in.gamma) {
        if (!(*in.gamma > 0.0)) throw std::invalid_argument("constants: gamma must be positive");
        k.gamma = *in.gamma;
    } else {
        k.gamma = k.TrQ > 0.0 ? k.lambda1 * k.lambda1 * p.nu / (4.0 * k.TrQ)
                              : std::numeric_limits<double>::infinity();
    }
    k.kappa2 = kappa2_formula(p.nu, k.TrQ, k.lambda1, k.gamma);
    if (!(k.kappa2 > 0.0))
        throw std::invalid_argument("constants: kappa2 <= 0; gamma must be below lambda1^2 nu / (2 TrQ)");
    k.kappa3 = k.TQ + k.forcing_term;
    k.upsilon = k.kappa1 / k.kappa2;
    k.chi = k.kappa0 - k.upsilon * k.kappa3;
    k.gamma_A2 = k.gamma / (2.0 * w.h1);
    k.alpha0 = alpha0_formula(k.upsilon, k.gamma_A2);
    k.gamma1 = p.nu * k.lambda1 / k.a0;
    k.K = k.forcing_term + k.TQ;
    k.K_V = k.K / k.gamma1;
    k.r0 = 2.0 * k.kB / p.nu * (k.forcing_term + k.TQ);

    k.flags.range_Q = true;
    for (std::size_t i = 1; i <= c.n; ++i)
        if (!(in.noise.sigma(i) > 0.0)) k.flags.range_Q = false;
    k.flags.condition_n = nu_eff > 0.0;
    k.flags.kappa2_positive = k.kappa2 > 0.0;
    k.flags.r_gt_r0 = p.r > k.r0;
    k.flags.viscosity_variant =
        2.0 * p.r + k.lambda1 / k.a0 * (p.nu - 2.0 * p.r / k.lambda_n) >
        4.0 * k.kB / p.nu * (k.TQ + k.forcing_term);
    k.flags.rate_dominance = k.chi > 0.0;
    return k;
}

bool ErgodicityConstants::conditions_pass() const { return failed_conditions().empty(); }

std::vector<std::string> ErgodicityConstants::failed_conditions() const {
    std::vector<std::string> f;
    if (!flags.range_Q) f.push_back("range-Q");
    if (!flags.condition_n) f.push_back("condition_n");
    if (!flags.kappa2_positive) f.push_back("kappa2_positive");
    if (!flags.rate_dominance) f.push_back("rate_dominance");
    return f;
}

namespace {
nlohmann::json num(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}
}  // namespace

nlohmann::json ErgodicityConstants::to_json() const {
    nlohmann::json j;
    j["lambda1"] = num(lambda1);
    j["lambda_n"] = num(lambda_n);
    j["a0"] = num(a0);
    j["k0"] = num(k0);
    j["kB"] = num(kB);
    j["kappa0"] = num(kappa0);
    j["kappa0_stated"] = num(kappa0_stated);
    j["kappa0_viscous"] = num(kappa0_viscous);
    j["kappa1"] = num(kappa1);
    j["kappa2"] = num(kappa2);
    j["kappa3"] = num(kappa3);
    j["upsilon"] = num(upsilon);
    j["chi"] = num(chi);
    j["gamma"] = num(gamma);
    j["gamma_A2"] = num(gamma_A2);
    j["alpha0"] = num(alpha0);
    j["gamma1"] = num(gamma1);
    j["K"] = num(K);
    j["K_V"] = num(K_V);
    j["T_Q"] = num(TQ);
    j["TrQ"] = num(TrQ);
    j["forcing_term"] = num(forcing_term);
    j["r0"] = num(r0);
    j["flags"] = {{"range_Q", flags.range_Q},
                  {"condition_n", flags.condition_n},
                  {"kappa2_positive", flags.kappa2_positive},
                  {"r_gt_r0", flags.r_gt_r0},
                  {"viscosity_variant", flags.viscosity_variant},
                  {"rate_dominance", flags.rate_dominance}};
    j["conditions_pass"] = conditions_pass();
    j["failed_conditions"] = failed_conditions();
    return j;
}

}  // namespace qg
