#pragma once

#include <string>
#include <vector>

#include "qg/model.hpp"

namespace qg {

// Generalised coupling: the shadow process is driven by the same noise plus the
// control G = a P_n Lap(psi1 - psi1~) on layer 1.
struct ControlSpec {
    double a = 0.0;
    std::size_t n = 0;

    // Throws with the failing condition named: "range-Q" when a controlled mode
    // carries no noise, "condition_n" when nu - 2 a / lambda_n <= 0.
    void validate(const ModelParams& p, const NoiseSpec& spec) const;
};

struct CoupledState {
    SpectralField2L X, Y;
    double girsanov_cost = 0.0;
    double t = 0.0;
};

ScalarField control_G(const SpectralField2L& x, const SpectralField2L& y, const ControlSpec& c,
                      const Stepper& s);
// Depth-weighted |G|^2 = h1 |G|^2, the norm the coupling bound is stated in.
double control_norm_sq(const ScalarField& G, const LayerWeights& w);
// dt sum_{m<=n} G_m^2 / sigma_m
double girsanov_increment(const ScalarField& G, const NoiseSpec& spec, std::size_t n, double dt);

struct CoupledStepInfo {
    double G_sq = 0.0;       // at the start of the step
    double xi_V0 = 0.0;      // |||X - Y|||^2 at the start of the step
    double a3_ratio = 0.0;   // G_sq / (a^2 lambda_n xi_V0), 0 when xi vanishes
    StepLedger ledger;       // energy bookkeeping for X
};

void step_coupled(CoupledState& s, const Stepper& st, const ControlSpec& c, const NoiseIncrement& dW,
                  CoupledStepInfo* info = nullptr);

// Pathwise bound on the accumulated Girsanov cost:
// (c |Q_n^-1/2|^2 / chi) |||x0-y0|||^2 exp(upsilon (|||x0|||^2 + Xi)) (1 - exp(-chi t)),
// with c = a^2 lambda_n. Xi is the A2 random variable, already depth scaled.
double girsanov_cost_bound(double c, double qinv_sq, double chi, double xi0_V, double upsilon,
                           double V_x0, double Xi, double t);
// |Q_n^-1/2|^2 in the depth-weighted space: 1 / (h1 min_{m<=n} sigma_m).
double qinv_norm_sq(const NoiseSpec& spec, std::size_t n, const LayerWeights& w);

struct CoupledRecord {
    // per step k = 1..n (index k-1), quantities after the step unless noted
    std::vector<double> times;
    std::vector<double> xi_V;
    std::vector<double> cost;
    std::vector<double> G_sq;      // at the start of each step
    std::vector<double> a3_ratio;  // at the start of each step
    // ledger of the X trajectory
    std::vector<double> V_X, diss_integral, X, QV;
    double xi_V0 = 0.0, V_X0 = 0.0;
    CoupledState final_state;
    bool blew_up = false;

    double xi_sup(double gamma) const;
};

CoupledRecord run_coupled(const SpectralField2L& x0, const SpectralField2L& y0, const Stepper& s,
                          const ControlSpec& c, double T, Rng& rng);

}  // namespace qg
