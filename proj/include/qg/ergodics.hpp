#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qg/coupling.hpp"
#include "json.hpp"

namespace qg {

struct ConstantsInput {
    ModelParams model;
    NoiseSpec noise;
    ControlSpec control;
    double k0 = 0.0;                  // bilinear constant, measured or supplied
    std::optional<double> gamma;      // tail exponent; default lambda1^2 nu / (4 TrQ)
};

struct ErgodicityConstants {
    double lambda1 = 0, lambda_n = 0, a0 = 0;
    double k0 = 0, kB = 0;            // kB = k0^2 / (2 nu)
    double kappa0 = 0;                // contraction rate used throughout: 2 min(a,r) / a0
    double kappa0_stated = 0;         // 2r, the rate claimed without the a0 factor
    double kappa0_viscous = 0;        // (2 min(a,r) + lambda1 (nu - 2a/lambda_n)) / a0
    double kappa1 = 0, kappa2 = 0, kappa3 = 0;
    double upsilon = 0, chi = 0;
    double gamma = 0;                 // tail exponent of sup(X - gamma <X>)
    double gamma_A2 = 0;              // same tail for the depth-scaled A2 variable 2 h1 Xi
    double alpha0 = 0;
    double gamma1 = 0, K = 0, K_V = 0;
    double TQ = 0, TrQ = 0, forcing_term = 0;  // forcing_term = h1 |f|_{-2}^2 / nu
    double r0 = 0;

    struct Flags {
        bool range_Q = false;
        bool condition_n = false;
        bool kappa2_positive = false;
        bool r_gt_r0 = false;
        bool viscosity_variant = false;
        bool rate_dominance = false;  // kappa0 > kappa1 kappa3 / kappa2, i.e. chi > 0
    } flags;
    bool conditions_pass() const;
    std::vector<std::string> failed_conditions() const;
    nlohmann::json to_json() const;
};

ErgodicityConstants compute_constants(const ConstantsInput& in);

// Pure formulas, exposed for spot checks.
double alpha0_formula(double upsilon, double gamma);
double kappa2_formula(double nu, double trQ, double lambda1, double gamma);

struct SemimetricParams {
    double alpha = 0.25;
    double upsilon = 1.0;
    double N_scale = 1.0;
    void validate(double alpha0) const;
};

double lyapunov_V(const SpectralField2L& q, const LayerWeights& w);
// |||x - y|||^{2 alpha} exp(alpha upsilon |||x|||^2), from the squared norms.
double theta_from_norms(double diff_V, double x_V, const SemimetricParams& sp);
double theta_alpha(const SpectralField2L& x, const SpectralField2L& y, const SemimetricParams& sp,
                   const LayerWeights& w);
double d_N(const SpectralField2L& x, const SpectralField2L& y, const SemimetricParams& sp,
           const LayerWeights& w);
double d_N_from_thetas(double txy, double tyx, double N_scale);
double d_tilde(const SpectralField2L& x, const SpectralField2L& y, const SemimetricParams& sp,
               const LayerWeights& w);

double tv_bound_small(double M, double delta);
double tv_bound_large(double M, double delta);

struct CouplingBound {
    double delta = 0, M_delta = 0, tv_term = 0;
    double C_Xi = 0, C_Xi_se = 0, theta0 = 0, decay_term = 0;
    double total = 0;
};
// Total-variation part from the Girsanov costs plus the decaying semimetric part.
CouplingBound wasserstein_coupling_bound(const std::vector<double>& costs,
                                         const std::vector<double>& xi_A2, double theta0,
                                         const SemimetricParams& sp, double chi, double t);

// Minimum-cost perfect matching on a dense n x n matrix (row-major). Returns the
// assignment row -> column.
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n);

inline constexpr std::size_t kMaxAssignmentSamples = 128;

// Mean matched cost between two equally sized samples under `dist`. Samples larger
// than kMaxAssignmentSamples are subsampled without replacement from `subsample_seed`.
double empirical_wasserstein(const std::vector<SpectralField2L>& a,
                             const std::vector<SpectralField2L>& b,
                             const std::function<double(const SpectralField2L&, const SpectralField2L&)>& dist,
                             std::uint64_t subsample_seed = 0);

struct EnsembleSpec {
    std::size_t samples = 32;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

// States of `samples` independent trajectories from q0 at each requested step index.
// result[t][i] is member i at steps[t].
std::vector<std::vector<SpectralField2L>> evolve_ensemble(const SpectralField2L& q0, const Stepper& s,
                                                          const std::vector<std::size_t>& steps,
                                                          const EnsembleSpec& es, StreamRole role,
                                                          std::uint64_t offset = 0);

struct ContractionEstimate {
    std::vector<double> times, W, rho;
    std::vector<double> W_dN;  // same ensembles under d_N
    double d0 = 0.0;
};
// rho(t) = W_dtilde(P_t(x0), P_t(y0)) / dtilde(x0, y0) with independent noise.
ContractionEstimate contraction_factor(const SpectralField2L& x0, const SpectralField2L& y0,
                                       const Stepper& s, const SemimetricParams& sp,
                                       const std::vector<double>& times, const EnsembleSpec& es);

struct AssumptionResult {
    bool pass = false;
    double worst_slack = 0.0;
    nlohmann::json detail;
};

struct AssumptionReport {
    AssumptionResult A1, A2, A3, A4;
    nlohmann::json to_json() const;
    bool all_pass() const { return A1.pass && A2.pass && A3.pass && A4.pass; }
};

struct TailPoint {
    double R, empirical, bound, se;
    bool pass;
};
// P(Xi > R) <= exp(-2 gamma R) + 4 SE on a grid R = c / (2 gamma).
std::vector<TailPoint> martingale_tail_check(const std::vector<double>& xi, double gamma);

// A2 pathwise: V(t) - V0 + kappa2 sum dt |Lap psi|^2 <= kappa3 t + 2 h1 Xi. Returns worst slack.
double energy_inequality_slack(const std::vector<double>& times, const std::vector<double>& V,
                               double V0, const std::vector<double>& diss, double xi_sup,
                               const ErgodicityConstants& k, double h1);

// A1 pathwise: log(|||xi_t|||^2 / |||xi_0|||^2) <= -kappa0 t + kappa1 D_t. Worst slack of the exponent.
double contraction_inequality_slack(const CoupledRecord& run, double kappa0, double kappa1);

// `tail_sample`, when given, replaces the coupled runs' sup values in the A2 tail
// check (a larger sample of short runs resolves the tail better).
AssumptionReport check_assumptions(const std::vector<CoupledRecord>& runs, const ErgodicityConstants& k,
                                   const LayerWeights& w, const std::vector<double>* tail_sample = nullptr);

// sup_k (X_k - gamma QV_k), the realised A2 martingale excursion (before depth scaling).
double martingale_sup(const std::vector<double>& X, const std::vector<double>& QV, double gamma);

struct Observable {
    std::string name;
    std::function<double(const SpectralField2L&)> f;
};
std::vector<Observable> default_observables(const LayerWeights& w);

struct SpectralGapResult {
    std::string name;
    bool skipped = false;  // constant on the probes
    double seminorm = 0, seminorm_Pt = 0, bound = 0, duality_gap = 0, W = 0;
    bool pass = false;
};
// |phi|_Lip is a difference quotient over the probes and every ensemble state,
// |P_t phi|_Lip one over the probes; P_t phi is a Monte Carlo mean over
// `es.samples` trajectories per probe.
std::vector<SpectralGapResult> spectral_gap_check(const std::vector<Observable>& obs,
                                                  const std::vector<SpectralField2L>& probes,
                                                  const Stepper& s, const SemimetricParams& sp,
                                                  double t, double rho, const EnsembleSpec& es);

}  // namespace qg
