#include <algorithm>
#include <cmath>
#include <limits>

#include "qg/ergodics.hpp"

namespace qg {

namespace {

constexpr double kExponentTol = 1e-6;

}  // namespace

double martingale_sup(const std::vector<double>& X, const std::vector<double>& QV, double gamma) {
    double best = 0.0;
    for (std::size_t k = 0; k < X.size(); ++k) {
        const double v = QV[k] == 0.0 ? X[k] : X[k] - gamma * QV[k];
        best = std::max(best, v);
    }
    return best;
}

std::vector<TailPoint> martingale_tail_check(const std::vector<double>& xi, double gamma) {
    if (xi.empty()) throw std::invalid_argument("tail check: empty sample");
    const double n = static_cast<double>(xi.size());
    std::vector<TailPoint> out;
    for (double c : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0}) {
        TailPoint tp;
        tp.R = c / (2.0 * gamma);
        tp.bound = std::exp(-c);
        tp.empirical = static_cast<double>(std::count_if(xi.begin(), xi.end(), [&](double x) { return x > tp.R; })) / n;
        tp.se = std::sqrt(tp.bound * (1.0 - tp.bound) / n);
        tp.pass = tp.empirical <= tp.bound + 4.0 * tp.se;
        out.push_back(tp);
    }
    return out;
}

double energy_inequality_slack(const std::vector<double>& times, const std::vector<double>& V,
                               double V0, const std::vector<double>& diss, double xi_sup,
                               const ErgodicityConstants& k, double h1) {
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < V.size(); ++i) {
        const double lhs = V[i] - V0 + k.kappa2 * diss[i];
        const double rhs = k.kappa3 * times[i] + 2.0 * h1 * xi_sup;
        worst = std::min(worst, rhs - lhs);
    }
    return worst;
}

double contraction_inequality_slack(const CoupledRecord& run, double kappa0, double kappa1) {
    double worst = std::numeric_limits<double>::infinity();
    if (!(run.xi_V0 > 0.0)) return worst;
    for (std::size_t i = 0; i < run.xi_V.size(); ++i) {
        if (run.xi_V[i] == 0.0) continue;
        const double lhs = std::log(run.xi_V[i] / run.xi_V0);
        const double rhs = -kappa0 * run.times[i] + kappa1 * run.diss_integral[i];
        worst = std::min(worst, rhs + kExponentTol * std::abs(rhs) - lhs);
    }
    return worst;
}

AssumptionReport check_assumptions(const std::vector<CoupledRecord>& runs, const ErgodicityConstants& k,
                                   const LayerWeights& w, const std::vector<double>* tail_sample) {
    if (runs.size() < 16)
        throw std::invalid_argument("check_assumptions: need at least 16 trajectories, got " +
                                    std::to_string(runs.size()));
    for (const auto& r : runs)
        if (r.blew_up) throw std::invalid_argument("check_assumptions: a trajectory blew up");
    AssumptionReport rep;

    // A1
    {
        double worst = std::numeric_limits<double>::infinity();
        int failing = 0;
        for (const auto& r : runs) {
            const double s = contraction_inequality_slack(r, k.kappa0, k.kappa1);
            worst = std::min(worst, s);
            failing += s < 0.0;
        }
        const bool positive = k.kappa0 > 0.0;
        rep.A1.pass = positive && failing == 0;
        rep.A1.worst_slack = worst;
        rep.A1.detail = {{"kappa0", k.kappa0},
                         {"kappa1", k.kappa1},
                         {"kappa0_positive", positive},
                         {"pathwise_failures", failing},
                         {"exponent_tolerance", kExponentTol}};
    }

    // A2
    {
        double worst = std::numeric_limits<double>::infinity();
        int failing = 0;
        std::vector<double> xis;
        for (const auto& r : runs) {
            const double xi = martingale_sup(r.X, r.QV, k.gamma);
            xis.push_back(xi);
            const double s = energy_inequality_slack(r.times, r.V_X, r.V_X0, r.diss_integral, xi, k, w.h1);
            const double scale = r.V_X0 + *std::max_element(r.V_X.begin(), r.V_X.end());
            worst = std::min(worst, s);
            failing += s < -1e-12 * scale;
        }
        const auto tail = martingale_tail_check(tail_sample ? *tail_sample : xis, k.gamma);
        bool tail_ok = true;
        nlohmann::json tj = nlohmann::json::array();
        for (const auto& tp : tail) {
            tail_ok = tail_ok && tp.pass;
            tj.push_back({{"R", tp.R}, {"empirical", tp.empirical}, {"bound", tp.bound}, {"se", tp.se}, {"pass", tp.pass}});
        }
        rep.A2.pass = k.flags.kappa2_positive && k.flags.rate_dominance && failing == 0 && tail_ok;
        rep.A2.worst_slack = worst;
        rep.A2.detail = {{"kappa2", k.kappa2},
                         {"kappa3", k.kappa3},
                         {"gamma", k.gamma},
                         {"kappa2_positive", k.flags.kappa2_positive},
                         {"rate_dominance", k.flags.rate_dominance},
                         {"pathwise_failures", failing},
                         {"tail_samples", tail_sample ? tail_sample->size() : xis.size()},
                         {"tail", tj}};
    }

    // A3
    {
        double worst = 0.0;
        for (const auto& r : runs)
            for (double v : r.a3_ratio) worst = std::max(worst, v);
        rep.A3.pass = worst <= 1.0 + 1e-10;
        rep.A3.worst_slack = 1.0 - worst;
        rep.A3.detail = {{"max_ratio", worst}};
    }

    // A4 at five evenly spaced times
    {
        const std::size_t n = runs.front().V_X.size();
        double V0 = 0.0;
        for (const auto& r : runs) V0 += r.V_X0;
        V0 /= static_cast<double>(runs.size());
        double worst = std::numeric_limits<double>::infinity();
        bool ok = n > 0;
        nlohmann::json pts = nlohmann::json::array();
        for (int j = 1; j <= 5 && n > 0; ++j) {
            const std::size_t idx = std::max<std::size_t>(1, (n * j) / 5) - 1;
            double m = 0.0, m2 = 0.0;
            for (const auto& r : runs) {
                m += r.V_X[idx];
                m2 += r.V_X[idx] * r.V_X[idx];
            }
            const double cnt = static_cast<double>(runs.size());
            m /= cnt;
            const double se = std::sqrt(std::max(0.0, m2 / cnt - m * m) / (cnt - 1.0));
            const double t = runs.front().times[idx];
            const double bound = std::exp(-k.gamma1 * t) * V0 + k.K_V;
            const double slack = bound + 3.0 * se - m;
            worst = std::min(worst, slack);
            ok = ok && slack >= 0.0;
            pts.push_back({{"t", t}, {"mean_V", m}, {"se", se}, {"bound", bound}});
        }
        rep.A4.pass = ok;
        rep.A4.worst_slack = worst;
        rep.A4.detail = {{"gamma1", k.gamma1}, {"K_V", k.K_V}, {"points", pts}};
    }
    return rep;
}

nlohmann::json AssumptionReport::to_json() const {
    auto one = [](const AssumptionResult& r) {
        nlohmann::json j = r.detail;
        j["pass"] = r.pass;
        j["worst_slack"] = std::isfinite(r.worst_slack) ? nlohmann::json(r.worst_slack) : nlohmann::json("inf");
        return j;
    };
    return {{"A1", one(A1)}, {"A2", one(A2)}, {"A3", one(A3)}, {"A4", one(A4)}};
}

}  // namespace qg
