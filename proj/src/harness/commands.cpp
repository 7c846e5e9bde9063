#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

#include "io.hpp"
#include "qg/kernels.hpp"

namespace qg::harness {

namespace {

using detail::ArtifactWriter;
using detail::checkpoint_bytes;
using detail::Csv;
using detail::member_name;
using json = nlohmann::json;

json num(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

void say(const RunContext& ctx, const std::string& s) {
    if (!ctx.quiet && ctx.log) *ctx.log << s << std::endl;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Least-squares slope of log(xi) against t over the steps where xi > 0.
double log_slope(const std::vector<double>& t, const std::vector<double>& xi) {
    double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!(xi[k] > 0.0)) continue;
        const double y = std::log(xi[k]);
        n += 1;
        st += t[k];
        sy += y;
        stt += t[k] * t[k];
        sty += t[k] * y;
    }
    const double den = n * stt - st * st;
    return n >= 2 && den > 0 ? (n * sty - st * sy) / den : 0.0;
}

ErgodicityConstants constants_for(const ExperimentConfig& c, const Setup& s, const ControlSpec& cs, double k0) {
    try {
        return compute_constants({s.model, s.noise, cs, k0, c.gamma});
    } catch (const std::invalid_argument& e) {
        throw ConditionError(e.what());
    }
}

struct Verdicts {
    bool A1 = true, A3 = true;
    double a1_slack = std::numeric_limits<double>::infinity(), a3_max = 0.0;
};

int cmd_simulate(const ExperimentConfig& c, const RunContext& ctx, ArtifactWriter& out, std::string& msg) {
    const Setup s = build_setup(c);
    const Stepper st(s.model, s.noise);
    const SpectralField2L q0 = initial_state(c, s, 0);
    out.write("initial.qg2l", checkpoint_bytes(q0, 0.0));
    say(ctx, "simulate: " + std::to_string(c.ensemble) + " member(s), " + std::to_string(step_count(c.T, c.dt)) +
                 " steps");

    std::vector<TrajectoryRecord> recs(c.ensemble);
    parallel_for(c.ensemble, ctx.threads, [&](std::size_t i) {
        Rng rng(c.seed, stream_id(StreamRole::trajectory, i));
        recs[i] = integrate(q0, st, c.T, rng, {.sample_every = c.sample_every});
    });

    json members = json::array();
    std::size_t blown = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& r = recs[i];
        Csv csv({"t", "V", "dissipation", "energy1", "energy2"});
        for (std::size_t j = 1; j < r.times.size(); ++j)
            csv.row({r.times[j], r.V[j], r.dissipation[j], r.energy1[j], r.energy2[j]});
        out.write(member_name("trajectory", i, "csv"), csv.str());
        out.write(member_name("final", i, "qg2l"), checkpoint_bytes(r.final_state, r.final_time));
        blown += r.blew_up;
        members.push_back({{"member", i},
                           {"final_time", r.final_time},
                           {"final_V", num(r.step_V.empty() ? r.V0 : r.step_V.back())},
                           {"blew_up", r.blew_up},
                           {"blowup_time", r.blew_up ? json(r.blowup_time) : json(nullptr)}});
    }
    out.write_json("simulate_summary.json", {{"schema_version", kReportSchema},
                                             {"members", members},
                                             {"blew_up", blown}});
    if (blown) {
        msg = std::to_string(blown) + " member(s) blew up; last good states written";
        return kBlowUp;
    }
    return kOk;
}

int cmd_couple(const ExperimentConfig& c, const RunContext& ctx, ArtifactWriter& out, std::string& msg) {
    const Setup s = build_setup(c);
    const ControlSpec cs = resolve_control(c, s);
    const Stepper st(s.model, s.noise);
    const double k0 = resolve_k0(c, s);
    const auto k = constants_for(c, s, cs, k0);
    const SpectralField2L x0 = initial_state(c, s, 0), y0 = initial_state(c, s, 1);
    out.write("initial.qg2l", checkpoint_bytes(x0, 0.0));
    out.write("initial_y.qg2l", checkpoint_bytes(y0, 0.0));
    say(ctx, "couple: " + std::to_string(c.ensemble) + " pair(s), a=" + format_double(cs.a) +
                 " n=" + std::to_string(cs.n));

    std::vector<CoupledRecord> runs(c.ensemble);
    parallel_for(c.ensemble, ctx.threads, [&](std::size_t i) {
        Rng rng(c.seed, stream_id(StreamRole::trajectory, i));
        runs[i] = run_coupled(x0, y0, st, cs, c.T, rng);
    });

    Verdicts v;
    v.A1 = k.kappa0 > 0.0;
    json pairs = json::array();
    std::vector<double> slopes, ratios;
    std::size_t blown = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        Csv csv({"t", "xi_V", "girsanov_cost", "G_sq"});
        for (std::size_t j = 0; j < r.times.size(); ++j)
            if ((j + 1) % c.sample_every == 0) csv.row({r.times[j], r.xi_V[j], r.cost[j], r.G_sq[j]});
        out.write(member_name("pair", i, "csv"), csv.str());
        out.write(member_name("final", i, "qg2l"), checkpoint_bytes(r.final_state.X, r.final_state.t));
        out.write(member_name("final_y", i, "qg2l"), checkpoint_bytes(r.final_state.Y, r.final_state.t));
        blown += r.blew_up;
        const double slack = contraction_inequality_slack(r, k.kappa0, k.kappa1);
        double a3 = 0.0;
        for (double x : r.a3_ratio) a3 = std::max(a3, x);
        v.a1_slack = std::min(v.a1_slack, slack);
        v.a3_max = std::max(v.a3_max, a3);
        const double ratio = r.xi_V0 > 0.0 && !r.xi_V.empty() ? std::sqrt(r.xi_V.back() / r.xi_V0) : 0.0;
        const double slope = log_slope(r.times, r.xi_V);
        slopes.push_back(slope);
        ratios.push_back(ratio);
        pairs.push_back({{"pair", i},
                         {"terminal_ratio", ratio},
                         {"log_slope", slope},
                         {"girsanov_cost", r.cost.empty() ? 0.0 : r.cost.back()},
                         {"A1_slack", num(slack)},
                         {"A3_max_ratio", a3},
                         {"blew_up", r.blew_up}});
    }
    v.A1 = v.A1 && v.a1_slack >= 0.0;
    v.A3 = v.a3_max <= 1.0 + 1e-10;
    out.write_json("couple_summary.json",
                   {{"schema_version", kReportSchema},
                    {"control", {{"a", cs.a}, {"n", cs.n}, {"lambda_n", k.lambda_n}}},
                    {"constants", k.to_json()},
                    {"A1", {{"pass", v.A1}, {"kappa0", k.kappa0}, {"kappa1", k.kappa1}, {"worst_slack", num(v.a1_slack)}}},
                    {"A3", {{"pass", v.A3}, {"max_ratio", v.a3_max}}},
                    {"median_log_slope", num(median(slopes))},
                    {"median_terminal_ratio", num(median(ratios))},
                    {"pairs", pairs}});
    if (blown) {
        msg = std::to_string(blown) + " pair(s) blew up";
        return kBlowUp;
    }
    if (!v.A1 || !v.A3) {
        msg = std::string("coupling verdict failed:") + (v.A1 ? "" : " A1") + (v.A3 ? "" : " A3");
        return kCondition;
    }
    return kOk;
}

std::vector<double> default_contraction_times(const std::vector<CoupledRecord>& runs, double dt, double T,
                                              double& decay_time) {
    decay_time = std::nan("");
    const std::size_t n = runs.front().xi_V.size();
    for (std::size_t k = 0; k < n && std::isnan(decay_time); ++k) {
        std::vector<double> r;
        for (const auto& run : runs)
            r.push_back(run.xi_V0 > 0.0 ? std::sqrt(run.xi_V[k] / run.xi_V0) : 0.0);
        if (median(r) <= 0.1) decay_time = runs.front().times[k];
    }
    const double tc = std::isnan(decay_time) ? T : decay_time;
    std::vector<double> out;
    for (double f : {0.25, 0.5, 1.0}) {
        const double t = std::max(1.0, std::round(f * tc / dt)) * dt;
        if (out.empty() || t > out.back()) out.push_back(t);
    }
    return out;
}

int cmd_verify(const ExperimentConfig& c, const RunContext& ctx, ArtifactWriter& out, std::string& msg) {
    json report{{"schema_version", kReportSchema}};
    auto flush = [&] { out.write_json("verify_report.json", report); };
    try {
        const Setup s = build_setup(c);
        const ControlSpec cs = resolve_control(c, s);
        const Stepper st(s.model, s.noise);
        const LayerWeights& w = s.model.weights;
        const double k0 = resolve_k0(c, s);
        const auto k = constants_for(c, s, cs, k0);
        report["control"] = {{"a", cs.a}, {"n", cs.n}};
        report["constants"] = k.to_json();
        say(ctx, "verify: constants ready, conditions " + std::string(k.conditions_pass() ? "pass" : "fail"));

        SemimetricParams sp;
        sp.upsilon = c.upsilon.value_or(k.upsilon);
        sp.alpha = c.alpha.value_or(0.5 * k.alpha0);
        sp.N_scale = c.N_scale;
        if (!(sp.upsilon > 0.0)) throw ValidationError("semimetric.upsilon: kappa1/kappa2 is 0; set it explicitly");
        try {
            sp.validate(k.alpha0);
        } catch (const std::invalid_argument& e) {
            throw ValidationError(e.what());
        }
        report["semimetric"] = {{"alpha", sp.alpha}, {"upsilon", sp.upsilon}, {"N", sp.N_scale}, {"alpha0", k.alpha0}};

        const SpectralField2L x0 = initial_state(c, s, 0), y0 = initial_state(c, s, 1);
        const double Tv = c.verify_T.value_or(c.T);
        std::vector<CoupledRecord> runs(c.verify_runs);
        parallel_for(runs.size(), ctx.threads, [&](std::size_t i) {
            Rng rng(c.seed, stream_id(StreamRole::trajectory, i));
            runs[i] = run_coupled(x0, y0, st, cs, Tv, rng);
        });
        for (const auto& r : runs)
            if (r.blew_up) throw BlowUp(r.times.empty() ? 0.0 : r.times.back(), r.times.size());
        say(ctx, "verify: " + std::to_string(runs.size()) + " coupled runs done");
        {
            std::vector<double> slopes, ratios;
            for (const auto& r : runs) {
                slopes.push_back(log_slope(r.times, r.xi_V));
                ratios.push_back(r.xi_V0 > 0.0 && !r.xi_V.empty() ? std::sqrt(r.xi_V.back() / r.xi_V0) : 0.0);
            }
            report["synchronisation"] = {{"T", Tv},
                                         {"pairs", runs.size()},
                                         {"median_log_slope", num(median(slopes))},
                                         {"median_terminal_ratio", num(median(ratios))}};
        }

        std::vector<double> tail(c.tail_runs);
        parallel_for(tail.size(), ctx.threads, [&](std::size_t i) {
            Rng rng(c.seed, stream_id(StreamRole::measurement, i));
            const auto rec = integrate(x0, st, c.tail_T, rng, {.sample_every = step_count(c.tail_T, c.dt) + 1});
            if (rec.blew_up) throw BlowUp(rec.blowup_time, 0);
            tail[i] = rec.xi_sup(k.gamma);
        });
        const auto rep = check_assumptions(runs, k, w, &tail);
        report["assumptions"] = rep.to_json();
        say(ctx, "verify: assumptions A1 " + std::string(rep.A1.pass ? "pass" : "fail") + ", A2 " +
                     (rep.A2.pass ? "pass" : "fail") + ", A3 " + (rep.A3.pass ? "pass" : "fail") + ", A4 " +
                     (rep.A4.pass ? "pass" : "fail"));

        // realised Girsanov cost against its pathwise bound
        if (k.chi > 0.0 && k.flags.range_Q) {
            const double cc = cs.a * cs.a * k.lambda_n, qinv = qinv_norm_sq(s.noise, cs.n, w);
            std::size_t violations = 0;
            double worst = 0.0;
            for (const auto& r : runs) {
                const double Xi = 2.0 * w.h1 * r.xi_sup(k.gamma);
                const double b = girsanov_cost_bound(cc, qinv, k.chi, r.xi_V0, k.upsilon, r.V_X0, Xi, Tv);
                const double cost = r.cost.empty() ? 0.0 : r.cost.back();
                violations += cost > b;
                if (b > 0.0) worst = std::max(worst, cost / b);
            }
            report["girsanov"] = {{"violations", violations}, {"max_cost_over_bound", worst}};
        } else {
            report["girsanov"] = {{"skipped", k.chi > 0.0 ? "control outside range of Q" : "chi <= 0"}};
        }

        double decay_time = std::nan("");
        const auto times = c.contraction_times.empty() ? default_contraction_times(runs, c.dt, Tv, decay_time)
                                                       : c.contraction_times;
        const auto est = contraction_factor(x0, y0, st, sp, times, {c.contraction_samples, c.seed, ctx.threads});
        report["contraction"] = {{"times", est.times},   {"W", est.W},   {"rho", est.rho},
                                 {"W_dN", est.W_dN},     {"d0", est.d0}, {"decay_time_10x", num(decay_time)},
                                 {"samples", c.contraction_samples}};
        const bool rho_below_one =
            std::all_of(est.rho.begin(), est.rho.end(), [](double r) { return r < 1.0; });
        say(ctx, "verify: rho(t_max) = " + format_double(est.rho.back()));

        bool bound_holds = false;
        if (k.chi > 0.0) {
            std::vector<double> costs, xis;
            for (const auto& r : runs) {
                costs.push_back(r.cost.empty() ? 0.0 : r.cost.back());
                xis.push_back(2.0 * w.h1 * r.xi_sup(k.gamma));
            }
            const double th = theta_alpha(x0, y0, sp, w);
            const auto b = wasserstein_coupling_bound(costs, xis, th, sp, k.chi, est.times.back());
            bound_holds = b.total >= est.W_dN.back();
            report["coupling_bound"] = {{"t", est.times.back()},       {"delta", b.delta},
                                        {"M_delta", num(b.M_delta)},   {"tv_term", b.tv_term},
                                        {"C_Xi", num(b.C_Xi)},         {"C_Xi_se", num(b.C_Xi_se)},
                                        {"theta0", num(th)},           {"decay_term", num(b.decay_term)},
                                        {"total", num(b.total)},       {"empirical_W_dN", est.W_dN.back()},
                                        {"holds", bound_holds}};
        } else {
            report["coupling_bound"] = {{"skipped", "chi <= 0"}};
        }
        report["rho_formula"] = "rho = N C_Xi theta e^{-chi alpha t} + TV(M_delta); constants estimated, not asserted";

        const bool claim = k.conditions_pass() && rep.all_pass() && rho_below_one && bound_holds;
        report["claims"] = {{"conditions_pass", k.conditions_pass()},
                            {"failed_conditions", k.failed_conditions()},
                            {"assumptions_pass", rep.all_pass()},
                            {"contraction_observed", rho_below_one},
                            {"coupling_bound_holds", bound_holds},
                            {"contraction_claim", claim}};
        flush();
        if (!claim) {
            msg = "no contraction claim:";
            for (const auto& f : k.failed_conditions()) msg += " " + f;
            if (!rep.A1.pass) msg += " A1";
            if (!rep.A2.pass) msg += " A2";
            if (!rep.A3.pass) msg += " A3";
            if (!rep.A4.pass) msg += " A4";
            if (!rho_below_one) msg += " rho>=1";
            if (!bound_holds) msg += " coupling_bound";
            return kCondition;
        }
        return kOk;
    } catch (const std::exception& e) {
        report["error"] = e.what();
        flush();
        throw;
    }
}

int cmd_constants(const ExperimentConfig& c, const RunContext& ctx, ArtifactWriter& out, std::string& msg) {
    const Setup s = build_setup(c);
    const ControlSpec cs = resolve_control_unchecked(c, s);
    const double k0 = resolve_k0(c, s);
    const auto k = constants_for(c, s, cs, k0);
    json j{{"schema_version", kReportSchema},
           {"control", {{"a", cs.a}, {"n", cs.n}}},
           {"k0_source", c.k0 ? "config" : "measured"},
           {"constants", k.to_json()}};
    out.write_json("constants.json", j);
    if (!ctx.quiet && ctx.log) {
        for (const auto& [key, val] : j["constants"].items()) {
            if (val.is_object() || val.is_array()) continue;
            std::string name = key;
            name.resize(20, ' ');
            *ctx.log << name << val.dump() << "\n";
        }
        for (const auto& [key, val] : j["constants"]["flags"].items()) {
            std::string name = key;
            name.resize(20, ' ');
            *ctx.log << name << (val.get<bool>() ? "pass" : "FAIL") << "\n";
        }
    }
    if (!k.conditions_pass()) {
        msg = "conditions failed:";
        for (const auto& f : k.failed_conditions()) msg += " " + f;
        return kCondition;
    }
    return kOk;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json artifacts_json(const std::vector<Artifact>& a) {
    json out = json::array();
    for (const auto& x : a) out.push_back({{"name", x.name}, {"sha256", x.sha256}, {"bytes", x.bytes}});
    return out;
}

std::pair<std::size_t, std::string> first_difference(const std::string& a, const std::string& b) {
    std::istringstream sa(a), sb(b);
    std::string la, lb;
    for (std::size_t line = 1;; ++line) {
        const bool ga = static_cast<bool>(std::getline(sa, la)), gb = static_cast<bool>(std::getline(sb, lb));
        if (!ga && !gb) return {0, ""};
        if (!ga || !gb || la != lb) return {line, "expected: " + (ga ? la : "<eof>") + "\nactual:   " + (gb ? lb : "<eof>")};
    }
}

}  // namespace

Outcome run_command(const std::string& command, const ExperimentConfig& c, const RunContext& ctx) {
    using Fn = int (*)(const ExperimentConfig&, const RunContext&, ArtifactWriter&, std::string&);
    Fn fn = nullptr;
    if (command == "simulate") fn = cmd_simulate;
    else if (command == "couple") fn = cmd_couple;
    else if (command == "verify") fn = cmd_verify;
    else if (command == "constants") fn = cmd_constants;
    else throw ValidationError("unknown command '" + command + "'");

    const auto t0 = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    ArtifactWriter out(ctx.out);
    Outcome o;
    std::string error;
    try {
        o.code = fn(c, ctx, out, o.message);
    } catch (const std::exception& e) {
        error = e.what();
        o.artifacts = out.artifacts();
        json m{{"command", command}, {"error", error}, {"artifacts", artifacts_json(o.artifacts)}};
        std::ofstream(out.dir() / "manifest.json") << m.dump(2) << "\n";
        throw;
    }
    o.artifacts = out.artifacts();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json m{{"schema_version", kReportSchema},
           {"command", command},
           {"version", kVersion},
           {"config", serialize(c)},
           {"config_hash", config_hash(c)},
           {"seeds", {{"run", c.seed}, {"init", c.initial_seed()}, {"k0", c.k0_seed}}},
           {"threads", ctx.threads},
           {"kernel", kernels::active_name()},
           {"started_utc", started},
           {"wall_clock_seconds", wall},
           {"exit_code", o.code},
           {"message", o.message},
           {"artifacts", artifacts_json(o.artifacts)}};
    std::ofstream(out.dir() / "manifest.json") << m.dump(2) << "\n";
    return o;
}

Outcome replay(const std::filesystem::path& manifest, const ReplayOverrides& ov, const RunContext& ctx) {
    json m;
    try {
        m = json::parse(read_file(manifest));
    } catch (const std::exception& e) {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
    if (!m.contains("config") || !m.contains("artifacts") || !m.contains("command"))
        throw ValidationError("manifest: missing command, config or artifacts");
    const auto src = manifest.parent_path();
    if (std::filesystem::exists(ctx.out) && std::filesystem::equivalent(ctx.out, src.empty() ? "." : src))
        throw ValidationError("replay: --out must differ from the original run directory");

    ExperimentConfig cfg = ov.config ? *ov.config : load_config_string(m["config"].get<std::string>());
    if (ov.seed) cfg.seed = *ov.seed;
    if (m.value("kernel", "") != kernels::active_name())
        say(ctx, "replay: recorded kernels '" + m.value("kernel", "") + "' differ from active '" +
                     kernels::active_name() + "'; set QG2_KERNELS to match for bit-exact output");

    Outcome run;
    std::string run_error;
    try {
        run = run_command(m["command"].get<std::string>(), cfg, ctx);
    } catch (const BlowUp& e) {
        run_error = e.what();
        run.code = kBlowUp;
    } catch (const ConditionError& e) {
        run_error = e.what();
        run.code = kCondition;
    }

    Outcome o;
    json rows = json::array();
    std::size_t bad = 0;
    for (const auto& a : m["artifacts"]) {
        const std::string name = a["name"];
        const auto it = std::find_if(run.artifacts.begin(), run.artifacts.end(),
                                     [&](const Artifact& x) { return x.name == name; });
        json row{{"name", name}, {"expected", a["sha256"]}};
        if (it == run.artifacts.end()) {
            row["status"] = "missing";
            ++bad;
        } else if (it->sha256 == a["sha256"].get<std::string>()) {
            row["status"] = "match";
        } else {
            row["status"] = "mismatch";
            row["actual"] = it->sha256;
            ++bad;
            const auto ext = std::filesystem::path(name).extension();
            if ((ext == ".csv" || ext == ".json") && std::filesystem::exists(src / name)) {
                const auto [line, text] = first_difference(read_file(src / name), read_file(ctx.out / name));
                row["first_difference_line"] = line;
                row["diff"] = text;
            }
        }
        rows.push_back(row);
        say(ctx, "replay: " + row["status"].get<std::string>() + "  " + name);
    }
    for (const auto& a : run.artifacts) {
        const bool known = std::any_of(m["artifacts"].begin(), m["artifacts"].end(),
                                       [&](const json& x) { return x["name"] == a.name; });
        if (!known) {
            rows.push_back({{"name", a.name}, {"status", "extra"}, {"actual", a.sha256}});
            ++bad;
        }
    }
    const int expected_code = m.value("exit_code", 0);
    const bool code_ok = run.code == expected_code;
    json rep{{"manifest", manifest.string()},
             {"config_hash_expected", m.value("config_hash", "")},
             {"config_hash_actual", config_hash(cfg)},
             {"exit_code_expected", expected_code},
             {"exit_code_actual", run.code},
             {"artifacts", rows},
             {"pass", bad == 0 && code_ok}};
    if (!run_error.empty()) rep["run_error"] = run_error;
    std::ofstream(ctx.out / "replay_report.json") << rep.dump(2) << "\n";
    o.artifacts = run.artifacts;
    if (bad == 0 && code_ok) {
        o.message = "all " + std::to_string(rows.size()) + " artifacts match";
        o.code = kOk;
    } else {
        o.message = std::to_string(bad) + " artifact(s) differ" +
                    (code_ok ? "" : ", exit code " + std::to_string(run.code) + " vs " + std::to_string(expected_code));
        o.code = kCondition;
    }
    return o;
}

}  // namespace qg::harness
