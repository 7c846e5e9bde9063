#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qg/harness.hpp"

namespace {

using namespace qg::harness;

std::optional<std::string> env(const char* name) {
    const char* v = std::getenv(name);
    if (v && *v) return std::string(v);
    return std::nullopt;
}

std::uint64_t parse_seed(const std::string& s, const char* origin) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoull(s, &pos);
        if (pos == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string(origin) + ": expected an unsigned integer seed, got '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic two-layer quasi-geostrophic model: simulation, coupling and ergodicity checks"};
    app.require_subcommand(1);

    std::string config_path, out_dir, seed_text, manifest_path;
    unsigned threads = 0;
    bool quiet = false;
    app.add_option("--config", config_path, "experiment config (key = value)");
    app.add_option("--seed", seed_text, "master seed; overrides QG2_SEED and run.seed");
    app.add_option("--out", out_dir, "output directory; overrides QG2_OUT and output.dir");
    app.add_option("--threads", threads, "worker threads; overrides run.threads")->check(CLI::PositiveNumber);
    app.add_flag("--quiet", quiet, "suppress progress output");

    for (const char* name : {"simulate", "couple", "verify", "constants"})
        app.add_subcommand(name, std::string("run ") + name)->fallthrough();
    app.add_subcommand("replay", "re-run a manifest and compare artifact checksums")->fallthrough();
    app.add_option("--manifest", manifest_path, "manifest.json of the original run (replay)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kValidation;
    }
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        RunContext ctx;
        ctx.quiet = quiet;
        ctx.log = &std::cerr;
        // replay perturbs only on an explicit --seed, never from the environment
        std::optional<std::uint64_t> seed;
        if (!seed_text.empty()) seed = parse_seed(seed_text, "--seed");
        else if (auto s = env("QG2_SEED"); s && command != "replay") seed = parse_seed(*s, "QG2_SEED");
        std::optional<std::string> out = out_dir.empty() ? env("QG2_OUT") : std::optional(out_dir);

        Outcome o;
        if (command == "replay") {
            if (manifest_path.empty()) throw ValidationError("--manifest is required for replay");
            ReplayOverrides ov;
            if (!config_path.empty()) ov.config = load_config(config_path);
            ov.seed = seed;
            ctx.out = out.value_or(std::filesystem::path(manifest_path).parent_path() / "replay");
            ctx.threads = threads ? threads : qg::default_threads();
            o = replay(manifest_path, ov, ctx);
        } else {
            if (config_path.empty()) throw ValidationError("--config is required for " + command);
            ExperimentConfig cfg = load_config(config_path);
            if (seed) cfg.seed = *seed;
            if (out) cfg.out_dir = *out;
            if (threads) cfg.threads = threads;
            ctx.out = cfg.out_dir;
            ctx.threads = cfg.threads ? cfg.threads : qg::default_threads();
            o = run_command(command, cfg, ctx);
        }
        if (!o.message.empty()) std::cerr << command << ": " << o.message << "\n";
        return o.code;
    } catch (const ValidationError& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return kValidation;
    } catch (const ConditionError& e) {
        std::cerr << "condition failed: " << e.what() << "\n";
        return kCondition;
    } catch (const qg::BlowUp& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return kBlowUp;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
}
