// levyclt: experiment runner. Exit codes: 0 ok, 2 config error, 3 numerical failure.

#include "levyclt/harness/config.hpp"
#include "levyclt/harness/csv.hpp"
#include "levyclt/harness/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    int threads = 1;
    bool no_timestamp = false;
    bool force = false;
};

int run(const std::string& name, const Flags& flags, bool seed_given) {
    using namespace levyclt;
    Config cfg = Config::from_file(flags.config);
    if (cfg.has("experiment.name") && cfg.get_string("experiment.name") != name)
        throw ConfigError("config is for experiment '" + cfg.get_string("experiment.name") + "', not '" + name + "'");
    if (flags.threads < 1) throw ConfigError("--threads must be >= 1");
    RunOptions opts;
    if (seed_given) opts.seed = flags.seed;
    opts.threads = flags.threads;
    const Config resolved = resolved_config(cfg, opts);
    const std::uint64_t hash = resolved.hash();

    const ExperimentResult res = run_experiment(name, resolved, opts);
    const bool ts = !flags.no_timestamp;
    const std::string content = res.table ? render_csv(*res.table, hash, ts) : render_text(res.text, hash, ts);
    OutputOptions oo{ts, flags.force};
    if (flags.out.empty()) {
        std::cout << content;
    } else {
        write_output(flags.out, content, hash, oo);
        const std::filesystem::path out(flags.out);
        for (const auto& [key, table] : res.extra) {
            auto extra = out;
            extra.replace_extension();
            extra += "." + key + ".csv";
            write_output(extra, render_csv(table, hash, ts), hash, oo);
        }
    }
    if (flags.out.empty() && !res.extra.empty()) std::cerr << "note: secondary tables need --out\n";
    for (const auto& [k, v] : res.metrics) std::cerr << name << ": " << k << " = " << fmt(v) << "\n";
    for (const auto& n : res.notes) std::cerr << name << ": " << n << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edgeworth, small-jump and Euler-scheme rate experiments"};
    app.require_subcommand(1);
    Flags flags;
    std::vector<CLI::App*> subs;
    for (const auto& name : levyclt::experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", flags.config, "INI config file")->required();
        sub->add_option("--seed", flags.seed, "master seed (overrides experiment.seed)");
        sub->add_option("--out", flags.out, "output path (stdout when omitted)");
        sub->add_option("--threads", flags.threads, "worker threads; results do not depend on it");
        sub->add_flag("--no-timestamp", flags.no_timestamp, "omit the generated_at line");
        sub->add_flag("--force", flags.force, "overwrite outputs recorded under a different config hash");
        subs.push_back(sub);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    CLI::App* chosen = nullptr;
    for (auto* s : subs)
        if (s->parsed()) chosen = s;
    const bool seed_given = chosen->count("--seed") > 0;
    try {
        return run(chosen->get_name(), flags, seed_given);
    } catch (const levyclt::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const levyclt::NumericalFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
