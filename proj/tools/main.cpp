#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "pipelines.hpp"

int main(int argc, char** argv) {
    CLI::App app{"slangevin: underdamped Langevin dynamics with singular potentials"};
    app.require_subcommand(1);

    const std::vector<std::string> commands{"simulate",     "verify-drift", "check-admissible",
                                            "control-path", "diagnose",     "gibbs-ref"};
    struct Options {
        std::string config;
        std::vector<std::string> overrides;
        int threads = 0;
        std::string out;
    };
    std::vector<Options> opts(commands.size());
    for (std::size_t i = 0; i < commands.size(); ++i) {
        auto* sub = app.add_subcommand(commands[i]);
        sub->add_option("config", opts[i].config, "run configuration file")->required();
        sub->add_option("--override", opts[i].overrides, "override as section.key=value");
        sub->add_option("--threads", opts[i].threads, "cap worker parallelism (0 = all cores)");
        sub->add_option("--out", opts[i].out, "output directory (overrides output.dir)");
    }

    CLI11_PARSE(app, argc, argv);

    std::size_t chosen = 0;
    for (std::size_t i = 0; i < commands.size(); ++i)
        if (app.get_subcommand(commands[i])->parsed()) chosen = i;
    const Options& o = opts[chosen];

    std::string out_dir = o.out;
    if (out_dir.empty())
        if (const char* env = std::getenv("SLANGEVIN_OUT")) out_dir = env;

    try {
        slgcli::RunConfig cfg = slgcli::RunConfig::from_file(o.config);
        for (const auto& ov : o.overrides) cfg.apply_override(ov);
        slgcli::run_pipeline(commands[chosen], cfg, out_dir, o.threads);
    } catch (const slgcli::UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const slgcli::VerificationFailure& e) {
        std::fprintf(stderr, "verification failed: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
