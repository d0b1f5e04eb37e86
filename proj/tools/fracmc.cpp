#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fracmc/config.hpp"
#include "fracmc/errors.hpp"
#include "fracmc/experiments.hpp"
#include "fracmc/report.hpp"

namespace {

struct Flags {
    std::string config;
    std::string out;
    int threads = 0;
    std::optional<std::uint64_t> seed;
};

// Output directory precedence: --out, then FRACMC_OUTPUT_DIR, then the config.
std::string output_dir(const Flags& f, const std::string& from_config) {
    if (!f.out.empty()) return f.out;
    if (const char* env = std::getenv("FRACMC_OUTPUT_DIR"); env && *env) return env;
    return from_config;
}

int run(const std::string& kind, const Flags& f) {
    std::string dir = output_dir(f, "out");
    std::string stem = kind + "-failure";
    try {
        fracmc::ExperimentConfig cfg;
        if (!f.config.empty()) cfg = fracmc::read_config(f.config);
        const fracmc::ExperimentKind k = fracmc::experiment_kind_from_string(kind);
        if (!f.config.empty() && cfg.kind != k)
            throw fracmc::Error(fracmc::ErrorKind::validation,
                                "config kind '" + fracmc::to_string(cfg.kind) + "' does not match subcommand '" + kind + "'");
        cfg.kind = k;
        if (f.seed) cfg.seed = *f.seed;
        cfg.output_dir = dir = output_dir(f, cfg.output_dir);
        stem = fracmc::output_stem(cfg) + "-failure";
        const fracmc::RunResult r = fracmc::run_experiment(cfg);
        for (const std::string& p : r.files) std::cout << p << '\n';
        return 0;
    } catch (const fracmc::Error& e) {
        const nlohmann::ordered_json rec = fracmc::failure_record(kind, e);
        std::cerr << rec.dump() << '\n';
        try {
            std::filesystem::create_directories(dir);
            fracmc::write_json((std::filesystem::path(dir) / (stem + ".json")).string(), rec);
        } catch (const std::exception&) {
        }
        return fracmc::exit_status(e);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional Allen-Cahn experiments"};
    app.require_subcommand(1);
    Flags flags;
    const char* kinds[] = {"phi", "constants", "identity-check", "abar-convergence", "kappa", "evolve"};
    const char* help[] = {"solve the standing wave and export the profile",
                          "C_{n,s}, c2, c1 and c_star",
                          "compare the direct and operator-difference forms of a_eps",
                          "abar_eps against the limit target over an eps sweep",
                          "fractional curvature kappa (s < 1/2)",
                          "explicit front evolution on a 2-D grid"};
    for (int k = 0; k < 6; ++k) {
        CLI::App* sub = app.add_subcommand(kinds[k], help[k]);
        sub->add_option("--config", flags.config, "JSON experiment config")->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output directory (overrides FRACMC_OUTPUT_DIR and the config)");
        sub->add_option("--threads", flags.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", flags.seed, "seed for random sample points");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (flags.threads > 0) omp_set_num_threads(flags.threads);
    for (const char* k : kinds)
        if (app.got_subcommand(k)) return run(k, flags);
    return 2;
}
