// votefusion: run a config file or a built-in preset and write result tables.
//
// Exit status: 0 success, 2 config or usage error, 3 solver failure,
// 4 a preset self-check failed.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "votefusion/errors.hpp"
#include "votefusion/experiment.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInternal = 1;
constexpr int kConfig = 2;
constexpr int kSolver = 3;
constexpr int kSelfCheck = 4;

}  // namespace

int main(int argc, char** argv) {
    using namespace votefusion;

    CLI::App app{"Optimal threshold policies for secret, public and partially public voting teams"};
    std::string config_path, preset, out_dir, format;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool list = false;

    auto* cfg_opt = app.add_option("--config", config_path, "experiment config (JSON)")->envname("VOTEFUSION_CONFIG");
    auto* preset_opt = app.add_option("--preset", preset, "built-in experiment")->envname("VOTEFUSION_PRESET");
    cfg_opt->excludes(preset_opt);
    auto* out_opt = app.add_option("--out", out_dir, "output directory")->envname("VOTEFUSION_OUT");
    auto* seed_opt = app.add_option("--seed", seed, "seed for Monte Carlo and random draws")->envname("VOTEFUSION_SEED");
    auto* fmt_opt = app.add_option("--format", format, "csv or json")
                        ->check(CLI::IsMember({"csv", "json"}))
                        ->envname("VOTEFUSION_FORMAT");
    app.add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 1024))->envname("VOTEFUSION_JOBS");
    app.add_flag("--list-presets", list, "print preset names and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kConfig;
    }

    if (list) {
        for (const auto& n : preset_names()) std::cout << n << "\n";
        return kOk;
    }
    if (config_path.empty() && preset.empty()) {
        std::cerr << "error: one of --config or --preset is required\n";
        return kConfig;
    }

    RunOptions opt;
    opt.jobs = jobs;
    if (*seed_opt) opt.seed = seed;
    if (*out_opt) opt.out_dir = out_dir;
    if (*fmt_opt) opt.format = parse_format(format);

    try {
        RunResult result;
        std::string dir;
        OutputFormat fmt = opt.format.value_or(OutputFormat::csv);
        if (!config_path.empty()) {
            auto cfg = load_config(config_path);
            result = run_experiment(cfg, opt);
            dir = opt.out_dir.value_or(cfg.out_dir);
            fmt = opt.format.value_or(cfg.format);
        } else {
            result = run_preset(preset, opt);
            dir = opt.out_dir.value_or("results/" + preset);
        }
        write_tables(result, dir, fmt);
        for (const auto& f : result.files) std::cout << "wrote " << f << "\n";
        for (const auto& c : result.checks) {
            std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
        }
        return result.checks_passed() ? kOk : kSelfCheck;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
}
