// Command-line experiment runner: reproduces the published curves as CSV.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mnpmc/experiment.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation_failure = 1;
constexpr int exit_invariant_failure = 2;

bool verbose() {
    const char* env = std::getenv("MNPMC_LOG");
    return env != nullptr && std::string(env) != "" && std::string(env) != "0";
}

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "configuration file (key = value lines)");
    cmd->add_option("--out", opts.out_path, "output CSV path (default: stdout)");
    cmd->add_option("--set", opts.overrides, "override one key, e.g. --set n_tx=100")
        ->take_all();
    cmd->add_option("--seed", opts.seed, "random seed override")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
}

// precedence: command line > file > defaults
mnpmc::ExperimentConfig resolve(const CommonOptions& opts) {
    mnpmc::ExperimentConfig config;
    if (!opts.config_path.empty()) mnpmc::apply_config_file(config, opts.config_path);
    for (const auto& assignment : opts.overrides) mnpmc::apply_override(config, assignment);
    if (opts.seed_given) config.seed = opts.seed;
    config.validate();
    return config;
}

void emit(const mnpmc::ResultTable& table, const CommonOptions& opts) {
    const std::string csv = table.to_csv();
    if (opts.out_path.empty()) {
        std::cout << csv;
        return;
    }
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file: " + opts.out_path);
    out << csv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"magnetic-nanoparticle molecular communication link experiments"};
    app.require_subcommand(1);

    CommonOptions opts;
    auto* magnetization = app.add_subcommand("magnetization", "magnetization curves M(B)");
    auto* impulse = app.add_subcommand("impulse", "channel impulse response around t1 = d/v_f");
    auto* ser = app.add_subcommand("ser", "symbol error rate vs particles per pulse");
    auto* validate = app.add_subcommand("validate", "run the cross-validation suite");
    for (auto* cmd : {magnetization, impulse, ser, validate}) add_common(cmd, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        const mnpmc::ExperimentConfig config = resolve(opts);
        mnpmc::ResultTable table;
        int code = exit_ok;
        if (app.got_subcommand(magnetization)) {
            table = mnpmc::run_magnetization_curve(config);
        } else if (app.got_subcommand(impulse)) {
            if (verbose()) std::cerr << "impulse: simulating 3 gradients\n";
            table = mnpmc::run_impulse_response(config);
        } else if (app.got_subcommand(ser)) {
            if (verbose()) std::cerr << "ser: sweeping n_tx\n";
            table = mnpmc::run_ser_sweep(config);
        } else {
            table = mnpmc::run_validate(config);
            if (!mnpmc::all_checks_passed(table)) code = exit_invariant_failure;
        }
        emit(table, opts);
        return code;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation_failure;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_validation_failure;
    } catch (const mnpmc::SeriesTruncationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_invariant_failure;
    }
}
