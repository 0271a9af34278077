// Command-line driver: single runs, verification suites, and parameter
// sweeps for the linearized Kasner evolution harness.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kasner/checks.hpp"
#include "kasner/run_io.hpp"

namespace {

enum ExitCode : int {
    kOk = 0,
    kCriterionFailure = 1,
    kConfigError = 2,
    kNumericalFailure = 3,
};

int do_run(const std::string& config_path) {
    const kasner::RunConfig cfg = kasner::load_config(config_path);
    kasner::run_experiment(cfg);
    std::printf("run complete: outputs in %s\n", cfg.output_dir.c_str());
    return kOk;
}

int do_verify(const std::string& config_path, const std::string& suite) {
    // the config is parsed for validity (schema/consistency contract);
    // criteria run on their own frozen configurations
    (void)kasner::load_config(config_path);
    kasner::CheckRunner runner;
    const std::vector<kasner::CriterionResult> results =
        runner.suite(suite);
    bool all_ok = true;
    for (const auto& r : results) {
        std::printf("[%s] criterion %d: %s — %s\n",
                    r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.detail.c_str());
        all_ok = all_ok && r.passed;
    }
    std::printf("%s\n", all_ok ? "all criteria passed"
                               : "some criteria failed");
    return all_ok ? kOk : kCriterionFailure;
}

int do_sweep(const std::string& config_path, const std::string& param,
             const std::vector<double>& values) {
    const kasner::RunConfig cfg = kasner::load_config(config_path);
    kasner::run_sweep(cfg, param, values);
    std::printf("sweep complete: outputs in %s\n", cfg.output_dir.c_str());
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral evolution and verification harness for the "
                 "linearized Einstein-scalar field system on Kasner "
                 "backgrounds"};
    app.require_subcommand(1);

    std::string config_path;
    std::string suite = "all";
    std::string param;
    std::vector<double> values;

    auto* run_cmd = app.add_subcommand("run", "execute one configured run");
    run_cmd->add_option("config", config_path, "JSON config file")
        ->required();

    auto* verify_cmd =
        app.add_subcommand("verify", "run a verification suite");
    verify_cmd->add_option("config", config_path, "JSON config file")
        ->required();
    verify_cmd
        ->add_option("--suite", suite,
                     "identities|constraints|exponents|all")
        ->default_val("all");

    auto* sweep_cmd =
        app.add_subcommand("sweep", "run a parameter sweep");
    sweep_cmd->add_option("config", config_path, "JSON config file")
        ->required();
    sweep_cmd->add_option("--param", param, "sigma|lambda|kmax")
        ->required();
    sweep_cmd->add_option("--values", values, "swept values")
        ->required()
        ->expected(-1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return do_run(config_path);
        if (verify_cmd->parsed()) return do_verify(config_path, suite);
        return do_sweep(config_path, param, values);
    } catch (const kasner::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return kConfigError;
    } catch (const kasner::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumericalFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kNumericalFailure;
    }
}
