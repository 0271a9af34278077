#pragma once

#include <string>
#include <vector>

#include "kasner/diagnostics.hpp"

namespace kasner {

// Full experiment description, parsed from a JSON config file.
struct RunConfig {
    KasnerBackground bg = KasnerBackground::flrw();
    GaugeTag gauge = GaugeTag::cmc();
    int k_max = 2;
    unsigned long long seed = 1;
    double amplitude = 1.0;
    double spectral_power = 2.0;
    IntegratorOptions integrator;
    double sigma_star = 0.1;
    int order = 3; // Sobolev order for reported norms/energies
    std::string output_dir = "out";
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Executes one run and writes timeseries.csv, identities.json, fits.json
// and meta.json into cfg.output_dir. Returns the fitted exponent of the
// total energy (used by sweep summaries).
double run_experiment(const RunConfig& cfg);

// Runs cfg once per value of the swept parameter ("sigma", "lambda" or
// "kmax"), each into its own subdirectory, and writes summary.json.
void run_sweep(const RunConfig& cfg, const std::string& param,
               const std::vector<double>& values);

} // namespace kasner
