#pragma once

#include <array>
#include <string>
#include <vector>

#include "kasner/gauge.hpp"
#include "kasner/state.hpp"

namespace kasner {

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double t_min = 1e-6;
    int checkpoints_per_decade = 4;
    // "auto" (cmc -> "rk45", parabolic -> "rk45-exp-lapse"), "rk45", or
    // "rk45-exp-lapse" (Lawson exponential treatment of the stiff lapse)
    std::string scheme = "auto";
    long long max_steps = 5'000'000;
    double fixed_dtau = 0.0; // > 0: fixed-step mode (no error control)
    double sigma_star = 0.1; // weight of the metric sector in the total
    bool accumulate = true;
    // "rk-stage": accumulators integrated as extra ODE components;
    // "trapezoid": per accepted step from endpoint integrand values
    std::string acc_mode = "rk-stage";
};

struct Trajectory {
    std::vector<double> times;       // decreasing, times[0] = start
    std::vector<FieldState> states;  // cmc states carry the solved lapse
    // acc[i][c] = integral_{times[i]}^{times[0]} (channel c) ds/s
    std::vector<std::array<double, N_ACC>> acc;
    bool has_accumulators = false;
    long long accepted = 0;
    long long rejected = 0;
};

// Integrate the linearized system backward in time from init.t to
// opt.t_min, storing log-spaced checkpoints (one per
// 1/checkpoints_per_decade decade) plus the final time.
Trajectory evolve(const FieldState& init, const IntegratorOptions& opt);

} // namespace kasner
