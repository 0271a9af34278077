#pragma once

#include <map>
#include <string>
#include <vector>

#include "kasner/integrator.hpp"
#include "kasner/norms.hpp"

namespace kasner {

// Quadratic energies at one time. e_total_sq always includes the
// lapse-derivative sector; e_almost_total_sq omits it (the variant whose
// monotonicity the parabolic theorem controls).
struct EnergyReport {
    double t = 0.0;
    int order = 0;
    double e_metric_sq = 0.0;
    double e_scalar_sq = 0.0;
    double e_dlapse_sq = 0.0;
    double e_lapse_sq = 0.0;
    double e_total_sq = 0.0;
    double e_almost_total_sq = 0.0;
};

EnergyReport energies(const FieldState& st, double sigma_star,
                      int order = 0);

// Lattice sums (times the Parseval factor) of every accumulator channel's
// integrand, evaluated pointwise at one state.
std::array<double, N_ACC> integrand_totals(const FieldState& st,
                                           double sigma_star);

struct IdentityResidual {
    std::string id;
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0; // lhs - rhs
    double relative = 0.0; // |residual| / max term magnitude
    std::map<std::string, double> terms;
};

// Energy identity for the scalar field plus lapse (dispatches on the
// trajectory's gauge), evaluated at checkpoint i against checkpoint 0.
IdentityResidual identity_scalar_lapse(const Trajectory& traj, size_t i);
// Energy identity for the metric variables (either gauge).
IdentityResidual identity_metric(const Trajectory& traj, size_t i);

// Parabolic-gauge lapse energy inequality, validated by fitting the
// non-constructive constant on t in [t_mid, 1] and asserting the
// inequality on the held-out remainder.
struct LapseEstimateReport {
    double c_fit = 0.0;     // fitted constant multiplying the error terms
    double t_mid = 0.0;     // fit/hold-out split time
    double max_violation = 0.0; // max (lhs - rhs)/scale on hold-out
    bool holds = true;
};
LapseEstimateReport lapse_energy_estimate(const Trajectory& traj);

struct MonotonicityReport {
    std::vector<double> t;
    std::vector<double> energy_sq; // total (cmc) / almost-total (parabolic)
    // the four past-favorable integrals at the final checkpoint, with the
    // theorem coefficients applied (all should be nonnegative)
    std::array<double, 4> favorable{};
    bool integrands_nonnegative = true;
    double worst_integrand_decrement = 0.0;
    double fitted_exponent = 0.0; // p in E^2(t) ~ t^p over the run
    double fitted_c = 0.0;        // c with E^2(t) <= C E^2(1) t^{-c sigma}
    double fitted_C = 1.0;
    bool holdout_ok = true;
    double max_ratio = 0.0; // max_t E^2(t) / E^2(1)
};
MonotonicityReport monotonicity_report(const Trajectory& traj,
                                       double sigma_star);

struct DecayFit {
    std::string quantity;
    double exponent = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double rms_misfit = 0.0;
    bool log_factor_detected = false;
    double log_coeff = 0.0; // coefficient of ln(1 + |ln t|) if detected
};

// Least-squares power-law fit ln v = c + p ln t on the window
// [t_lo, t_hi]; with_log additionally tries ln v = c + p ln t
// + b ln(1 + |ln t|) and flags a log factor when it fits decisively
// better. Requires >= 10 points spanning >= 2 decades.
DecayFit decay_fit(const std::string& quantity,
                   const std::vector<double>& t,
                   const std::vector<double>& v, double t_lo, double t_hi,
                   bool with_log);

// Solution norm: ||K|| + ||d gamma|| + ||t dpsi/dt|| + t^{2/3} ||d psi||
// (all H^N frame) + sum_p t^{2p/3} ||nu||_{H^{N+p}}, p <= 2 (cmc) or
// p <= 1 (parabolic).
double solution_norm(const FieldState& st, int order);

struct BangLimits {
    // per-mode limits, indexed like the trajectory's lattice
    std::vector<std::array<cplx, 9>> k_bang;  // limit of t K^i_j
    std::vector<cplx> psi_bang;               // limit of t dpsi/dt
    std::vector<std::array<cplx, 6>> h_bang;  // rescaled-metric limit
    double k_rate = 0.0;   // fitted Cauchy rates (exponents of t)
    double psi_rate = 0.0;
    double h_rate = 0.0;
    double trace_k_bang_max = 0.0; // max_k |tr K_bang| (0 in cmc)
};

// Limits as t -> 0 extracted from the two smallest checkpoints with
// Richardson acceleration at the fitted Cauchy rate. The converging
// metric object is t^{-2 q_j} gamma_ij plus 2 ln t K_bang (q_i = q_j) or
// t^{2(q_i - q_j)}/(q_i - q_j) K_bang (q_i != q_j).
BangLimits bang_limits(const Trajectory& traj);

// Ratio of the spatial-derivative term to the time-derivative term in
// the scalar wave equation at each checkpoint (tends to 0 as t -> 0:
// velocity-term-dominated behavior).
std::vector<double> vtd_ratio(const Trajectory& traj);

// Max relative Hamiltonian/momentum constraint residual over all modes.
double max_constraint_residual(const FieldState& st);

} // namespace kasner
