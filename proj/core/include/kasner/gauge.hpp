#pragma once

#include <array>

#include "kasner/geometry.hpp"
#include "kasner/norms.hpp"
#include "kasner/state.hpp"

namespace kasner {

// Time-integral channels accumulated alongside the evolution. Values are
// lattice sums times (2 pi)^3 of the listed pointwise densities (s denotes
// the running time inside the integral, weights t^2 etc. evaluated at s).
enum Acc : int {
    ACC_GRADPSI = 0,          //  s^2 mu |psi|^2
    ACC_SHEAR_GRADPSI,        // -s^2 sum_a g^{aa} q_a k_a^2 |psi|^2
    ACC_GRADNU,               //  s^2 mu |nu|^2
    ACC_GRADPSI_GRADNU,       //  2 s^2 sum_a g^{aa} k_a^2 Re(psi conj nu)
    ACC_NUSQ,                 //  |nu|^2
    ACC_SHEAR_K_NU,           //  2 Re(khK conj nu), khK = sum_a kh_a K^a_a
    ACC_GRADGAMMA,            //  s^2 mu |d gamma|^2 (metric-contracted)
    ACC_SHEAR_GRADGAMMA,      //  shear-weighted |d gamma|^2
    ACC_SHEAR_KK,             //  shear-weighted |K|^2
    ACC_SHEAR_CHRIST2,        //  shear-weighted Christoffel bilinear
    ACC_SHEAR_GRADGAMMA_GRADNU, // gamma-derivative / nu-derivative cross term
    ACC_CHRIST_GRADPSI,       //  2 s^2 contracted-Christoffel . d psi
    ACC_CHRIST_GRADNU,        //  2 s^2 contracted-Christoffel . d nu
    ACC_GRAD2NU,              //  s^4 mu^2 |nu|^2
    ACC_SHEARK_SQ,            //  |khK|^2
    ACC_TDTPSI_SQ,            //  |chi + A nu|^2
    ACC_ENERGY_TOTAL,         //  total weighted energy density
    N_ACC
};

// Linearized constraint and gauge residuals at one mode.
struct ModeConstraints {
    cplx ham = 0.0;              // Hamiltonian constraint
    std::array<cplx, 3> mom{};   // momentum constraint, lower index
    std::array<cplx, 3> mom_up{};// momentum constraint, upper index
    cplx lapse_residual = 0.0;   // elliptic lapse equation (cmc only)
    cplx gauge_residual = 0.0;   // tr K (cmc) or tr K - nu/lambda
    std::array<cplx, 3> lowered_sym{}; // symmetry of the lowered K
    double ham_scale = 0.0; // largest Hamiltonian term magnitude
    double mom_scale = 0.0; // largest momentum term magnitude
};

// Quadratic energy densities at one mode (to be lattice-summed and scaled
// by the Parseval factor).
struct ModeEnergies {
    double em = 0.0;  // metric sector: |K|_g^2 + (1/4) t^2 mu |gamma|_g^2
    double es = 0.0;  // scalar sector: |t dpsi/dt|^2 + t^2 mu |psi|^2
    double edl = 0.0; // lapse-derivative sector: t^2 mu |nu|^2
    double el = 0.0;  // lapse sector: |nu|^2

    double total(double sigma_star, bool parabolic) const {
        // the parabolic total omits the lapse-derivative sector
        return sigma_star * em + es + el + (parabolic ? 0.0 : edl);
    }
};

class GaugeSystem {
  public:
    GaugeSystem(const KasnerBackground& bg, GaugeTag tag)
        : bg_(bg), tag_(tag) {}

    const KasnerBackground& background() const { return bg_; }
    const GaugeTag& tag() const { return tag_; }

    // Elliptic lapse at one mode: nu = -t^2 R / (1 + t^2 mu). Valid for
    // the cmc gauge (where nu is slaved to gamma, not evolved).
    cplx cmc_lapse(const BgAt& b, const ModeIndex& k,
                   const ModeState& m) const;
    // Fill nu for every mode (cmc only; throws WrongGauge otherwise).
    void solve_lapse(FieldState& st) const;

    // d/dtau (tau = ln t) of the evolved components. For cmc the lapse is
    // recomputed internally and the nu slot of the result is zero.
    ModeState rhs_mode(const BgAt& b, const ModeIndex& k,
                       const ModeState& m) const;

    // Parabolic nu equation split as d nu/dtau = a(tau) nu + g for
    // exponential (Lawson) stepping: a = lambda (t^2 mu + 1 - 1/lambda).
    double nu_stiff_coeff(const BgAt& b, const ModeIndex& k) const;
    // Antiderivative increment int_{tau}^{tau+dtau} a, in closed form.
    double nu_stiff_integral(const ModeIndex& k, double tau,
                             double dtau) const;

    ModeConstraints constraints_mode(const BgAt& b, const ModeIndex& k,
                                     const ModeState& m) const;

    ModeEnergies energies_mode(const BgAt& b, const ModeIndex& k,
                               const ModeState& m) const;

    // All accumulator integrands at one mode (no Parseval factor).
    void integrands_mode(const BgAt& b, const ModeIndex& k,
                         const ModeState& m, double sigma_star,
                         double out[N_ACC]) const;

    // Boundary pairing 2 Re((chi + A nu) conj(nu)) used by the parabolic
    // scalar-sector energy balance.
    double boundary_pairing_mode(const ModeState& m) const;

  private:
    KasnerBackground bg_;
    GaugeTag tag_;
};

struct InitialDataOptions {
    unsigned long long seed = 1;
    double amplitude = 1.0;
    double spectral_power = 2.0; // per-mode scale (1 + |k|^2)^{-p}
};

// Random band-limited constraint-satisfying data at t = 1. Free data
// (gamma, psi, the symmetric-traceless part of K, and nu in the parabolic
// gauge) is drawn from a seeded Gaussian; the momentum constraint is then
// enforced by a least-norm correction of the symmetric-traceless part of
// K, the antisymmetric part of the lowered K is slaved to gamma, and chi
// is solved from the Hamiltonian constraint.
FieldState make_initial_data(const KasnerBackground& bg, GaugeTag tag,
                             int k_max, const InitialDataOptions& opt);

} // namespace kasner
