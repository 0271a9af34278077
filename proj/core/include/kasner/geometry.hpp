#pragma once

#include <array>

#include "kasner/state.hpp"

namespace kasner {

// Background metric factors at time t for a diagonal Kasner metric:
//   gk[a]  = t^{2 q_a}   (spatial metric),
//   gki[a] = t^{-2 q_a}  (inverse spatial metric).
struct BgAt {
    double t = 1.0;
    double t2 = 1.0;
    std::array<double, 3> gk{1.0, 1.0, 1.0};
    std::array<double, 3> gki{1.0, 1.0, 1.0};

    static BgAt at(const KasnerBackground& bg, double t);
};

// Per-mode linearized spatial geometry built from the metric perturbation
// gamma at wave vector k (derivatives act as multiplication by i k_j):
//   christ[c][a][b] : linearized Christoffel symbol (upper index c),
//   ricci[i][j]     : linearized mixed Ricci tensor Ric^i_j,
//   t2R             : t^2 times the linearized scalar curvature,
//   mu              : sum_a t^{-2 q_a} k_a^2 (frequency of the mode).
struct ModeGeometry {
    cplx christ[3][3][3];
    cplx ricci[3][3];
    cplx t2R = 0.0;
    double mu = 0.0;
};

double mode_mu(const BgAt& b, const ModeIndex& k);

ModeGeometry compute_geometry(const BgAt& b, const ModeIndex& k,
                              const ModeState& m);

// t^2 R alone (cheaper when only the scalar curvature is needed).
cplx compute_t2R(const BgAt& b, const ModeIndex& k, const ModeState& m);

} // namespace kasner
