#pragma once

#include <vector>

#include "kasner/geometry.hpp"
#include "kasner/state.hpp"

namespace kasner {

// Fields whose Sobolev norms the harness tracks. "D" prefixes denote one
// spatial derivative; TdtPsi is t d/dt psi = chi + A nu.
enum class Field { Gamma, DGamma, Kmix, Psi, DPsi, TdtPsi, Chi, Nu, DNu };

// Parseval volume factor for T^3 with coordinate side length 2 pi:
// ||f||_{L^2}^2 = (2 pi)^3 sum_k |f_k|^2.
inline constexpr double kParsevalFactor =
    248.05021344239853; // (2 pi)^3

// W_M(k) = sum_{|I| <= M} k^{2 I} over spatial multi-indices I.
double sobolev_weight(const ModeIndex& k, int order);

// Squared pointwise magnitude of a field at one mode. With
// metric_weighted, tensor indices are contracted with the background
// metric and derivatives weighted by mu = sum_a t^{-2 q_a} k_a^2 (times
// t^2); otherwise components are summed flat and derivatives weighted by
// |k|^2.
double field_sq(const BgAt& b, const ModeIndex& k, const ModeState& m,
                double A, Field f, bool metric_weighted);

// H^M norm built as a sum over multi-indices of L^2 norms:
//   sum_{|I| <= M} sqrt((2 pi)^3 sum_k k^{2 I} sq_k).
double sobolev_from_sq(const ModeLattice& lattice,
                       const std::vector<double>& sq, int order);

double sobolev_norm(const FieldState& st, Field f, int order,
                    bool metric_weighted = false);

inline double l2_norm(const FieldState& st, Field f,
                      bool metric_weighted = false) {
    return sobolev_norm(st, f, 0, metric_weighted);
}

} // namespace kasner
