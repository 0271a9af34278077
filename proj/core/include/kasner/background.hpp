#pragma once

#include <array>

#include "kasner/errors.hpp"

namespace kasner {

// Homogeneous anisotropic background on (0,1] x T^3:
//   spatial metric  g_ii(t) = t^{2 q_i}  (diagonal),
//   scalar field    phi(t)  = A ln t,
// with exponents constrained by
//   q1 + q2 + q3 = 1  and  q1^2 + q2^2 + q3^2 = 1 - A^2.
// The anisotropy parameter is sigma^2 = sum q_i^2 - 1/3 = 2/3 - A^2;
// sigma = 0 is the isotropic (FLRW-like) member with q_i = 1/3,
// A = sqrt(2/3).
class KasnerBackground {
  public:
    // q3 := 1 - q1 - q2; A := sqrt(1 - sum q_i^2).
    // Throws ExponentDomain if sum q_i^2 > 1, ExponentSign if
    // strict_positive and some q_i <= 0.
    static KasnerBackground from_exponents(double q1, double q2,
                                           bool strict_positive = true);

    // Isotropic member: q_i = 1/3, A = sqrt(2/3), sigma = 0.
    static KasnerBackground flrw();

    // Axisymmetric family with prescribed anisotropy:
    // q = (1/3 + 2d, 1/3 - d, 1/3 - d) with d = sigma / sqrt(6).
    static KasnerBackground from_sigma(double sigma,
                                       bool strict_positive = true);

    const std::array<double, 3>& q() const { return q_; }
    double A() const { return A_; }
    double sigma() const { return sigma_; }
    double q_max() const { return q_max_; }
    bool strict_positive() const { return strict_positive_; }

    // Diagonal of g(t): t^{2 q_i}. Throws NonpositiveTime.
    std::array<double, 3> metric_diag(double t) const;
    // Diagonal of g^{-1}(t): t^{-2 q_i}.
    std::array<double, 3> inverse_metric_diag(double t) const;

    // Full curvature-squared invariant,
    //   4 t^{-4} { sum q_i^4 + sum_{i<j} q_i^2 q_j^2 + sum q_i^2
    //              - 2 sum q_i^3 },
    // bounded below by 4 t^{-4} sum_{i<j} q_i^2 q_j^2.
    double kretschmann(double t) const;

    // Time-rescaled mixed second fundamental form t K^i_j = diag(-q_i)
    // and its trace-free part diag(1/3 - q_i); both are t-independent
    // in mixed-index form, and |trace-free part|_g = sigma at every t.
    std::array<double, 3> second_fund_mixed() const;
    std::array<double, 3> second_fund_tracefree() const;

  private:
    KasnerBackground(const std::array<double, 3>& q, double A, double sigma,
                     bool strict_positive);

    std::array<double, 3> q_{};
    double A_ = 0.0;
    double sigma_ = 0.0;
    double q_max_ = 0.0;
    bool strict_positive_ = true;
};

} // namespace kasner
