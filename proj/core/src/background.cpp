#include "kasner/background.hpp"

#include <cmath>
#include <string>

namespace kasner {

namespace {

void check_time(double t) {
    if (!(t > 0.0)) {
        throw NonpositiveTime("time must be positive, got t=" +
                              std::to_string(t));
    }
}

} // namespace

KasnerBackground::KasnerBackground(const std::array<double, 3>& q, double A,
                                   double sigma, bool strict_positive)
    : q_(q), A_(A), sigma_(sigma), strict_positive_(strict_positive) {
    q_max_ = std::max(q_[0], std::max(q_[1], q_[2]));
}

KasnerBackground KasnerBackground::from_exponents(double q1, double q2,
                                                  bool strict_positive) {
    const double q3 = 1.0 - q1 - q2;
    const double sum_sq = q1 * q1 + q2 * q2 + q3 * q3;
    if (sum_sq > 1.0 + 1e-14) {
        throw ExponentDomain("exponents give sum q_i^2 = " +
                             std::to_string(sum_sq) +
                             " > 1 (negative scalar amplitude squared)");
    }
    if (strict_positive && (q1 <= 0.0 || q2 <= 0.0 || q3 <= 0.0)) {
        throw ExponentSign("strict_positive requires q_i > 0, got (" +
                           std::to_string(q1) + ", " + std::to_string(q2) +
                           ", " + std::to_string(q3) + ")");
    }
    const double A = std::sqrt(std::max(0.0, 1.0 - sum_sq));
    // sum (q_i - 1/3)^2 equals sum q_i^2 - 1/3 but avoids the
    // cancellation that would make sigma(flrw) a rounding artifact.
    const double d1 = q1 - 1.0 / 3.0, d2 = q2 - 1.0 / 3.0,
                 d3 = q3 - 1.0 / 3.0;
    const double sigma = std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
    return KasnerBackground({q1, q2, q3}, A, sigma, strict_positive);
}

KasnerBackground KasnerBackground::flrw() {
    return from_exponents(1.0 / 3.0, 1.0 / 3.0, true);
}

KasnerBackground KasnerBackground::from_sigma(double sigma,
                                              bool strict_positive) {
    const double d = sigma / std::sqrt(6.0);
    return from_exponents(1.0 / 3.0 + 2.0 * d, 1.0 / 3.0 - d,
                          strict_positive);
}

std::array<double, 3> KasnerBackground::metric_diag(double t) const {
    check_time(t);
    // exp(2 q_i ln t) keeps precision uniform across many decades of t.
    const double lt = std::log(t);
    return {std::exp(2.0 * q_[0] * lt), std::exp(2.0 * q_[1] * lt),
            std::exp(2.0 * q_[2] * lt)};
}

std::array<double, 3> KasnerBackground::inverse_metric_diag(double t) const {
    check_time(t);
    const double lt = std::log(t);
    return {std::exp(-2.0 * q_[0] * lt), std::exp(-2.0 * q_[1] * lt),
            std::exp(-2.0 * q_[2] * lt)};
}

double KasnerBackground::kretschmann(double t) const {
    check_time(t);
    double s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (double qi : q_) {
        s2 += qi * qi;
        s3 += qi * qi * qi;
        s4 += qi * qi * qi * qi;
    }
    double cross = 0.0; // sum_{i<j} q_i^2 q_j^2
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            cross += q_[i] * q_[i] * q_[j] * q_[j];
        }
    }
    const double t4 = std::pow(t, -4.0);
    return 4.0 * t4 * (s4 + cross + s2 - 2.0 * s3);
}

std::array<double, 3> KasnerBackground::second_fund_mixed() const {
    return {-q_[0], -q_[1], -q_[2]};
}

std::array<double, 3> KasnerBackground::second_fund_tracefree() const {
    return {1.0 / 3.0 - q_[0], 1.0 / 3.0 - q_[1], 1.0 / 3.0 - q_[2]};
}

} // namespace kasner
