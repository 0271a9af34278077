#include <doctest.h>

#include <cmath>
#include <random>

#include "kasner/background.hpp"
#include "kasner/geometry.hpp"

using namespace kasner;

TEST_CASE("exponent relations") {
    auto bg = KasnerBackground::from_exponents(0.5, 0.3);
    const auto& q = bg.q();
    CHECK(q[0] + q[1] + q[2] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + bg.A() * bg.A() ==
          doctest::Approx(1.0).epsilon(1e-15));
    // sigma^2 = sum (q_i - 1/3)^2
    double s2 = 0.0;
    for (int i = 0; i < 3; ++i)
        s2 += (q[i] - 1.0 / 3.0) * (q[i] - 1.0 / 3.0);
    CHECK(bg.sigma() == doctest::Approx(std::sqrt(s2)).epsilon(1e-14));
}

TEST_CASE("flrw member") {
    auto bg = KasnerBackground::flrw();
    CHECK(bg.sigma() <= 1e-15); // q3 = 1 - q1 - q2 rounds one ulp off 1/3
    CHECK(bg.A() == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-15));
    for (int i = 0; i < 3; ++i)
        CHECK(bg.q()[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("from_sigma roundtrip") {
    for (double s : {0.0, 0.02, 0.05, 0.3}) {
        auto bg = KasnerBackground::from_sigma(s);
        CHECK(bg.sigma() == doctest::Approx(s).epsilon(1e-13));
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(KasnerBackground::from_exponents(0.9, 0.9),
                    ExponentDomain);
    CHECK_THROWS_AS(KasnerBackground::from_exponents(0.9, -0.05),
                    ExponentSign);
    CHECK_NOTHROW(KasnerBackground::from_exponents(0.9, -0.05, false));
    CHECK_THROWS_AS(KasnerBackground::flrw().metric_diag(0.0),
                    NonpositiveTime);
}

TEST_CASE("flrw curvature invariant is (20/27) t^-4") {
    auto bg = KasnerBackground::flrw();
    for (double t : {1.0, 1e-2, 1e-5, 1e-8}) {
        const double expect = (20.0 / 27.0) / (t * t * t * t);
        CHECK(std::abs(bg.kretschmann(t) / expect - 1.0) < 1e-12);
    }
}

TEST_CASE("trace-free shear has metric norm sigma for random backgrounds") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(0.05, 0.6);
    int accepted = 0;
    while (accepted < 1000) {
        const double q1 = u(rng), q2 = u(rng);
        const double q3 = 1.0 - q1 - q2;
        if (q3 <= 0.0 || q1 * q1 + q2 * q2 + q3 * q3 > 1.0) continue;
        ++accepted;
        auto bg = KasnerBackground::from_exponents(q1, q2);
        // mixed-index norm: |kh|_g^2 = kh^a_b kh^b_a = sum kh_a^2,
        // t-independent
        const auto kh = bg.second_fund_tracefree();
        const double n2 = kh[0] * kh[0] + kh[1] * kh[1] + kh[2] * kh[2];
        CHECK(std::abs(std::sqrt(n2) - bg.sigma()) < 1e-12);
    }
}

TEST_CASE("metric sandwich between isotropic power laws") {
    // t^{2/3 + 2 sigma} <= g_ii(t) <= t^{2/3 - 2 sigma} for t <= 1
    for (double s : {0.01, 0.05, 0.2}) {
        auto bg = KasnerBackground::from_sigma(s);
        for (double t : {1.0, 1e-1, 1e-3, 1e-6, 1e-9}) {
            const auto g = bg.metric_diag(t);
            const auto gi = bg.inverse_metric_diag(t);
            const double lo = std::pow(t, 2.0 / 3.0 + 2.0 * s);
            const double hi = std::pow(t, 2.0 / 3.0 - 2.0 * s);
            for (int i = 0; i < 3; ++i) {
                CHECK(g[i] >= lo * (1.0 - 1e-12));
                CHECK(g[i] <= hi * (1.0 + 1e-12));
                CHECK(gi[i] >= (1.0 - 1e-12) / hi);
                CHECK(gi[i] <= (1.0 + 1e-12) / lo);
                CHECK(g[i] * gi[i] == doctest::Approx(1.0).epsilon(1e-14));
            }
        }
    }
}

TEST_CASE("BgAt matches background") {
    auto bg = KasnerBackground::from_exponents(0.6, 0.25);
    const double t = 3.7e-4;
    const BgAt b = BgAt::at(bg, t);
    CHECK(b.t == t);
    CHECK(b.t2 == doctest::Approx(t * t).epsilon(1e-15));
    const auto g = bg.metric_diag(t);
    for (int i = 0; i < 3; ++i)
        CHECK(b.gk[i] == doctest::Approx(g[i]).epsilon(1e-14));
}
