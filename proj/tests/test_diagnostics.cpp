#include <doctest.h>

#include <cmath>

#include "kasner/diagnostics.hpp"
#include "kasner/errors.hpp"

using namespace kasner;

namespace {

Trajectory quick_run(GaugeTag tag, double sigma, double t_min,
                     unsigned long long seed = 7, int k_max = 1) {
    InitialDataOptions iopt;
    iopt.seed = seed;
    auto st = make_initial_data(KasnerBackground::from_sigma(sigma), tag,
                                k_max, iopt);
    IntegratorOptions opt;
    opt.t_min = t_min;
    opt.checkpoints_per_decade = 4;
    return evolve(st, opt);
}

} // namespace

TEST_CASE("decay fit recovers synthetic power laws") {
    std::vector<double> t, v, vl;
    for (int i = 0; i <= 60; ++i) {
        const double x = std::pow(10.0, -i / 10.0);
        t.push_back(x);
        v.push_back(3.0 * std::pow(x, 1.5));
        vl.push_back(2.0 * std::pow(x, 0.5) *
                     (1.0 + std::abs(std::log(x))));
    }
    auto f = decay_fit("plain", t, v, 1e-6, 1.0, true);
    CHECK(f.exponent == doctest::Approx(1.5).epsilon(1e-8));
    CHECK_FALSE(f.log_factor_detected);
    auto g = decay_fit("logged", t, vl, 1e-6, 1.0, true);
    CHECK(g.log_factor_detected);
    CHECK(g.exponent == doctest::Approx(0.5).epsilon(0.05));
    // insufficient span is rejected
    CHECK_THROWS_AS(decay_fit("narrow", t, v, 0.5, 1.0, false),
                    InsufficientSpan);
}

TEST_CASE("scalar-lapse identity holds on short runs (both gauges)") {
    for (GaugeTag tag : {GaugeTag::cmc(), GaugeTag::parabolic(3.0)}) {
        Trajectory traj = quick_run(tag, 0.05, 1e-3);
        for (size_t i = 1; i < traj.times.size(); ++i) {
            auto r = identity_scalar_lapse(traj, i);
            CAPTURE(tag.name());
            CAPTURE(traj.times[i]);
            CHECK(r.relative < 1e-8);
        }
    }
}

TEST_CASE("metric identity holds on short runs (both gauges)") {
    for (GaugeTag tag : {GaugeTag::cmc(), GaugeTag::parabolic(3.0)}) {
        Trajectory traj = quick_run(tag, 0.05, 1e-3);
        for (size_t i = 1; i < traj.times.size(); ++i) {
            auto r = identity_metric(traj, i);
            CAPTURE(tag.name());
            CAPTURE(traj.times[i]);
            CHECK(r.relative < 1e-8);
        }
    }
}

TEST_CASE("identities require accumulators") {
    InitialDataOptions iopt;
    auto st = make_initial_data(KasnerBackground::flrw(), GaugeTag::cmc(),
                                1, iopt);
    IntegratorOptions opt;
    opt.t_min = 1e-1;
    opt.accumulate = false;
    Trajectory traj = evolve(st, opt);
    CHECK_THROWS_AS(identity_scalar_lapse(traj, 1), MissingAccumulator);
    CHECK_THROWS_AS(identity_metric(traj, 1), MissingAccumulator);
}

TEST_CASE("monotonicity report: favorable integrals and bounded growth") {
    for (GaugeTag tag : {GaugeTag::cmc(), GaugeTag::parabolic(3.0)}) {
        Trajectory traj = quick_run(tag, 0.02, 1e-4);
        auto rep = monotonicity_report(traj, 0.1);
        CAPTURE(tag.name());
        CHECK(rep.integrands_nonnegative);
        CHECK(rep.worst_integrand_decrement >= -1e-14);
        for (double f : rep.favorable) CHECK(f >= -1e-14);
        CHECK(rep.holdout_ok);
        // small anisotropy: the energy exponent is close to zero
        CHECK(std::abs(rep.fitted_exponent) < 0.5);
    }
}

TEST_CASE("parabolic lapse energy estimate holds with a fitted constant") {
    Trajectory traj = quick_run(GaugeTag::parabolic(3.0), 0.05, 1e-4);
    auto rep = lapse_energy_estimate(traj);
    CHECK(rep.holds);
    CHECK(rep.c_fit >= 0.0);
    Trajectory cmc = quick_run(GaugeTag::cmc(), 0.05, 1e-2);
    CHECK_THROWS_AS(lapse_energy_estimate(cmc), WrongGauge);
}

TEST_CASE("velocity-term domination: spatial/time ratio decreases") {
    // anisotropic background: for flrw the constraint slaves t dpsi/dt to
    // t^2 R-hat, so both terms decay together and the ratio stalls
    Trajectory traj = quick_run(GaugeTag::cmc(), 0.05, 1e-5);
    auto r = vtd_ratio(traj);
    REQUIRE(r.size() == traj.times.size());
    CHECK(r.back() < 1e-4 * r.front());
    CHECK(r.back() < 1e-4);
}

TEST_CASE("bang limits: mixed K and scalar momentum converge") {
    Trajectory traj = quick_run(GaugeTag::cmc(), 0.02, 1e-5);
    auto bl = bang_limits(traj);
    CHECK(bl.k_rate >= 0.5);
    CHECK(bl.psi_rate >= 0.5);
    CHECK(bl.trace_k_bang_max < 1e-10);
    // limits are finite and nonzero for generic data
    double kmax = 0.0;
    for (const auto& kb : bl.k_bang)
        for (const auto& c : kb) kmax = std::max(kmax, std::abs(c));
    CHECK(kmax > 0.0);
    CHECK(std::isfinite(kmax));
    // shallow runs are rejected
    Trajectory shallow = quick_run(GaugeTag::cmc(), 0.02, 1e-2);
    CHECK_THROWS_AS(bang_limits(shallow), InsufficientDepth);
}

TEST_CASE("order-N energies nest and totals match sector sums") {
    InitialDataOptions iopt;
    iopt.seed = 2;
    auto st = make_initial_data(KasnerBackground::from_sigma(0.05),
                                GaugeTag::cmc(), 2, iopt);
    auto e0 = energies(st, 0.1, 0);
    auto e2 = energies(st, 0.1, 2);
    CHECK(e2.e_scalar_sq >= e0.e_scalar_sq);
    CHECK(e2.e_metric_sq >= e0.e_metric_sq);
    CHECK(e0.e_total_sq ==
          doctest::Approx(0.1 * e0.e_metric_sq + e0.e_scalar_sq +
                          e0.e_dlapse_sq + e0.e_lapse_sq)
              .epsilon(1e-14));
    CHECK(e0.e_almost_total_sq ==
          doctest::Approx(e0.e_total_sq - e0.e_dlapse_sq).epsilon(1e-12));
}

TEST_CASE("solution norm is finite, positive and scales linearly") {
    InitialDataOptions iopt;
    iopt.seed = 4;
    auto st = make_initial_data(KasnerBackground::from_sigma(0.05),
                                GaugeTag::cmc(), 2, iopt);
    const double n1 = solution_norm(st, 3);
    CHECK(n1 > 0.0);
    CHECK(std::isfinite(n1));
    for (auto& m : st.modes) m *= 2.0;
    CHECK(solution_norm(st, 3) == doctest::Approx(2.0 * n1).epsilon(1e-10));
}
