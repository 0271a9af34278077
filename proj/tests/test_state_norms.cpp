#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "kasner/gauge.hpp"
#include "kasner/norms.hpp"
#include "kasner/state.hpp"

using namespace kasner;

namespace {

FieldState random_state(int k_max, unsigned seed, GaugeTag tag) {
    FieldState st(KasnerBackground::from_exponents(0.5, 0.3), tag, k_max,
                  1.0);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto& m : st.modes) {
        for (auto& g : m.gamma) g = {n(rng), n(rng)};
        for (auto& k : m.kmix) k = {n(rng), n(rng)};
        m.psi = {n(rng), n(rng)};
        m.chi = {n(rng), n(rng)};
        m.nu = {n(rng), n(rng)};
    }
    st.enforce_hermitian();
    return st;
}

} // namespace

TEST_CASE("lattice indexing and conjugation") {
    ModeLattice lat(3);
    CHECK(lat.size() == 7 * 7 * 7);
    for (int idx = 0; idx < lat.size(); ++idx) {
        CHECK(lat.index_of(lat.at(idx)) == idx);
        CHECK(lat.at(lat.conjugate_index(idx)) == lat.at(idx).negated());
        // exactly one of a +/- k pair is primary (k = 0 is primary)
        if (!lat.at(idx).is_zero())
            CHECK(lat.is_primary(idx) != lat.is_primary(lat.conjugate_index(idx)));
    }
    CHECK(lat.is_primary(lat.index_of(ModeIndex{{0, 0, 0}})));
}

TEST_CASE("hermitian enforcement") {
    auto st = random_state(2, 7, GaugeTag::cmc());
    CHECK(st.hermitian_defect() == 0.0);
    // k = 0 must be purely real
    const auto& m0 =
        st.modes[static_cast<size_t>(st.lattice.index_of(ModeIndex{{0, 0, 0}}))];
    CHECK(m0.psi.imag() == 0.0);
    CHECK(m0.gamma[3].imag() == 0.0);
    // breaking one coefficient is detected
    st.modes[5].psi += cplx(0.0, 0.125);
    CHECK(st.hermitian_defect() > 0.0);
}

TEST_CASE("parseval against a real-space grid sum") {
    // random Hermitian scalar data, compared against a trapezoid-exact
    // grid evaluation of int_{T^3} f^2 dx (plane waves integrate exactly
    // on an equispaced grid with more than 2 k_max + 1 points per axis)
    auto st = random_state(1, 99, GaugeTag::cmc());
    const int N = 8;
    const double h = 2.0 * M_PI / N;
    double grid = 0.0;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c) {
                double f = 0.0;
                for (int idx = 0; idx < st.lattice.size(); ++idx) {
                    const ModeIndex k = st.lattice.at(idx);
                    const double ph = h * (a * k[0] + b * k[1] + c * k[2]);
                    f += (st.modes[static_cast<size_t>(idx)].psi *
                          std::polar(1.0, ph))
                             .real();
                }
                grid += f * f * h * h * h;
            }
    double sq = 0.0;
    for (const auto& m : st.modes) sq += std::norm(m.psi);
    CHECK(kParsevalFactor * sq == doctest::Approx(grid).epsilon(1e-10));
    const double l2 = l2_norm(st, Field::Psi);
    CHECK(l2 * l2 == doctest::Approx(grid).epsilon(1e-10));
}

TEST_CASE("sobolev weight counts multi-index powers") {
    // W_M(k) = sum_{|I| <= M} k^{2I}; explicit check at order 2
    const ModeIndex k{{1, -2, 3}};
    const double x = 1.0, y = 4.0, z = 9.0; // squared components
    double expect = 1.0;  // |I| = 0
    expect += x + y + z;  // |I| = 1
    // |I| = 2: (2,0,0),(0,2,0),(0,0,2),(1,1,0),(1,0,1),(0,1,1)
    expect += x * x + y * y + z * z + x * y + x * z + y * z;
    CHECK(sobolev_weight(k, 2) == doctest::Approx(expect).epsilon(1e-14));
    CHECK(sobolev_weight(k, 0) == 1.0);
}

TEST_CASE("sobolev norm dominates l2 and derivative weighting") {
    auto st = random_state(2, 3, GaugeTag::cmc());
    CHECK(sobolev_norm(st, Field::Psi, 2) >= sobolev_norm(st, Field::Psi, 1));
    CHECK(sobolev_norm(st, Field::Psi, 1) >= l2_norm(st, Field::Psi));
    // DPsi at order 0 equals |k| weighting of Psi
    double sq = 0.0;
    for (int idx = 0; idx < st.lattice.size(); ++idx)
        sq += st.lattice.at(idx).norm_sq() *
              std::norm(st.modes[static_cast<size_t>(idx)].psi);
    CHECK(l2_norm(st, Field::DPsi) ==
          doctest::Approx(std::sqrt(kParsevalFactor * sq)).epsilon(1e-13));
}

TEST_CASE("snapshot json roundtrip") {
    auto st = random_state(2, 21, GaugeTag::parabolic(4.5));
    st.t = 3.25e-4;
    const std::string text = snapshot_to_json(st);
    const FieldState back = snapshot_from_json(text);
    CHECK(back.t == st.t);
    CHECK(back.gauge.is_parabolic());
    CHECK(back.gauge.lambda == st.gauge.lambda);
    CHECK(back.lattice.k_max() == st.lattice.k_max());
    CHECK(back.bg.sigma() == doctest::Approx(st.bg.sigma()).epsilon(1e-15));
    double worst = 0.0;
    for (size_t i = 0; i < st.modes.size(); ++i)
        for (int c = 0; c < 6; ++c)
            worst = std::max(worst, std::abs(back.modes[i].gamma[c] -
                                             st.modes[i].gamma[c]));
    CHECK(worst == 0.0); // full double round trip
    CHECK_THROWS_AS(snapshot_from_json("{\"t\": 1}"), ConfigError);
    CHECK_THROWS_AS(snapshot_from_json("not json"), ConfigError);
}

TEST_CASE("gauge tag validation") {
    CHECK_THROWS_AS(GaugeTag::parabolic(0.0), ConfigError);
    CHECK_THROWS_AS(GaugeTag::parabolic(-2.0), ConfigError);
    CHECK(GaugeTag::parabolic(3.0).monotone_regime());
    CHECK_FALSE(GaugeTag::parabolic(2.0).monotone_regime());
    CHECK_FALSE(GaugeTag::cmc().monotone_regime());
    CHECK(GaugeTag::cmc().inv_lambda() == 0.0);
}
