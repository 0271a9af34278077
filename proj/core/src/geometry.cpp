#include "kasner/geometry.hpp"

#include <cmath>

namespace kasner {

BgAt BgAt::at(const KasnerBackground& bg, double t) {
    BgAt b;
    b.t = t;
    b.t2 = t * t;
    const double lt = std::log(t);
    for (int a = 0; a < 3; ++a) {
        b.gk[a] = std::exp(2.0 * bg.q()[a] * lt);
        b.gki[a] = 1.0 / b.gk[a];
    }
    return b;
}

double mode_mu(const BgAt& b, const ModeIndex& k) {
    double mu = 0.0;
    for (int a = 0; a < 3; ++a)
        mu += b.gki[a] * static_cast<double>(k[a]) * static_cast<double>(k[a]);
    return mu;
}

ModeGeometry compute_geometry(const BgAt& b, const ModeIndex& k,
                              const ModeState& m) {
    ModeGeometry g;
    g.mu = mode_mu(b, k);
    const cplx I(0.0, 1.0);

    // Gamma^c_{ab} = (1/2) g^{cc} i (k_a gamma_{cb} + k_b gamma_{ac}
    //                                 - k_c gamma_{ab})
    for (int c = 0; c < 3; ++c)
        for (int a = 0; a < 3; ++a)
            for (int bb = 0; bb < 3; ++bb)
                g.christ[c][a][bb] =
                    0.5 * b.gki[c] * I *
                    (static_cast<double>(k[a]) * m.g(c, bb) +
                     static_cast<double>(k[bb]) * m.g(a, c) -
                     static_cast<double>(k[c]) * m.g(a, bb));

    // div_c[i] = sum_e g^{ee} Gamma^i_{ee}  (contracted Christoffel)
    cplx divc[3];
    for (int i = 0; i < 3; ++i) {
        divc[i] = 0.0;
        for (int e = 0; e < 3; ++e) divc[i] += b.gki[e] * g.christ[i][e][e];
    }

    // Ric^i_j = (1/2) g^{ii} mu gamma_{ij}
    //           + (1/2) i k_j div_c[i]
    //           + (1/2) g^{ii} g_{jj} i k_i div_c[j]
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            g.ricci[i][j] = 0.5 * b.gki[i] * g.mu * m.g(i, j) +
                            0.5 * I * static_cast<double>(k[j]) * divc[i] +
                            0.5 * b.gki[i] * b.gk[j] * I *
                                static_cast<double>(k[i]) * divc[j];

    g.t2R = compute_t2R(b, k, m);
    return g;
}

cplx compute_t2R(const BgAt& b, const ModeIndex& k, const ModeState& m) {
    // t^2 R = t^2 sum_{a,e} g^{aa} g^{ee} (k_e^2 gamma_{aa}
    //                                      - k_a k_e gamma_{ae})
    cplx r = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int e = 0; e < 3; ++e) {
            const double ka = static_cast<double>(k[a]);
            const double ke = static_cast<double>(k[e]);
            r += b.gki[a] * b.gki[e] *
                 (ke * ke * m.g(a, a) - ka * ke * m.g(a, e));
        }
    return b.t2 * r;
}

} // namespace kasner
