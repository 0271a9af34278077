#include "kasner/norms.hpp"

#include <cmath>

namespace kasner {

namespace {

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

double multi_weight(const ModeIndex& k, int i1, int i2, int i3) {
    return ipow(static_cast<double>(k[0] * k[0]), i1) *
           ipow(static_cast<double>(k[1] * k[1]), i2) *
           ipow(static_cast<double>(k[2] * k[2]), i3);
}

} // namespace

double sobolev_weight(const ModeIndex& k, int order) {
    double w = 0.0;
    for (int i1 = 0; i1 <= order; ++i1)
        for (int i2 = 0; i2 + i1 <= order; ++i2)
            for (int i3 = 0; i3 + i2 + i1 <= order; ++i3)
                w += multi_weight(k, i1, i2, i3);
    return w;
}

double field_sq(const BgAt& b, const ModeIndex& k, const ModeState& m,
                double A, Field f, bool metric_weighted) {
    const double ksq = static_cast<double>(k.norm_sq());
    const double dweight =
        metric_weighted ? b.t2 * mode_mu(b, k) : ksq;
    switch (f) {
    case Field::Gamma:
    case Field::DGamma: {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double w =
                    metric_weighted ? b.gki[i] * b.gki[j] : 1.0;
                s += w * std::norm(m.g(i, j));
            }
        return f == Field::Gamma ? s : dweight * s;
    }
    case Field::Kmix: {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                const double w =
                    metric_weighted ? b.gk[i] * b.gki[j] : 1.0;
                s += w * std::norm(m.K(i, j));
            }
        return s;
    }
    case Field::Psi:
        return std::norm(m.psi);
    case Field::DPsi:
        return dweight * std::norm(m.psi);
    case Field::TdtPsi:
        return std::norm(m.tdtpsi(A));
    case Field::Chi:
        return std::norm(m.chi);
    case Field::Nu:
        return std::norm(m.nu);
    case Field::DNu:
        return dweight * std::norm(m.nu);
    }
    return 0.0;
}

double sobolev_from_sq(const ModeLattice& lattice,
                       const std::vector<double>& sq, int order) {
    double total = 0.0;
    for (int i1 = 0; i1 <= order; ++i1)
        for (int i2 = 0; i2 + i1 <= order; ++i2)
            for (int i3 = 0; i3 + i2 + i1 <= order; ++i3) {
                double acc = 0.0;
                for (int idx = 0; idx < lattice.size(); ++idx)
                    acc += multi_weight(lattice.at(idx), i1, i2, i3) *
                           sq[static_cast<size_t>(idx)];
                total += std::sqrt(kParsevalFactor * acc);
            }
    return total;
}

double sobolev_norm(const FieldState& st, Field f, int order,
                    bool metric_weighted) {
    const BgAt b = BgAt::at(st.bg, st.t);
    std::vector<double> sq(static_cast<size_t>(st.lattice.size()));
    for (int idx = 0; idx < st.lattice.size(); ++idx)
        sq[static_cast<size_t>(idx)] =
            field_sq(b, st.lattice.at(idx), st.modes[static_cast<size_t>(idx)],
                     st.bg.A(), f, metric_weighted);
    return sobolev_from_sq(st.lattice, sq, order);
}

} // namespace kasner
