#include "kasner/gauge.hpp"

#include <cmath>
#include <random>

namespace kasner {

namespace {

const cplx I(0.0, 1.0);

double kd(const ModeIndex& k, int a) { return static_cast<double>(k[a]); }

} // namespace

cplx GaugeSystem::cmc_lapse(const BgAt& b, const ModeIndex& k,
                            const ModeState& m) const {
    const cplx t2R = compute_t2R(b, k, m);
    return -t2R / (1.0 + b.t2 * mode_mu(b, k));
}

void GaugeSystem::solve_lapse(FieldState& st) const {
    if (tag_.is_parabolic())
        throw WrongGauge("solve_lapse: the lapse is evolved, not solved, "
                         "in the parabolic gauge");
    const BgAt b = BgAt::at(bg_, st.t);
    for (int idx = 0; idx < st.lattice.size(); ++idx)
        st.modes[static_cast<size_t>(idx)].nu =
            cmc_lapse(b, st.lattice.at(idx),
                      st.modes[static_cast<size_t>(idx)]);
}

ModeState GaugeSystem::rhs_mode(const BgAt& b, const ModeIndex& k,
                                const ModeState& m) const {
    const auto& q = bg_.q();
    const double A = bg_.A();
    const ModeGeometry geo = compute_geometry(b, k, m);
    const double t2mu = b.t2 * geo.mu;

    const bool par = tag_.is_parabolic();
    const double il = tag_.inv_lambda();
    const cplx nu = par ? m.nu : (-geo.t2R / (1.0 + t2mu));
    // fraction of the lapse entering the K and chi equations
    const double fl = par ? (1.0 - il) : 1.0;

    ModeState d;

    // metric: d gamma_{ij}/dtau, symmetrized
    cplx raw[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            raw[i][j] = 2.0 * q[j] * m.g(i, j) - 2.0 * b.gk[i] * m.K(i, j);
            if (i == j) raw[i][j] += 2.0 * q[i] * b.gk[i] * nu;
        }
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j)
            d.gamma[kSymIdx[i][j]] = 0.5 * (raw[i][j] + raw[j][i]);

    // second fundamental form: d (t K^i_j)/dtau
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            cplx v = b.t2 * b.gki[i] * kd(k, i) * kd(k, j) * nu +
                     b.t2 * geo.ricci[i][j];
            if (i == j) v += fl * q[i] * nu;
            d.Kref(i, j) = v;
        }

    // scalar field
    d.psi = m.chi + A * nu;
    d.chi = -t2mu * m.psi - A * fl * nu;

    // lapse (evolved only in the parabolic gauge)
    d.nu = par ? tag_.lambda * ((t2mu + 1.0 - il) * nu + geo.t2R) : cplx(0.0);

    return d;
}

double GaugeSystem::nu_stiff_coeff(const BgAt& b, const ModeIndex& k) const {
    if (!tag_.is_parabolic()) return 0.0;
    return tag_.lambda *
           (b.t2 * mode_mu(b, k) + 1.0 - tag_.inv_lambda());
}

double GaugeSystem::nu_stiff_integral(const ModeIndex& k, double tau,
                                      double dtau) const {
    if (!tag_.is_parabolic()) return 0.0;
    const auto& q = bg_.q();
    double s = (1.0 - tag_.inv_lambda()) * dtau;
    for (int a = 0; a < 3; ++a) {
        if (k[a] == 0) continue;
        const double p = 2.0 - 2.0 * q[a]; // t^2 mu term: k_a^2 e^{p tau}
        const double ka2 = kd(k, a) * kd(k, a);
        if (std::abs(p) < 1e-14) {
            s += ka2 * dtau;
        } else {
            s += ka2 * (std::exp(p * (tau + dtau)) - std::exp(p * tau)) / p;
        }
    }
    return tag_.lambda * s;
}

ModeConstraints GaugeSystem::constraints_mode(const BgAt& b,
                                              const ModeIndex& k,
                                              const ModeState& m) const {
    const auto& q = bg_.q();
    const auto& kh = bg_.second_fund_tracefree(); // 1/3 - q_a
    const double A = bg_.A();
    const bool par = tag_.is_parabolic();
    const double il = tag_.inv_lambda();
    const ModeGeometry geo = compute_geometry(b, k, m);

    ModeConstraints c;

    cplx khK = 0.0;
    for (int a = 0; a < 3; ++a) khK += kh[a] * m.K(a, a);

    c.ham = geo.t2R - 2.0 * khK - 2.0 * A * m.chi;
    if (par) c.ham -= (4.0 / 3.0) * il * m.nu;
    c.ham_scale = std::max({std::abs(geo.t2R), 2.0 * std::abs(khK),
                            2.0 * A * std::abs(m.chi),
                            par ? (4.0 / 3.0) * il * std::abs(m.nu) : 0.0});

    for (int i = 0; i < 3; ++i) {
        cplx lo = A * I * kd(k, i) * m.psi;
        cplx up = A * b.gki[i] * I * kd(k, i) * m.psi;
        c.mom_scale = std::max(c.mom_scale, std::abs(lo));
        for (int a = 0; a < 3; ++a) {
            lo += I * kd(k, a) * m.K(a, i);
            lo += (kh[i] - kh[a]) * geo.christ[a][a][i];
            up += b.gki[a] * I * kd(k, a) * m.K(i, a);
            up += (kh[a] - kh[i]) * b.gki[a] * geo.christ[i][a][a];
            c.mom_scale = std::max(
                {c.mom_scale, std::abs(kd(k, a) * m.K(a, i)),
                 std::abs((kh[i] - kh[a]) * geo.christ[a][a][i])});
        }
        if (par) {
            lo -= il * I * kd(k, i) * m.nu;
            up -= il * b.gki[i] * I * kd(k, i) * m.nu;
            c.mom_scale = std::max(c.mom_scale,
                                   il * std::abs(kd(k, i) * m.nu));
        }
        c.mom[i] = lo;
        c.mom_up[i] = up;
    }

    if (!par) {
        c.lapse_residual = 2.0 * A * (m.chi + A * m.nu) + 2.0 * khK +
                           b.t2 * geo.mu * m.nu -
                           (2.0 * A * A - 1.0) * m.nu;
    }

    c.gauge_residual = m.trace_K() - (par ? il * m.nu : cplx(0.0));

    int p = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            c.lowered_sym[p++] = b.gk[i] * m.K(i, j) - b.gk[j] * m.K(j, i) -
                                 (q[j] - q[i]) * m.g(i, j);

    return c;
}

ModeEnergies GaugeSystem::energies_mode(const BgAt& b, const ModeIndex& k,
                                        const ModeState& m) const {
    const double A = bg_.A();
    const double t2mu = b.t2 * mode_mu(b, k);

    ModeEnergies e;
    double gkK = 0.0;
    double gkg = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            gkK += b.gk[i] * b.gki[j] * std::norm(m.K(i, j));
            gkg += b.gki[i] * b.gki[j] * std::norm(m.g(i, j));
        }
    e.em = gkK + 0.25 * t2mu * gkg;
    e.es = std::norm(m.tdtpsi(A)) + t2mu * std::norm(m.psi);
    e.edl = t2mu * std::norm(m.nu);
    e.el = std::norm(m.nu);
    return e;
}

void GaugeSystem::integrands_mode(const BgAt& b, const ModeIndex& k,
                                  const ModeState& m0, double sigma_star,
                                  double out[N_ACC]) const {
    const auto& q = bg_.q();
    const auto& kh = bg_.second_fund_tracefree();
    const double A = bg_.A();
    const ModeGeometry geo = compute_geometry(b, k, m0);
    const double t2 = b.t2;
    const double t2mu = t2 * geo.mu;

    // in the CMC gauge the lapse stored in the state vector is only
    // refreshed at checkpoints; integrands must use the elliptic value
    ModeState m = m0;
    if (!tag_.is_parabolic()) m.nu = -geo.t2R / (1.0 + t2mu);

    cplx khK = 0.0;
    for (int a = 0; a < 3; ++a) khK += kh[a] * m.K(a, a);

    double gkK = 0.0;
    double gkg = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            gkK += b.gk[i] * b.gki[j] * std::norm(m.K(i, j));
            gkg += b.gki[i] * b.gki[j] * std::norm(m.g(i, j));
        }

    out[ACC_GRADPSI] = t2mu * std::norm(m.psi);

    double sgp = 0.0;
    for (int a = 0; a < 3; ++a) sgp += b.gki[a] * q[a] * kd(k, a) * kd(k, a);
    out[ACC_SHEAR_GRADPSI] = -t2 * sgp * std::norm(m.psi);

    out[ACC_GRADNU] = t2mu * std::norm(m.nu);

    double pn = 0.0;
    for (int a = 0; a < 3; ++a)
        pn += b.gki[a] * kd(k, a) * kd(k, a);
    out[ACC_GRADPSI_GRADNU] =
        2.0 * t2 * pn * (m.psi * std::conj(m.nu)).real();

    out[ACC_NUSQ] = std::norm(m.nu);
    out[ACC_SHEAR_K_NU] = 2.0 * (khK * std::conj(m.nu)).real();

    out[ACC_GRADGAMMA] = t2 * geo.mu * gkg;

    double sgg = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < 3; ++i) {
            double w = 0.0;
            for (int c = 0; c < 3; ++c)
                w += b.gki[c] * q[c] * kd(k, c) * kd(k, c);
            sgg += b.gki[a] * b.gki[i] * w * std::norm(m.g(a, i));
        }
    out[ACC_SHEAR_GRADGAMMA] = -t2 * sgg;

    double skk = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int a = 0; a < 3; ++a)
            skk += b.gk[i] * b.gki[a] * (kh[i] - kh[a]) *
                   std::norm(m.K(i, a));
    out[ACC_SHEAR_KK] = 2.0 * skk;

    double sc2 = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int e = 0; e < 3; ++e)
            for (int i = 0; i < 3; ++i)
                sc2 += b.gk[a] * b.gki[e] * b.gki[i] * (kh[a] - kh[i]) *
                       (geo.christ[a][i][i] * std::conj(geo.christ[a][e][e]))
                           .real();
    for (int a = 0; a < 3; ++a)
        for (int bb = 0; bb < 3; ++bb)
            for (int e = 0; e < 3; ++e)
                sc2 += b.gki[e] * (kh[a] - kh[bb]) *
                       (geo.christ[a][a][bb] *
                        std::conj(geo.christ[bb][e][e]))
                           .real();
    out[ACC_SHEAR_CHRIST2] = t2 * sc2;

    double sggn = 0.0;
    for (int i = 0; i < 3; ++i) {
        cplx tr_i = 0.0;  // sum_a Gamma^a_{a i}
        cplx khg_i = 0.0; // sum_a kh_a Gamma^a_{a i}
        for (int a = 0; a < 3; ++a) {
            tr_i += geo.christ[a][a][i];
            khg_i += kh[a] * geo.christ[a][a][i];
        }
        const cplx dnu_i = I * kd(k, i) * m.nu;
        sggn += 2.0 * b.gki[i] * kh[i] * (tr_i * std::conj(dnu_i)).real();
        sggn -= 2.0 * b.gki[i] * (khg_i * std::conj(dnu_i)).real();
        for (int e = 0; e < 3; ++e)
            sggn -= b.gki[i] * b.gki[e] * q[i] * kd(k, e) * kd(k, e) *
                    (m.g(i, i) * std::conj(m.nu)).real();
    }
    out[ACC_SHEAR_GRADGAMMA_GRADNU] = t2 * sggn;

    double cgp = 0.0;
    double cgn = 0.0;
    for (int e = 0; e < 3; ++e)
        for (int a = 0; a < 3; ++a) {
            const cplx ge = b.gki[e] * geo.christ[a][e][e];
            cgp += (ge * std::conj(I * kd(k, a) * m.psi)).real();
            cgn += (ge * std::conj(I * kd(k, a) * m.nu)).real();
        }
    out[ACC_CHRIST_GRADPSI] = 2.0 * t2 * cgp;
    out[ACC_CHRIST_GRADNU] = 2.0 * t2 * cgn;

    out[ACC_GRAD2NU] = t2mu * t2mu * std::norm(m.nu);
    out[ACC_SHEARK_SQ] = std::norm(khK);
    out[ACC_TDTPSI_SQ] = std::norm(m.tdtpsi(A));

    const ModeEnergies e = energies_mode(b, k, m);
    out[ACC_ENERGY_TOTAL] = e.total(sigma_star, tag_.is_parabolic());
}

double GaugeSystem::boundary_pairing_mode(const ModeState& m) const {
    return 2.0 * (m.tdtpsi(bg_.A()) * std::conj(m.nu)).real();
}

namespace {

// orthonormal (Frobenius) basis of symmetric traceless 3x3 matrices
struct StBasis {
    double e[5][3][3] = {};
    StBasis() {
        const double r2 = 1.0 / std::sqrt(2.0);
        const double r6 = 1.0 / std::sqrt(6.0);
        e[0][0][0] = r2;
        e[0][1][1] = -r2;
        e[1][0][0] = r6;
        e[1][1][1] = r6;
        e[1][2][2] = -2.0 * r6;
        e[2][0][1] = e[2][1][0] = r2;
        e[3][0][2] = e[3][2][0] = r2;
        e[4][1][2] = e[4][2][1] = r2;
    }
};

// Gaussian deviates via Box-Muller on the raw engine output, so initial
// data is bit-identical across standard libraries.
class Gauss {
  public:
    explicit Gauss(unsigned long long seed) : rng_(seed) {}
    double real() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log1p(-u1)) *
               std::cos(2.0 * M_PI * u2);
    }
    cplx complex_unit() {
        const double re = real();
        const double im = real();
        return cplx(re, im) / std::sqrt(2.0);
    }

  private:
    double uniform() {
        // 53-bit mantissa, in [0, 1)
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }
    std::mt19937_64 rng_;
};

// solve (0.5 |k|^2 I + (1/6) k k^T) y = r  (real SPD matrix, complex rhs)
std::array<cplx, 3> solve_mom_normal(const ModeIndex& k,
                                     const std::array<cplx, 3>& r) {
    double M[3][3];
    const double ks = static_cast<double>(k.norm_sq());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            M[i][j] = (i == j ? 0.5 * ks : 0.0) +
                      static_cast<double>(k[i] * k[j]) / 6.0;
    std::array<cplx, 3> y = r;
    // Gaussian elimination with partial pivoting on the 3x3 system
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row)
            if (std::abs(M[perm[row]][col]) > std::abs(M[perm[piv]][col]))
                piv = row;
        std::swap(perm[col], perm[piv]);
        const double d = M[perm[col]][col];
        if (std::abs(d) < 1e-300)
            throw SolveFailure("singular momentum normal matrix");
        for (int row = col + 1; row < 3; ++row) {
            const double f = M[perm[row]][col] / d;
            for (int cc = col; cc < 3; ++cc)
                M[perm[row]][cc] -= f * M[perm[col]][cc];
            y[static_cast<size_t>(perm[row])] -=
                f * y[static_cast<size_t>(perm[col])];
        }
    }
    std::array<cplx, 3> x{};
    for (int col = 2; col >= 0; --col) {
        cplx s = y[static_cast<size_t>(perm[col])];
        for (int cc = col + 1; cc < 3; ++cc)
            s -= M[perm[col]][cc] * x[static_cast<size_t>(cc)];
        x[static_cast<size_t>(col)] = s / M[perm[col]][col];
    }
    return x;
}

double mode_max_abs(const ModeState& m) {
    double s = 0.0;
    for (const auto& g : m.gamma) s = std::max(s, std::abs(g));
    for (const auto& K : m.kmix) s = std::max(s, std::abs(K));
    s = std::max({s, std::abs(m.psi), std::abs(m.chi), std::abs(m.nu)});
    return s;
}

} // namespace

FieldState make_initial_data(const KasnerBackground& bg, GaugeTag tag,
                             int k_max, const InitialDataOptions& opt) {
    if (bg.A() < 1e-12)
        throw ZeroScalarAmplitude(
            "initial data requires a nonzero scalar-field amplitude "
            "(A > 0): the Hamiltonian constraint is solved for the "
            "scalar momentum");

    static const StBasis basis;
    FieldState st(bg, tag, k_max, 1.0);
    const GaugeSystem sys(bg, tag);
    const BgAt b1 = BgAt::at(bg, 1.0);
    const auto& q = bg.q();
    const double A = bg.A();
    const bool par = tag.is_parabolic();
    const double il = tag.inv_lambda();

    Gauss rng(opt.seed);

    for (int idx = 0; idx < st.lattice.size(); ++idx) {
        if (!st.lattice.is_primary(idx)) continue;
        const ModeIndex k = st.lattice.at(idx);
        const bool real_mode = k.is_zero();
        auto draw = [&]() -> cplx {
            return real_mode ? cplx(rng.real(), 0.0) : rng.complex_unit();
        };

        const double scale =
            opt.amplitude *
            std::pow(1.0 + static_cast<double>(k.norm_sq()),
                     -opt.spectral_power);

        ModeState m;
        for (int s = 0; s < 6; ++s) m.gamma[s] = scale * draw();
        m.psi = scale * draw();
        cplx S[5];
        for (int s = 0; s < 5; ++s) S[s] = scale * draw();
        m.nu = scale * draw();

        // cmc: the lapse is slaved to gamma by the elliptic equation
        if (!par) m.nu = sys.cmc_lapse(b1, k, m);

        // K: drawn symmetric-traceless part, antisymmetric part slaved to
        // gamma (symmetry of the lowered tensor), parabolic trace nu/lambda
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                cplx v = 0.0;
                for (int s = 0; s < 5; ++s) v += S[s] * basis.e[s][i][j];
                if (i != j) v += 0.5 * (q[j] - q[i]) * m.g(i, j);
                if (par && i == j) v += il / 3.0 * m.nu;
                m.Kref(i, j) = v;
            }

        // least-norm symmetric-traceless correction enforcing the
        // momentum constraint (vacuous at k = 0)
        if (!real_mode) {
            const ModeConstraints c0 = sys.constraints_mode(b1, k, m);
            const std::array<cplx, 3> y = solve_mom_normal(k, c0.mom);
            cplx dc[5];
            for (int s = 0; s < 5; ++s) {
                cplx v = 0.0;
                for (int i = 0; i < 3; ++i) {
                    cplx Mis = 0.0; // M_{i,s} = sum_a i k_a (E_s)_{a i}
                    for (int a = 0; a < 3; ++a)
                        Mis += I * kd(k, a) * basis.e[s][a][i];
                    v += std::conj(Mis) * y[static_cast<size_t>(i)];
                }
                dc[s] = -v;
            }
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    cplx v = m.K(i, j);
                    for (int s = 0; s < 5; ++s)
                        v += dc[s] * basis.e[s][i][j];
                    m.Kref(i, j) = v;
                }
        }

        // chi from the Hamiltonian constraint
        {
            const cplx t2R = compute_t2R(b1, k, m);
            cplx khK = 0.0;
            for (int a = 0; a < 3; ++a)
                khK += bg.second_fund_tracefree()[a] * m.K(a, a);
            cplx rhs = t2R - 2.0 * khK;
            if (par) rhs -= (4.0 / 3.0) * il * m.nu;
            m.chi = rhs / (2.0 * A);
        }

        st.modes[static_cast<size_t>(idx)] = m;
        st.modes[static_cast<size_t>(st.lattice.conjugate_index(idx))] =
            m.conjugated();
    }

    // verify the construction actually satisfies the constraints
    for (int idx = 0; idx < st.lattice.size(); ++idx) {
        const ModeIndex k = st.lattice.at(idx);
        const ModeState& m = st.modes[static_cast<size_t>(idx)];
        const ModeConstraints c = sys.constraints_mode(b1, k, m);
        double res = std::abs(c.ham);
        for (int i = 0; i < 3; ++i) res = std::max(res, std::abs(c.mom[i]));
        res = std::max(res, std::abs(c.gauge_residual));
        const double ref =
            (1.0 + static_cast<double>(k.norm_sq())) * mode_max_abs(m);
        if (!(res <= 1e-12 * (ref + 1e-30)))
            throw SolveFailure("initial-data constraint residual " +
                               std::to_string(res) + " at mode (" +
                               std::to_string(k[0]) + "," +
                               std::to_string(k[1]) + "," +
                               std::to_string(k[2]) + ")");
    }

    return st;
}

} // namespace kasner
