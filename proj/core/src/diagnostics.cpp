#include "kasner/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace kasner {

namespace {

GaugeSystem make_sys(const FieldState& st) {
    return GaugeSystem(st.bg, st.gauge);
}

double max_abs_term(const std::map<std::string, double>& terms) {
    double m = 0.0;
    for (const auto& [k, v] : terms) m = std::max(m, std::abs(v));
    return m;
}

void require_acc(const Trajectory& traj) {
    if (!traj.has_accumulators || traj.acc.empty())
        throw MissingAccumulator(
            "identity evaluation requires a trajectory integrated with "
            "accumulators enabled");
}

// linear least squares for y ~ X beta, small fixed column count
template <int P>
std::array<double, P> lstsq(const std::vector<std::array<double, P>>& X,
                            const std::vector<double>& y, double* rss) {
    double A[P][P] = {};
    double b[P] = {};
    const size_t n = y.size();
    for (size_t r = 0; r < n; ++r) {
        for (int i = 0; i < P; ++i) {
            b[i] += X[r][static_cast<size_t>(i)] * y[r];
            for (int j = 0; j < P; ++j)
                A[i][j] += X[r][static_cast<size_t>(i)] *
                           X[r][static_cast<size_t>(j)];
        }
    }
    // Gaussian elimination with partial pivoting
    int perm[P];
    for (int i = 0; i < P; ++i) perm[i] = i;
    for (int col = 0; col < P; ++col) {
        int piv = col;
        for (int r = col + 1; r < P; ++r)
            if (std::abs(A[perm[r]][col]) > std::abs(A[perm[piv]][col]))
                piv = r;
        std::swap(perm[col], perm[piv]);
        const double d = A[perm[col]][col];
        if (std::abs(d) < 1e-300)
            throw SolveFailure("singular least-squares system");
        for (int r = col + 1; r < P; ++r) {
            const double f = A[perm[r]][col] / d;
            for (int c = col; c < P; ++c) A[perm[r]][c] -= f * A[perm[col]][c];
            b[perm[r]] -= f * b[perm[col]];
        }
    }
    std::array<double, P> beta{};
    for (int col = P - 1; col >= 0; --col) {
        double s = b[perm[col]];
        for (int c = col + 1; c < P; ++c)
            s -= A[perm[col]][c] * beta[static_cast<size_t>(c)];
        beta[static_cast<size_t>(col)] = s / A[perm[col]][col];
    }
    if (rss) {
        double r2 = 0.0;
        for (size_t r = 0; r < n; ++r) {
            double pred = 0.0;
            for (int i = 0; i < P; ++i)
                pred += X[r][static_cast<size_t>(i)] *
                        beta[static_cast<size_t>(i)];
            r2 += (y[r] - pred) * (y[r] - pred);
        }
        *rss = r2;
    }
    return beta;
}

// slope of y against x (2-parameter fit), no window logic
double plain_slope(const std::vector<double>& x,
                   const std::vector<double>& y) {
    std::vector<std::array<double, 2>> X(x.size());
    for (size_t i = 0; i < x.size(); ++i) X[i] = {1.0, x[i]};
    return lstsq<2>(X, y, nullptr)[1];
}

size_t log_mid_index(const std::vector<double>& t) {
    // index closest to the geometric midpoint of [t_last, t_first]
    const double mid = 0.5 * (std::log(t.front()) + std::log(t.back()));
    size_t best = 0;
    double bd = 1e300;
    for (size_t i = 0; i < t.size(); ++i) {
        const double d = std::abs(std::log(t[i]) - mid);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

} // namespace

EnergyReport energies(const FieldState& st, double sigma_star, int order) {
    const BgAt b = BgAt::at(st.bg, st.t);
    const GaugeSystem sys = make_sys(st);
    EnergyReport r;
    r.t = st.t;
    r.order = order;
    for (int idx = 0; idx < st.lattice.size(); ++idx) {
        const ModeIndex k = st.lattice.at(idx);
        const ModeEnergies e =
            sys.energies_mode(b, k, st.modes[static_cast<size_t>(idx)]);
        const double w = sobolev_weight(k, order);
        r.e_metric_sq += w * e.em;
        r.e_scalar_sq += w * e.es;
        r.e_dlapse_sq += w * e.edl;
        r.e_lapse_sq += w * e.el;
    }
    r.e_metric_sq *= kParsevalFactor;
    r.e_scalar_sq *= kParsevalFactor;
    r.e_dlapse_sq *= kParsevalFactor;
    r.e_lapse_sq *= kParsevalFactor;
    r.e_total_sq = sigma_star * r.e_metric_sq + r.e_scalar_sq +
                   r.e_dlapse_sq + r.e_lapse_sq;
    r.e_almost_total_sq =
        sigma_star * r.e_metric_sq + r.e_scalar_sq + r.e_lapse_sq;
    return r;
}

std::array<double, N_ACC> integrand_totals(const FieldState& st,
                                           double sigma_star) {
    const BgAt b = BgAt::at(st.bg, st.t);
    const GaugeSystem sys = make_sys(st);
    std::array<double, N_ACC> out{};
    double f[N_ACC];
    for (int idx = 0; idx < st.lattice.size(); ++idx) {
        sys.integrands_mode(b, st.lattice.at(idx),
                            st.modes[static_cast<size_t>(idx)], sigma_star,
                            f);
        for (int c = 0; c < N_ACC; ++c)
            out[static_cast<size_t>(c)] += f[c];
    }
    for (int c = 0; c < N_ACC; ++c)
        out[static_cast<size_t>(c)] *= kParsevalFactor;
    return out;
}

IdentityResidual identity_scalar_lapse(const Trajectory& traj, size_t i) {
    require_acc(traj);
    const FieldState& st = traj.states.at(i);
    const FieldState& s1 = traj.states.front();
    const auto& acc = traj.acc.at(i);
    const double A = st.bg.A();
    const bool par = st.gauge.is_parabolic();
    const double il = st.gauge.inv_lambda();

    const EnergyReport et = energies(st, 0.0, 0);
    const EnergyReport e1 = energies(s1, 0.0, 0);

    IdentityResidual r;
    r.t = st.t;
    if (!par) {
        r.id = "cmc-scalar-lapse";
        const double c1_t =
            integrand_totals(st, 0.0)[ACC_SHEAR_K_NU];
        const double c1_1 =
            integrand_totals(s1, 0.0)[ACC_SHEAR_K_NU];
        r.lhs = et.e_scalar_sq + et.e_dlapse_sq +
                (1.0 - A * A) * et.e_lapse_sq;
        r.terms["boundary_energy_t"] = r.lhs;
        r.terms["boundary_energy_1"] = e1.e_scalar_sq + e1.e_dlapse_sq +
                                       (1.0 - A * A) * e1.e_lapse_sq;
        r.terms["boundary_shear_k_nu_1"] = c1_1;
        r.terms["boundary_shear_k_nu_t"] = -c1_t;
        r.terms["int_grad_psi"] = -2.0 * (acc[ACC_GRADPSI] +
                                          acc[ACC_SHEAR_GRADPSI]);
        r.terms["int_grad_nu"] = -acc[ACC_GRADNU];
        r.terms["int_grad_psi_grad_nu"] = -A * acc[ACC_GRADPSI_GRADNU];
        r.terms["int_nu_sq"] = -acc[ACC_NUSQ];
        r.terms["int_shear_k_nu"] = -acc[ACC_SHEAR_K_NU];
    } else {
        r.id = "parabolic-scalar-lapse";
        const GaugeSystem sys = make_sys(st);
        auto q4 = [&](const FieldState& s) {
            double v = 0.0;
            for (const ModeState& m : s.modes)
                v += sys.boundary_pairing_mode(m);
            return kParsevalFactor * v;
        };
        const double coef = A * A + 0.5 * il * (1.0 - il);
        r.lhs = et.e_scalar_sq + coef * et.e_lapse_sq - A * q4(st);
        r.terms["boundary_energy_t"] = r.lhs;
        r.terms["boundary_energy_1"] =
            e1.e_scalar_sq + coef * e1.e_lapse_sq - A * q4(s1);
        r.terms["int_grad_psi"] = -2.0 * (acc[ACC_GRADPSI] +
                                          acc[ACC_SHEAR_GRADPSI]);
        r.terms["int_grad_nu"] = -(1.0 - il) * acc[ACC_GRADNU];
        r.terms["int_nu_sq"] =
            -(1.0 - il) * (1.0 + il / 3.0) * acc[ACC_NUSQ];
        r.terms["int_grad_psi_grad_nu"] = -A * acc[ACC_GRADPSI_GRADNU];
        r.terms["int_shear_k_nu"] = -(1.0 - il) * acc[ACC_SHEAR_K_NU];
    }
    r.rhs = 0.0;
    for (const auto& [key, v] : r.terms)
        if (key != "boundary_energy_t") r.rhs += v;
    r.residual = r.lhs - r.rhs;
    const double scale = max_abs_term(r.terms);
    r.relative = scale > 0.0 ? std::abs(r.residual) / scale : 0.0;
    return r;
}

IdentityResidual identity_metric(const Trajectory& traj, size_t i) {
    require_acc(traj);
    const FieldState& st = traj.states.at(i);
    const FieldState& s1 = traj.states.front();
    const auto& acc = traj.acc.at(i);
    const double A = st.bg.A();
    const bool par = st.gauge.is_parabolic();
    const double il = st.gauge.inv_lambda();

    IdentityResidual r;
    r.t = st.t;
    r.id = par ? "parabolic-metric" : "cmc-metric";
    r.lhs = energies(st, 0.0, 0).e_metric_sq;
    r.terms["boundary_energy_t"] = r.lhs;
    r.terms["boundary_energy_1"] = energies(s1, 0.0, 0).e_metric_sq;
    r.terms["int_grad_gamma"] =
        -0.5 * (acc[ACC_GRADGAMMA] + acc[ACC_SHEAR_GRADGAMMA]);
    r.terms["int_shear_kk"] = acc[ACC_SHEAR_KK];
    r.terms["int_shear_christ2"] = acc[ACC_SHEAR_CHRIST2];
    r.terms["int_shear_grad_gamma_grad_nu"] =
        acc[ACC_SHEAR_GRADGAMMA_GRADNU];
    r.terms["int_shear_k_nu"] =
        (par ? (1.0 - il) : 1.0) * acc[ACC_SHEAR_K_NU];
    r.terms["int_grad_psi_grad_nu"] = A * acc[ACC_GRADPSI_GRADNU];
    r.terms["int_christ_grad_psi"] = -A * acc[ACC_CHRIST_GRADPSI];
    if (par) {
        r.terms["int_grad_nu"] = -2.0 * il * acc[ACC_GRADNU];
        r.terms["int_christ_grad_nu"] = il * acc[ACC_CHRIST_GRADNU];
        r.terms["int_nu_sq"] =
            -(2.0 / 3.0) * il * (1.0 - il) * acc[ACC_NUSQ];
    }
    r.rhs = 0.0;
    for (const auto& [key, v] : r.terms)
        if (key != "boundary_energy_t") r.rhs += v;
    r.residual = r.lhs - r.rhs;
    const double scale = max_abs_term(r.terms);
    r.relative = scale > 0.0 ? std::abs(r.residual) / scale : 0.0;
    return r;
}

LapseEstimateReport lapse_energy_estimate(const Trajectory& traj) {
    require_acc(traj);
    const FieldState& s1 = traj.states.front();
    if (!s1.gauge.is_parabolic())
        throw WrongGauge("the lapse energy estimate is a parabolic-gauge "
                         "statement");
    const double il = s1.gauge.inv_lambda();
    const double sg = s1.bg.sigma();
    const double base = il * energies(s1, 0.0, 0).e_dlapse_sq;

    const size_t n = traj.times.size();
    std::vector<double> lhs(n), core(n), err(n);
    for (size_t i = 0; i < n; ++i) {
        lhs[i] = il * energies(traj.states[i], 0.0, 0).e_dlapse_sq;
        const auto& a = traj.acc[i];
        core[i] = base - a[ACC_GRAD2NU] -
                  il * (4.0 / 3.0 - 2.0 * sg) * a[ACC_GRADNU];
        err[i] = a[ACC_SHEARK_SQ] + a[ACC_TDTPSI_SQ] + a[ACC_NUSQ];
    }

    LapseEstimateReport rep;
    const size_t mid = log_mid_index(traj.times);
    rep.t_mid = traj.times[mid];
    for (size_t i = 0; i <= mid; ++i) {
        if (err[i] <= 0.0) continue;
        rep.c_fit = std::max(rep.c_fit, (lhs[i] - core[i]) / err[i]);
    }
    for (size_t i = mid + 1; i < n; ++i) {
        const double rhs = core[i] + rep.c_fit * err[i];
        const double scale = std::max(
            {std::abs(lhs[i]), std::abs(core[i]), rep.c_fit * err[i],
             1e-300});
        rep.max_violation =
            std::max(rep.max_violation, (lhs[i] - rhs) / scale);
    }
    rep.holds = rep.max_violation <= 1e-8;
    return rep;
}

MonotonicityReport monotonicity_report(const Trajectory& traj,
                                       double sigma_star) {
    require_acc(traj);
    const bool par = traj.states.front().gauge.is_parabolic();
    const double sg = traj.states.front().bg.sigma();

    MonotonicityReport rep;
    const size_t n = traj.times.size();
    for (size_t i = 0; i < n; ++i) {
        const EnergyReport e = energies(traj.states[i], sigma_star, 0);
        rep.t.push_back(traj.times[i]);
        rep.energy_sq.push_back(par ? e.e_almost_total_sq : e.e_total_sq);
    }

    const double cg = 1.0 / 6.0 * sigma_star;
    const double cp = par ? 1.0 / 12.0 : 1.0 / 6.0;
    const double cn = par ? 1.0 / 21.0 : 1.0 / 6.0;
    const double cl = par ? 2.0 / 9.0 : 1.0 / 2.0;
    const auto& last = traj.acc.back();
    rep.favorable = {cg * last[ACC_GRADGAMMA], cp * last[ACC_GRADPSI],
                     cn * last[ACC_GRADNU], cl * last[ACC_NUSQ]};

    // the favorable integrands are nonnegative, so the accumulated
    // integrals must be nondecreasing toward the past
    for (const int ch :
         {static_cast<int>(ACC_GRADGAMMA), static_cast<int>(ACC_GRADPSI),
          static_cast<int>(ACC_GRADNU), static_cast<int>(ACC_NUSQ)}) {
        for (size_t i = 0; i + 1 < n; ++i) {
            const double diff = traj.acc[i + 1][static_cast<size_t>(ch)] -
                                traj.acc[i][static_cast<size_t>(ch)];
            const double slack =
                1e-14 *
                (1.0 + std::abs(traj.acc[i][static_cast<size_t>(ch)]));
            const double norm_diff =
                diff /
                (1.0 + std::abs(traj.acc[i][static_cast<size_t>(ch)]));
            rep.worst_integrand_decrement =
                std::min(rep.worst_integrand_decrement, norm_diff);
            if (diff < -slack) rep.integrands_nonnegative = false;
        }
    }

    const double e1 = rep.energy_sq.front();
    for (double e : rep.energy_sq)
        rep.max_ratio = std::max(rep.max_ratio, e / std::max(e1, 1e-300));

    std::vector<double> lt, le;
    for (size_t i = 0; i < n; ++i) {
        if (rep.energy_sq[i] <= 0.0) continue;
        lt.push_back(std::log(rep.t[i]));
        le.push_back(std::log(rep.energy_sq[i]));
    }
    if (lt.size() >= 3) rep.fitted_exponent = plain_slope(lt, le);

    // fit (C, c) on t in [t_mid, 1]; validate on the held-out tail
    const size_t mid = log_mid_index(rep.t);
    if (sg > 0.0) rep.fitted_c = std::max(0.0, -rep.fitted_exponent) / sg;
    rep.fitted_C = 1.0;
    for (size_t i = 0; i <= mid; ++i)
        rep.fitted_C = std::max(
            rep.fitted_C,
            rep.energy_sq[i] /
                (std::max(e1, 1e-300) *
                 std::pow(rep.t[i], -rep.fitted_c * sg)));
    for (size_t i = mid + 1; i < n; ++i) {
        const double bound = 1.1 * rep.fitted_C * e1 *
                             std::pow(rep.t[i], -rep.fitted_c * sg);
        if (rep.energy_sq[i] > bound) rep.holdout_ok = false;
    }
    return rep;
}

DecayFit decay_fit(const std::string& quantity,
                   const std::vector<double>& t,
                   const std::vector<double>& v, double t_lo, double t_hi,
                   bool with_log) {
    std::vector<double> lt, lv;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi || !(v[i] > 0.0)) continue;
        lt.push_back(std::log(t[i]));
        lv.push_back(std::log(v[i]));
    }
    if (lt.size() < 10)
        throw InsufficientSpan("decay fit for " + quantity + " has only " +
                               std::to_string(lt.size()) +
                               " usable points (need 10)");
    const auto [mn, mx] = std::minmax_element(lt.begin(), lt.end());
    if (*mx - *mn < 2.0 * std::log(10.0))
        throw InsufficientSpan("decay fit for " + quantity +
                               " spans fewer than 2 decades");

    const size_t n = lt.size();
    std::vector<std::array<double, 2>> XA(n);
    std::vector<std::array<double, 3>> XB(n);
    for (size_t i = 0; i < n; ++i) {
        XA[i] = {1.0, lt[i]};
        XB[i] = {1.0, lt[i], std::log1p(std::abs(lt[i]))};
    }
    double rss_a = 0.0, rss_b = 0.0;
    const auto ba = lstsq<2>(XA, lv, &rss_a);
    const auto bb = lstsq<3>(XB, lv, &rss_b);

    DecayFit f;
    f.quantity = quantity;
    f.t_lo = t_lo;
    f.t_hi = t_hi;
    const double noise_floor = static_cast<double>(n) * 1e-12;
    const bool log_better = rss_a > 10.0 * rss_b && rss_a > noise_floor;
    if (with_log && log_better) {
        f.log_factor_detected = true;
        f.exponent = bb[1];
        f.log_coeff = bb[2];
        f.rms_misfit = std::sqrt(rss_b / static_cast<double>(n));
    } else {
        f.exponent = ba[1];
        f.rms_misfit = std::sqrt(rss_a / static_cast<double>(n));
    }
    return f;
}

double solution_norm(const FieldState& st, int order) {
    const double t23 = std::pow(st.t, 2.0 / 3.0);
    double s = sobolev_norm(st, Field::Kmix, order) +
               sobolev_norm(st, Field::DGamma, order) +
               sobolev_norm(st, Field::TdtPsi, order) +
               t23 * sobolev_norm(st, Field::DPsi, order);
    const int pmax = st.gauge.is_parabolic() ? 1 : 2;
    for (int p = 0; p <= pmax; ++p)
        s += std::pow(t23, p) * sobolev_norm(st, Field::Nu, order + p);
    return s;
}

namespace {

// global L2 distance between two per-mode component arrays
template <typename Get>
double l2_diff(const FieldState& a, const FieldState& b, Get get,
               int ncomp) {
    double s = 0.0;
    for (size_t idx = 0; idx < a.modes.size(); ++idx)
        for (int c = 0; c < ncomp; ++c)
            s += std::norm(get(a.modes[idx], c) - get(b.modes[idx], c));
    return std::sqrt(kParsevalFactor * s);
}

template <typename Get>
double l2_mag(const FieldState& a, Get get, int ncomp) {
    double s = 0.0;
    for (size_t idx = 0; idx < a.modes.size(); ++idx)
        for (int c = 0; c < ncomp; ++c) s += std::norm(get(a.modes[idx], c));
    return std::sqrt(kParsevalFactor * s);
}

// fitted exponent of the Cauchy differences; 99 if already converged
template <typename Get>
double cauchy_rate(const Trajectory& traj, Get get, int ncomp,
                   double scale) {
    std::vector<double> lt, ld;
    for (size_t i = 0; i + 1 < traj.states.size(); ++i) {
        const double d =
            l2_diff(traj.states[i], traj.states[i + 1], get, ncomp);
        if (d <= 1e-13 * scale) continue;
        lt.push_back(std::log(traj.times[i]));
        ld.push_back(std::log(d));
    }
    if (lt.size() < 3) return 99.0;
    return plain_slope(lt, ld);
}

} // namespace

BangLimits bang_limits(const Trajectory& traj) {
    if (traj.times.back() > 1e-4)
        throw InsufficientDepth("bang limits need a trajectory reaching "
                                "t <= 1e-4");
    const size_t n = traj.times.size();
    const FieldState& sa = traj.states[n - 1]; // smallest t
    const FieldState& sb = traj.states[n - 2];
    const double t1 = traj.times[n - 1];
    const double t2 = traj.times[n - 2];
    const double A = sa.bg.A();
    const auto& q = sa.bg.q();

    auto getK = [](const ModeState& m, int c) { return m.kmix[c]; };
    auto getP = [A](const ModeState& m, int c) {
        (void)c;
        return m.tdtpsi(A);
    };

    BangLimits out;
    const double kscale = l2_mag(sa, getK, 9) + 1e-300;
    const double pscale = l2_mag(sa, getP, 1) + 1e-300;
    out.k_rate = cauchy_rate(traj, getK, 9, kscale);
    out.psi_rate = cauchy_rate(traj, getP, 1, pscale);

    auto richardson = [&](const cplx& x1, const cplx& x2, double p) {
        if (p > 50.0) return x1;
        const double pc = std::clamp(p, 0.1, 5.0);
        return x1 + (x1 - x2) / (std::pow(t2 / t1, pc) - 1.0);
    };

    const size_t nm = sa.modes.size();
    out.k_bang.resize(nm);
    out.psi_bang.resize(nm);
    out.h_bang.resize(nm);
    for (size_t idx = 0; idx < nm; ++idx) {
        for (int c = 0; c < 9; ++c)
            out.k_bang[idx][static_cast<size_t>(c)] =
                richardson(sa.modes[idx].kmix[c], sb.modes[idx].kmix[c],
                           out.k_rate);
        out.psi_bang[idx] = richardson(sa.modes[idx].tdtpsi(A),
                                       sb.modes[idx].tdtpsi(A),
                                       out.psi_rate);
        const cplx tr = out.k_bang[idx][0] + out.k_bang[idx][4] +
                        out.k_bang[idx][8];
        out.trace_k_bang_max =
            std::max(out.trace_k_bang_max, std::abs(tr));
    }

    // rescaled metric combination, using the accelerated K limit
    auto rescaled = [&](const FieldState& s, size_t idx, int i, int j) {
        const cplx kb = out.k_bang[idx][static_cast<size_t>(3 * i + j)];
        const double dq = q[i] - q[j];
        cplx v = std::pow(s.t, -2.0 * q[j]) * s.modes[idx].g(i, j);
        if (std::abs(dq) < 1e-12)
            v += 2.0 * std::log(s.t) * kb;
        else
            v += std::pow(s.t, 2.0 * dq) / dq * kb;
        return v;
    };

    // Cauchy rate of the rescaled combination across checkpoints
    {
        std::vector<double> lt, ld;
        double scale = 0.0;
        for (size_t idx = 0; idx < nm; ++idx)
            for (int i = 0; i < 3; ++i)
                for (int j = i; j < 3; ++j)
                    scale += std::norm(rescaled(sa, idx, i, j));
        scale = std::sqrt(scale) + 1e-300;
        for (size_t w = 0; w + 1 < n; ++w) {
            if (traj.times[w] > 1e-1) continue;
            double d = 0.0;
            for (size_t idx = 0; idx < nm; ++idx)
                for (int i = 0; i < 3; ++i)
                    for (int j = i; j < 3; ++j)
                        d += std::norm(rescaled(traj.states[w], idx, i, j) -
                                       rescaled(traj.states[w + 1], idx, i,
                                                j));
            d = std::sqrt(d);
            if (d <= 1e-13 * scale) continue;
            lt.push_back(std::log(traj.times[w]));
            ld.push_back(std::log(d));
        }
        out.h_rate = lt.size() < 3 ? 99.0 : plain_slope(lt, ld);
    }
    for (size_t idx = 0; idx < nm; ++idx)
        for (int i = 0; i < 3; ++i)
            for (int j = i; j < 3; ++j)
                out.h_bang[idx][static_cast<size_t>(kSymIdx[i][j])] =
                    richardson(rescaled(sa, idx, i, j),
                               rescaled(sb, idx, i, j), out.h_rate);
    return out;
}

std::vector<double> vtd_ratio(const Trajectory& traj) {
    std::vector<double> out;
    for (const FieldState& st : traj.states) {
        const BgAt b = BgAt::at(st.bg, st.t);
        double num = 0.0, den = 0.0;
        for (int idx = 0; idx < st.lattice.size(); ++idx) {
            const ModeState& m = st.modes[static_cast<size_t>(idx)];
            const double t2mu = b.t2 * mode_mu(b, st.lattice.at(idx));
            num += t2mu * t2mu * std::norm(m.psi);
            den += std::norm(m.tdtpsi(st.bg.A()));
        }
        out.push_back(std::sqrt(num) / (std::sqrt(den) + 1e-300));
    }
    return out;
}

double max_constraint_residual(const FieldState& st) {
    const BgAt b = BgAt::at(st.bg, st.t);
    const GaugeSystem sys = make_sys(st);
    double num_h = 0.0, den_h = 0.0, num_m = 0.0, den_m = 0.0;
    for (int idx = 0; idx < st.lattice.size(); ++idx) {
        const ModeIndex k = st.lattice.at(idx);
        const ModeState& m = st.modes[static_cast<size_t>(idx)];
        const ModeConstraints c = sys.constraints_mode(b, k, m);
        num_h = std::max(num_h, std::abs(c.ham));
        den_h = std::max(den_h, c.ham_scale);
        for (int i = 0; i < 3; ++i)
            num_m = std::max(num_m, std::abs(c.mom[i]));
        den_m = std::max(den_m, c.mom_scale);
        // On flrw the term scales all vanish toward the bang (kh = 0 and
        // the remaining terms decay) while the fields stay order one, so
        // floor the denominators with the magnitudes of the fields that
        // enter the constraints.
        double fm = std::max(std::abs(m.chi), std::abs(m.nu));
        for (const cplx& Kc : m.kmix) fm = std::max(fm, std::abs(Kc));
        den_h = std::max(den_h, fm);
        den_m = std::max(den_m,
                         std::sqrt(static_cast<double>(k.norm_sq())) * fm);
    }
    double r = 0.0;
    if (den_h > 0.0) r = std::max(r, num_h / den_h);
    if (den_m > 0.0) r = std::max(r, num_m / den_m);
    return r;
}

} // namespace kasner
