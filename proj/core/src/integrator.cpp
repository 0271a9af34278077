#include "kasner/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace kasner {

namespace {

// Dormand-Prince 5(4) tableau
constexpr int kStages = 7;
constexpr double kC[kStages] = {0.0,       1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0,
                                8.0 / 9.0, 1.0,       1.0};
constexpr double kA[kStages][kStages] = {
    {},
    {1.0 / 5.0},
    {3.0 / 40.0, 9.0 / 40.0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0}};
constexpr double kB5[kStages] = {35.0 / 384.0,     0.0,  500.0 / 1113.0,
                                 125.0 / 192.0,    -2187.0 / 6784.0,
                                 11.0 / 84.0,      0.0};
constexpr double kB4[kStages] = {5179.0 / 57600.0,    0.0,
                                 7571.0 / 16695.0,    393.0 / 640.0,
                                 -92097.0 / 339200.0, 187.0 / 2100.0,
                                 1.0 / 40.0};

struct Layout {
    int n_modes = 0;
    int per_mode = 0; // 34 (cmc) or 36 (parabolic, nu evolved)
    bool evolve_nu = false;
    bool accumulate = false;
    int dyn_size = 0;   // dynamic components
    int total_size = 0; // dynamic + accumulators
};

Layout make_layout(const FieldState& st, const IntegratorOptions& opt) {
    Layout L;
    L.n_modes = st.lattice.size();
    L.evolve_nu = st.gauge.is_parabolic();
    L.per_mode = L.evolve_nu ? 36 : 34;
    L.accumulate = opt.accumulate;
    L.dyn_size = L.n_modes * L.per_mode;
    L.total_size = L.dyn_size + (L.accumulate ? N_ACC : 0);
    return L;
}

void put(std::vector<double>& y, int& p, const cplx& z) {
    y[static_cast<size_t>(p++)] = z.real();
    y[static_cast<size_t>(p++)] = z.imag();
}

cplx get(const std::vector<double>& y, int& p) {
    const double re = y[static_cast<size_t>(p++)];
    const double im = y[static_cast<size_t>(p++)];
    return cplx(re, im);
}

void pack(const FieldState& st, const Layout& L, std::vector<double>& y) {
    y.assign(static_cast<size_t>(L.total_size), 0.0);
    int p = 0;
    for (const ModeState& m : st.modes) {
        for (const auto& g : m.gamma) put(y, p, g);
        for (const auto& K : m.kmix) put(y, p, K);
        put(y, p, m.psi);
        put(y, p, m.chi);
        if (L.evolve_nu) put(y, p, m.nu);
    }
}

void unpack_mode(const std::vector<double>& y, const Layout& L, int idx,
                 ModeState& m) {
    int p = idx * L.per_mode;
    for (auto& g : m.gamma) g = get(y, p);
    for (auto& K : m.kmix) K = get(y, p);
    m.psi = get(y, p);
    m.chi = get(y, p);
    if (L.evolve_nu) m.nu = get(y, p);
}

void write_mode(std::vector<double>& y, const Layout& L, int idx,
                const ModeState& m) {
    int p = idx * L.per_mode;
    for (const auto& g : m.gamma) put(y, p, g);
    for (const auto& K : m.kmix) put(y, p, K);
    put(y, p, m.psi);
    put(y, p, m.chi);
    if (L.evolve_nu) put(y, p, m.nu);
}

class System {
  public:
    System(const FieldState& init, const IntegratorOptions& opt)
        : sys_(init.bg, init.gauge), lattice_(init.lattice), opt_(opt),
          L_(make_layout(init, opt)) {
        const bool par = init.gauge.is_parabolic();
        exp_lapse_ = par && (opt.scheme == "rk45-exp-lapse" ||
                             opt.scheme == "auto");
        if (!par && opt.scheme == "rk45-exp-lapse")
            throw ConfigError("scheme rk45-exp-lapse requires the "
                              "parabolic gauge");
        if (opt.scheme != "auto" && opt.scheme != "rk45" &&
            opt.scheme != "rk45-exp-lapse")
            throw ConfigError("unknown scheme: " + opt.scheme);
    }

    const Layout& layout() const { return L_; }
    const GaugeSystem& gauge() const { return sys_; }
    bool exp_lapse() const { return exp_lapse_; }

    // RHS in the possibly nu-transformed variables. tau0 is the reference
    // time of the current step (where the transform is the identity),
    // dtau the offset of this evaluation. Returns false if an exponential
    // transform factor would overflow (caller shrinks the step).
    bool rhs(double tau0, double dtau, const std::vector<double>& y,
             std::vector<double>& dy) const {
        const double tau = tau0 + dtau;
        const BgAt b = BgAt::at(sys_.background(), std::exp(tau));
        double accf[N_ACC] = {};
        ModeState m;
        for (int idx = 0; idx < L_.n_modes; ++idx) {
            const ModeIndex k = lattice_.at(idx);
            unpack_mode(y, L_, idx, m);
            double phi = 0.0;
            if (exp_lapse_) {
                phi = sys_.nu_stiff_integral(k, tau0, dtau);
                if (phi > 600.0 || phi < -600.0) return false;
                m.nu *= std::exp(phi); // back to physical nu
            }
            ModeState d = sys_.rhs_mode(b, k, m);
            if (exp_lapse_) {
                // z' = e^{-phi} (nu' - a nu)
                const double a = sys_.nu_stiff_coeff(b, k);
                d.nu = std::exp(-phi) * (d.nu - a * m.nu);
            }
            write_mode(dy, L_, idx, d);
            if (L_.accumulate && opt_.acc_mode == "rk-stage") {
                double f[N_ACC];
                sys_.integrands_mode(b, k, m, opt_.sigma_star, f);
                for (int c = 0; c < N_ACC; ++c) accf[c] += f[c];
            }
        }
        if (L_.accumulate) {
            for (int c = 0; c < N_ACC; ++c)
                dy[static_cast<size_t>(L_.dyn_size + c)] =
                    (opt_.acc_mode == "rk-stage")
                        ? -kParsevalFactor * accf[c]
                        : 0.0;
        }
        return true;
    }

    // lattice-summed integrand vector (trapezoid accumulator mode)
    void integrand_sum(double tau, const std::vector<double>& y,
                       double out[N_ACC]) const {
        const BgAt b = BgAt::at(sys_.background(), std::exp(tau));
        for (int c = 0; c < N_ACC; ++c) out[c] = 0.0;
        ModeState m;
        for (int idx = 0; idx < L_.n_modes; ++idx) {
            unpack_mode(y, L_, idx, m);
            double f[N_ACC];
            sys_.integrands_mode(b, lattice_.at(idx), m, opt_.sigma_star, f);
            for (int c = 0; c < N_ACC; ++c) out[c] += f[c];
        }
        for (int c = 0; c < N_ACC; ++c) out[c] *= kParsevalFactor;
    }

    // after an accepted step: undo the per-step nu transform and project
    // the trace of K back onto the gauge condition
    void finish_step(double tau0, double h, std::vector<double>& y) const {
        const bool par = sys_.tag().is_parabolic();
        const double il = sys_.tag().inv_lambda();
        ModeState m;
        for (int idx = 0; idx < L_.n_modes; ++idx) {
            unpack_mode(y, L_, idx, m);
            if (exp_lapse_)
                m.nu *= std::exp(sys_.nu_stiff_integral(lattice_.at(idx),
                                                        tau0, h));
            const cplx target = par ? il * m.nu : cplx(0.0);
            const cplx shift = (target - m.trace_K()) / 3.0;
            for (int i = 0; i < 3; ++i) m.Kref(i, i) += shift;
            write_mode(y, L_, idx, m);
        }
    }

  private:
    GaugeSystem sys_;
    ModeLattice lattice_;
    IntegratorOptions opt_;
    Layout L_;
    bool exp_lapse_ = false;
};

bool all_finite(const std::vector<double>& y) {
    double s = 0.0;
    for (double v : y) s += v;
    return std::isfinite(s);
}

} // namespace

Trajectory evolve(const FieldState& init, const IntegratorOptions& opt) {
    if (!(opt.t_min > 0.0))
        throw NonpositiveTime("t_min must be positive, got " +
                              std::to_string(opt.t_min));
    if (!(opt.t_min < init.t)) {
        if (init.gauge.is_parabolic())
            throw ForwardParabolic(
                "the parabolic lapse equation is well-posed backward in "
                "time only; t_min must be below the start time");
        throw ConfigError("t_min must be below the start time");
    }

    const System sys(init, opt);
    const Layout& L = sys.layout();

    std::vector<double> y;
    pack(init, L, y);

    // checkpoint times: start, then 10^{-j/cpd} below it, then t_min
    std::vector<double> cps;
    cps.push_back(init.t);
    const int cpd = std::max(1, opt.checkpoints_per_decade);
    for (int j = 1;; ++j) {
        const double t = init.t * std::pow(10.0, -static_cast<double>(j) / cpd);
        if (t <= opt.t_min * (1.0 + 1e-12)) break;
        cps.push_back(t);
    }
    cps.push_back(opt.t_min);

    Trajectory out;
    out.has_accumulators = L.accumulate;
    std::array<double, N_ACC> acc{};

    auto store = [&](double t) {
        FieldState st(init.bg, init.gauge, init.lattice.k_max(), t);
        for (int idx = 0; idx < L.n_modes; ++idx)
            unpack_mode(y, L, idx, st.modes[static_cast<size_t>(idx)]);
        st.enforce_hermitian();
        // push the symmetrized values back into the live vector
        for (int idx = 0; idx < L.n_modes; ++idx)
            write_mode(y, L, idx, st.modes[static_cast<size_t>(idx)]);
        if (!init.gauge.is_parabolic()) {
            GaugeSystem gs(init.bg, init.gauge);
            gs.solve_lapse(st);
        }
        std::array<double, N_ACC> a = acc;
        if (L.accumulate && opt.acc_mode == "rk-stage")
            for (int c = 0; c < N_ACC; ++c)
                a[static_cast<size_t>(c)] =
                    y[static_cast<size_t>(L.dyn_size + c)];
        out.times.push_back(t);
        out.states.push_back(std::move(st));
        out.acc.push_back(a);
    };

    store(init.t);

    double tau = std::log(init.t);
    double h = opt.fixed_dtau > 0.0 ? -opt.fixed_dtau : -1e-3;
    const bool adaptive = !(opt.fixed_dtau > 0.0);

    std::vector<double> K(static_cast<size_t>(kStages) *
                          static_cast<size_t>(L.total_size));
    std::vector<double> ytmp(static_cast<size_t>(L.total_size));
    std::vector<double> ynew(static_cast<size_t>(L.total_size));
    std::vector<double> stage_dy(static_cast<size_t>(L.total_size));
    double f_prev[N_ACC] = {};
    const bool trap = L.accumulate && opt.acc_mode == "trapezoid";
    if (trap) sys.integrand_sum(tau, y, f_prev);

    size_t next_cp = 1;
    long long steps = 0;
    while (next_cp < cps.size()) {
        const double tau_end = std::log(cps[next_cp]);
        while (tau > tau_end + 1e-14) {
            if (++steps > opt.max_steps)
                throw StepLimitExceeded("step limit " +
                                        std::to_string(opt.max_steps) +
                                        " exceeded at t = " +
                                        std::to_string(std::exp(tau)));
            double hs = std::max(h, tau_end - tau); // clip (h < 0)

            bool ok = true;
            for (int s = 0; s < kStages && ok; ++s) {
                ytmp = y;
                for (int j = 0; j < s; ++j) {
                    const double w = hs * kA[s][j];
                    if (w == 0.0) continue;
                    const double* Kj =
                        &K[static_cast<size_t>(j) *
                           static_cast<size_t>(L.total_size)];
                    for (int i = 0; i < L.total_size; ++i)
                        ytmp[static_cast<size_t>(i)] +=
                            w * Kj[static_cast<size_t>(i)];
                }
                ok = sys.rhs(tau, kC[s] * hs, ytmp, stage_dy);
                if (ok)
                    std::copy(stage_dy.begin(), stage_dy.end(),
                              K.begin() + static_cast<size_t>(s) *
                                              static_cast<size_t>(
                                                  L.total_size));
            }

            double err = 0.0;
            if (ok) {
                ynew = y;
                for (int s = 0; s < kStages; ++s) {
                    const double w = hs * kB5[s];
                    if (w == 0.0) continue;
                    const double* Ks =
                        &K[static_cast<size_t>(s) *
                           static_cast<size_t>(L.total_size)];
                    for (int i = 0; i < L.total_size; ++i)
                        ynew[static_cast<size_t>(i)] +=
                            w * Ks[static_cast<size_t>(i)];
                }
                if (adaptive) {
                    double sum = 0.0;
                    for (int i = 0; i < L.dyn_size; ++i) {
                        double e = 0.0;
                        for (int s = 0; s < kStages; ++s)
                            e += hs * (kB5[s] - kB4[s]) *
                                 K[static_cast<size_t>(s) *
                                       static_cast<size_t>(L.total_size) +
                                   static_cast<size_t>(i)];
                        const double sc =
                            opt.abs_tol +
                            opt.rel_tol *
                                std::max(std::abs(y[static_cast<size_t>(i)]),
                                         std::abs(
                                             ynew[static_cast<size_t>(i)]));
                        sum += (e / sc) * (e / sc);
                    }
                    err = std::sqrt(sum /
                                    static_cast<double>(L.dyn_size));
                }
            } else {
                err = 4.0; // overflow guard tripped: shrink the step
            }

            if (!ok || (adaptive && err > 1.0)) {
                ++out.rejected;
                const double fac = std::clamp(
                    0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
                h = hs * fac;
                if (std::abs(h) < 1e-15)
                    throw SolveFailure("step size underflow at t = " +
                                       std::to_string(std::exp(tau)));
                continue;
            }

            y.swap(ynew);
            sys.finish_step(tau, hs, y);
            if (trap) {
                double f_new[N_ACC];
                sys.integrand_sum(tau + hs, y, f_new);
                for (int c = 0; c < N_ACC; ++c) {
                    // dA/dtau = -f, step hs < 0
                    acc[static_cast<size_t>(c)] -=
                        0.5 * hs * (f_prev[c] + f_new[c]);
                    f_prev[c] = f_new[c];
                }
            }
            tau += hs;
            ++out.accepted;
            if (!all_finite(y))
                throw NonFiniteState("non-finite state at t = " +
                                     std::to_string(std::exp(tau)));
            if (adaptive) {
                const double fac = std::clamp(
                    0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
                h = hs * fac;
            } else {
                h = -opt.fixed_dtau;
            }
        }
        tau = tau_end; // land exactly on the checkpoint
        store(cps[next_cp]);
        if (trap) sys.integrand_sum(tau, y, f_prev);
        ++next_cp;
    }

    return out;
}

} // namespace kasner
