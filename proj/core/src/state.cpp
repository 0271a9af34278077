#include "kasner/state.hpp"

#include <cmath>

#include "json.hpp"

namespace kasner {

GaugeTag GaugeTag::parabolic(double lambda) {
    if (!(lambda > 0.0))
        throw ConfigError("parabolic gauge requires lambda > 0, got " +
                          std::to_string(lambda));
    return {GaugeType::Parabolic, lambda};
}

std::string GaugeTag::name() const {
    return type == GaugeType::Cmc ? "cmc" : "parabolic";
}

ModeState ModeState::conjugated() const {
    ModeState r;
    for (int m = 0; m < 6; ++m) r.gamma[m] = std::conj(gamma[m]);
    for (int m = 0; m < 9; ++m) r.kmix[m] = std::conj(kmix[m]);
    r.psi = std::conj(psi);
    r.chi = std::conj(chi);
    r.nu = std::conj(nu);
    return r;
}

ModeState& ModeState::operator+=(const ModeState& o) {
    for (int m = 0; m < 6; ++m) gamma[m] += o.gamma[m];
    for (int m = 0; m < 9; ++m) kmix[m] += o.kmix[m];
    psi += o.psi;
    chi += o.chi;
    nu += o.nu;
    return *this;
}

ModeState& ModeState::operator*=(double a) {
    for (int m = 0; m < 6; ++m) gamma[m] *= a;
    for (int m = 0; m < 9; ++m) kmix[m] *= a;
    psi *= a;
    chi *= a;
    nu *= a;
    return *this;
}

double FieldState::tau() const { return std::log(t); }

void FieldState::enforce_hermitian() {
    for (int idx = 0; idx < lattice.size(); ++idx) {
        if (!lattice.is_primary(idx)) continue;
        const int cj = lattice.conjugate_index(idx);
        if (cj == idx) {
            // self-conjugate mode (k = 0): coefficients must be real
            ModeState& m = modes[idx];
            for (auto& g : m.gamma) g = cplx(g.real(), 0.0);
            for (auto& K : m.kmix) K = cplx(K.real(), 0.0);
            m.psi = cplx(m.psi.real(), 0.0);
            m.chi = cplx(m.chi.real(), 0.0);
            m.nu = cplx(m.nu.real(), 0.0);
            continue;
        }
        ModeState avg = modes[idx];
        avg += modes[cj].conjugated();
        avg *= 0.5;
        modes[idx] = avg;
        modes[cj] = avg.conjugated();
    }
}

namespace {
double mode_abs_diff(const ModeState& a, const ModeState& b) {
    double d = 0.0;
    for (int m = 0; m < 6; ++m) d = std::max(d, std::abs(a.gamma[m] - b.gamma[m]));
    for (int m = 0; m < 9; ++m) d = std::max(d, std::abs(a.kmix[m] - b.kmix[m]));
    d = std::max(d, std::abs(a.psi - b.psi));
    d = std::max(d, std::abs(a.chi - b.chi));
    d = std::max(d, std::abs(a.nu - b.nu));
    return d;
}
} // namespace

double FieldState::hermitian_defect() const {
    double worst = 0.0;
    for (int idx = 0; idx < lattice.size(); ++idx) {
        if (!lattice.is_primary(idx)) continue;
        const int cj = lattice.conjugate_index(idx);
        worst = std::max(worst,
                         mode_abs_diff(modes[idx], modes[cj].conjugated()));
    }
    return worst;
}

namespace {

using nlohmann::json;

json cplx_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }

cplx cplx_from_json(const json& j) {
    return cplx(j.at(0).get<double>(), j.at(1).get<double>());
}

} // namespace

std::string snapshot_to_json(const FieldState& st) {
    json out;
    out["t"] = st.t;
    json gauge;
    gauge["type"] = st.gauge.name();
    if (st.gauge.is_parabolic()) gauge["lambda"] = st.gauge.lambda;
    out["gauge"] = gauge;
    json bg;
    bg["q"] = json::array({st.bg.q()[0], st.bg.q()[1], st.bg.q()[2]});
    bg["A"] = st.bg.A();
    bg["sigma"] = st.bg.sigma();
    out["bg"] = bg;
    json modes = json::array();
    for (int idx = 0; idx < st.lattice.size(); ++idx) {
        const ModeIndex mk = st.lattice.at(idx);
        const ModeState& m = st.modes[idx];
        json jm;
        jm["k"] = json::array({mk[0], mk[1], mk[2]});
        json gam = json::array();
        for (const auto& g : m.gamma) gam.push_back(cplx_to_json(g));
        jm["gamma"] = gam;
        json km = json::array();
        for (const auto& K : m.kmix) km.push_back(cplx_to_json(K));
        jm["kmix"] = km;
        jm["psi"] = cplx_to_json(m.psi);
        jm["chi"] = cplx_to_json(m.chi);
        jm["nu"] = cplx_to_json(m.nu);
        modes.push_back(std::move(jm));
    }
    out["modes"] = std::move(modes);
    return out.dump(2);
}

FieldState snapshot_from_json(const std::string& text) {
    json in;
    try {
        in = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("snapshot parse error: ") + e.what());
    }
    try {
        const double t = in.at("t").get<double>();
        const json& jg = in.at("gauge");
        GaugeTag gauge = GaugeTag::cmc();
        if (jg.at("type").get<std::string>() == "parabolic")
            gauge = GaugeTag::parabolic(jg.at("lambda").get<double>());
        const json& jbg = in.at("bg");
        const auto q = jbg.at("q");
        KasnerBackground bg = KasnerBackground::from_exponents(
            q.at(0).get<double>(), q.at(1).get<double>(),
            /*strict_positive=*/false);
        const json& jmodes = in.at("modes");
        // infer k_max from the largest wave-vector component present
        int k_max = 0;
        for (const auto& jm : jmodes)
            for (int j = 0; j < 3; ++j)
                k_max = std::max(k_max, std::abs(jm.at("k").at(j).get<int>()));
        FieldState st(bg, gauge, k_max, t);
        for (const auto& jm : jmodes) {
            ModeIndex mk{{jm.at("k").at(0).get<int>(),
                          jm.at("k").at(1).get<int>(),
                          jm.at("k").at(2).get<int>()}};
            ModeState& m = st.modes[st.lattice.index_of(mk)];
            for (int s = 0; s < 6; ++s)
                m.gamma[s] = cplx_from_json(jm.at("gamma").at(s));
            for (int s = 0; s < 9; ++s)
                m.kmix[s] = cplx_from_json(jm.at("kmix").at(s));
            m.psi = cplx_from_json(jm.at("psi"));
            m.chi = cplx_from_json(jm.at("chi"));
            m.nu = cplx_from_json(jm.at("nu"));
        }
        return st;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("snapshot schema error: ") + e.what());
    }
}

} // namespace kasner
