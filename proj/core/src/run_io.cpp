#include "kasner/run_io.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace kasner {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

json slurp(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write " + p.string());
    f << text;
}

json identity_to_json(const IdentityResidual& r) {
    json j;
    j["id"] = r.id;
    j["t"] = r.t;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["residual"] = r.residual;
    j["relative_residual"] = r.relative;
    j["terms"] = r.terms;
    return j;
}

json fit_to_json(const DecayFit& f) {
    json j;
    j["quantity"] = f.quantity;
    j["exponent"] = f.exponent;
    j["window"] = json::array({f.t_lo, f.t_hi});
    j["rms_misfit"] = f.rms_misfit;
    j["log_factor_detected"] = f.log_factor_detected;
    j["log_coeff"] = f.log_coeff;
    return j;
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["background"] = {{"q", {cfg.bg.q()[0], cfg.bg.q()[1], cfg.bg.q()[2]}},
                       {"A", cfg.bg.A()},
                       {"sigma", cfg.bg.sigma()}};
    json g;
    g["type"] = cfg.gauge.name();
    if (cfg.gauge.is_parabolic()) g["lambda"] = cfg.gauge.lambda;
    j["gauge"] = g;
    j["k_max"] = cfg.k_max;
    j["seed"] = cfg.seed;
    j["amplitude"] = cfg.amplitude;
    j["spectral_power"] = cfg.spectral_power;
    j["sigma_star"] = cfg.sigma_star;
    j["order"] = cfg.order;
    j["integrator"] = {{"rel_tol", cfg.integrator.rel_tol},
                       {"abs_tol", cfg.integrator.abs_tol},
                       {"t_min", cfg.integrator.t_min},
                       {"checkpoints_per_decade",
                        cfg.integrator.checkpoints_per_decade},
                       {"scheme", cfg.integrator.scheme},
                       {"fixed_dtau", cfg.integrator.fixed_dtau},
                       {"acc_mode", cfg.integrator.acc_mode}};
    j["output_dir"] = cfg.output_dir;
    return j;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    const json in = slurp(text);
    RunConfig cfg;
    try {
        if (in.contains("background")) {
            const json& b = in.at("background");
            if (b.is_string()) {
                if (b.get<std::string>() != "flrw")
                    throw ConfigError("unknown background name: " +
                                      b.get<std::string>());
                cfg.bg = KasnerBackground::flrw();
            } else if (b.contains("sigma")) {
                cfg.bg = KasnerBackground::from_sigma(
                    b.at("sigma").get<double>(),
                    b.value("strict_positive", true));
            } else {
                cfg.bg = KasnerBackground::from_exponents(
                    b.at("q1").get<double>(), b.at("q2").get<double>(),
                    b.value("strict_positive", true));
            }
        }
        if (in.contains("gauge")) {
            const json& g = in.at("gauge");
            const std::string type = g.at("type").get<std::string>();
            if (type == "cmc") {
                if (g.contains("lambda"))
                    throw ConfigError(
                        "lambda is only meaningful for the parabolic "
                        "gauge");
                cfg.gauge = GaugeTag::cmc();
            } else if (type == "parabolic") {
                if (!g.contains("lambda"))
                    throw ConfigError(
                        "the parabolic gauge requires lambda");
                cfg.gauge =
                    GaugeTag::parabolic(g.at("lambda").get<double>());
            } else {
                throw ConfigError("unknown gauge type: " + type);
            }
        }
        cfg.k_max = in.value("k_max", cfg.k_max);
        if (cfg.k_max < 0 || cfg.k_max > 32)
            throw ConfigError("k_max out of range [0, 32]");
        cfg.seed = in.value("seed", cfg.seed);
        cfg.amplitude = in.value("amplitude", cfg.amplitude);
        cfg.spectral_power = in.value("spectral_power", cfg.spectral_power);
        cfg.sigma_star = in.value("sigma_star", cfg.sigma_star);
        cfg.order = in.value("order", cfg.order);
        cfg.output_dir = in.value("output_dir", cfg.output_dir);
        if (in.contains("integrator")) {
            const json& g = in.at("integrator");
            IntegratorOptions& o = cfg.integrator;
            o.rel_tol = g.value("rel_tol", o.rel_tol);
            o.abs_tol = g.value("abs_tol", o.abs_tol);
            o.t_min = g.value("t_min", o.t_min);
            o.checkpoints_per_decade =
                g.value("checkpoints_per_decade", o.checkpoints_per_decade);
            o.scheme = g.value("scheme", o.scheme);
            o.max_steps = g.value("max_steps", o.max_steps);
            o.fixed_dtau = g.value("fixed_dtau", o.fixed_dtau);
            o.acc_mode = g.value("acc_mode", o.acc_mode);
            if (o.acc_mode != "rk-stage" && o.acc_mode != "trapezoid")
                throw ConfigError("unknown acc_mode: " + o.acc_mode);
        }
        cfg.integrator.sigma_star = cfg.sigma_star;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config schema error: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

double run_experiment(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::create_directories(cfg.output_dir);

    InitialDataOptions id;
    id.seed = cfg.seed;
    id.amplitude = cfg.amplitude;
    id.spectral_power = cfg.spectral_power;
    const FieldState init = make_initial_data(cfg.bg, cfg.gauge, cfg.k_max, id);
    const Trajectory traj = evolve(init, cfg.integrator);

    const bool par = cfg.gauge.is_parabolic();
    const std::vector<double> vtd = vtd_ratio(traj);

    // timeseries.csv: stable documented column set (append-only contract)
    std::ostringstream csv;
    csv.precision(17);
    csv << "t,gauge,sigma,lambda,seed,solution_norm,"
           "norm_kmix,norm_dgamma,norm_tdtpsi,norm_dpsi,norm_nu,"
           "e_metric_sq,e_scalar_sq,e_dlapse_sq,e_lapse_sq,e_total_sq,"
           "e_almost_total_sq,constraint_residual,vtd_ratio\n";
    std::vector<double> ts, etot;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const FieldState& st = traj.states[i];
        const EnergyReport e = energies(st, cfg.sigma_star, cfg.order);
        ts.push_back(st.t);
        etot.push_back(std::sqrt(e.e_total_sq));
        csv << st.t << ',' << cfg.gauge.name() << ',' << cfg.bg.sigma()
            << ',' << (par ? cfg.gauge.lambda : 0.0) << ',' << cfg.seed
            << ',' << solution_norm(st, cfg.order) << ','
            << sobolev_norm(st, Field::Kmix, cfg.order) << ','
            << sobolev_norm(st, Field::DGamma, cfg.order) << ','
            << sobolev_norm(st, Field::TdtPsi, cfg.order) << ','
            << sobolev_norm(st, Field::DPsi, cfg.order) << ','
            << sobolev_norm(st, Field::Nu, cfg.order) << ','
            << e.e_metric_sq << ',' << e.e_scalar_sq << ','
            << e.e_dlapse_sq << ',' << e.e_lapse_sq << ','
            << e.e_total_sq << ',' << e.e_almost_total_sq << ','
            << max_constraint_residual(st) << ',' << vtd[i] << '\n';
    }
    write_file(std::filesystem::path(cfg.output_dir) / "timeseries.csv",
               csv.str());

    // identities.json
    json ids = json::array();
    if (traj.has_accumulators) {
        for (size_t i = 0; i < traj.times.size(); ++i) {
            ids.push_back(identity_to_json(identity_scalar_lapse(traj, i)));
            ids.push_back(identity_to_json(identity_metric(traj, i)));
        }
        if (par) {
            const LapseEstimateReport lap = lapse_energy_estimate(traj);
            json j;
            j["id"] = "parabolic-lapse-energy-estimate";
            j["c_fit"] = lap.c_fit;
            j["t_mid"] = lap.t_mid;
            j["max_violation"] = lap.max_violation;
            j["holds"] = lap.holds;
            ids.push_back(j);
        }
    }
    write_file(std::filesystem::path(cfg.output_dir) / "identities.json",
               json{{"identities", ids}}.dump(2));

    // fits.json
    json fits = json::array();
    double energy_exponent = 0.0;
    const double span = ts.front() / ts.back();
    if (ts.size() >= 10 && span >= 100.0) {
        const DecayFit ef = decay_fit("energy_total", ts, etot, ts.back(),
                                      ts.front(), false);
        energy_exponent = ef.exponent;
        fits.push_back(fit_to_json(ef));
    }
    json bang;
    if (traj.times.back() <= 1e-4) {
        const BangLimits bl = bang_limits(traj);
        bang["k_rate"] = bl.k_rate;
        bang["psi_rate"] = bl.psi_rate;
        bang["h_rate"] = bl.h_rate;
        bang["trace_k_bang_max"] = bl.trace_k_bang_max;
    }
    write_file(std::filesystem::path(cfg.output_dir) / "fits.json",
               json{{"fits", fits}, {"bang_limits", bang}}.dump(2));

    // meta.json
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    json meta;
    meta["config"] = config_to_json(cfg);
    meta["version"] = kVersion;
    meta["wall_time_seconds"] = secs;
    meta["steps_accepted"] = traj.accepted;
    meta["steps_rejected"] = traj.rejected;
    write_file(std::filesystem::path(cfg.output_dir) / "meta.json",
               meta.dump(2));

    return energy_exponent;
}

void run_sweep(const RunConfig& cfg, const std::string& param,
               const std::vector<double>& values) {
    if (param != "sigma" && param != "lambda" && param != "kmax")
        throw ConfigError("sweep parameter must be sigma, lambda or kmax");
    json summary = json::array();
    for (const double v : values) {
        RunConfig c = cfg;
        std::ostringstream name;
        name << param << "-" << v;
        c.output_dir =
            (std::filesystem::path(cfg.output_dir) / name.str()).string();
        if (param == "sigma") {
            c.bg = v == 0.0 ? KasnerBackground::flrw()
                            : KasnerBackground::from_sigma(v);
        } else if (param == "lambda") {
            c.gauge = GaugeTag::parabolic(v);
        } else {
            if (v < 0.0 || v != std::floor(v))
                throw ConfigError("kmax values must be nonnegative "
                                  "integers");
            c.k_max = static_cast<int>(v);
        }
        const double exponent = run_experiment(c);
        json rec;
        rec["param"] = param;
        rec["value"] = v;
        rec["output_dir"] = c.output_dir;
        rec["energy_exponent"] = exponent;
        summary.push_back(rec);
    }
    std::filesystem::create_directories(cfg.output_dir);
    write_file(std::filesystem::path(cfg.output_dir) / "summary.json",
               json{{"sweep", summary}}.dump(2));
}

} // namespace kasner
