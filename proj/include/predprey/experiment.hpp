#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "predprey/diagnostics.hpp"
#include "predprey/eigen.hpp"
#include "predprey/errors.hpp"
#include "predprey/fronts.hpp"
#include "predprey/grid.hpp"
#include "predprey/kinetics.hpp"
#include "predprey/params.hpp"
#include "predprey/sim.hpp"
#include "predprey/speeds.hpp"

namespace predprey {

using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// deterministic serialization: fixed field order, 17-significant-digit floats

inline std::string format_double17(double x) {
    if (!std::isfinite(x)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline void dump_json17(const ordered_json& j, std::string& out, int depth) {
    const std::string pad((std::size_t)(2 * depth), ' ');
    const std::string pad_in((std::size_t)(2 * (depth + 1)), ' ');
    switch (j.type()) {
    case ordered_json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out += ",\n";
            first = false;
            out += pad_in + ordered_json(it.key()).dump() + ": ";
            dump_json17(it.value(), out, depth + 1);
        }
        out += "\n" + pad + "}";
        return;
    }
    case ordered_json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        out += "[\n";
        bool first = true;
        for (const auto& e : j) {
            if (!first) out += ",\n";
            first = false;
            out += pad_in;
            dump_json17(e, out, depth + 1);
        }
        out += "\n" + pad + "]";
        return;
    }
    case ordered_json::value_t::number_float:
        out += format_double17(j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

inline std::string dump_json17(const ordered_json& j) {
    std::string out;
    dump_json17(j, out, 0);
    out += "\n";
    return out;
}

// ---------------------------------------------------------------------------
// experiment configuration

struct FrontObserverSpec {
    FieldComponent component = FieldComponent::u;
    double threshold = 0.0; // 0 means "use the default for the component"
    FrontDirection direction = FrontDirection::right;
    double period = 1.0;
    std::optional<double> theoretical;
    std::string theoretical_key; // named SpeedTable entry, resolved at run time
    std::optional<std::pair<double, double>> window; // fit window override
};

struct PlateauSpec {
    std::string target_name; // empty when an explicit triple was given
    Triple target;
    double x0 = 0.0, x1 = 0.0;
    double tol = 0.05;
    double period = 1.0;
};

struct LyapunovSpec {
    LyapunovFunctional functional = LyapunovFunctional::phi_full;
    double R = 10.0;
    double period = 1.0;
};

struct ScalarEigSpec {
    double d = 1.0, c = 0.0, a_coef = 0.0, R = 1.0;
    int n = 1000;
};

struct SystemEigSpec {
    double c = 0.0, delta = 0.0, R = 10.0;
    int n = 1000;
};

struct SubsolutionSpec {
    std::string c_key; // named speed, or empty when numeric
    double c = 0.0;
    double eps = 0.0;
};

struct SearchSpec {
    double lo = 0.0, hi = 0.0;
    int steps = 1;
};

struct Expectation {
    std::string key;
    ordered_json value;
    double tol = 0.0;
};

struct ExperimentConfig {
    std::string label;
    ModelParams params;

    bool has_sim = false;
    Grid1D grid;
    InitialSpec initial;
    double T = 0.0;
    double dt_safety = 0.4;
    std::vector<FrontObserverSpec> fronts;
    std::vector<PlateauSpec> plateaus;
    std::vector<LyapunovSpec> lyapunovs;
    bool ordering = false;
    double ordering_period = 1.0;
    std::vector<double> snapshots;
    std::pair<double, double> fit_window_fraction{0.6, 1.0};

    std::optional<ScalarEigSpec> eigen_scalar;
    std::optional<SystemEigSpec> eigen_system;
    std::optional<SubsolutionSpec> subsolution;
    std::optional<SearchSpec> search_d1;

    std::vector<Expectation> expectations;
};

namespace detail {

[[noreturn]] inline void config_fail(const std::string& where, const std::string& what) {
    throw config_error(where + ": " + what);
}

inline const ordered_json& need(const ordered_json& j, const std::string& key,
                                const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) config_fail(where, "missing required key '" + key + "'");
    return *it;
}

inline double need_number(const ordered_json& j, const std::string& key,
                          const std::string& where) {
    const auto& v = need(j, key, where);
    if (!v.is_number()) config_fail(where + "/" + key, "expected a number");
    return v.get<double>();
}

inline double opt_number(const ordered_json& j, const std::string& key, double dflt) {
    auto it = j.find(key);
    return it == j.end() ? dflt : it->get<double>();
}

inline FieldComponent parse_component(const std::string& s, const std::string& where) {
    if (s == "u") return FieldComponent::u;
    if (s == "v") return FieldComponent::v;
    if (s == "one_minus_w" || s == "1-w") return FieldComponent::one_minus_w;
    config_fail(where, "unknown component '" + s + "' (u, v, one_minus_w)");
}

inline Profile parse_profile(const ordered_json& j, const std::string& where) {
    const std::string type = need(j, "type", where).get<std::string>();
    if (type == "zero") return Profile::zero();
    if (type == "constant") return Profile::constant(need_number(j, "value", where));
    if (type == "bump")
        return Profile::bump(need_number(j, "center", where),
                             need_number(j, "half_width", where),
                             need_number(j, "height", where));
    config_fail(where, "unknown profile type '" + type + "' (zero, constant, bump)");
}

} // namespace detail

inline ModelParams parse_params(const ordered_json& j, const std::string& where) {
    ModelParams p;
    p.d1 = detail::need_number(j, "d1", where);
    p.d2 = detail::need_number(j, "d2", where);
    p.d3 = detail::need_number(j, "d3", where);
    p.r1 = detail::need_number(j, "r1", where);
    p.r2 = detail::need_number(j, "r2", where);
    p.r3 = detail::need_number(j, "r3", where);
    p.a = detail::need_number(j, "a", where);
    p.b = detail::need_number(j, "b", where);
    p.h = detail::need_number(j, "h", where);
    p.k = detail::need_number(j, "k", where);
    p.mu = detail::opt_number(j, "mu", 0.0);
    // the d1 r1 >= d2 r2 ordering convention is re-established only on request
    if (j.value("swap_roles", false)) p = swapped_roles(p);
    return p;
}

inline std::optional<double> speed_by_name(const SpeedTable& t, const std::string& key) {
    if (key == "c_u_star") return t.c_u_star;
    if (key == "c_v_star") return t.c_v_star;
    if (key == "c_u_2star") return t.c_u_2star;
    if (key == "c_v_2star") return t.c_v_2star;
    if (key == "c_mu_star") return t.c_mu_star;
    if (key == "gamma_star") return t.gamma_star;
    return std::nullopt;
}

inline ExperimentConfig parse_config(const ordered_json& j) {
    using detail::config_fail;
    using detail::need;
    using detail::need_number;
    using detail::opt_number;

    ExperimentConfig cfg;
    if (auto it = j.find("label"); it != j.end()) cfg.label = it->get<std::string>();
    cfg.params = parse_params(need(j, "params", "/"), "/params");

    if (auto it = j.find("grid"); it != j.end()) {
        cfg.has_sim = true;
        const auto& g = *it;
        const double xmin = need_number(g, "x_min", "/grid");
        const double xmax = need_number(g, "x_max", "/grid");
        const auto& nval = need(g, "n", "/grid");
        if (!nval.is_number_integer() || nval.get<long>() < 3)
            config_fail("/grid/n", "expected an integer >= 3");
        cfg.grid = Grid1D(xmin, xmax, (int)nval.get<long>());

        const auto& init = need(j, "initial", "/");
        cfg.initial.u = detail::parse_profile(need(init, "u", "/initial"), "/initial/u");
        cfg.initial.v = detail::parse_profile(need(init, "v", "/initial"), "/initial/v");
        cfg.initial.w = detail::parse_profile(need(init, "w", "/initial"), "/initial/w");
        cfg.T = need_number(j, "T", "/");
        if (!(cfg.T > 0.0)) config_fail("/T", "expected T > 0");
        cfg.dt_safety = opt_number(j, "dt_safety", 0.4);
        if (!(cfg.dt_safety > 0.0) || cfg.dt_safety > 1.0)
            config_fail("/dt_safety", "expected a value in (0, 1]");

        if (auto fw = j.find("fit_window_fraction"); fw != j.end()) {
            if (!fw->is_array() || fw->size() != 2)
                config_fail("/fit_window_fraction", "expected [lo, hi]");
            cfg.fit_window_fraction = {(*fw)[0].get<double>(), (*fw)[1].get<double>()};
        }

        if (auto obs = j.find("observers"); obs != j.end()) {
            if (!obs->is_array()) config_fail("/observers", "expected an array");
            int idx = 0;
            for (const auto& o : *obs) {
                const std::string where = "/observers/" + std::to_string(idx++);
                const std::string type = need(o, "type", where).get<std::string>();
                if (type == "front") {
                    FrontObserverSpec f;
                    f.component = detail::parse_component(
                        need(o, "component", where).get<std::string>(), where);
                    f.threshold = opt_number(o, "threshold", 0.0);
                    const std::string dir =
                        o.value("direction", std::string("right"));
                    if (dir != "right" && dir != "left")
                        config_fail(where + "/direction", "expected right or left");
                    f.direction =
                        dir == "right" ? FrontDirection::right : FrontDirection::left;
                    f.period = opt_number(o, "period", 1.0);
                    if (auto th = o.find("theoretical"); th != o.end()) {
                        if (th->is_string())
                            f.theoretical_key = th->get<std::string>();
                        else
                            f.theoretical = th->get<double>();
                    }
                    if (auto wi = o.find("window"); wi != o.end()) {
                        if (!wi->is_array() || wi->size() != 2)
                            config_fail(where + "/window", "expected [t0, t1]");
                        f.window = {{(*wi)[0].get<double>(), (*wi)[1].get<double>()}};
                    }
                    cfg.fronts.push_back(f);
                } else if (type == "plateau") {
                    PlateauSpec pl;
                    const auto& tgt = need(o, "target", where);
                    if (tgt.is_string()) {
                        pl.target_name = tgt.get<std::string>();
                    } else if (tgt.is_array() && tgt.size() == 3) {
                        pl.target = {tgt[0].get<double>(), tgt[1].get<double>(),
                                     tgt[2].get<double>()};
                    } else {
                        config_fail(where + "/target",
                                    "expected an equilibrium name or a [u,v,w] triple");
                    }
                    const auto& reg = need(o, "region", where);
                    if (!reg.is_array() || reg.size() != 2)
                        config_fail(where + "/region", "expected [x0, x1]");
                    pl.x0 = reg[0].get<double>();
                    pl.x1 = reg[1].get<double>();
                    pl.tol = opt_number(o, "tol", 0.05);
                    pl.period = opt_number(o, "period", 1.0);
                    cfg.plateaus.push_back(pl);
                } else if (type == "lyapunov") {
                    LyapunovSpec ly;
                    const std::string f = o.value("functional", std::string("phi"));
                    if (f == "phi" || f == "Phi")
                        ly.functional = LyapunovFunctional::phi_full;
                    else if (f == "V" || f == "v")
                        ly.functional = LyapunovFunctional::v_subsystem;
                    else
                        config_fail(where + "/functional", "expected phi or V");
                    ly.R = need_number(o, "R", where);
                    ly.period = opt_number(o, "period", 1.0);
                    cfg.lyapunovs.push_back(ly);
                } else if (type == "ordering") {
                    cfg.ordering = true;
                    cfg.ordering_period = opt_number(o, "period", 1.0);
                } else {
                    config_fail(where, "unknown observer type '" + type + "'");
                }
            }
        }
        if (auto sn = j.find("snapshots"); sn != j.end()) {
            if (!sn->is_array()) config_fail("/snapshots", "expected an array of times");
            for (const auto& t : *sn) cfg.snapshots.push_back(t.get<double>());
        }
    }

    if (auto e = j.find("eigen"); e != j.end()) {
        if (auto s = e->find("scalar"); s != e->end()) {
            ScalarEigSpec spec;
            spec.d = need_number(*s, "d", "/eigen/scalar");
            spec.c = need_number(*s, "c", "/eigen/scalar");
            spec.a_coef = need_number(*s, "a_coef", "/eigen/scalar");
            spec.R = need_number(*s, "R", "/eigen/scalar");
            spec.n = (int)need_number(*s, "n", "/eigen/scalar");
            cfg.eigen_scalar = spec;
        }
        if (auto s = e->find("system"); s != e->end()) {
            SystemEigSpec spec;
            spec.c = need_number(*s, "c", "/eigen/system");
            spec.delta = opt_number(*s, "delta", 0.0);
            spec.R = need_number(*s, "R", "/eigen/system");
            spec.n = (int)need_number(*s, "n", "/eigen/system");
            cfg.eigen_system = spec;
        }
    }

    if (auto s = j.find("subsolution"); s != j.end()) {
        SubsolutionSpec spec;
        const auto& c = need(*s, "c", "/subsolution");
        if (c.is_string())
            spec.c_key = c.get<std::string>();
        else
            spec.c = c.get<double>();
        spec.eps = opt_number(*s, "eps", 0.0);
        cfg.subsolution = spec;
    }

    if (auto s = j.find("search_d1"); s != j.end()) {
        SearchSpec spec;
        spec.lo = need_number(*s, "lo", "/search_d1");
        spec.hi = need_number(*s, "hi", "/search_d1");
        spec.steps = (int)need_number(*s, "steps", "/search_d1");
        cfg.search_d1 = spec;
    }

    if (auto ex = j.find("expect"); ex != j.end()) {
        if (!ex->is_array()) detail::config_fail("/expect", "expected an array");
        int idx = 0;
        for (const auto& e : *ex) {
            const std::string where = "/expect/" + std::to_string(idx++);
            Expectation exp;
            exp.key = need(e, "key", where).get<std::string>();
            exp.value = need(e, "value", where);
            exp.tol = opt_number(e, "tol", 0.0);
            cfg.expectations.push_back(exp);
        }
    }
    return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

// resolve a named plateau target against the equilibrium set
inline Triple resolve_plateau_target(const PlateauSpec& pl, const ModelParams& p,
                                     const std::string& where) {
    if (pl.target_name.empty()) return pl.target;
    SteadyStateSet set = steady_states(p);
    if (pl.target_name == "trivial") return set.trivial;
    if (pl.target_name == "predator_free") return set.predator_free;
    auto pick = [&](const std::optional<Triple>& t) {
        if (!t)
            detail::config_fail(where, "equilibrium '" + pl.target_name +
                                           "' is not available (mu > 0)");
        return *t;
    };
    if (pl.target_name == "semi_trivial_u") return pick(set.semi_trivial_u);
    if (pl.target_name == "semi_trivial_v") return pick(set.semi_trivial_v);
    if (pl.target_name == "coexistence") return pick(set.coexistence);
    detail::config_fail(where, "unknown equilibrium name '" + pl.target_name + "'");
}

/// Pre-compute validation: everything that can be rejected before any
/// numerics runs.
inline void validate_config(const ExperimentConfig& cfg) {
    using detail::config_fail;
    auto rep = validate_params(cfg.params);
    if (!rep.pass) config_fail("/params", "admissibility check failed:\n" + rep.summary());

    if (!cfg.has_sim) return;

    // grid must out-run the fastest front for the whole horizon
    SpeedTable t = closed_form_speeds(cfg.params);
    const double cmax = cfg.params.mu > 0.0 ? *t.c_mu_star
                                            : std::max(t.c_u_star, t.c_v_star);
    const double center = cfg.grid.center();
    double right_extent = 0.0, left_extent = 0.0;
    for (const Profile* prof : {&cfg.initial.u, &cfg.initial.v}) {
        if (prof->kind != Profile::Kind::bump) continue;
        right_extent = std::max(right_extent, prof->center + prof->half_width - center);
        left_extent = std::max(left_extent, center - (prof->center - prof->half_width));
    }
    if (cmax * cfg.T + right_extent >= 0.9 * (cfg.grid.x_max - center) ||
        cmax * cfg.T + left_extent >= 0.9 * (center - cfg.grid.x_min)) {
        std::ostringstream os;
        os << "grid too small: max speed " << cmax << " over T = " << cfg.T
           << " needs more than 0.9x the half-domain";
        config_fail("/grid", os.str());
    }

    int idx = 0;
    for (const auto& pl : cfg.plateaus) {
        const std::string where = "/observers(plateau " + std::to_string(idx++) + ")";
        if (pl.x0 < cfg.grid.x_min || pl.x1 > cfg.grid.x_max || pl.x1 < pl.x0)
            config_fail(where, "region outside grid");
        (void)resolve_plateau_target(pl, cfg.params, where);
    }
    for (const auto& ly : cfg.lyapunovs) {
        if (cfg.params.mu > 0.0)
            config_fail("/observers(lyapunov)", "requires mu = 0");
        if (cfg.grid.x_min > -2.0 * ly.R || cfg.grid.x_max < 2.0 * ly.R)
            config_fail("/observers(lyapunov)", "grid does not cover [-2R, 2R]");
    }
    for (const auto& f : cfg.fronts) {
        const double scale =
            f.component == FieldComponent::one_minus_w ? 1.0 - cfg.params.beta()
                                                       : cfg.params.a - 1.0;
        if (f.threshold < 0.0 || f.threshold >= scale)
            config_fail("/observers(front)", "threshold outside (0, component scale)");
        if (f.period <= 0.0) config_fail("/observers(front)", "period must be > 0");
        if (f.window &&
            (f.window->first < 0.5 * cfg.T - 1e-12 || f.window->second > cfg.T + 1e-12 ||
             f.window->second <= f.window->first))
            config_fail("/observers(front)",
                        "fit window must lie inside [T/2, T] (late-time asymptotics)");
    }
    if (cfg.fit_window_fraction.first < 0.5 - 1e-12 ||
        cfg.fit_window_fraction.second > 1.0 + 1e-12 ||
        cfg.fit_window_fraction.second <= cfg.fit_window_fraction.first)
        config_fail("/fit_window_fraction", "must lie inside [0.5, 1.0]");
    if (cfg.ordering) {
        if (cfg.params.d1 != cfg.params.d2 || cfg.params.r1 != cfg.params.r2)
            config_fail("/observers(ordering)", "requires d1 = d2 and r1 = r2");
    }
    for (double ts : cfg.snapshots)
        if (ts < 0.0 || ts > cfg.T)
            config_fail("/snapshots", "snapshot time outside [0, T]");
}

// ---------------------------------------------------------------------------
// execution

enum class ExecMode { check, speeds, pulling, eigen, lyapunov, simulate };

struct ExecResult {
    std::map<std::string, ordered_json> results; // flat, sorted by key
    std::vector<std::string> files;              // written, relative to out_dir
    std::vector<std::string> failed_expectations;
};

namespace detail {

inline void write_file(const std::filesystem::path& dir, const std::string& name,
                       const std::string& content, ExecResult& res) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw numerical_error("cannot write output file: " + (dir / name).string());
    out << content;
    res.files.push_back(name);
}

inline std::string csv_num(double x) {
    return std::isfinite(x) ? format_double17(x) : std::string();
}

inline ordered_json speed_table_json(const SpeedTable& t) {
    ordered_json j;
    j["c_u_star"] = t.c_u_star;
    j["c_v_star"] = t.c_v_star;
    j["c_u_2star"] = t.c_u_2star;
    j["c_v_2star"] = t.c_v_2star;
    if (t.c_mu_star) j["c_mu_star"] = *t.c_mu_star;
    if (t.gamma_star) j["gamma_star"] = *t.gamma_star;
    return j;
}

inline ordered_json pulling_json(const PullingCheck& pc) {
    ordered_json j;
    j["cond_sign"] = pc.cond_sign;
    j["lhs"] = pc.lhs;
    j["rhs"] = pc.rhs;
    j["holds"] = pc.holds;
    return j;
}

} // namespace detail

inline ExecResult execute_config(const ExperimentConfig& cfg, const std::string& out_dir,
                                 ExecMode mode) {
    namespace fs = std::filesystem;
    ExecResult res;
    const fs::path dir(out_dir);

    auto putd = [&res](const std::string& key, double v) {
        res.results[key] = v;
    };
    auto putb = [&res](const std::string& key, bool v) { res.results[key] = v; };

    const auto rep = validate_params(cfg.params);
    putb("validation.pass", rep.pass);
    putb("validation.speed_order_warning", rep.speed_order_warning);
    putd("validation.beta", rep.beta);
    putd("validation.kappa", rep.kappa);
    if (mode == ExecMode::check) return res;

    validate_config(cfg);

    // speeds.json: SpeedTable + PullingCheck
    const SpeedTable table = closed_form_speeds(cfg.params);
    const PullingCheck pulling = pulling_conditions(cfg.params);
    {
        ordered_json j;
        j["speed_table"] = detail::speed_table_json(table);
        j["pulling"] = detail::pulling_json(pulling);
        detail::write_file(dir, "speeds.json", dump_json17(j), res);
        putd("speeds.c_u_star", table.c_u_star);
        putd("speeds.c_v_star", table.c_v_star);
        putd("speeds.c_u_2star", table.c_u_2star);
        putd("speeds.c_v_2star", table.c_v_2star);
        if (table.c_mu_star) putd("speeds.c_mu_star", *table.c_mu_star);
        if (table.gamma_star) putd("speeds.gamma_star", *table.gamma_star);
        putb("pulling.cond_sign", pulling.cond_sign);
        putd("pulling.lhs", pulling.lhs);
        putd("pulling.rhs", pulling.rhs);
        putb("pulling.holds", pulling.holds);
    }

    if (mode == ExecMode::pulling || mode == ExecMode::simulate) {
        ordered_json j;
        j["pulling"] = detail::pulling_json(pulling);
        if (cfg.subsolution) {
            double c = cfg.subsolution->c;
            if (!cfg.subsolution->c_key.empty()) {
                auto named = speed_by_name(table, cfg.subsolution->c_key);
                if (!named)
                    detail::config_fail("/subsolution/c", "unknown or unavailable speed "
                                                          "name '" +
                                                              cfg.subsolution->c_key + "'");
                c = *named;
            }
            const SubsolutionRates rates = subsolution_rates(c, cfg.subsolution->eps, cfg.params);
            ordered_json s;
            s["c"] = c;
            s["eps"] = rates.eps;
            s["c_eps"] = rates.c_eps;
            s["nu"] = rates.nu;
            s["lambda_of_c"] = rates.lambda_of_c;
            s["r_decay"] = rates.r_decay;
            s["eta"] = rates.eta;
            s["omega"] = rates.omega;
            s["glue_margin"] = rates.glue_margin;
            j["subsolution"] = s;
            putd("subsolution.c", c);
            putd("subsolution.lambda_of_c", rates.lambda_of_c);
            putd("subsolution.r_decay", rates.r_decay);
            putd("subsolution.glue_margin", rates.glue_margin);
        }
        if (cfg.search_d1) {
            auto hits =
                search_pulling_params(cfg.params, cfg.search_d1->lo, cfg.search_d1->hi,
                                      cfg.search_d1->steps);
            ordered_json arr = ordered_json::array();
            for (const auto& q : hits) arr.push_back(q.d1);
            j["search_d1_hits"] = arr;
            res.results["search.hits"] = (long)hits.size();
            if (!hits.empty()) {
                putd("search.d1_first", hits.front().d1);
                putd("search.d1_last", hits.back().d1);
            }
        }
        if (cfg.subsolution || cfg.search_d1 || mode == ExecMode::pulling)
            detail::write_file(dir, "pulling.json", dump_json17(j), res);
    }

    if ((mode == ExecMode::eigen || mode == ExecMode::simulate) &&
        (cfg.eigen_scalar || cfg.eigen_system)) {
        ordered_json j;
        if (cfg.eigen_scalar) {
            const auto& s = *cfg.eigen_scalar;
            ScalarEig eig = scalar_dirichlet_eig(s.d, s.c, s.a_coef, s.R, s.n);
            ordered_json e;
            e["numeric"] = eig.numeric;
            e["closed_form"] = eig.closed_form;
            e["abs_error"] = std::fabs(eig.numeric - eig.closed_form);
            e["n"] = s.n;
            j["scalar"] = e;
            putd("eigen.scalar.numeric", eig.numeric);
            putd("eigen.scalar.closed_form", eig.closed_form);
            putd("eigen.scalar.abs_error", std::fabs(eig.numeric - eig.closed_form));
        }
        if (cfg.eigen_system) {
            const auto& s = *cfg.eigen_system;
            EigenResult eig = system_dirichlet_eig(s.c, s.delta, s.R, s.n, cfg.params);
            const double lim = limit_eigenvalue(s.c, s.delta, cfg.params);
            ordered_json e;
            e["eigenvalue"] = eig.eigenvalue;
            e["limit"] = lim;
            e["R"] = s.R;
            e["n"] = s.n;
            j["system"] = e;
            putd("eigen.system.eigenvalue", eig.eigenvalue);
            putd("eigen.system.limit", lim);
        }
        detail::write_file(dir, "eigen.json", dump_json17(j), res);
    }

    // simulation
    if ((mode == ExecMode::simulate || mode == ExecMode::lyapunov) && cfg.has_sim) {
        const bool with_fronts = mode == ExecMode::simulate;
        const bool with_plateaus = mode == ExecMode::simulate;
        const bool with_ordering = mode == ExecMode::simulate && cfg.ordering;

        FieldState state = build_initial_state(cfg.initial, cfg.grid, cfg.params);
        if (with_ordering) {
            const double kap = cfg.params.kappa();
            for (std::size_t i = 0; i < state.u.size(); ++i)
                if (state.u[i] > kap * state.v[i])
                    detail::config_fail("/observers(ordering)",
                                        "initial data violates u0 <= kappa v0");
        }
        const double dt = stable_dt(cfg.grid, cfg.params, cfg.dt_safety);

        std::vector<Observer> observers;
        std::vector<FrontTrack> tracks(cfg.fronts.size());
        std::vector<double> front_last_t(cfg.fronts.size(),
                                         -std::numeric_limits<double>::infinity());
        if (with_fronts) {
            for (std::size_t i = 0; i < cfg.fronts.size(); ++i) {
                const auto& f = cfg.fronts[i];
                auto& track = tracks[i];
                track.component = f.component;
                track.direction = f.direction;
                track.threshold = f.threshold;
                if (track.threshold == 0.0)
                    track.threshold =
                        f.component == FieldComponent::one_minus_w
                            ? 0.01 * (1.0 - cfg.params.beta())
                            : 0.01 * (cfg.params.a - 1.0);
                Observer guard = make_front_observer(track, cfg.grid, f.period);
                Observer wrapped;
                wrapped.period = f.period;
                double* last = &front_last_t[i];
                wrapped.callback = [cb = guard.callback, last](const FieldState& s) {
                    if (s.t <= *last + 1e-12) return; // snapshot segmentation dedup
                    *last = s.t;
                    cb(s);
                };
                observers.push_back(wrapped);
            }
        }

        struct PlateauRow {
            double t;
            std::size_t probe;
            double distance;
            bool pass;
        };
        std::vector<PlateauRow> plateau_rows;
        std::vector<Triple> plateau_targets(cfg.plateaus.size());
        std::vector<double> plateau_last_t(cfg.plateaus.size(),
                                           -std::numeric_limits<double>::infinity());
        if (with_plateaus) {
            for (std::size_t i = 0; i < cfg.plateaus.size(); ++i) {
                const auto& pl = cfg.plateaus[i];
                plateau_targets[i] = resolve_plateau_target(pl, cfg.params, "/observers");
                Observer o;
                o.period = pl.period;
                const Triple target = plateau_targets[i];
                double* last = &plateau_last_t[i];
                const Grid1D grid = cfg.grid;
                o.callback = [&plateau_rows, i, target, pl, grid, last](const FieldState& s) {
                    if (s.t <= *last + 1e-12) return;
                    *last = s.t;
                    auto m = plateau_match(s, grid, target, pl.x0, pl.x1, pl.tol);
                    plateau_rows.push_back({s.t, i, m.distance, m.pass});
                };
                observers.push_back(o);
            }
        }

        struct LyapRow {
            double t;
            std::size_t probe;
            double value;
            bool applicable;
        };
        std::vector<LyapRow> lyap_rows;
        std::vector<double> lyap_last_t(cfg.lyapunovs.size(),
                                        -std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < cfg.lyapunovs.size(); ++i) {
            const auto& ly = cfg.lyapunovs[i];
            Observer o;
            o.period = ly.period;
            const Grid1D grid = cfg.grid;
            const ModelParams params = cfg.params;
            double* last = &lyap_last_t[i];
            o.callback = [&lyap_rows, i, ly, grid, params, last](const FieldState& s) {
                if (s.t <= *last + 1e-12) return;
                *last = s.t;
                // g blows up near 0: states that have not yet filled the
                // window report "not applicable" instead of failing the run
                bool usable = true;
                for (int gi = 0; gi < grid.n && usable; ++gi) {
                    if (std::fabs(grid.x(gi)) > 2.0 * ly.R) continue;
                    const std::size_t k = (std::size_t)gi;
                    usable = s.u[k] >= 1e-6 && s.w[k] >= 1e-6 &&
                             (ly.functional == LyapunovFunctional::v_subsystem ||
                              s.v[k] >= 1e-6);
                }
                if (!usable) {
                    lyap_rows.push_back(
                        {s.t, i, std::numeric_limits<double>::quiet_NaN(), false});
                    return;
                }
                auto rec = lyapunov_energy(s, grid, ly.functional, ly.R, params);
                lyap_rows.push_back({s.t, i, rec.value, rec.applicable});
            };
            observers.push_back(o);
        }

        double ordering_max = -std::numeric_limits<double>::infinity();
        double ordering_last_t = -std::numeric_limits<double>::infinity();
        if (with_ordering) {
            Observer o;
            o.period = cfg.ordering_period;
            const double kap = cfg.params.kappa();
            o.callback = [&ordering_max, &ordering_last_t, kap](const FieldState& s) {
                if (s.t <= ordering_last_t + 1e-12) return;
                ordering_last_t = s.t;
                double sup = -std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < s.u.size(); ++i)
                    sup = std::max(sup, s.u[i] - kap * s.v[i]);
                ordering_max = std::max(ordering_max, sup);
            };
            observers.push_back(o);
        }

        // segment the run at snapshot times so states can be captured exactly
        std::vector<double> cuts = cfg.snapshots;
        std::sort(cuts.begin(), cuts.end());
        auto snapshot_name = [](double t) {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "state_t%g.csv", t);
            return std::string(buf);
        };
        auto write_snapshot = [&](const FieldState& s, double label_t) {
            std::string csv = "x,u,v,w\n";
            for (int i = 0; i < cfg.grid.n; ++i) {
                const std::size_t k = (std::size_t)i;
                csv += format_double17(cfg.grid.x(i)) + "," + format_double17(s.u[k]) +
                       "," + format_double17(s.v[k]) + "," + format_double17(s.w[k]) +
                       "\n";
            }
            detail::write_file(dir, snapshot_name(label_t), csv, res);
        };

        RunResult rr;
        rr.state = state;
        double t_cursor = 0.0;
        double max_excursion = 0.0;
        long total_steps = 0;
        for (double cut : cuts) {
            if (cut <= t_cursor + 1e-12) {
                if (cut == 0.0) write_snapshot(rr.state, 0.0);
                continue;
            }
            rr = run(rr.state, cfg.grid, cfg.params, cut - t_cursor, dt, observers);
            max_excursion = std::max(max_excursion, rr.max_box_excursion);
            total_steps += rr.steps;
            t_cursor = cut;
            write_snapshot(rr.state, cut);
        }
        if (t_cursor < cfg.T - 1e-12) {
            rr = run(rr.state, cfg.grid, cfg.params, cfg.T - t_cursor, dt, observers);
            max_excursion = std::max(max_excursion, rr.max_box_excursion);
            total_steps += rr.steps;
        }

        putd("run.final_t", rr.state.t);
        res.results["run.steps"] = total_steps;
        putd("run.max_box_excursion", max_excursion);
        putd("run.dt", dt);

        if (with_fronts) {
            std::string csv = "t,component,threshold,direction,x_front\n";
            for (std::size_t i = 0; i < tracks.size(); ++i) {
                const auto& track = tracks[i];
                for (const auto& [t, x] : track.samples)
                    csv += format_double17(t) + "," + to_string(track.component) + "," +
                           format_double17(track.threshold) + "," +
                           to_string(track.direction) + "," +
                           (x ? format_double17(*x) : std::string()) + "\n";
            }
            detail::write_file(dir, "fronts.csv", csv, res);

            std::string fits = "front_index,component,threshold,direction,t0,t1,"
                               "n_samples,fitted_speed,stderr,r_squared,theoretical,"
                               "relative_error\n";
            for (std::size_t i = 0; i < tracks.size(); ++i) {
                const auto& f = cfg.fronts[i];
                double t0 = cfg.fit_window_fraction.first * cfg.T;
                double t1 = cfg.fit_window_fraction.second * cfg.T;
                if (f.window) {
                    t0 = f.window->first;
                    t1 = f.window->second;
                }
                double theo = f.theoretical ? *f.theoretical
                                            : std::numeric_limits<double>::quiet_NaN();
                if (!f.theoretical_key.empty()) {
                    auto named = speed_by_name(table, f.theoretical_key);
                    if (!named)
                        detail::config_fail("/observers(front)",
                                            "unknown or unavailable speed name '" +
                                                f.theoretical_key + "'");
                    theo = *named;
                }
                SpeedReport fit = fit_speed(tracks[i], t0, t1, theo);
                fits += std::to_string(i) + "," + to_string(tracks[i].component) + "," +
                        format_double17(tracks[i].threshold) + "," +
                        to_string(tracks[i].direction) + "," + format_double17(t0) + "," +
                        format_double17(t1) + "," + std::to_string(fit.n_samples) + "," +
                        format_double17(fit.fitted_speed) + "," +
                        format_double17(fit.stderr_) + "," +
                        format_double17(fit.r_squared) + "," + detail::csv_num(theo) +
                        "," + detail::csv_num(fit.relative_error) + "\n";
                const std::string key = "front." + std::to_string(i);
                putd(key + ".fitted_speed", fit.fitted_speed);
                putd(key + ".stderr", fit.stderr_);
                putd(key + ".r_squared", fit.r_squared);
                res.results[key + ".n_samples"] = fit.n_samples;
                if (std::isfinite(theo)) {
                    putd(key + ".theoretical", theo);
                    putd(key + ".relative_error", fit.relative_error);
                }
            }
            detail::write_file(dir, "fits.csv", fits, res);
        }

        if (with_plateaus && !cfg.plateaus.empty()) {
            std::string csv =
                "t,probe_index,target_name,target_u,target_v,target_w,x0,x1,tol,"
                "distance,pass\n";
            for (const auto& row : plateau_rows) {
                const auto& pl = cfg.plateaus[row.probe];
                const Triple& tg = plateau_targets[row.probe];
                csv += format_double17(row.t) + "," + std::to_string(row.probe) + "," +
                       pl.target_name + "," + format_double17(tg.u) + "," +
                       format_double17(tg.v) + "," + format_double17(tg.w) + "," +
                       format_double17(pl.x0) + "," + format_double17(pl.x1) + "," +
                       format_double17(pl.tol) + "," + format_double17(row.distance) +
                       "," + (row.pass ? "1" : "0") + "\n";
            }
            detail::write_file(dir, "plateaus.csv", csv, res);
            // final-time verdict per probe
            for (std::size_t i = 0; i < cfg.plateaus.size(); ++i) {
                for (auto it = plateau_rows.rbegin(); it != plateau_rows.rend(); ++it) {
                    if (it->probe == i) {
                        const std::string key = "plateau." + std::to_string(i);
                        putd(key + ".distance", it->distance);
                        putb(key + ".pass", it->pass);
                        break;
                    }
                }
            }
        }

        if (!cfg.lyapunovs.empty()) {
            std::string csv = "t,functional,R,energy,applicable\n";
            for (const auto& row : lyap_rows) {
                const auto& ly = cfg.lyapunovs[row.probe];
                csv += format_double17(row.t) + "," + to_string(ly.functional) + "," +
                       format_double17(ly.R) + "," + detail::csv_num(row.value) + "," +
                       (row.applicable ? "1" : "0") + "\n";
            }
            detail::write_file(dir, "lyapunov.csv", csv, res);
            for (std::size_t i = 0; i < cfg.lyapunovs.size(); ++i) {
                std::vector<double> vals;
                for (const auto& row : lyap_rows)
                    if (row.probe == i && row.applicable) vals.push_back(row.value);
                if (vals.empty()) continue;
                const std::string key = "lyapunov." + std::to_string(i);
                putd(key + ".first", vals.front());
                putd(key + ".last", vals.back());
                bool dec = true;
                for (std::size_t k = 1; k < vals.size(); ++k)
                    dec = dec && vals[k] < vals[k - 1];
                putb(key + ".monotone_decreasing", dec);
            }
        }

        if (with_ordering) {
            putd("ordering.kappa", cfg.params.kappa());
            putd("ordering.max_sup_u_minus_kappa_v", ordering_max);
        }
    }

    // summary.json: the flat result map in sorted key order
    {
        ordered_json j;
        for (const auto& [k, v] : res.results) j[k] = v;
        detail::write_file(dir, "summary.json", dump_json17(j), res);
    }

    // expectations
    for (const auto& exp : cfg.expectations) {
        auto it = res.results.find(exp.key);
        std::ostringstream os;
        if (it == res.results.end()) {
            os << exp.key << ": no such result";
            res.failed_expectations.push_back(os.str());
            continue;
        }
        const ordered_json& got = it->second;
        if (exp.value.is_boolean()) {
            if (!got.is_boolean() || got.get<bool>() != exp.value.get<bool>()) {
                os << exp.key << ": expected " << exp.value.dump() << ", got "
                   << got.dump();
                res.failed_expectations.push_back(os.str());
            }
        } else if (exp.value.is_number()) {
            const double want = exp.value.get<double>();
            const double have = got.is_number() ? got.get<double>()
                                                : std::numeric_limits<double>::quiet_NaN();
            if (!(std::fabs(have - want) <= exp.tol)) {
                os << exp.key << ": expected " << format_double17(want) << " +- "
                   << format_double17(exp.tol) << ", got " << format_double17(have);
                res.failed_expectations.push_back(os.str());
            }
        } else {
            os << exp.key << ": unsupported expectation type";
            res.failed_expectations.push_back(os.str());
        }
    }
    return res;
}

} // namespace predprey
