#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "predprey/errors.hpp"
#include "predprey/params.hpp"

namespace predprey {

struct Triple {
    double u = 0.0, v = 0.0, w = 0.0;
};

struct Rates {
    double du = 0.0, dv = 0.0, dw = 0.0;
};

inline double reaction_f(double u, double v, double w, const ModelParams& p) {
    return p.r1 * (-1.0 - u - p.k * v + p.a * w);
}

inline double reaction_g(double u, double v, double w, const ModelParams& p) {
    return p.r2 * (-1.0 - p.h * u - v + p.a * w);
}

inline double reaction_h(double u, double v, double w, const ModelParams& p) {
    return p.r3 * (1.0 - p.b * u - p.b * v - w);
}

/// Kinetic right-hand side (u F + mu(v-u), v G + mu(u-v), w H) at one point.
inline Rates reaction_rates(double u, double v, double w, const ModelParams& p) {
    if (!(std::isfinite(u) && std::isfinite(v) && std::isfinite(w)))
        throw numerical_error("reaction_rates: non-finite state, solution corrupted");
    Rates out;
    out.du = u * reaction_f(u, v, w, p) + p.mu * (v - u);
    out.dv = v * reaction_g(u, v, w, p) + p.mu * (u - v);
    out.dw = w * reaction_h(u, v, w, p);
    return out;
}

/// Max-norm of the mu=0 kinetic field (uF, vG, wH) at a state; zero at the
/// constant equilibria.
inline double kinetic_residual(const Triple& s, const ModelParams& p) {
    ModelParams q = p;
    q.mu = 0.0;
    Rates r = reaction_rates(s.u, s.v, s.w, q);
    return std::max({std::fabs(r.du), std::fabs(r.dv), std::fabs(r.dw)});
}

/// The five constant equilibria. Semi-trivial and coexistence members exist
/// on the mu = 0 branch only; for mu > 0 those slots are empty and `note`
/// explains why (the mu>0 coexistence state is measured empirically from the
/// simulated wake instead).
struct SteadyStateSet {
    Triple trivial{0.0, 0.0, 0.0};
    Triple predator_free{0.0, 0.0, 1.0};
    std::optional<Triple> semi_trivial_u; // (p~, 0, q~)
    std::optional<Triple> semi_trivial_v; // (0, p~, q~)
    std::optional<Triple> coexistence;    // (u*, v*, w*)
    std::string note;
};

inline double semi_trivial_p(const ModelParams& p) {
    return (p.a - 1.0) / (1.0 + p.a * p.b);
}

inline double semi_trivial_q(const ModelParams& p) {
    return (p.b + 1.0) / (1.0 + p.a * p.b);
}

inline Triple coexistence_state(const ModelParams& p) {
    // symmetric groupings keep the h <-> k role swap bit-exact
    const double hk = 1.0 - p.h * p.k;
    const double s = 2.0 - (p.h + p.k);
    const double w = (hk + p.b * s) / (hk + p.a * p.b * s);
    const double excess = p.a * w - 1.0;
    return {(1.0 - p.k) / hk * excess, (1.0 - p.h) / hk * excess, w};
}

inline SteadyStateSet steady_states(const ModelParams& p) {
    SteadyStateSet set;
    if (p.mu > 0.0) {
        set.note = "mu > 0: semi-trivial states do not exist and the coexistence "
                   "state is only known for small mu; not computed";
        return set;
    }
    const double pt = semi_trivial_p(p);
    const double qt = semi_trivial_q(p);
    set.semi_trivial_u = Triple{pt, 0.0, qt};
    set.semi_trivial_v = Triple{0.0, pt, qt};
    set.coexistence = coexistence_state(p);
    return set;
}

/// Kinetic growth rates of each predator when rare at the other's
/// semi-trivial state; both positive under the admissibility conditions,
/// i.e. the semi-trivial states are unstable to invasion.
struct InstabilityReport {
    double u_growth_at_v_state = 0.0; // F(0, p~, q~) = r1 (a-1)(1-k)/(1+ab)
    double v_growth_at_u_state = 0.0; // G(p~, 0, q~) = r2 (a-1)(1-h)/(1+ab)
};

inline InstabilityReport linear_instability_report(const ModelParams& p) {
    if (p.mu > 0.0)
        throw numerical_error(
            "linear_instability_report: not applicable for mu > 0 "
            "(semi-trivial states do not exist)");
    const double pt = semi_trivial_p(p);
    const double qt = semi_trivial_q(p);
    return {reaction_f(0.0, pt, qt, p), reaction_g(pt, 0.0, qt, p)};
}

} // namespace predprey
