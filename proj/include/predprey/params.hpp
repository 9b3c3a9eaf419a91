#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace predprey {

/// Rate and interaction constants of the two-predator/one-prey system
///
///   u_t = d1 u_xx + u F(u,v,w) + mu (v - u)
///   v_t = d2 v_xx + v G(u,v,w) + mu (u - v)
///   w_t = d3 w_xx + w H(u,v,w)
///
/// with F = r1(-1 - u - k v + a w), G = r2(-1 - h u - v + a w),
/// H = r3(1 - b u - b v - w).
struct ModelParams {
    double d1 = 1.0, d2 = 1.0, d3 = 1.0; // diffusivities
    double r1 = 1.0, r2 = 1.0, r3 = 1.0; // per-capita growth rates
    double a = 2.0;                      // predation benefit, > 1
    double b = 0.2;                      // predation pressure
    double h = 0.5, k = 0.5;             // inter-predator competition
    double mu = 0.0;                     // mutation rate, >= 0

    // beta = 1 - 2b(a-1); lower prey bound, positive under the admissibility
    // conditions.
    double beta() const { return 1.0 - 2.0 * b * (a - 1.0); }

    // kappa = (1-k)/(1-h); comparison weight for the equi-diffusion ordering.
    double kappa() const { return (1.0 - k) / (1.0 - h); }
};

struct ConditionCheck {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Per-condition validation outcome. `pass` covers the admissibility
/// inequalities; the d1*r1 >= d2*r2 ordering convention is reported as a
/// warning only so role-swapped experiments stay expressible.
struct ValidationReport {
    bool pass = false;
    bool speed_order_warning = false; // set when d1*r1 < d2*r2
    double beta = 0.0;
    double kappa = 0.0;
    std::vector<ConditionCheck> conditions;

    std::string summary() const {
        std::ostringstream os;
        os << (pass ? "PASS" : "FAIL") << " beta=" << beta << " kappa=" << kappa;
        for (const auto& c : conditions)
            os << "\n  [" << (c.pass ? "ok" : "FAIL") << "] " << c.name
               << (c.detail.empty() ? "" : ": " + c.detail);
        if (speed_order_warning)
            os << "\n  [warn] d1*r1 < d2*r2: role convention violated "
                  "(swap roles explicitly if intended)";
        return os.str();
    }
};

inline ValidationReport validate_params(const ModelParams& p) {
    ValidationReport rep;
    auto add = [&rep](std::string name, bool ok, std::string detail = "") {
        rep.conditions.push_back({std::move(name), ok, std::move(detail)});
    };

    auto finite_positive = [](double x) { return std::isfinite(x) && x > 0.0; };
    add("diffusivities positive",
        finite_positive(p.d1) && finite_positive(p.d2) && finite_positive(p.d3));
    add("growth rates positive",
        finite_positive(p.r1) && finite_positive(p.r2) && finite_positive(p.r3));
    add("a > 1", p.a > 1.0);
    add("0 < h < 1", p.h > 0.0 && p.h < 1.0);
    add("0 < k < 1", p.k > 0.0 && p.k < 1.0);

    const double b_cap = 1.0 / (2.0 * (p.a - 1.0));
    {
        std::ostringstream os;
        os << "b=" << p.b << ", cap=" << b_cap;
        add("0 < b < 1/(2(a-1))", p.b > 0.0 && p.a > 1.0 && p.b < b_cap, os.str());
    }

    const double mu_cap = 0.5 * (p.a - 1.0) * std::min(p.r1, p.r2);
    {
        std::ostringstream os;
        os << "mu=" << p.mu << ", cap=" << mu_cap;
        add("0 <= mu <= (a-1)min(r1,r2)/2", p.mu >= 0.0 && p.mu <= mu_cap, os.str());
    }

    rep.pass = true;
    for (const auto& c : rep.conditions) rep.pass = rep.pass && c.pass;
    rep.speed_order_warning = p.d1 * p.r1 < p.d2 * p.r2;
    rep.beta = p.beta();
    rep.kappa = p.kappa();
    return rep;
}

/// Swap the roles of the two predators: (d1,r1,k) <-> (d2,r2,h).
/// Maps the u-present semi-trivial state onto the v-present one and u* <-> v*.
inline ModelParams swapped_roles(const ModelParams& p) {
    ModelParams q = p;
    std::swap(q.d1, q.d2);
    std::swap(q.r1, q.r2);
    std::swap(q.h, q.k);
    return q;
}

} // namespace predprey
