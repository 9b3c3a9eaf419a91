#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "predprey/errors.hpp"
#include "predprey/minimize.hpp"
#include "predprey/params.hpp"

namespace predprey {

/// Principal (Perron-Frobenius) eigenvalue of the invasion matrix
///
///   M[mu,gamma] = [ d1 g^2 + r1(a-1) - mu          mu            ]
///                 [         mu            d2 g^2 + r2(a-1) - mu  ]
///
/// For mu = 0 the matrix is reducible (diagonal) and the max diagonal entry
/// is returned.
inline double pf_eigenvalue(double mu, double gamma, const ModelParams& p) {
    if (gamma < 0.0)
        throw std::domain_error("pf_eigenvalue: gamma must be >= 0");
    const double m11 = p.d1 * gamma * gamma + p.r1 * (p.a - 1.0) - mu;
    const double m22 = p.d2 * gamma * gamma + p.r2 * (p.a - 1.0) - mu;
    if (mu == 0.0) return std::max(m11, m22);
    const double half_gap = 0.5 * (m11 - m22);
    return 0.5 * (m11 + m22) + std::hypot(half_gap, mu);
}

inline bool pf_irreducible(const ModelParams& p) { return p.mu > 0.0; }

struct MutantSpeed {
    double c_mu_star = 0.0;
    double gamma_star = 0.0;
};

/// Linear spreading speed of the coupled mutant pair,
/// c*_mu = min_{gamma>0} Lambda[mu,gamma]/gamma, by golden-section search.
/// Lambda is convex in gamma and Lambda[mu,0] > 0, so Lambda/gamma is
/// unimodal with an interior minimum.
inline MutantSpeed minimal_speed_mu(const ModelParams& p) {
    if (p.mu <= 0.0)
        throw std::invalid_argument(
            "minimal_speed_mu: mu must be > 0; use closed_form_speeds for mu = 0");
    auto objective = [&p](double g) { return pf_eigenvalue(p.mu, g, p) / g; };

    const double gamma_lo = 1e-6;
    double gamma_hi = 1.0;
    // grow the bracket until the increasing branch is reached
    while (objective(gamma_hi) <= objective(0.5 * gamma_hi)) {
        gamma_hi *= 2.0;
        if (gamma_hi > 1e12)
            throw numerical_error("minimal_speed_mu: bracket expansion failed");
    }
    gamma_hi *= 2.0;
    MinResult m = golden_section_min(objective, gamma_lo, gamma_hi, 1e-10);
    return {m.value, m.x};
}

/// All closed-form linear invasion speeds; the mutant slot is filled only
/// when mu > 0.
///
///   c*_u  = 2 sqrt(d1 r1 (a-1))           into the predator-free state
///   c*_v  = 2 sqrt(d2 r2 (a-1))
///   c**_u = c*_u sqrt((1-k)/(1+ab))       into the opposite semi-trivial state
///   c**_v = c*_v sqrt((1-h)/(1+ab))
struct SpeedTable {
    double c_u_star = 0.0;
    double c_v_star = 0.0;
    double c_u_2star = 0.0;
    double c_v_2star = 0.0;
    std::optional<double> c_mu_star;
    std::optional<double> gamma_star;
};

inline SpeedTable closed_form_speeds(const ModelParams& p) {
    SpeedTable t;
    t.c_u_star = 2.0 * std::sqrt(p.d1 * p.r1 * (p.a - 1.0));
    t.c_v_star = 2.0 * std::sqrt(p.d2 * p.r2 * (p.a - 1.0));
    const double one_ab = 1.0 + p.a * p.b;
    t.c_u_2star = t.c_u_star * std::sqrt((1.0 - p.k) / one_ab);
    t.c_v_2star = t.c_v_star * std::sqrt((1.0 - p.h) / one_ab);
    if (p.mu > 0.0) {
        MutantSpeed m = minimal_speed_mu(p);
        t.c_mu_star = m.c_mu_star;
        t.gamma_star = m.gamma_star;
    }
    return t;
}

} // namespace predprey
