#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "predprey/errors.hpp"
#include "predprey/grid.hpp"
#include "predprey/kinetics.hpp"
#include "predprey/params.hpp"
#include "predprey/speeds.hpp"

namespace predprey {

/// g(x) = x - ln x - 1: nonnegative, zero only at x = 1.
inline double g_entropy(double x) { return x - std::log(x) - 1.0; }

enum class LyapunovFunctional { v_subsystem, phi_full };

inline std::string to_string(LyapunovFunctional f) {
    return f == LyapunovFunctional::v_subsystem ? "V" : "Phi";
}

/// Relative-entropy density of the (u,w) sub-system about (p~, q~):
///   V(u,w) = b r3 p~ g(u/p~) + a r1 q~ g(w/q~),
/// whose kinetic Lie derivative is -b r1 r3 (u-p~)^2 - a r1 r3 (w-q~)^2.
inline double lyapunov_density_v(double u, double w, const ModelParams& p) {
    const double pt = semi_trivial_p(p);
    const double qt = semi_trivial_q(p);
    return p.b * p.r3 * pt * g_entropy(u / pt) + p.a * p.r1 * qt * g_entropy(w / qt);
}

/// Relative-entropy density of the full system about (u*, v*, w*):
///   Phi = u* g(u/u*) + (r1/r2) v* g(v/v*) + (r1 a)/(r3 b) w* g(w/w*).
inline double lyapunov_density_phi(double u, double v, double w, const ModelParams& p) {
    const Triple e = coexistence_state(p);
    return e.u * g_entropy(u / e.u) + p.r1 / p.r2 * e.v * g_entropy(v / e.v) +
           p.r1 * p.a / (p.r3 * p.b) * e.w * g_entropy(w / e.w);
}

// C^1 cutoff: 1 on |s| <= 1, 0 on |s| >= 2, cubic smoothstep between.
inline double cutoff_smoothstep(double s) {
    const double a = std::fabs(s);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    const double t = a - 1.0;
    return 1.0 - 3.0 * t * t + 2.0 * t * t * t;
}

struct LyapunovRecord {
    double t = 0.0;
    double value = 0.0;
    double R = 0.0;
    LyapunovFunctional functional = LyapunovFunctional::phi_full;
    bool applicable = true;
};

/// E_R(t) = integral of cutoff(x/R) times the chosen entropy density,
/// trapezoid quadrature on the grid. Requires mu = 0 and strictly positive
/// fields on the cutoff support [-2R, 2R]; samples below 1e-6 are reported
/// as not applicable (g blows up near 0), nonpositive samples are a domain
/// error.
inline LyapunovRecord lyapunov_energy(const FieldState& s, const Grid1D& grid,
                                      LyapunovFunctional functional, double R,
                                      const ModelParams& p) {
    if (p.mu > 0.0)
        throw std::invalid_argument(
            "lyapunov_energy: defined for the two-competitors case mu = 0");
    if (!(R > 0.0)) throw std::invalid_argument("lyapunov_energy: need R > 0");
    if (grid.x_min > -2.0 * R || grid.x_max < 2.0 * R)
        throw std::invalid_argument(
            "lyapunov_energy: grid does not cover the cutoff support [-2R, 2R]");

    LyapunovRecord rec;
    rec.t = s.t;
    rec.R = R;
    rec.functional = functional;

    const double floor = 1e-6;
    long double acc = 0.0L;
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        if (std::fabs(x) > 2.0 * R) continue;
        const double phi = cutoff_smoothstep(x / R);
        if (phi == 0.0) continue;
        const std::size_t j = (std::size_t)i;
        double density = 0.0;
        if (functional == LyapunovFunctional::v_subsystem) {
            if (s.v[j] != 0.0)
                throw std::invalid_argument(
                    "lyapunov_energy: V requires v identically 0 on the window");
            if (s.u[j] <= 0.0 || s.w[j] <= 0.0)
                throw std::domain_error("lyapunov_energy: nonpositive field in window");
            if (s.u[j] < floor || s.w[j] < floor) rec.applicable = false;
            density = lyapunov_density_v(s.u[j], s.w[j], p);
        } else {
            if (s.u[j] <= 0.0 || s.v[j] <= 0.0 || s.w[j] <= 0.0)
                throw std::domain_error("lyapunov_energy: nonpositive field in window");
            if (s.u[j] < floor || s.v[j] < floor || s.w[j] < floor)
                rec.applicable = false;
            density = lyapunov_density_phi(s.u[j], s.v[j], s.w[j], p);
        }
        // trapezoid weights: halve the contribution of the domain ends
        const double wq = (i == 0 || i == grid.n - 1) ? 0.5 : 1.0;
        acc += (long double)(wq * phi * density);
    }
    rec.value = (double)acc * grid.dx();
    return rec;
}

/// Sides of the nonlocal-pulling criterion:
///   cond: 1 - 2ab - h > 0
///   lhs:  c**_v - sqrt((c**_v)^2 - 4 d2 r2 (a beta - 1 - h(a-1)))
///   rhs:  ((c*_u)^2 - (c*_v)^2) / (2 (c*_u - c**_v))
/// holds iff cond, lhs > rhs, mu = 0 and c*_v < c*_u.
struct PullingCheck {
    bool cond_sign = false;
    double lhs = std::numeric_limits<double>::quiet_NaN();
    double rhs = std::numeric_limits<double>::quiet_NaN();
    bool holds = false;
    SpeedTable speeds;
};

inline PullingCheck pulling_conditions(const ModelParams& p) {
    PullingCheck out;
    out.cond_sign = 1.0 - 2.0 * p.a * p.b - p.h > 0.0;
    out.speeds = closed_form_speeds(p);
    const double cu = out.speeds.c_u_star;
    const double cv = out.speeds.c_v_star;
    const double cvv = out.speeds.c_v_2star;
    const double depth = p.a * p.beta() - 1.0 - p.h * (p.a - 1.0);
    const double disc = cvv * cvv - 4.0 * p.d2 * p.r2 * depth;
    if (disc >= 0.0) out.lhs = cvv - std::sqrt(disc);
    if (cu > cvv) out.rhs = (cu * cu - cv * cv) / (2.0 * (cu - cvv));
    out.holds = out.cond_sign && std::isfinite(out.lhs) && std::isfinite(out.rhs) &&
                out.lhs > out.rhs && p.mu == 0.0 && cv < cu;
    return out;
}

/// Decay/gluing quantities of the two-ansatz subsolution moving at speed c:
///   lambda(c,eps): smaller positive root of d2 L^2 - c L + r2 q_eps = 0
///                  with q_eps = a beta - 1 - h(a-1) - eps
///   c_eps = c*_u + eps, nu = c_eps/(2 d2)
///   r_decay = c_eps^2/(4 d2) + d2 eps^2 - r2 (a - 1 - 3 eps)
///   glue_margin = lambda(c,eps)(c_eps - c) - r_decay   (> 0 enables gluing)
struct SubsolutionRates {
    double eps = 0.0;
    double c_eps = 0.0;
    double nu = 0.0;
    double r_decay = 0.0;
    double lambda_of_c = 0.0;
    double eta = 0.0;
    double omega = 0.0;
    double glue_margin = 0.0;
};

inline SubsolutionRates subsolution_rates(double c, double eps, const ModelParams& p) {
    if (p.mu != 0.0)
        throw std::invalid_argument("subsolution_rates: defined for mu = 0");
    SubsolutionRates out;
    out.eps = eps;
    const SpeedTable t = closed_form_speeds(p);
    out.c_eps = t.c_u_star + eps;
    out.nu = out.c_eps / (2.0 * p.d2);
    const double q = p.a * p.beta() - 1.0 - p.h * (p.a - 1.0) - eps;
    const double disc = c * c - 4.0 * p.d2 * p.r2 * q;
    if (disc < 0.0) {
        std::ostringstream os;
        os << "subsolution_rates: discriminant " << disc
           << " < 0 (c below 2 sqrt(d2 r2 (a beta - 1 - h(a-1) - eps)))";
        throw std::domain_error(os.str());
    }
    if (c > out.c_eps + 1e-12)
        throw std::domain_error("subsolution_rates: c above c*_u + eps");
    const double root = std::sqrt(disc);
    out.lambda_of_c = (c - root) / (2.0 * p.d2);
    const double lambda_plus = (c + root) / (2.0 * p.d2);
    out.eta = 0.5 * (lambda_plus - out.lambda_of_c); // midpoint keeps the ansatz strict
    out.omega = eps;
    out.r_decay =
        out.c_eps * out.c_eps / (4.0 * p.d2) + p.d2 * eps * eps - p.r2 * (p.a - 1.0 - 3.0 * eps);
    out.glue_margin = out.lambda_of_c * (out.c_eps - c) - out.r_decay;
    return out;
}

/// Scan d1 over (max(d1_lo, d2 r2/r1), d1_hi] and collect the family members
/// for which the pulling criterion holds. The scan keeps every other
/// parameter of `base` fixed.
inline std::vector<ModelParams> search_pulling_params(const ModelParams& base,
                                                      double d1_lo, double d1_hi,
                                                      int steps) {
    if (base.mu != 0.0)
        throw std::invalid_argument("search_pulling_params: base must have mu = 0");
    if (steps < 1) throw std::invalid_argument("search_pulling_params: need steps >= 1");
    const double d1_min = base.d2 * base.r2 / base.r1; // c*_v < c*_u requires d1 above this
    if (d1_hi <= d1_min)
        throw std::invalid_argument(
            "search_pulling_params: scan range entirely below d2 r2 / r1 "
            "(would violate c*_v < c*_u)");
    const double lo = std::max(d1_lo, d1_min);
    std::vector<ModelParams> hits;
    for (int i = 1; i <= steps; ++i) {
        ModelParams q = base;
        q.d1 = lo + (d1_hi - lo) * (double)i / (double)steps;
        if (pulling_conditions(q).holds) hits.push_back(q);
    }
    return hits;
}

} // namespace predprey
