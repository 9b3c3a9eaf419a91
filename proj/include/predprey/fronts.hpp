#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "predprey/errors.hpp"
#include "predprey/grid.hpp"
#include "predprey/kinetics.hpp"
#include "predprey/params.hpp"
#include "predprey/sim.hpp"

namespace predprey {

enum class FieldComponent { u, v, one_minus_w };
enum class FrontDirection { right, left };

inline std::string to_string(FieldComponent c) {
    switch (c) {
    case FieldComponent::u: return "u";
    case FieldComponent::v: return "v";
    case FieldComponent::one_minus_w: return "one_minus_w";
    }
    return "?";
}

inline std::string to_string(FrontDirection d) {
    return d == FrontDirection::right ? "right" : "left";
}

namespace detail {
inline double component_value(const FieldState& s, FieldComponent c, std::size_t i) {
    switch (c) {
    case FieldComponent::u: return s.u[i];
    case FieldComponent::v: return s.v[i];
    case FieldComponent::one_minus_w: return 1.0 - s.w[i];
    }
    return 0.0;
}
} // namespace detail

/// Outermost position where the component reaches the threshold level,
/// refined by linear interpolation between the bracketing grid points.
/// Returns nullopt when the level set does not exist.
inline std::optional<double> front_position(const FieldState& s, const Grid1D& grid,
                                            FieldComponent comp, double threshold,
                                            FrontDirection dir) {
    const int n = grid.n;
    auto val = [&](int i) { return detail::component_value(s, comp, (std::size_t)i); };
    if (dir == FrontDirection::right) {
        for (int i = n - 1; i >= 0; --i) {
            if (val(i) >= threshold) {
                if (i == n - 1) return grid.x(i);
                const double f0 = val(i), f1 = val(i + 1);
                return grid.x(i) + grid.dx() * (f0 - threshold) / (f0 - f1);
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            if (val(i) >= threshold) {
                if (i == 0) return grid.x(i);
                const double f0 = val(i), f1 = val(i - 1);
                return grid.x(i) - grid.dx() * (f0 - threshold) / (f0 - f1);
            }
        }
    }
    return std::nullopt;
}

/// Time series of one level-set position; absent samples are kept so that
/// fitting can reject windows that contain them.
struct FrontTrack {
    FieldComponent component = FieldComponent::u;
    double threshold = 0.0;
    FrontDirection direction = FrontDirection::right;
    std::vector<std::pair<double, std::optional<double>>> samples;
};

/// Observer that appends to `track` every `period`, and rejects the run if
/// the front comes within guard_cells * dx of a domain end (domain
/// truncation would corrupt the measured speed beyond that point).
inline Observer make_front_observer(FrontTrack& track, const Grid1D& grid,
                                    double period, double guard_cells = 10.0) {
    Observer obs;
    obs.period = period;
    const double lo = grid.x_min + guard_cells * grid.dx();
    const double hi = grid.x_max - guard_cells * grid.dx();
    obs.callback = [&track, grid, lo, hi](const FieldState& s) {
        auto x = front_position(s, grid, track.component, track.threshold,
                                track.direction);
        if (x && (*x < lo || *x > hi)) {
            std::ostringstream os;
            os << "front observer: " << to_string(track.component) << " front at x = "
               << *x << " (t = " << s.t << ") is within the boundary guard band; "
               << "enlarge the domain";
            throw numerical_error(os.str());
        }
        if (!track.samples.empty() && s.t <= track.samples.back().first)
            throw numerical_error(
                "front observer: samples must be strictly increasing in t "
                "(one track fed by two observers?)");
        track.samples.emplace_back(s.t, x);
    };
    return obs;
}

/// Least-squares fit of front position against time over a late-time window.
struct SpeedReport {
    double fitted_speed = 0.0;
    double stderr_ = 0.0;
    double r_squared = 0.0;
    double theoretical = std::numeric_limits<double>::quiet_NaN();
    double relative_error = std::numeric_limits<double>::quiet_NaN();
    int n_samples = 0;
};

inline SpeedReport fit_speed(const FrontTrack& track, double t0, double t1,
                             double theoretical = std::numeric_limits<double>::quiet_NaN()) {
    std::vector<double> ts, xs;
    for (const auto& [t, x] : track.samples) {
        if (t < t0 || t > t1) continue;
        if (!x)
            throw numerical_error("fit_speed: absent front sample inside the fit window");
        ts.push_back(t);
        xs.push_back(*x);
    }
    const std::size_t m = ts.size();
    if (m < 10)
        throw numerical_error("fit_speed: need at least 10 samples in the window, got " +
                              std::to_string(m));

    double tbar = 0.0, xbar = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        tbar += ts[i];
        xbar += xs[i];
    }
    tbar /= (double)m;
    xbar /= (double)m;
    double stt = 0.0, stx = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double dt = ts[i] - tbar, dx = xs[i] - xbar;
        stt += dt * dt;
        stx += dt * dx;
        sxx += dx * dx;
    }
    if (stt == 0.0) throw numerical_error("fit_speed: degenerate time window");

    SpeedReport rep;
    rep.n_samples = (int)m;
    rep.fitted_speed = stx / stt;
    double ss_res = 0.0;
    const double intercept = xbar - rep.fitted_speed * tbar;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = xs[i] - (intercept + rep.fitted_speed * ts[i]);
        ss_res += r * r;
    }
    rep.r_squared = sxx > 0.0 ? std::max(0.0, 1.0 - ss_res / sxx) : 1.0;
    rep.stderr_ = m > 2 ? std::sqrt(ss_res / ((double)m - 2.0) / stt) : 0.0;
    rep.theoretical = theoretical;
    if (std::isfinite(theoretical) && theoretical != 0.0)
        rep.relative_error = std::fabs(rep.fitted_speed - theoretical) / std::fabs(theoretical);
    return rep;
}

/// Sup-distance (max-norm over components) of the state to a target triple
/// over [x0, x1]; pass iff <= tol.
struct PlateauResult {
    bool pass = false;
    double distance = 0.0;
};

inline PlateauResult plateau_match(const FieldState& s, const Grid1D& grid,
                                   const Triple& target, double x0, double x1,
                                   double tol) {
    if (x0 < grid.x_min - 1e-12 || x1 > grid.x_max + 1e-12 || x1 < x0)
        throw std::invalid_argument("plateau_match: region outside grid");
    double dist = 0.0;
    int count = 0;
    for (int i = 0; i < grid.n; ++i) {
        const double x = grid.x(i);
        if (x < x0 || x > x1) continue;
        ++count;
        const std::size_t j = (std::size_t)i;
        dist = std::max({dist, std::fabs(s.u[j] - target.u), std::fabs(s.v[j] - target.v),
                         std::fabs(s.w[j] - target.w)});
    }
    if (count == 0) throw std::invalid_argument("plateau_match: empty region");
    return {dist <= tol, dist};
}

/// Equi-diffusion comparison check: with d1 = d2, r1 = r2 and
/// u0 <= kappa v0 everywhere, u(t) <= kappa v(t) is preserved. Runs the
/// simulation and returns the running maximum of sup_x(u - kappa v), which
/// stays <= 0 up to solver tolerance.
struct OrderingResult {
    double kappa = 0.0;
    double max_sup_u_minus_kappa_v = -std::numeric_limits<double>::infinity();
    RunResult run;
};

inline OrderingResult ordering_check(const FieldState& state0, const Grid1D& grid,
                                     const ModelParams& p, double T, double dt,
                                     double sample_period) {
    if (p.d1 != p.d2 || p.r1 != p.r2)
        throw std::invalid_argument("ordering_check: requires d1 = d2 and r1 = r2");
    const double kappa = p.kappa();
    for (std::size_t i = 0; i < state0.u.size(); ++i)
        if (state0.u[i] > kappa * state0.v[i])
            throw std::invalid_argument(
                "ordering_check: initial data violates u0 <= kappa v0");

    OrderingResult out;
    out.kappa = kappa;
    std::vector<Observer> obs(1);
    obs[0].period = sample_period;
    obs[0].callback = [&out, kappa](const FieldState& s) {
        double sup = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < s.u.size(); ++i)
            sup = std::max(sup, s.u[i] - kappa * s.v[i]);
        out.max_sup_u_minus_kappa_v = std::max(out.max_sup_u_minus_kappa_v, sup);
    };
    out.run = run(state0, grid, p, T, dt, obs);
    return out;
}

} // namespace predprey
