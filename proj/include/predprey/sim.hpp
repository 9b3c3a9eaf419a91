#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "predprey/errors.hpp"
#include "predprey/grid.hpp"
#include "predprey/kinetics.hpp"
#include "predprey/params.hpp"

namespace predprey {

/// Initial profile of one component: zero, a constant, or a compactly
/// supported cosine-squared bump
///   height * cos^2( pi (x - center) / (2 half_width) )  on |x-center| < half_width.
struct Profile {
    enum class Kind { zero, constant, bump };
    Kind kind = Kind::zero;
    double value = 0.0;      // constant
    double center = 0.0;     // bump
    double half_width = 0.0; // bump
    double height = 0.0;     // bump

    static Profile zero() { return {}; }
    static Profile constant(double v) {
        Profile p;
        p.kind = Kind::constant;
        p.value = v;
        return p;
    }
    static Profile bump(double center, double half_width, double height) {
        Profile p;
        p.kind = Kind::bump;
        p.center = center;
        p.half_width = half_width;
        p.height = height;
        return p;
    }

    double eval(double x) const {
        switch (kind) {
        case Kind::zero:
            return 0.0;
        case Kind::constant:
            return value;
        case Kind::bump: {
            const double s = std::fabs(x - center);
            if (s >= half_width) return 0.0;
            const double pi = 3.14159265358979323846;
            const double c = std::cos(pi * (x - center) / (2.0 * half_width));
            return height * c * c;
        }
        }
        return 0.0;
    }
};

struct InitialSpec {
    Profile u, v, w;
};

/// Realize an initial condition on the grid, enforcing the admissible-data
/// bounds: 0 <= u0, v0 <= a-1 with compact support, beta <= w0 <= 1.
inline FieldState build_initial_state(const InitialSpec& spec, const Grid1D& grid,
                                      const ModelParams& p) {
    const double beta = p.beta();
    auto realize = [&grid](const Profile& prof) {
        std::vector<double> f((std::size_t)grid.n);
        for (int i = 0; i < grid.n; ++i) f[(std::size_t)i] = prof.eval(grid.x(i));
        return f;
    };

    for (const Profile* prof : {&spec.u, &spec.v}) {
        if (prof->kind == Profile::Kind::constant && prof->value != 0.0)
            throw std::invalid_argument(
                "build_initial_state: predator initial data must be compactly "
                "supported (zero or bump)");
        if (prof->kind == Profile::Kind::bump) {
            if (!(prof->half_width > 0.0))
                throw std::invalid_argument("build_initial_state: bump needs half_width > 0");
            if (prof->height < 0.0 || prof->height > p.a - 1.0)
                throw std::invalid_argument(
                    "build_initial_state: bump height outside [0, a-1]");
        }
    }
    if (spec.w.kind != Profile::Kind::constant)
        throw std::invalid_argument(
            "build_initial_state: prey initial data must be a constant in [beta, 1]");
    if (spec.w.value < beta || spec.w.value > 1.0) {
        std::ostringstream os;
        os << "build_initial_state: w0 = " << spec.w.value << " violates [beta, 1] = ["
           << beta << ", 1]";
        throw std::invalid_argument(os.str());
    }

    FieldState s;
    s.t = 0.0;
    s.u = realize(spec.u);
    s.v = realize(spec.v);
    s.w = realize(spec.w);
    return s;
}

/// Forward-Euler step bound: the diffusion CFL limit dx^2/(2 max d) combined
/// with a crude reaction-slope bound max(r)*(a+2) valid on box-confined
/// states, scaled by `safety`.
inline double stable_dt(const Grid1D& grid, const ModelParams& p, double safety = 0.4) {
    if (!(safety > 0.0) || safety > 1.0)
        throw std::invalid_argument("stable_dt: safety must be in (0, 1]");
    const double dmax = std::max({p.d1, p.d2, p.d3});
    const double dx = grid.dx();
    const double diff_limit = dx * dx / (2.0 * dmax);
    const double slope = std::max({p.r1, p.r2, p.r3}) * (p.a + 2.0);
    const double react_limit = 1.0 / (4.0 * slope);
    return safety * std::min(diff_limit, react_limit);
}

/// Read-only callback invoked every `period` time units (and at t = 0 and
/// the final time).
struct Observer {
    double period = 1.0;
    std::function<void(const FieldState&)> callback;
};

struct RunOptions {
    double box_tol = 1e-8; // clamp excursions below this, error above
};

struct RunResult {
    FieldState state;
    double max_box_excursion = 0.0;
    long steps = 0;
};

/// Method-of-lines forward Euler for the Cauchy problem, truncated to the
/// grid with homogeneous Neumann ends (ghost-point reflection). The
/// invariant-box bounds 0 <= u,v <= a-1, beta <= w <= 1 are checked after
/// every step: rounding-level excursions (<= box_tol) are clamped back,
/// larger ones abort with a stability error.
inline RunResult run(const FieldState& state0, const Grid1D& grid,
                     const ModelParams& p, double T, double dt,
                     const std::vector<Observer>& observers = {},
                     const RunOptions& opts = {}) {
    if (!(T > 0.0)) throw std::invalid_argument("run: need T > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("run: need dt > 0");
    if (dt > stable_dt(grid, p, 1.0) * (1.0 + 1e-12))
        throw std::invalid_argument("run: dt exceeds the stability bound");
    const std::size_t n = (std::size_t)grid.n;
    if (state0.u.size() != n || state0.v.size() != n || state0.w.size() != n)
        throw std::invalid_argument("run: state size does not match grid");

    RunResult result;
    result.state = state0;
    FieldState next;
    next.u.resize(n);
    next.v.resize(n);
    next.w.resize(n);

    std::vector<double> next_sample(observers.size(), state0.t);
    std::vector<double> last_fired(observers.size(),
                                   -std::numeric_limits<double>::infinity());
    auto notify = [&](const FieldState& s) {
        for (std::size_t i = 0; i < observers.size(); ++i) {
            if (s.t + 1e-12 >= next_sample[i]) {
                observers[i].callback(s);
                last_fired[i] = s.t;
                next_sample[i] += observers[i].period;
                while (next_sample[i] <= s.t + 1e-12)
                    next_sample[i] += observers[i].period;
            }
        }
    };
    notify(result.state);

    const double dx2 = grid.dx() * grid.dx();
    const double umax = p.a - 1.0;
    const double beta = p.beta();
    const double t_end = state0.t + T;

    while (result.state.t < t_end - 1e-12) {
        const double step = std::min(dt, t_end - result.state.t);
        const double* u = result.state.u.data();
        const double* v = result.state.v.data();
        const double* w = result.state.w.data();
        double* nu_ = next.u.data();
        double* nv_ = next.v.data();
        double* nw_ = next.w.data();

        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t il = (i == 0) ? 1 : i - 1;     // Neumann reflection
            const std::size_t ir = (i == n - 1) ? n - 2 : i + 1;
            const double lap_u = (u[il] - 2.0 * u[i] + u[ir]) / dx2;
            const double lap_v = (v[il] - 2.0 * v[i] + v[ir]) / dx2;
            const double lap_w = (w[il] - 2.0 * w[i] + w[ir]) / dx2;
            const double fu = p.r1 * (-1.0 - u[i] - p.k * v[i] + p.a * w[i]);
            const double fv = p.r2 * (-1.0 - p.h * u[i] - v[i] + p.a * w[i]);
            const double fw = p.r3 * (1.0 - p.b * u[i] - p.b * v[i] - w[i]);
            nu_[i] = u[i] + step * (p.d1 * lap_u + u[i] * fu + p.mu * (v[i] - u[i]));
            nv_[i] = v[i] + step * (p.d2 * lap_v + v[i] * fv + p.mu * (u[i] - v[i]));
            nw_[i] = w[i] + step * (p.d3 * lap_w + w[i] * fw);
        }

        // box check + rounding clamp
        double excursion = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            finite = finite && std::isfinite(nu_[i]) && std::isfinite(nv_[i]) &&
                     std::isfinite(nw_[i]);
            double e = 0.0;
            e = std::max(e, -nu_[i]);
            e = std::max(e, nu_[i] - umax);
            e = std::max(e, -nv_[i]);
            e = std::max(e, nv_[i] - umax);
            e = std::max(e, beta - nw_[i]);
            e = std::max(e, nw_[i] - 1.0);
            if (e > excursion) excursion = e;
        }
        const double t_next = result.state.t + step;
        if (!finite) {
            std::ostringstream os;
            os << "run: solution blow-up (non-finite values) at t = " << t_next;
            throw numerical_error(os.str());
        }
        if (excursion > opts.box_tol) {
            std::ostringstream os;
            os << "run: invariant-box excursion " << excursion << " > " << opts.box_tol
               << " at t = " << t_next << "; reduce dt";
            throw numerical_error(os.str());
        }
        if (excursion > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                nu_[i] = std::clamp(nu_[i], 0.0, umax);
                nv_[i] = std::clamp(nv_[i], 0.0, umax);
                nw_[i] = std::clamp(nw_[i], beta, 1.0);
            }
        }
        result.max_box_excursion = std::max(result.max_box_excursion, excursion);

        next.t = t_next;
        std::swap(result.state.u, next.u);
        std::swap(result.state.v, next.v);
        std::swap(result.state.w, next.w);
        result.state.t = t_next;
        ++result.steps;
        notify(result.state);
    }
    // final-time sample for observers whose period does not divide T
    for (std::size_t i = 0; i < observers.size(); ++i)
        if (last_fired[i] < result.state.t - 1e-9) observers[i].callback(result.state);
    return result;
}

} // namespace predprey
