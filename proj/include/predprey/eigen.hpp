#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "predprey/errors.hpp"
#include "predprey/minimize.hpp"
#include "predprey/params.hpp"
#include "predprey/speeds.hpp"

namespace predprey {

namespace detail {

inline double dot_ld(const std::vector<double>& a, const std::vector<double>& b) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) s += (long double)a[i] * b[i];
    return (double)s;
}

inline double norm2_ld(const std::vector<double>& a) {
    return std::sqrt(dot_ld(a, a));
}

// Tridiagonal matrix with constant off-diagonals, variable diagonal.
struct Tridiag {
    std::vector<double> diag;
    double sub = 0.0; // coefficient of x_{i-1}
    double sup = 0.0; // coefficient of x_{i+1}

    std::size_t size() const { return diag.size(); }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            double s = diag[i] * x[i];
            if (i > 0) s += sub * x[i - 1];
            if (i + 1 < n) s += sup * x[i + 1];
            y[i] = s;
        }
    }

    double inf_norm() const {
        double m = 0.0;
        for (double d : diag)
            m = std::max(m, std::fabs(d) + std::fabs(sub) + std::fabs(sup));
        return m;
    }

    // Thomas solve of (A - shift I) x = rhs; tiny pivots are nudged so that
    // near-singular solves (shift at the eigenvalue) stay usable for inverse
    // iteration.
    void solve_shifted(double shift, const std::vector<double>& rhs,
                       std::vector<double>& x, std::vector<double>& work) const {
        const std::size_t n = size();
        work.resize(n);
        x.resize(n);
        const double tiny = 1e-300;
        double piv = diag[0] - shift;
        if (std::fabs(piv) < tiny) piv = piv < 0 ? -tiny : tiny;
        work[0] = sup / piv;
        x[0] = rhs[0] / piv;
        for (std::size_t i = 1; i < n; ++i) {
            piv = (diag[i] - shift) - sub * work[i - 1];
            if (std::fabs(piv) < tiny) piv = piv < 0 ? -tiny : tiny;
            work[i] = sup / piv;
            x[i] = (rhs[i] - sub * x[i - 1]) / piv;
        }
        for (std::size_t i = n - 1; i-- > 0;) x[i] -= work[i] * x[i + 1];
    }
};

struct InversePowerOptions {
    double start_shift = 0.0;
    double eig_tol = 1e-12;     // successive eigenvalue change
    double res_tol = 1e-10;     // residual 2-norm at unit eigenvector
    long max_sweeps = 100000;
};

// Generic shifted inverse power iteration. Solve must implement
// solve_shifted/apply/inf_norm as Tridiag does. Starts with the supplied
// under-shift, switches to Rayleigh-quotient shifts once roughly locked on.
template <class Op>
double inverse_power_iteration(const Op& op, std::vector<double>& x,
                               const InversePowerOptions& opt) {
    const std::size_t n = x.size();
    std::vector<double> y(n), ax(n), work;
    double nx = norm2_ld(x);
    for (auto& e : x) e /= nx;

    op.apply(x, ax);
    double lambda = dot_ld(x, ax);
    double shift = opt.start_shift;
    const double res_floor =
        std::max(opt.res_tol, 64.0 * std::numeric_limits<double>::epsilon() *
                                  op.inf_norm() * std::sqrt((double)n));
    bool rayleigh = false;
    for (long sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        op.solve_shifted(shift, x, y, work);
        double ny = norm2_ld(y);
        if (!std::isfinite(ny) || ny == 0.0)
            throw numerical_error("inverse_power_iteration: breakdown in solve");
        for (auto& e : y) e /= ny;
        // fix overall sign for a stable iterate sequence
        if (dot_ld(x, y) < 0.0)
            for (auto& e : y) e = -e;
        x.swap(y);

        op.apply(x, ax);
        const double lambda_new = dot_ld(x, ax);
        double res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = ax[i] - lambda_new * x[i];
            res += r * r;
        }
        res = std::sqrt(res);
        const double dl = std::fabs(lambda_new - lambda);
        lambda = lambda_new;
        if (res < 1e-4 || dl < 1e-6) rayleigh = true;
        if (rayleigh) shift = lambda;
        if (dl < opt.eig_tol && res < res_floor) return lambda;
    }
    throw numerical_error("inverse_power_iteration: no convergence after " +
                          std::to_string(opt.max_sweeps) + " sweeps");
}

} // namespace detail

/// Scalar Dirichlet eigenproblem on (-R, R):
///   -d phi'' - c phi' + a_coef phi = lambda phi,  phi(+-R) = 0, phi > 0,
/// with closed form lambda_R = a_coef + c^2/(4d) + d pi^2/(4R^2).
/// The numeric value comes from the smallest eigenvalue of the second-order
/// central-difference discretization (n interior points) and converges at
/// O(dx^2).
struct ScalarEig {
    double numeric = 0.0;
    double closed_form = 0.0;
    std::vector<double> eigenfunction; // interior values, sup-norm 1
    double R = 0.0;
    int grid_size = 0;
    double dx = 0.0;
};

inline double scalar_dirichlet_closed_form(double d, double c, double a_coef,
                                           double R) {
    const double pi = 3.14159265358979323846;
    return a_coef + c * c / (4.0 * d) + d * pi * pi / (4.0 * R * R);
}

inline ScalarEig scalar_dirichlet_eig(double d, double c, double a_coef, double R,
                                      int n) {
    if (!(d > 0.0) || !(R > 0.0))
        throw std::invalid_argument("scalar_dirichlet_eig: need d > 0 and R > 0");
    if (n < 16)
        throw std::invalid_argument("scalar_dirichlet_eig: need n >= 16");
    const double pi = 3.14159265358979323846;
    const double dx = 2.0 * R / (n + 1);
    if (c != 0.0 && dx >= 2.0 * d / std::fabs(c))
        throw std::invalid_argument(
            "scalar_dirichlet_eig: dx >= 2d/|c|, drift dominates the stencil; "
            "increase n");

    detail::Tridiag A;
    A.diag.assign(n, 2.0 * d / (dx * dx) + a_coef);
    A.sub = -d / (dx * dx) + c / (2.0 * dx);
    A.sup = -d / (dx * dx) - c / (2.0 * dx);

    ScalarEig out;
    out.closed_form = scalar_dirichlet_closed_form(d, c, a_coef, R);
    out.R = R;
    out.grid_size = n;
    out.dx = dx;

    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) {
        const double xi = -R + (i + 1) * dx;
        x[i] = std::cos(pi * xi / (2.0 * R));
    }
    detail::InversePowerOptions opt;
    const double gap = 3.0 * d * pi * pi / (4.0 * R * R);
    opt.start_shift = out.closed_form - std::max(0.25 * gap, 1e-3);
    out.numeric = detail::inverse_power_iteration(A, x, opt);

    double m = 0.0;
    for (double e : x) m = std::max(m, std::fabs(e));
    for (auto& e : x) e /= m;
    for (double e : x)
        if (!(e > 0.0))
            throw numerical_error(
                "scalar_dirichlet_eig: sign change in computed eigenvector");
    out.eigenfunction = std::move(x);
    return out;
}

/// R -> infinity limit of the coupled principal eigenvalue,
///   max_{gamma >= 0} ( -Lambda[mu,gamma] + |c| gamma ) + 2 r1 delta,
/// negative for |c| < c*_mu and delta small. Concave in gamma, found by
/// golden-section on an expanding bracket.
inline double limit_eigenvalue(double c, double delta, const ModelParams& p) {
    if (p.mu <= 0.0)
        throw numerical_error(
            "limit_eigenvalue: requires mu > 0 (cooperative coupling)");
    const double cm = std::fabs(c);
    auto objective = [&](double g) { return -pf_eigenvalue(p.mu, g, p) + cm * g; };
    double hi = 1.0;
    while (objective(hi) >= objective(0.5 * hi)) {
        hi *= 2.0;
        if (hi > 1e12)
            throw numerical_error("limit_eigenvalue: bracket expansion failed");
    }
    hi *= 2.0;
    MinResult m = golden_section_max(objective, 0.0, hi, 1e-12);
    return m.value + 2.0 * p.r1 * delta;
}

/// Principal eigenpair of the coupled Dirichlet problem on (-R, R):
///   -d1 phi'' - c phi' - r1 (a-1-2 delta) phi          - mu (psi - phi) = L phi
///   -d2 psi'' - c psi' - r2 (a-1-2 (r1/r2) delta) psi  - mu (phi - psi) = L psi
/// with phi(+-R) = psi(+-R) = 0 and phi, psi > 0 inside. Solved by shifted
/// inverse power iteration on the block-tridiagonal discretization (2x2
/// block Thomas). Satisfies L_R(c,delta) = L_R(c,0) + 2 r1 delta and
/// L_R(-c,0) = L_R(c,0) exactly at the discrete level.
struct EigenResult {
    double eigenvalue = 0.0;
    std::vector<double> phi, psi; // interior values, sup-norm of phi is 1
    int grid_size = 0;
    double R = 0.0;
    double dx = 0.0;
};

namespace detail {

// Block-tridiagonal operator with 2x2 blocks: diagonal blocks carry the
// mutation coupling, off-diagonal blocks are diagonal (pure transport).
struct BlockTridiag {
    int n = 0;
    double diag1 = 0.0, diag2 = 0.0; // spatial diagonal terms per component
    double q1 = 0.0, q2 = 0.0;       // zeroth-order terms per component
    double mu = 0.0;
    double sub1 = 0.0, sup1 = 0.0;   // spatial neighbors, component 1
    double sub2 = 0.0, sup2 = 0.0;   // spatial neighbors, component 2

    std::size_t vec_size() const { return 2 * (std::size_t)n; }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        for (int i = 0; i < n; ++i) {
            const double phi = x[2 * i], psi = x[2 * i + 1];
            double s1 = (diag1 + q1) * phi - mu * psi;
            double s2 = (diag2 + q2) * psi - mu * phi;
            if (i > 0) {
                s1 += sub1 * x[2 * (i - 1)];
                s2 += sub2 * x[2 * (i - 1) + 1];
            }
            if (i + 1 < n) {
                s1 += sup1 * x[2 * (i + 1)];
                s2 += sup2 * x[2 * (i + 1) + 1];
            }
            y[2 * i] = s1;
            y[2 * i + 1] = s2;
        }
    }

    double inf_norm() const {
        const double m1 = std::fabs(diag1 + q1) + mu + std::fabs(sub1) + std::fabs(sup1);
        const double m2 = std::fabs(diag2 + q2) + mu + std::fabs(sub2) + std::fabs(sup2);
        return std::max(m1, m2);
    }

    // Block Thomas factorization of (A - shift I); 2x2 pivots inverted via
    // the adjugate with a determinant guard.
    void solve_shifted(double shift, const std::vector<double>& rhs,
                       std::vector<double>& x,
                       std::vector<double>& work) const {
        const std::size_t N = vec_size();
        x.resize(N);
        // work holds the 2x2 upper-factor blocks W_i = C_i^{-1} U, 4 doubles each
        work.resize(4 * (std::size_t)n);
        const double tiny = 1e-300;

        double c11 = diag1 + q1 - shift, c12 = -mu;
        double c21 = -mu, c22 = diag2 + q2 - shift;
        auto invert_apply = [&](double& i11, double& i12, double& i21, double& i22) {
            double det = c11 * c22 - c12 * c21;
            if (std::fabs(det) < tiny) det = det < 0 ? -tiny : tiny;
            i11 = c22 / det;
            i12 = -c12 / det;
            i21 = -c21 / det;
            i22 = c11 / det;
        };
        double i11, i12, i21, i22;
        invert_apply(i11, i12, i21, i22);
        // W_0 = C_0^{-1} U, with U = diag(sup1, sup2)
        work[0] = i11 * sup1;
        work[1] = i12 * sup2;
        work[2] = i21 * sup1;
        work[3] = i22 * sup2;
        x[0] = i11 * rhs[0] + i12 * rhs[1];
        x[1] = i21 * rhs[0] + i22 * rhs[1];

        for (int i = 1; i < n; ++i) {
            // C_i = D - L W_{i-1}, with L = diag(sub1, sub2)
            c11 = diag1 + q1 - shift - sub1 * work[4 * (i - 1)];
            c12 = -mu - sub1 * work[4 * (i - 1) + 1];
            c21 = -mu - sub2 * work[4 * (i - 1) + 2];
            c22 = diag2 + q2 - shift - sub2 * work[4 * (i - 1) + 3];
            invert_apply(i11, i12, i21, i22);
            work[4 * i] = i11 * sup1;
            work[4 * i + 1] = i12 * sup2;
            work[4 * i + 2] = i21 * sup1;
            work[4 * i + 3] = i22 * sup2;
            const double b1 = rhs[2 * i] - sub1 * x[2 * (i - 1)];
            const double b2 = rhs[2 * i + 1] - sub2 * x[2 * (i - 1) + 1];
            x[2 * i] = i11 * b1 + i12 * b2;
            x[2 * i + 1] = i21 * b1 + i22 * b2;
        }
        for (int i = n - 2; i >= 0; --i) {
            x[2 * i] -= work[4 * i] * x[2 * (i + 1)] + work[4 * i + 1] * x[2 * (i + 1) + 1];
            x[2 * i + 1] -=
                work[4 * i + 2] * x[2 * (i + 1)] + work[4 * i + 3] * x[2 * (i + 1) + 1];
        }
    }
};

} // namespace detail

inline EigenResult system_dirichlet_eig(double c, double delta, double R, int n,
                                        const ModelParams& p) {
    if (p.mu <= 0.0)
        throw numerical_error(
            "system_dirichlet_eig: requires mu > 0 (Perron-Frobenius structure "
            "needs the cooperative coupling)");
    if (!(R > 0.0) || n < 16)
        throw std::invalid_argument("system_dirichlet_eig: need R > 0 and n >= 16");
    if (delta < 0.0)
        throw std::invalid_argument("system_dirichlet_eig: need delta >= 0");

    const double pi = 3.14159265358979323846;
    const double dx = 2.0 * R / (n + 1);
    if (c != 0.0 && dx >= 2.0 * std::min(p.d1, p.d2) / std::fabs(c))
        throw std::invalid_argument(
            "system_dirichlet_eig: dx >= 2 min(d1,d2)/|c|, drift dominates the "
            "stencil; increase n");

    detail::BlockTridiag A;
    A.n = n;
    A.mu = p.mu;
    A.diag1 = 2.0 * p.d1 / (dx * dx);
    A.diag2 = 2.0 * p.d2 / (dx * dx);
    A.q1 = p.mu - p.r1 * (p.a - 1.0 - 2.0 * delta);
    A.q2 = p.mu - p.r2 * (p.a - 1.0) + 2.0 * p.r1 * delta;
    A.sub1 = -p.d1 / (dx * dx) + c / (2.0 * dx);
    A.sup1 = -p.d1 / (dx * dx) - c / (2.0 * dx);
    A.sub2 = -p.d2 / (dx * dx) + c / (2.0 * dx);
    A.sup2 = -p.d2 / (dx * dx) - c / (2.0 * dx);

    std::vector<double> x(A.vec_size());
    for (int i = 0; i < n; ++i) {
        const double xi = -R + (i + 1) * dx;
        const double seed = std::cos(pi * xi / (2.0 * R));
        x[2 * i] = seed;
        x[2 * i + 1] = seed;
    }
    detail::InversePowerOptions opt;
    opt.start_shift = limit_eigenvalue(c, delta, p) - 0.01;

    EigenResult out;
    out.eigenvalue = detail::inverse_power_iteration(A, x, opt);
    out.grid_size = n;
    out.R = R;
    out.dx = dx;

    double m = 0.0;
    for (int i = 0; i < n; ++i) m = std::max(m, std::fabs(x[2 * i]));
    out.phi.resize(n);
    out.psi.resize(n);
    for (int i = 0; i < n; ++i) {
        out.phi[i] = x[2 * i] / m;
        out.psi[i] = x[2 * i + 1] / m;
        if (!(out.phi[i] > 0.0) || !(out.psi[i] > 0.0))
            throw numerical_error(
                "system_dirichlet_eig: sign change in computed eigenvector");
    }
    return out;
}

} // namespace predprey
