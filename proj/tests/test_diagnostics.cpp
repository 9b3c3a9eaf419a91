#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "predprey/diagnostics.hpp"
#include "predprey/sim.hpp"
#include "support/ode_oracle.hpp"

using namespace predprey;

namespace {

ModelParams reference_params() {
    ModelParams p;
    p.a = 2.0;
    p.b = 0.2;
    p.h = p.k = 0.5;
    p.d1 = p.d2 = p.d3 = 1.0;
    p.r1 = p.r2 = p.r3 = 1.0;
    p.mu = 0.0;
    return p;
}

ModelParams pulling_family() {
    ModelParams p;
    p.a = 2.0;
    p.b = 0.1;
    p.h = p.k = 0.1;
    p.d1 = 1.01;
    p.d2 = p.d3 = 1.0;
    p.r1 = p.r2 = p.r3 = 1.0;
    p.mu = 0.0;
    return p;
}

FieldState homogeneous_state(const Grid1D& grid, const Triple& s) {
    FieldState f;
    f.u.assign((std::size_t)grid.n, s.u);
    f.v.assign((std::size_t)grid.n, s.v);
    f.w.assign((std::size_t)grid.n, s.w);
    return f;
}

} // namespace

TEST_CASE("entropy g is nonnegative with a single zero at 1") {
    CHECK(g_entropy(1.0) == 0.0);
    CHECK(g_entropy(0.5) > 0.0);
    CHECK(g_entropy(2.0) > 0.0);
}

TEST_CASE("E_R vanishes exactly at the matching equilibrium") {
    ModelParams p = reference_params();
    Grid1D grid(-10.0, 10.0, 401);
    const double R = 4.0;

    auto coex = homogeneous_state(grid, coexistence_state(p));
    auto rec = lyapunov_energy(coex, grid, LyapunovFunctional::phi_full, R, p);
    CHECK(std::fabs(rec.value) < 1e-10);
    CHECK(rec.applicable);

    Triple semi{semi_trivial_p(p), 0.0, semi_trivial_q(p)};
    auto sub = homogeneous_state(grid, semi);
    auto rec_v = lyapunov_energy(sub, grid, LyapunovFunctional::v_subsystem, R, p);
    CHECK(std::fabs(rec_v.value) < 1e-10);
}

TEST_CASE("E_R is insensitive to perturbations outside the cutoff support") {
    ModelParams p = reference_params();
    Grid1D grid(-10.0, 10.0, 401);
    const double R = 4.0;
    auto s = homogeneous_state(grid, coexistence_state(p));
    for (int i = 0; i < grid.n; ++i)
        if (std::fabs(grid.x(i)) > 2.0 * R + 1e-9) s.u[(std::size_t)i] += 0.05;
    auto rec = lyapunov_energy(s, grid, LyapunovFunctional::phi_full, R, p);
    CHECK(std::fabs(rec.value) < 1e-10);

    // the same perturbation inside the support registers
    auto s2 = homogeneous_state(grid, coexistence_state(p));
    s2.u[(std::size_t)(grid.n / 2)] += 0.05;
    auto rec2 = lyapunov_energy(s2, grid, LyapunovFunctional::phi_full, R, p);
    CHECK(rec2.value > 0.0);
}

TEST_CASE("lyapunov_energy precondition and error paths") {
    ModelParams p = reference_params();
    Grid1D grid(-10.0, 10.0, 401);
    auto s = homogeneous_state(grid, coexistence_state(p));

    SUBCASE("mu > 0 not applicable") {
        ModelParams q = p;
        q.mu = 0.1;
        CHECK_THROWS_AS(lyapunov_energy(s, grid, LyapunovFunctional::phi_full, 4.0, q),
                        std::invalid_argument);
    }
    SUBCASE("grid must cover the cutoff support") {
        CHECK_THROWS_AS(lyapunov_energy(s, grid, LyapunovFunctional::phi_full, 8.0, p),
                        std::invalid_argument);
    }
    SUBCASE("nonpositive sample is a domain error") {
        s.v[200] = -0.001;
        CHECK_THROWS_AS(lyapunov_energy(s, grid, LyapunovFunctional::phi_full, 4.0, p),
                        std::domain_error);
    }
    SUBCASE("V requires v identically zero on the window") {
        CHECK_THROWS_AS(lyapunov_energy(s, grid, LyapunovFunctional::v_subsystem, 4.0, p),
                        std::invalid_argument);
    }
    SUBCASE("tiny fields flip the applicable flag") {
        for (auto& e : s.v) e = 1e-7;
        auto rec = lyapunov_energy(s, grid, LyapunovFunctional::phi_full, 4.0, p);
        CHECK(!rec.applicable);
    }
}

TEST_CASE("E_R decreases along a homogeneous trajectory, against an RK4 oracle") {
    ModelParams p = reference_params();
    Grid1D grid(-10.0, 10.0, 401);
    const double R = 4.0;
    const Triple coex = coexistence_state(p);
    const Triple start{coex.u + 0.1, coex.v - 0.05, coex.w + 0.05};

    std::vector<double> energies;
    std::vector<double> times;
    std::vector<Observer> obs(1);
    obs[0].period = 0.5;
    obs[0].callback = [&](const FieldState& s) {
        energies.push_back(
            lyapunov_energy(s, grid, LyapunovFunctional::phi_full, R, p).value);
        times.push_back(s.t);
    };
    run(homogeneous_state(grid, start), grid, p, 10.0, stable_dt(grid, p), obs);
    REQUIRE(energies.size() > 10);
    for (std::size_t i = 1; i < energies.size(); ++i) CHECK(energies[i] < energies[i - 1]);

    // cutoff mass: E_R of a homogeneous state is density * integral(cutoff)
    double cutoff_mass = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        const double wq = (i == 0 || i == grid.n - 1) ? 0.5 : 1.0;
        cutoff_mass += wq * cutoff_smoothstep(grid.x(i) / R);
    }
    cutoff_mass *= grid.dx();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const Triple s = predprey::testing::rk4_kinetics(start, p, times[i], 1e-4);
        const double expected =
            lyapunov_density_phi(s.u, s.v, s.w, p) * cutoff_mass;
        if (expected > 1e-8)
            CHECK(std::fabs(energies[i] - expected) / expected < 0.01);
    }
}

TEST_CASE("E_R decreases along random homogeneous starts near coexistence") {
    ModelParams p = reference_params();
    Grid1D grid(-10.0, 10.0, 401);
    const double R = 4.0;
    const Triple coex = coexistence_state(p);
    std::mt19937 rng(99u);
    std::uniform_real_distribution<double> d(-0.2, 0.2);
    for (int trial = 0; trial < 10; ++trial) {
        Triple start{std::clamp(coex.u + d(rng), 1e-3, p.a - 1.0),
                     std::clamp(coex.v + d(rng), 1e-3, p.a - 1.0),
                     std::clamp(coex.w + d(rng), p.beta(), 1.0)};
        std::vector<double> energies;
        std::vector<Observer> obs(1);
        obs[0].period = 1.0;
        obs[0].callback = [&](const FieldState& s) {
            auto rec = lyapunov_energy(s, grid, LyapunovFunctional::phi_full, R, p);
            CHECK(rec.value >= 0.0);
            energies.push_back(rec.value);
        };
        run(homogeneous_state(grid, start), grid, p, 8.0, stable_dt(grid, p), obs);
        CAPTURE(trial);
        for (std::size_t i = 1; i < energies.size(); ++i)
            CHECK(energies[i] < energies[i - 1]);
    }
}

TEST_CASE("V-energy decreases along the single-predator subsystem") {
    ModelParams p = reference_params();
    Grid1D grid(-10.0, 10.0, 401);
    Triple start{semi_trivial_p(p) + 0.1, 0.0, semi_trivial_q(p) - 0.05};
    std::vector<double> energies;
    std::vector<Observer> obs(1);
    obs[0].period = 1.0;
    obs[0].callback = [&](const FieldState& s) {
        energies.push_back(
            lyapunov_energy(s, grid, LyapunovFunctional::v_subsystem, 4.0, p).value);
    };
    run(homogeneous_state(grid, start), grid, p, 8.0, stable_dt(grid, p), obs);
    for (std::size_t i = 1; i < energies.size(); ++i) CHECK(energies[i] < energies[i - 1]);
}

TEST_CASE("pulling_conditions: frozen oracle values for the reference family") {
    auto check = pulling_conditions(pulling_family());
    CHECK(check.cond_sign); // 1 - 2ab - h = 0.5 > 0
    CHECK(check.lhs == doctest::Approx(0.7320508075688772).epsilon(1e-9));
    CHECK(check.rhs == doctest::Approx(0.07196203714986493).epsilon(1e-9));
    CHECK(check.holds);
}

TEST_CASE("pulling_conditions: sign condition failure") {
    ModelParams p = pulling_family();
    p.b = 0.3;
    p.h = 0.5; // 1 - 2ab - h = -0.7
    auto check = pulling_conditions(p);
    CHECK(!check.cond_sign);
    CHECK(!check.holds);
}

TEST_CASE("pulling_conditions: fast-diffusing u overwhelms the margin") {
    ModelParams p = pulling_family();
    p.d1 = 4.0; // c*_u = 4
    auto check = pulling_conditions(p);
    CHECK(check.cond_sign);
    // rhs = (16-4)/(2(4-sqrt(3))), frozen from direct arithmetic
    CHECK(check.rhs == doctest::Approx(2.6455619111856357).epsilon(1e-9));
    CHECK(check.rhs > check.lhs);
    CHECK(!check.holds);
}

TEST_CASE("pulling_conditions: mu > 0 never holds") {
    ModelParams p = pulling_family();
    p.mu = 0.05;
    CHECK(!pulling_conditions(p).holds);
}

TEST_CASE("subsolution_rates at the critical layer speed") {
    ModelParams p = pulling_family();
    const double cvv = closed_form_speeds(p).c_v_2star;
    auto rates = subsolution_rates(cvv, 0.0, p);
    CHECK(rates.lambda_of_c == doctest::Approx(0.3660254037844386).epsilon(1e-9));
    CHECK(rates.r_decay == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(rates.glue_margin == doctest::Approx(0.09172736022527089).epsilon(1e-7));
    CHECK(rates.glue_margin > 0.0);
    CHECK(rates.nu == doctest::Approx(rates.c_eps / 2.0).epsilon(1e-12));

    // oracle: lambda is a root of d2 L^2 - c L + r2 (a beta - 1 - h(a-1)) = 0
    const double q = p.a * p.beta() - 1.0 - p.h * (p.a - 1.0);
    const double resid = p.d2 * rates.lambda_of_c * rates.lambda_of_c -
                         cvv * rates.lambda_of_c + p.r2 * q;
    CHECK(std::fabs(resid) < 1e-12);

    // algebraic link: lambda(c**_v, 0) * 2 d2 equals the pulling lhs
    auto check = pulling_conditions(p);
    CHECK(rates.lambda_of_c * 2.0 * p.d2 == doctest::Approx(check.lhs).epsilon(1e-14));
}

TEST_CASE("subsolution_rates domain errors") {
    ModelParams p = pulling_family();
    CHECK_THROWS_AS(subsolution_rates(0.1, 0.0, p), std::domain_error); // below 2 sqrt(...)
    ModelParams q = p;
    q.mu = 0.1;
    CHECK_THROWS_AS(subsolution_rates(1.8, 0.0, q), std::invalid_argument);
}

TEST_CASE("search_pulling_params over the d1 family") {
    ModelParams base = pulling_family();
    // per-point oracle: the criterion flips at d1* = 1.15161..., so the scan
    // over (1.0, 1.2] in steps of 0.01 keeps the first 15 members
    auto hits = search_pulling_params(base, 1.0, 1.2, 20);
    CHECK(!hits.empty());
    CHECK(hits.size() == 15);
    for (const auto& q : hits) CHECK(pulling_conditions(q).holds);
    CHECK(hits.back().d1 == doctest::Approx(1.15).epsilon(1e-12));

    ModelParams off = base;
    off.h = 0.9; // cond_sign false for every member
    CHECK(search_pulling_params(off, 1.0, 1.2, 20).empty());

    CHECK_THROWS_AS(search_pulling_params(base, 0.5, 0.9, 10), std::invalid_argument);
}

TEST_CASE("holds-boundary in d1 is localized by bisection") {
    ModelParams base = pulling_family();
    double lo = 1.01, hi = 10.0;
    REQUIRE(pulling_conditions([&] { ModelParams q = base; q.d1 = lo; return q; }()).holds);
    REQUIRE(!pulling_conditions([&] { ModelParams q = base; q.d1 = hi; return q; }()).holds);
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        ModelParams q = base;
        q.d1 = mid;
        (pulling_conditions(q).holds ? lo : hi) = mid;
    }
    CHECK(hi - lo < 1e-6);
    ModelParams ql = base, qh = base;
    ql.d1 = lo;
    qh.d1 = hi;
    CHECK(pulling_conditions(ql).holds != pulling_conditions(qh).holds);
}
