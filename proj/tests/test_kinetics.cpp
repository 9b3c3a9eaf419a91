#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "predprey/kinetics.hpp"
#include "predprey/params.hpp"
#include "support/random_params.hpp"

using namespace predprey;

namespace {
ModelParams reference_params() {
    ModelParams p;
    p.a = 2.0;
    p.b = 0.2;
    p.h = 0.5;
    p.k = 0.5;
    p.d1 = p.d2 = p.d3 = 1.0;
    p.r1 = p.r2 = p.r3 = 1.0;
    p.mu = 0.0;
    return p;
}
} // namespace

TEST_CASE("validate_params reports each admissibility condition") {
    ModelParams p = reference_params();
    auto rep = validate_params(p);
    CHECK(rep.pass);
    CHECK(rep.beta == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(rep.kappa == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(!rep.speed_order_warning);

    SUBCASE("b at or above its cap fails") {
        p.b = 0.6; // cap is 1/(2(a-1)) = 0.5
        auto r = validate_params(p);
        CHECK(!r.pass);
    }
    SUBCASE("mu above its cap fails") {
        p.mu = 0.6; // cap is (a-1)/2 = 0.5
        auto r = validate_params(p);
        CHECK(!r.pass);
    }
    SUBCASE("d1 r1 < d2 r2 warns without failing") {
        p.d1 = 0.5;
        auto r = validate_params(p);
        CHECK(r.pass);
        CHECK(r.speed_order_warning);
    }
}

TEST_CASE("reaction_rates vanishes at the trivial equilibria") {
    ModelParams p = reference_params();
    auto z = reaction_rates(0.0, 0.0, 0.0, p);
    CHECK(z.du == 0.0);
    CHECK(z.dv == 0.0);
    CHECK(z.dw == 0.0);
    auto pf = reaction_rates(0.0, 0.0, 1.0, p);
    CHECK(pf.du == 0.0);
    CHECK(pf.dv == 0.0);
    CHECK(pf.dw == 0.0);
}

TEST_CASE("reaction_rates rejects corrupted state") {
    ModelParams p = reference_params();
    CHECK_THROWS_AS(reaction_rates(std::nan(""), 0.0, 1.0, p), numerical_error);
    CHECK_THROWS_AS(reaction_rates(0.0, 1.0 / 0.0, 1.0, p), numerical_error);
}

TEST_CASE("coexistence state of the reference family") {
    // 10/23 and 19/23, frozen from the closed form and checked by
    // substitution into the kinetics
    ModelParams p = reference_params();
    auto set = steady_states(p);
    REQUIRE(set.coexistence.has_value());
    const Triple c = *set.coexistence;
    CHECK(c.u == doctest::Approx(10.0 / 23.0).epsilon(1e-12));
    CHECK(c.v == doctest::Approx(10.0 / 23.0).epsilon(1e-12));
    CHECK(c.w == doctest::Approx(19.0 / 23.0).epsilon(1e-12));
    CHECK(kinetic_residual(c, p) < 1e-6);
}

TEST_CASE("semi-trivial states of the a=2, b=0.2 family") {
    ModelParams p = reference_params();
    auto set = steady_states(p);
    REQUIRE(set.semi_trivial_u.has_value());
    REQUIRE(set.semi_trivial_v.has_value());
    CHECK(set.semi_trivial_u->u == doctest::Approx(5.0 / 7.0).epsilon(1e-12));
    CHECK(set.semi_trivial_u->w == doctest::Approx(6.0 / 7.0).epsilon(1e-12));
    // the predator-absent equations balance exactly at (0, p~, q~)
    CHECK(kinetic_residual(*set.semi_trivial_v, p) < 1e-12);
    CHECK(kinetic_residual(*set.semi_trivial_u, p) < 1e-12);
}

TEST_CASE("h = k forces a symmetric coexistence state") {
    ModelParams p = reference_params();
    p.h = p.k = 0.33;
    auto set = steady_states(p);
    REQUIRE(set.coexistence.has_value());
    CHECK(set.coexistence->u == set.coexistence->v);
}

TEST_CASE("mu > 0 suppresses the equilibrium branch") {
    ModelParams p = reference_params();
    p.mu = 0.25;
    auto set = steady_states(p);
    CHECK(!set.semi_trivial_u.has_value());
    CHECK(!set.semi_trivial_v.has_value());
    CHECK(!set.coexistence.has_value());
    CHECK(!set.note.empty());
    CHECK_THROWS_AS(linear_instability_report(p), numerical_error);
}

TEST_CASE("invasion growth rates at the semi-trivial states") {
    ModelParams p = reference_params();
    auto rep = linear_instability_report(p);
    // r1 (a-1)(1-k)/(1+ab) = 5/14; oracle: F evaluated at (0, p~, q~)
    CHECK(rep.u_growth_at_v_state == doctest::Approx(5.0 / 14.0).epsilon(1e-12));
    CHECK(rep.v_growth_at_u_state == doctest::Approx(5.0 / 14.0).epsilon(1e-12));
    const double pt = semi_trivial_p(p);
    const double qt = semi_trivial_q(p);
    CHECK(rep.u_growth_at_v_state ==
          doctest::Approx(reaction_f(0.0, pt, qt, p)).epsilon(1e-14));

    SUBCASE("factor (1-k) sends the rate to zero as k -> 1") {
        p.k = 0.999999;
        auto r = linear_instability_report(p);
        CHECK(r.u_growth_at_v_state > 0.0);
        CHECK(r.u_growth_at_v_state < 1e-5);
    }
}

TEST_CASE("equilibria, positivity and symmetry over random admissible draws") {
    std::mt19937 rng(20240817u);
    for (int trial = 0; trial < 1000; ++trial) {
        ModelParams p = predprey::testing::random_valid_params(rng, 0);
        CAPTURE(trial);
        REQUIRE(validate_params(p).pass);
        CHECK(p.beta() > 0.0);
        CHECK(p.kappa() > 0.0);

        auto set = steady_states(p);
        REQUIRE(set.coexistence.has_value());
        CHECK(kinetic_residual(set.trivial, p) < 1e-12);
        CHECK(kinetic_residual(set.predator_free, p) < 1e-12);
        CHECK(kinetic_residual(*set.semi_trivial_u, p) < 1e-12);
        CHECK(kinetic_residual(*set.semi_trivial_v, p) < 1e-12);
        CHECK(kinetic_residual(*set.coexistence, p) < 1e-12);

        CHECK(set.semi_trivial_u->u > 0.0);
        CHECK(set.semi_trivial_u->w > 0.0);
        CHECK(set.coexistence->u > 0.0);
        CHECK(set.coexistence->v > 0.0);
        CHECK(set.coexistence->w > 0.0);

        // role swap maps the states onto each other exactly
        auto swapped = steady_states(swapped_roles(p));
        CHECK(swapped.semi_trivial_u->u == set.semi_trivial_v->v);
        CHECK(swapped.semi_trivial_u->w == set.semi_trivial_v->w);
        CHECK(swapped.coexistence->u == set.coexistence->v);
        CHECK(swapped.coexistence->v == set.coexistence->u);
        CHECK(swapped.coexistence->w == set.coexistence->w);

        auto inst = linear_instability_report(p);
        CHECK(inst.u_growth_at_v_state > 0.0);
        CHECK(inst.v_growth_at_u_state > 0.0);
    }
}
