#include <doctest.h>

#include <random>
#include <stdexcept>

#include "kslab/model.hpp"
#include "test_helpers.hpp"

using namespace kslab;

TEST_CASE("parameter validation names the offending field")
{
    ModelParams p = testing::table1_params();
    CHECK(validate_analysis(p).empty());

    p.a1 = 1.0;
    auto v = validate_analysis(p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "a1");
    CHECK(v[0].message == "a1 must be < 1 for positive equilibrium");
    CHECK(validate_simulation(p).empty());   // solver-side constraints unaffected

    p = testing::table1_params();
    p.d2 = -0.1;
    v = validate_simulation(p);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "d2");
}

TEST_CASE("equilibrium closed form")
{
    ModelParams p;
    p.a1 = p.a2 = 0.0;
    p.lambda = 1.0;
    Equilibrium eq = compute_equilibrium(p);
    CHECK(eq.u == 1.0);
    CHECK(eq.v == 1.0);
    CHECK(eq.w == 2.0);

    p.a1 = p.a2 = 0.5;
    p.lambda = 0.5;
    eq = compute_equilibrium(p);
    CHECK(eq.u == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(eq.v == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(eq.w == doctest::Approx(8.0 / 3.0).epsilon(1e-15));

    p.a1 = 0.5;
    p.a2 = 0.25;
    p.lambda = 1.0;
    eq = compute_equilibrium(p);
    CHECK(eq.u == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
    CHECK(eq.v == doctest::Approx(6.0 / 7.0).epsilon(1e-15));
    CHECK(eq.w == doctest::Approx(10.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("equilibrium rejects invalid competition strengths")
{
    ModelParams p = testing::table1_params();
    p.a1 = 1.0;
    CHECK_THROWS_AS(compute_equilibrium(p), std::invalid_argument);
    p.a1 = 1.5;
    CHECK_THROWS_AS(compute_equilibrium(p), std::invalid_argument);
    p.a1 = -0.1;
    CHECK_THROWS_AS(compute_equilibrium(p), std::invalid_argument);
}

TEST_CASE("equilibrium residuals vanish and symmetry holds")
{
    std::mt19937 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const ModelParams p = testing::random_params(rng);
        const Equilibrium eq = compute_equilibrium(p);
        CHECK(eq.u > 0.0);
        CHECK(eq.v > 0.0);
        CHECK(eq.w > 0.0);
        CHECK(std::fabs(1.0 - eq.u - p.a1 * eq.v) <= 1e-12);
        CHECK(std::fabs(1.0 - p.a2 * eq.u - eq.v) <= 1e-12);
        CHECK(std::fabs(p.lambda * eq.w - (eq.u + eq.v)) <= 1e-12 * (1.0 + eq.u + eq.v));
    }
    // a1 = a2 forces u_bar = v_bar exactly
    for (int trial = 0; trial < 50; ++trial) {
        ModelParams p = testing::random_params(rng);
        p.a2 = p.a1;
        const Equilibrium eq = compute_equilibrium(p);
        CHECK(eq.u == eq.v);
    }
}
