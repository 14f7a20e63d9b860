#include <doctest.h>

#include <cmath>

#include "nlspect/model.hpp"

using namespace nlspect;

TEST_CASE("built-in nonlinearities: F is the antiderivative of f") {
    // Central differences of F against f on a log-spaced grid.
    const double eps = -0.7;
    for (const auto& nl : {Nonlinearity::linear(), Nonlinearity::zakharov(1.0),
                           Nonlinearity::zakharov(eps), Nonlinearity::logarithmic(eps)}) {
        for (int k = 0; k <= 90; ++k) {
            const double zeta = std::pow(10.0, -6.0 + 9.0 * k / 90.0);
            const double h = 1e-4 * zeta;
            const double dF = (nl.F(zeta + h) - nl.F(zeta - h)) / (2.0 * h);
            const double f = nl.f(zeta);
            CHECK(std::abs(dF - f) <= 1e-6 * std::max(1.0, std::abs(f)));
        }
        CHECK(nl.F(0.0) == 0.0);
    }
}

TEST_CASE("F_over_zeta values and limits") {
    auto zak = Nonlinearity::zakharov(1.0);
    CHECK(zak.F_over_zeta(4.0).value == doctest::Approx(2.0));
    CHECK(zak.F_over_zeta(0.0).value == 0.0);
    CHECK_FALSE(zak.F_over_zeta(0.0).divergent);

    auto log = Nonlinearity::logarithmic(-1.0);
    CHECK(log.F_over_zeta(1.0).value == doctest::Approx(-1.0));
    CHECK(log.F_over_zeta(0.0).divergent);
}

TEST_CASE("potential evaluation") {
    const auto bump = PotentialSpec::bump(-0.75, 2.0, 0.5);
    CHECK(bump(2.0) == doctest::Approx(-0.75));
    CHECK(PotentialSpec::bump(2.0, 0.001, 0.5)(0.6) == 0.0);

    const auto well = PotentialSpec::rect_well(-10.0, 1.6);
    CHECK(well(1.0) == -10.0);
    CHECK(well(1.7) == 0.0);
    CHECK(well(-1.6) == -10.0);

    CHECK_THROWS_AS(PotentialSpec::delta_well(1.0)(0.5), DeltaNotSamplable);
}

TEST_CASE("bump and sum potentials are continuous across piece boundaries") {
    const auto sum = PotentialSpec::sum(
        {Bump{-0.5, -2.0, 0.5}, Bump{1.25, 0.3, 0.7}, Bump{-0.5, 2.0, 0.5}});
    double prev = sum(-4.0);
    for (int i = 1; i <= 8000; ++i) {
        const double x = -4.0 + 8.0 * i / 8000.0;
        const double v = sum(x);
        CHECK(std::abs(v - prev) < 5e-3);  // fine grid, C1 pieces
        prev = v;
    }
}

TEST_CASE("support is tight and evaluation vanishes outside it") {
    const auto sum = PotentialSpec::sum({Bump{1.0, -3.0, 0.5}, Bump{2.0, 4.0, 1.0}});
    auto [a, b] = sum.support();
    CHECK(a == doctest::Approx(-3.5));
    CHECK(b == doctest::Approx(5.0));
    CHECK(sum(-3.6) == 0.0);
    CHECK(sum(5.1) == 0.0);
}

TEST_CASE("regularized delta carries the delta integral") {
    const auto reg = PotentialSpec::regularized_delta(1.0, 0.01);
    const auto* b = std::get_if<Bump>(&reg.rep());
    REQUIRE(b != nullptr);
    CHECK(b->integral() == doctest::Approx(-1.0));
}

TEST_CASE("JSON round trip") {
    for (const auto& spec :
         {PotentialSpec::zero(), PotentialSpec::rect_well(-10.0, 1.6),
          PotentialSpec::delta_well(2.0), PotentialSpec::bump(1.0, 0.5, 0.25),
          PotentialSpec::sum({Bump{1.0, -2.0, 0.5}, Bump{-1.0, 2.0, 0.5}})}) {
        nlohmann::json j;
        to_json(j, spec);
        const auto back = potential_from_json(j);
        nlohmann::json j2;
        to_json(j2, back);
        CHECK(j == j2);
        CHECK(back.support() == spec.support());
    }
    for (const auto& nl : {Nonlinearity::linear(), Nonlinearity::zakharov(0.5),
                           Nonlinearity::logarithmic(-2.0)}) {
        nlohmann::json j;
        to_json(j, nl);
        const auto back = nonlinearity_from_json(j);
        CHECK(back.kind() == nl.kind());
        CHECK(back.epsilon() == nl.epsilon());
    }
}

TEST_CASE("custom nonlinearity uses the supplied pair") {
    const auto nl = Nonlinearity::custom(
        2.0, [](double z) { return 3.0 * z * z; }, [](double z) { return z * z * z; });
    CHECK(nl.f(2.0) == doctest::Approx(12.0));
    CHECK(nl.F(2.0) == doctest::Approx(8.0));
    CHECK(nl.F_over_zeta(2.0).value == doctest::Approx(4.0));
}
