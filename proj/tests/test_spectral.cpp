#include <doctest.h>

#include <cmath>

#include "linear_well_oracle.hpp"
#include "nlspect/macrostate.hpp"
#include "nlspect/quadrature.hpp"
#include "nlspect/spectral.hpp"

using namespace nlspect;

namespace {

const PotentialSpec kWell = PotentialSpec::rect_well(-10.0, 1.6);

// Quadrature oracle for the Zakharov cue-tail norm, independent of the closed
// form. Short cue: (1/(2 sqrt 2)) int_0^{qa^2} dz / sqrt(|E| + eps z / 2).
double short_cue_quadrature(double E, double q_a, double eps) {
    return adaptive_simpson(
               [&](double z) { return 1.0 / std::sqrt(-E + 0.5 * eps * z); }, 0.0,
               q_a * q_a, 1e-13) /
           (2.0 * std::sqrt(2.0));
}

// Long cue (eps < 0): out to the turning zeta and back to zero. The square-root
// turning singularity is removed by the substitution zeta = zt - u^2.
double long_cue_quadrature(double E, double q_a, double eps) {
    const double zt = 2.0 * E / eps;  // radicand zero: |E| + eps z/2 = 0
    auto leg = [&](double z_from) {
        const double umax = std::sqrt(zt - z_from);
        return adaptive_simpson(
            [&](double u) {
                if (u <= 0.0) return 2.0 / std::sqrt(0.5 * -eps);
                const double z = zt - u * u;
                // Near the turning point the direct radicand cancels to
                // rounding noise; its analytic value 0.5 |eps| u^2 is a floor.
                const double rad =
                    std::max(-E + 0.5 * eps * z, 0.5 * -eps * u * u);
                return 2.0 * u / std::sqrt(rad);
            },
            0.0, umax, 1e-13);
    };
    return (leg(q_a * q_a) + leg(0.0)) / (2.0 * std::sqrt(2.0));
}

}  // namespace

TEST_CASE("residual vanishes at the linear oracle eigenvalue and not between") {
    const auto oracle = testoracle::linear_square_well_eigenvalues(-10.0, 1.6);
    REQUIRE(oracle.size() >= 2);
    SpectralConfig cfg;
    cfg.dt = 1e-4;
    const auto nl = Nonlinearity::linear();

    const auto at_E0 = residual(oracle[0], 0.1, nl, kWell, cfg);
    CHECK(std::abs(at_E0.r) < 1e-4);
    CHECK(at_E0.n == 0);

    const auto between = residual(0.5 * (oracle[0] + oracle[1]), 0.1, nl, kWell, cfg);
    CHECK(std::abs(between.r) > 1e-3);
}

TEST_CASE("linear spectrum by shooting matches the transcendental oracle") {
    const auto oracle = testoracle::linear_square_well_eigenvalues(-10.0, 1.6);
    SpectralConfig cfg;
    cfg.dt = 2.5e-4;
    for (double q_a : {0.1, 0.7}) {
        const auto pts = find_eigenvalues(q_a, Nonlinearity::linear(), kWell, -9.999,
                                          -1e-3, 10, cfg);
        REQUIRE(pts.size() == oracle.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            CHECK(std::abs(pts[i].E - oracle[i]) < 1e-6);
            CHECK(pts[i].n == int(i));
        }
    }
}

TEST_CASE("branch ordering: E and node counts increase together") {
    SpectralConfig cfg;
    cfg.dt = 1e-3;
    const auto pts = find_eigenvalues(0.5, Nonlinearity::zakharov(1.0), kWell, -9.999,
                                      -0.01, 10, cfg);
    REQUIRE(pts.size() >= 3);
    for (std::size_t i = 1; i < pts.size(); ++i) {
        CHECK(pts[i].E > pts[i - 1].E);
        CHECK(pts[i].n == pts[i - 1].n + 1);
    }
}

TEST_CASE("self-repulsion raises the ground state above the linear one") {
    const auto oracle = testoracle::linear_square_well_eigenvalues(-10.0, 1.6);
    SpectralConfig cfg;
    cfg.dt = 1e-3;
    const auto pts = find_eigenvalues(0.5, Nonlinearity::zakharov(1.0), kWell, -9.999,
                                      -0.01, 0, cfg);
    REQUIRE(!pts.empty());
    CHECK(pts.front().E > oracle.front());
}

TEST_CASE("self-attraction sinks the ground branch below the well bottom") {
    // Deep self-bound states live at small edge amplitude: the solution is
    // large inside the well and its edge value shrinks as E drops.
    SpectralConfig cfg;
    cfg.dt = 1e-3;
    cfg.scan_points = 1201;
    const auto pts =
        find_eigenvalues(0.05, Nonlinearity::zakharov(-1.0), kWell, -16.0, -8.55, 0, cfg);
    REQUIRE(!pts.empty());
    CHECK(pts.front().E < -10.0);
}

TEST_CASE("zakharov_cue_norm closed-form values") {
    CHECK(zakharov_cue_norm(-1.0, 1.0, 1.0, false) ==
          doctest::Approx(std::sqrt(2.0) * (std::sqrt(1.5) - 1.0)).epsilon(1e-12));
    CHECK(zakharov_cue_norm(-1.0, 1.0, 1.0, false) == doctest::Approx(0.317837).epsilon(1e-5));
    CHECK(zakharov_cue_norm(-1.0, 0.0, 1.0, false) == 0.0);
    CHECK(zakharov_cue_norm(-1.0, 1.0, -1.0, true) ==
          doctest::Approx(std::sqrt(2.0) * (1.0 + std::sqrt(0.5))).epsilon(1e-12));
    CHECK(zakharov_cue_norm(-1.0, 1.0, -1.0, true) == doctest::Approx(2.414214).epsilon(1e-5));

    CHECK_THROWS_AS(zakharov_cue_norm(-1.0, 2.0, -1.0, false), DomainError);  // radicand < 0
    CHECK_THROWS_AS(zakharov_cue_norm(-1.0, 0.5, 1.0, true), DomainError);    // long, eps > 0
    CHECK_THROWS_AS(zakharov_cue_norm(0.5, 0.5, 1.0, false), DomainError);    // E >= 0
}

TEST_CASE("closed-form cue norms agree with quadrature") {
    for (double eps : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
        for (double E : {-0.5, -1.0, -2.0}) {
            for (double q_a : {0.2, 0.6, 1.0}) {
                // Skip amplitudes at/near the turning point: the direct
                // quadrature oracle is singular there.
                if (-E + 0.5 * eps * q_a * q_a < 1e-9) continue;
                CHECK(zakharov_cue_norm(E, q_a, eps, false) ==
                      doctest::Approx(short_cue_quadrature(E, q_a, eps)).epsilon(1e-8));
                if (eps < 0.0)
                    CHECK(zakharov_cue_norm(E, q_a, eps, true) ==
                          doctest::Approx(long_cue_quadrature(E, q_a, eps)).epsilon(1e-7));
            }
        }
    }
    // eps -> 0 limit matches the linear tail.
    CHECK(zakharov_cue_norm(-1.0, 0.5, 0.0, false) ==
          doctest::Approx(short_cue_quadrature(-1.0, 0.5, 1e-9)).epsilon(1e-6));
}

TEST_CASE("pseudonorm reduces to the true norm on a bound state") {
    // Zakharov macrostate (V == 0): psi = sech(x), norm exactly 2.
    const auto nl = Nonlinearity::zakharov(-1.0);
    const double E = -0.5;
    const double a = -8.0, b = 8.0;
    const double q_a = 1.0 / std::cosh(a);
    const auto traj = integrate({q_a, *eta(q_a, E, nl), a}, E, nl,
                                PotentialSpec::zero(), b, 1e-4);
    const auto pn = pseudonorm(traj, E, nl, a, b);
    CHECK(pn.valid);
    CHECK(pn.N == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("pseudonorm of the zero trajectory is zero") {
    const auto nl = Nonlinearity::zakharov(1.0);
    const auto traj =
        integrate({0.0, 0.0, -1.6}, -1.0, nl, kWell, 1.6, 1e-3);
    const auto pn = pseudonorm(traj, -1.0, nl, -1.6, 1.6);
    CHECK(pn.N == 0.0);
    CHECK(pn.valid);
}

TEST_CASE("indetermined pseudonorm region is flagged") {
    // eps < 0: the tail radicand goes negative for zeta > 2|E|/|eps|.
    const auto nl = Nonlinearity::zakharov(-1.0);
    const auto tail = cue_tail_norm(4.0, -0.5, nl);  // zeta_end = 4 > 1
    CHECK_FALSE(tail.valid);
}

TEST_CASE("delta-well eigenvalue correction") {
    CHECK(delta_well_E(1.0, 0.0, Nonlinearity::linear(), 0.7) == doctest::Approx(-0.5));
    CHECK(delta_well_E(2.0, 1.0, Nonlinearity::zakharov(1.0), 1.0) ==
          doctest::Approx(-1.5));
    CHECK(delta_well_E(1.0, -1.0, Nonlinearity::zakharov(-1.0), 1.0) ==
          doctest::Approx(-1.0));
}

TEST_CASE("delta-well norm-1 closed form and the existence bound") {
    CHECK(*delta_well_norm1(1.0, 0.0) == doctest::Approx(-0.5));
    CHECK(*delta_well_norm1(1.0, 1.0) == doctest::Approx(-0.125));
    CHECK_FALSE(delta_well_norm1(1.0, 2.5).has_value());
    // Delta barrier with strong self-attraction: the long-cue branch.
    CHECK(*delta_well_norm1(-1.0, -5.0) == doctest::Approx(-1.125));
    CHECK_FALSE(delta_well_norm1(-1.0, -3.0).has_value());
}

TEST_CASE("delta-well norm identity closes at the norm-1 eigenvalue") {
    // N(psi) = (4/(eps sqrt2)) [sqrt(-E + eps q0^2/2) - sqrt(-E)] with
    // q0^2 = (2E + Omega^2)/eps must give exactly 1 at the closed-form E.
    for (auto [Omega, eps] : {std::pair{1.0, 1.0}, {1.0, 0.5}, {2.0, 1.5}, {1.0, -1.0}}) {
        const double E = *delta_well_norm1(Omega, eps);
        const double q0sq = (2.0 * E + Omega * Omega) / eps;
        const double N = 4.0 / (eps * std::sqrt(2.0)) *
                         (std::sqrt(-E + 0.5 * eps * q0sq) - std::sqrt(-E));
        CHECK(N == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("isonorm spectrum is norm-independent in the linear case") {
    const auto oracle = testoracle::linear_square_well_eigenvalues(-10.0, 1.6);
    SpectralConfig cfg;
    cfg.dt = 1e-3;
    cfg.scan_points = 801;
    // Small q_a values: interior amplification makes branch pseudonorms large
    // (N ~ 50 q_a^2 on the ground branch), so the N = 0.5..1 crossings sit
    // below q_a = 0.3.
    const std::vector<double> grid = {0.05, 0.1, 0.15, 0.2, 0.3, 0.45, 0.6};
    for (double N_target : {0.5, 1.0}) {
        const auto pts = isonorm_eigenvalues(N_target, Nonlinearity::linear(), kWell,
                                             grid, -9.999, -0.05, 1, cfg);
        REQUIRE(pts.size() >= 2);
        for (const auto& p : pts)
            CHECK(std::abs(p.E - oracle[std::size_t(p.n)]) < 1e-6);
    }
}

TEST_CASE("small-norm nonlinear states approach the linear spectrum") {
    const auto oracle = testoracle::linear_square_well_eigenvalues(-10.0, 1.6);
    SpectralConfig cfg;
    cfg.dt = 1e-3;
    // The E shift goes as ~20 q_a^2 on the ground branch (the amplitude is
    // amplified inside the well), so q_a must be well below 0.01 here.
    const auto pts = find_eigenvalues(0.005, Nonlinearity::zakharov(1.0), kWell, -9.999,
                                      -0.05, 1, cfg);
    REQUIRE(pts.size() >= 2);
    CHECK(std::abs(pts[0].E - oracle[0]) < 1e-3);
    CHECK(std::abs(pts[1].E - oracle[1]) < 1e-3);
}

TEST_CASE("nonlinear branches depend on q_a") {
    SpectralConfig cfg;
    cfg.dt = 1e-3;
    const auto lo = find_eigenvalues(0.2, Nonlinearity::zakharov(1.0), kWell, -9.999,
                                     -0.05, 0, cfg);
    const auto hi = find_eigenvalues(1.0, Nonlinearity::zakharov(1.0), kWell, -9.999,
                                     -0.05, 0, cfg);
    REQUIRE(!lo.empty());
    REQUIRE(!hi.empty());
    CHECK(std::abs(lo.front().E - hi.front().E) > 1e-3);
}

TEST_CASE("residual rejects an undefined starting cue") {
    // eps < 0 and E too shallow for this amplitude: radicand < 0 at q_a.
    CHECK_THROWS_AS(residual(-0.5, 2.0, Nonlinearity::zakharov(-1.0), kWell),
                    CueUndefined);
}
