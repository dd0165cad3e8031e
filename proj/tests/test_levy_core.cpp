#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levyfield/levy.hpp"
#include "levyfield/quadrature.hpp"

using namespace levyfield;

// Closed-form partial moments of the jump laws against direct quadrature of
// the densities.
static double quad_abs_moment(const JumpLaw& law, double r, double lo, double hi) {
    return integrate_adaptive(
        [&](double x) { return std::pow(std::fabs(x), r) * law.density(x); }, lo, hi, 1e-12);
}

TEST_CASE("absolute moments match density quadrature") {
    const JumpLaw laws[] = {JumpLaw::normal_law(0.7), JumpLaw::gamma(2.5, 0.8),
                            JumpLaw::laplace(1.3), JumpLaw::pareto_law(4.0, 0.5)};
    for (const auto& law : laws) {
        for (double r : {1.0, 2.0, 3.0}) {
            const double lo = law.family == JumpFamily::normal ||
                                      law.family == JumpFamily::two_sided_exponential
                                  ? -60.0
                                  : (law.family == JumpFamily::pareto ? law.xm : 0.0);
            // heavy polynomial tails need a much deeper cutoff than e^{-x} ones;
            // integrate the far tail piecewise so the panels resolve both scales
            double full = quad_abs_moment(law, r, lo, 200.0);
            if (law.family == JumpFamily::pareto)
                for (double a = 200.0; a < 2e7; a *= 10.0)
                    full += quad_abs_moment(law, r, a, a * 10.0);
            CHECK(law.abs_moment(r) == doctest::Approx(full).epsilon(1e-7));
            const double tail = full - quad_abs_moment(law, r, std::max(lo, -1.0), 1.0);
            CHECK(law.tail_abs_moment(r) == doctest::Approx(tail).epsilon(1e-6));
            CHECK(law.small_abs_moment(r) + law.tail_abs_moment(r) ==
                  doctest::Approx(law.abs_moment(r)));
        }
    }
}

TEST_CASE("moment monotonicity and honest divergence") {
    const JumpLaw p = JumpLaw::pareto_law(3.0, 1.0);
    CHECK(p.abs_moment_finite(2.0));
    CHECK_FALSE(p.abs_moment_finite(4.0));
    CHECK(p.abs_moment(4.0) == kInfinite);

    CharacteristicQuadruplet q;
    q.nu.jump_law = JumpLaw::laplace(1.0);
    q.nu.total_intensity = 1.0;
    CHECK(check_moment_condition(q, 4.0));
    q.nu.jump_law = p;
    CHECK_FALSE(check_moment_condition(q, 4.0));
    CHECK_THROWS_AS(check_moment_condition(q, -1.0), ParameterOutOfRange);
}

TEST_CASE("functionals of a unit-jump compound Poisson basis") {
    // intensity 1, all jumps at +1, no drift, no Gaussian part
    CharacteristicQuadruplet q;
    q.nu.jump_law = JumpLaw::point({{1.0, 1.0}});
    q.nu.total_intensity = 1.0;
    CHECK(q.finite_variation());
    const MomentFunctionals m = moment_functionals(q);
    CHECK(m.mu_Lambda == doctest::Approx(0.0));       // jump at the boundary is "small"
    CHECK(m.Sigma_Lambda == doctest::Approx(1.0));
    REQUIRE(m.gamma0.has_value());
    CHECK(*m.gamma0 == doctest::Approx(-1.0));        // 0 - E[J 1_{|J|<=1}]
    REQUIRE(m.gamma_abs.has_value());
    CHECK(*m.gamma_abs == doctest::Approx(2.0));      // |-1| + E|J|
}

TEST_CASE("centered Rademacher basis") {
    CharacteristicQuadruplet q;
    q.nu.jump_law = JumpLaw::rademacher();
    q.nu.total_intensity = 1.0;
    const MomentFunctionals m = moment_functionals(q);
    CHECK(m.mu_Lambda == doctest::Approx(0.0));
    CHECK(m.Sigma_Lambda == doctest::Approx(1.0));
    CHECK(*m.gamma0 == doctest::Approx(0.0));
    CHECK(*m.gamma_abs == doctest::Approx(1.0));
}

TEST_CASE("gamma0 refuses the infinite-variation case") {
    CharacteristicQuadruplet q;
    q.sigma = 1.0;
    CHECK_THROWS_AS(require_gamma0(q), RequestUnavailable);
}

TEST_CASE("mixing law inverse moments") {
    const MixingLaw g = MixingLaw::gamma(5.0, 1.0);
    CHECK(g.inverse_moment(2) == doctest::Approx(1.0 / 12.0));
    CHECK(g.inverse_moment(3) == doctest::Approx(1.0 / 24.0));
    CHECK(MixingLaw::gamma(2.0, 1.0).inverse_moment(2) == kInfinite);
    CHECK(MixingLaw::degenerate_at(2.0).inverse_moment(2) == doctest::Approx(0.25));

    // Gauss-Laguerre expectation against the closed inverse moment
    const double e2 = g.expect_inv_weighted([](double) { return 1.0; }, 2);
    CHECK(e2 == doctest::Approx(1.0 / 12.0).epsilon(1e-10));
    // and with a smooth factor: E[lambda^{-2} e^{-lambda}] = beta^a G(a-2)/(G(a)(b+1)^{a-2})
    const double e2e = g.expect_inv_weighted([](double l) { return std::exp(-l); }, 2);
    CHECK(e2e == doctest::Approx(1.0 / (12.0 * 8.0)).epsilon(1e-10));
}

TEST_CASE("special functions sanity") {
    CHECK(gamma_p(2.0, 0.0) == 0.0);
    CHECK(gamma_p(1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK(gamma_q(1.0, 2.0) == doctest::Approx(std::exp(-2.0)));
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-6));
    CHECK(kolmogorov_survival(10.0) < 1e-12);
    CHECK(kolmogorov_survival(0.5) > 0.9);
}
