#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levyfield/geometry.hpp"
#include "levyfield/kernels.hpp"

using namespace levyfield;

TEST_CASE("lexicographic order is time-first") {
    const Point a = Point::of({1.0, 5.0});
    const Point b = Point::of({2.0, -3.0});
    CHECK(lex_less(a, b));
    CHECK_FALSE(lex_less(b, a));
    const Point c = Point::of({1.0, 6.0});
    CHECK(lex_less(a, c));
    CHECK(in_V(c, a));
    CHECK(in_V(a, a));  // V_t contains t itself
    CHECK(in_V_h(c, Point::of({1.0, 2.0}), 3.0));
    CHECK_FALSE(in_V_h(c, Point::of({1.0, 4.0}), 3.0));
}

TEST_CASE("cone membership and the cone constant") {
    const auto a0 = SphereOfInfluence::cone(1.0, 1);
    const Point t = Point::of({0.0, 0.0});
    CHECK(a0.contains(t, Point::of({-2.0, 1.5})));
    CHECK_FALSE(a0.contains(t, Point::of({-1.0, 1.5})));
    CHECK_FALSE(a0.contains(t, Point::of({0.5, 0.0})));
    CHECK(cone_constant_b(a0) == doctest::Approx(-1.0 / std::sqrt(2.0)));
    CHECK(cone_constant_b(SphereOfInfluence::cone(2.0, 1)) ==
          doctest::Approx(-1.0 / std::sqrt(5.0)));

    SphereOfInfluence half;
    half.shape = InfluenceShape::lex_halfspace;
    CHECK_THROWS_AS(cone_constant_b(half), ConditionViolated);
}

TEST_CASE("truncation radius conventions") {
    const auto a0 = SphereOfInfluence::cone(1.0, 1);
    CHECK(psi(a0, 4.0) == doctest::Approx(2.0));                     // h/(sqrt(2) sqrt(2))
    CHECK(psi(a0, 4.0, PsiKind::ambit) == doctest::Approx(1.0));    // half of the above
    CHECK(psi(a0, 0.0) == 0.0);

    // c > 1 only admits the outer bound psi/c, and says so
    const auto wide = SphereOfInfluence::cone(2.0, 1);
    const double p = psi(wide, 4.0);
    const auto d = truncated_cone_domain(wide, p);
    CHECK(d.u_min == doctest::Approx(p / 2.0));
    CHECK(d.outer_bound);
    const auto tight = truncated_cone_domain(a0, 1.0);
    CHECK(tight.u_min == doctest::Approx(1.0));
    CHECK_FALSE(tight.outer_bound);
}

TEST_CASE("sampling window sizes") {
    SamplingWindow w{5, 2};
    CHECK(w.size() == 25);
    CHECK(w.boundary_size() == 25 - 9);
    SamplingWindow w1{4, 1};
    CHECK(w1.boundary_size() == 2);
    SamplingWindow tiny{2, 3};
    CHECK(tiny.boundary_size() == 8);  // everything is boundary
}

TEST_CASE("kernel L^p norms") {
    // cone-exponential, degenerate mixing at 1: ||f||_2^2 = c/2
    const auto k = KernelModel::mstou(1.0, 1);
    const auto pi1 = MixingLaw::degenerate_at(1.0);
    CHECK(lp_norm(k, 2.0, pi1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
    // Gamma(5,1): ||f||_1 = 2 E[lambda^{-2}] = 1/6
    const auto g = MixingLaw::gamma(5.0, 1.0);
    CHECK(lp_norm(k, 1.0, g) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
    // geometric moving average: ||f||_2 = sqrt(1/3)
    CHECK(lp_norm(KernelModel::geometric(), 2.0, pi1) ==
          doctest::Approx(std::sqrt(1.0 / 3.0)));
}

TEST_CASE("truncated cone masses, closed vs numeric") {
    const auto k = KernelModel::mstou(1.0, 1);
    const auto g = MixingLaw::gamma(5.0, 1.0);
    // frozen reference: J_2 at truncation depth 1 equals 1/216
    CHECK(mstou_truncated_mass(k, g, 2.0, 1.0) == doctest::Approx(1.0 / 216.0).epsilon(1e-10));
    for (double umin : {0.0, 0.5, 2.0}) {
        for (double p : {1.0, 2.0}) {
            const double closed = mstou_truncated_mass(k, g, p, umin, true);
            const double numeric = mstou_truncated_mass(k, g, p, umin, false);
            CHECK(closed == doctest::Approx(numeric).epsilon(1e-9));
        }
    }
    // two spatial dimensions as well
    const auto k2 = KernelModel::mstou(0.8, 2);
    const auto g2 = MixingLaw::gamma(6.0, 1.5);
    for (double umin : {0.0, 1.0}) {
        const double closed = mstou_truncated_mass(k2, g2, 2.0, umin, true);
        const double numeric = mstou_truncated_mass(k2, g2, 2.0, umin, false);
        CHECK(closed == doctest::Approx(numeric).epsilon(1e-8));
    }
    // well-definedness gate
    CHECK_THROWS_AS(mstou_truncated_mass(k2, MixingLaw::gamma(2.5, 1.0), 2.0, 0.0),
                    ParameterOutOfRange);
}

TEST_CASE("kernel evaluation respects supports") {
    const auto k = KernelModel::mstou(1.0, 1);
    CHECK(evaluate(k, 2.0, Point::of({-1.0, 0.5})) == doctest::Approx(std::exp(-2.0)));
    CHECK(evaluate(k, 2.0, Point::of({-1.0, 1.5})) == 0.0);
    CHECK(evaluate(k, 2.0, Point::of({0.5, 0.0})) == 0.0);

    const auto geo = KernelModel::geometric();
    CHECK(evaluate(geo, 0.0, Point::of({3.0})) == doctest::Approx(1.0 / 16.0));
    CHECK(evaluate(geo, 0.0, Point::of({-1.0})) == 0.0);
    CHECK(evaluate(geo, 0.0, Point::of({2.5})) == 0.0);
}

TEST_CASE("exp-bounded envelope check") {
    auto ok = KernelModel::exp_bounded_kernel(
        1.0, 1.0, [](const Point& p) { return std::exp(-std::fabs(p[0])); });
    CHECK_NOTHROW(ok.check_envelope());
    auto bad = KernelModel::exp_bounded_kernel(
        1.0, 2.0, [](const Point& p) { return std::exp(-0.5 * std::fabs(p[0])); });
    CHECK_THROWS_AS(bad.check_envelope(), ValidationError);
}

TEST_CASE("ball volumes") {
    CHECK(ball_volume(1, 2.0) == doctest::Approx(4.0));
    CHECK(ball_volume(2, 1.0) == doctest::Approx(M_PI));
    CHECK(ball_volume(3, 1.0) == doctest::Approx(4.0 * M_PI / 3.0));
}
