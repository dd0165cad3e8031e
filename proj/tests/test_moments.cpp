#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "levyfield/moments.hpp"

using namespace levyfield;

namespace {

CharacteristicQuadruplet centered_basis(MixingLaw pi) {
    CharacteristicQuadruplet q;
    q.nu.jump_law = JumpLaw::rademacher();
    q.nu.total_intensity = 1.0;  // Sigma_Lambda = 1, mu_Lambda = 0
    q.pi = std::move(pi);
    return q;
}

} // namespace

TEST_CASE("means") {
    const auto k = KernelModel::mstou(1.0, 1);
    CHECK(mmaf_mean(k, centered_basis(MixingLaw::gamma(5.0, 1.0))) == 0.0);

    // drift-only basis with mu_Lambda = 1
    CharacteristicQuadruplet drift;
    drift.gamma = 1.0;
    drift.pi = MixingLaw::degenerate_at(1.0);
    CHECK(mmaf_mean(k, drift) == doctest::Approx(2.0));
    drift.pi = MixingLaw::gamma(5.0, 1.0);
    CHECK(mmaf_mean(k, drift) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));

    CharacteristicQuadruplet heavy;
    heavy.nu.jump_law = JumpLaw::pareto_law(0.8, 1.0);  // E|J| = inf
    heavy.nu.total_intensity = 1.0;
    CHECK_THROWS_AS(mmaf_mean(k, heavy), MomentUnavailable);
}

TEST_CASE("variance and covariance closed forms, one spatial dimension") {
    const auto k = KernelModel::mstou(1.0, 1);
    CHECK(mmaf_cov(k, centered_basis(MixingLaw::degenerate_at(1.0)), Point::of({0.0, 0.0})) ==
          doctest::Approx(0.5).epsilon(1e-10));
    const auto q = centered_basis(MixingLaw::gamma(5.0, 1.0));
    CHECK(mmaf_cov(k, q, Point::of({0.0, 0.0})) == doctest::Approx(1.0 / 24.0).epsilon(1e-10));
    // frozen oracle values for off-origin lags
    CHECK(mmaf_cov(k, q, Point::of({1.0, 0.0})) == doctest::Approx(1.0 / 192.0).epsilon(1e-9));
    CHECK(mmaf_cov(k, q, Point::of({2.0, 1.0})) == doctest::Approx(1.0 / 648.0).epsilon(1e-9));
    CHECK(mmaf_cov(k, q, Point::of({1.0, 3.0})) == doctest::Approx(1.0 / 1536.0).epsilon(1e-9));
    // symmetry in the lag
    CHECK(mmaf_cov(k, q, Point::of({-2.0, -1.0})) ==
          doctest::Approx(mmaf_cov(k, q, Point::of({2.0, 1.0}))));
}

TEST_CASE("two spatial dimensions via the lens cross-section") {
    const auto k = KernelModel::mstou(1.0, 2);
    const auto q = centered_basis(MixingLaw::gamma(6.0, 1.0));
    // Var = pi c^2 E[lambda^{-3}] / 4 = pi/240
    CHECK(mmaf_cov(k, q, Point::of({0.0, 0.0, 0.0})) ==
          doctest::Approx(M_PI / 240.0).epsilon(1e-7));
    CHECK(mmaf_cov(k, q, Point::of({1.0, 0.0, 0.0})) ==
          doctest::Approx(0.0016362160).epsilon(1e-6));
    CHECK(mmaf_cov(k, q, Point::of({1.0, 2.0, 0.0})) ==
          doctest::Approx(0.0006828429).epsilon(1e-6));
}

TEST_CASE("geometric moving average covariances") {
    const auto k = KernelModel::geometric();
    CharacteristicQuadruplet q;  // Bernoulli(1/2) noise: variance 1/4
    q.nu.jump_law = JumpLaw::point({{1.0, 1.0}});
    q.nu.total_intensity = 0.25;
    for (int h = 0; h <= 5; ++h)
        CHECK(mmaf_cov(k, q, Point::of({double(h)})) ==
              doctest::Approx(std::pow(2.0, -h) / 12.0));
}

TEST_CASE("closed forms agree with quadrature across the parameter grid") {
    // variance against the generic truncated-mass quadrature path
    for (double alpha : {4.0, 6.0, 8.0, 10.0}) {
        for (double beta : {0.5, 1.0, 2.0}) {
            for (double c : {0.5, 1.0, 2.0}) {
                const auto k = KernelModel::mstou(c, 1);
                const auto q = centered_basis(MixingLaw::gamma(alpha, beta));
                const double closed = mmaf_cov(k, q, Point::of({0.0, 0.0}));
                const double viaJ = mstou_truncated_mass(k, q.pi, 2.0, 0.0, false);
                CHECK(closed == doctest::Approx(viaJ).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("covariance tables") {
    const auto k = KernelModel::mstou(1.0, 1);
    const auto q = centered_basis(MixingLaw::gamma(5.0, 1.0));
    const auto t = covariance_table(k, q, 2, 3);
    CHECK(t.entries.size() == 49);
    CHECK(t.var() == doctest::Approx(1.0 / 24.0));
    // |Cov| <= Var and decreasing along the time axis
    double prev = t.var();
    for (int kt = 1; kt <= 3; ++kt) {
        const double v = mmaf_cov(k, q, Point::of({double(kt), 0.0}));
        CHECK(v <= prev);
        CHECK(std::fabs(v) <= t.var());
        prev = v;
    }
    std::ostringstream csv;
    t.write_csv(csv);
    CHECK(csv.str().find("lag0,lag1,cov,tail_flag") == 0);
}

TEST_CASE("long-run variance with certificate") {
    // geometric series: Sigma = 1/12 + 2 sum_{h>=1} 2^{-h}/12 = 1/4
    const auto k = KernelModel::geometric();
    CharacteristicQuadruplet q;
    q.nu.jump_law = JumpLaw::point({{1.0, 1.0}});
    q.nu.total_intensity = 0.25;
    const auto table = covariance_table(k, q, 1, 30);
    auto shell = [](int j) { return 2.0 * std::pow(2.0, -j) / 12.0; };
    const auto lr = long_run_variance(table, shell);
    CHECK(lr.sigma == doctest::Approx(0.25).epsilon(1e-8));
    CHECK(lr.tail_bound < 1e-8);

    // Gamma-mixed model on the plane lattice; frozen brute-force reference
    const auto km = KernelModel::mstou(1.0, 1);
    const auto qm = centered_basis(MixingLaw::gamma(8.0, 1.0));
    const auto tm = covariance_table(km, qm, 2, 40);
    const auto lrm = long_run_variance(tm, mstou_gamma_shell_bound(km, qm), 1e-8);
    CHECK(lrm.sigma == doctest::Approx(0.0137699708).epsilon(2e-4));
    const auto qm9 = centered_basis(MixingLaw::gamma(9.0, 1.0));
    const auto tm9 = covariance_table(km, qm9, 2, 40);
    CHECK(long_run_variance(tm9, mstou_gamma_shell_bound(km, qm9), 1e-8).sigma ==
          doctest::Approx(0.0095709846).epsilon(2e-4));
}

TEST_CASE("non-summable covariances are rejected") {
    const auto k = KernelModel::mstou(1.0, 1);
    const auto q = centered_basis(MixingLaw::gamma(3.5, 1.0));
    CHECK_THROWS_AS(mstou_gamma_shell_bound(k, q), NotSummable);
}

TEST_CASE("ambit moments") {
    AmbitModel a;
    a.l = KernelModel::mstou(1.0, 1);
    a.quad = centered_basis(MixingLaw::gamma(5.0, 1.0));

    SUBCASE("constant volatility reduces to the plain covariance") {
        for (auto lag : {Point::of({0.0, 0.0}), Point::of({1.0, 0.0}), Point::of({2.0, 2.0})}) {
            const auto r = ambit_cov(a, lag);
            CHECK(r.value == doctest::Approx(mmaf_cov(a.l, a.quad, lag)));
            CHECK(r.residual_bound == 0.0);
        }
        CHECK(ambit_mean(a) == 0.0);
    }

    SUBCASE("centered driving basis kills the rho term") {
        a.vol_kind = VolatilityKind::p_dependent;
        a.vol_mean = 1.0;
        a.vol_var = 0.5;
        const auto r = ambit_cov(a, Point::of({0.0, 0.0}));
        // E[sigma^2] = 1.5 scales the overlap term; mu_Lambda = 0 so no rho part
        CHECK(r.value == doctest::Approx(1.5 / 24.0));
    }

    SUBCASE("uncentered basis with cell volatility") {
        a.quad.gamma = 1.0;  // mu_Lambda = 1
        a.vol_kind = VolatilityKind::p_dependent;
        a.vol_mean = 1.0;
        a.vol_var = 0.5;
        QuadratureEngine eng;
        eng.tensor_nodes = 12;
        const auto r0 = ambit_cov(a, Point::of({0.0, 0.0}), eng);
        CHECK(r0.value > 1.5 / 24.0);  // rho term adds positive mass at lag 0
        // far beyond the volatility correlation length the rho term vanishes
        const auto rfar = ambit_cov(a, Point::of({40.0, 0.0}), eng);
        CHECK(std::fabs(rfar.value - mmaf_cov(a.l, a.quad, Point::of({40.0, 0.0})) * 1.5) <
              1e-6 + r0.residual_bound);
    }

    SUBCASE("mmaf volatility mean") {
        a.vol_kind = VolatilityKind::mmaf;
        a.j = KernelModel::mstou(1.0, 1);
        a.quad_sigma.gamma = 1.0;
        a.quad_sigma.pi = MixingLaw::gamma(6.0, 1.0);
        a.quad.gamma = 0.5;  // mu_Lambda = 0.5 now
        // E[sigma] = 2 E[lambda^{-2}] = 1/10 for Gamma(6,1)
        CHECK(a.sigma_mean() == doctest::Approx(0.1).epsilon(1e-10));
        CHECK(ambit_mean(a) == doctest::Approx(0.5 * 0.1 * (1.0 / 6.0)).epsilon(1e-8));
    }
}
