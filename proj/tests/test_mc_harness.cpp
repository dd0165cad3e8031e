#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "levyfield/mc.hpp"
#include "levyfield/rng.hpp"

using namespace levyfield;

namespace {

std::vector<double> normal_draws(size_t n, std::uint64_t seed) {
    RandomStream rs(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rs.normal();
    return v;
}

LatticeSample iid_normal_sample(int n, std::uint64_t seed, int rep) {
    RandomStream rs = RandomStream(seed).child(rep);
    LatticeSample s;
    s.window.n = n;
    s.window.m = 2;
    s.values.resize(static_cast<size_t>(n) * n);
    for (auto& v : s.values) v = rs.normal();
    return s;
}

} // namespace

TEST_CASE("normality tests accept genuine normals") {
    const auto r = normality_tests(normal_draws(100000, 12345));
    CHECK(r.ks_p > 0.01);
    CHECK(r.jb_p > 0.01);
    CHECK(r.ks_stat < 0.01);
}

TEST_CASE("normality tests reject what they should") {
    // constant sample: KS distance is exactly 1/2, JB degenerates
    const auto c = normality_tests(std::vector<double>(500, 0.0));
    CHECK(c.ks_stat == doctest::Approx(0.5));
    CHECK(c.jb_p == 0.0);

    // a two-point distribution has kurtosis 1, far from 3
    std::vector<double> b(2000);
    RandomStream rs(7);
    for (auto& v : b) v = rs.uniform() < 0.5 ? -1.0 : 1.0;
    const auto r = normality_tests(b);
    CHECK(r.jb_p < 0.01);
    CHECK(r.ks_p < 0.01);

    CHECK_THROWS_AS(normality_tests(std::vector<double>(99, 0.0)), TooFewValues);
}

TEST_CASE("standardized partial sums of iid normals are standard normal") {
    std::vector<LatticeSample> samples;
    for (int r = 0; r < 500; ++r) samples.push_back(iid_normal_sample(8, 11, r));
    const auto st = sample_mean_stat(samples, 0.0, 1.0);
    CHECK_FALSE(st.empirical_standardization);
    const auto nr = normality_tests(st.values);
    CHECK(nr.ks_p > 0.01);
    CHECK(nr.jb_p > 0.01);
}

TEST_CASE("first moment statistic is the mean statistic, bitwise") {
    std::vector<LatticeSample> samples;
    for (int r = 0; r < 120; ++r) samples.push_back(iid_normal_sample(6, 3, r));
    const auto a = pth_moment_stat(samples, 1, 0.0, 1.0);
    const auto b = sample_mean_stat(samples, 0.0, 1.0);
    REQUIRE(a.values.size() == b.values.size());
    for (size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);

    // missing analytic variance falls back to the flagged empirical one
    const auto e = pth_moment_stat(samples, 2, 1.0, 0.0);
    CHECK(e.empirical_standardization);
    CHECK_THROWS_AS(sample_mean_stat(samples, 0.0, 0.0), VarianceUnavailable);
}

TEST_CASE("empirical autocovariances by hand") {
    LatticeSample s;
    s.window.n = 2;
    s.window.m = 2;
    s.values = {1.0, 2.0, 3.0, 4.0};
    CHECK(empirical_autocov(s, 0, 0, 0.0) == doctest::Approx(7.5));
    CHECK(empirical_autocov(s, 1, 0, 0.0) == doctest::Approx(5.5));
    CHECK(empirical_autocov(s, 0, 1, 0.0) == doctest::Approx(7.0));
    CHECK(empirical_autocov(s, -1, 0, 0.0) == doctest::Approx(5.5));
    CHECK_THROWS_AS(empirical_autocov(s, 2, 0, 0.0), ParameterOutOfRange);

    const std::vector<double> x{1.0, 2.0, 3.0};
    CHECK(sequence_autocov(x, 1, 2.0) == doctest::Approx(0.0));
    CHECK(sequence_autocov(x, 0, 2.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("autocovariance statistics are centered and standardized") {
    std::vector<LatticeSample> samples;
    for (int r = 0; r < 400; ++r) samples.push_back(iid_normal_sample(12, 21, r));
    const std::vector<std::pair<int, int>> lags{{0, 0}, {1, 0}, {0, 1}};
    const std::vector<double> R{1.0, 0.0, 0.0};
    const auto st = sample_autocov_stat(samples, lags, R, 0.0);
    REQUIRE(st.values.size() == 3);
    CHECK(st.empirical_R[0] == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::fabs(st.empirical_R[1]) < 0.01);
    for (const auto& lag_vals : st.values) {
        double m = 0.0, v = 0.0;
        for (double x : lag_vals) m += x;
        m /= lag_vals.size();
        for (double x : lag_vals) v += (x - m) * (x - m);
        v /= (lag_vals.size() - 1);
        CHECK(v == doctest::Approx(1.0).epsilon(1e-9));  // standardized marginally
        const auto nr = normality_tests(lag_vals);
        CHECK(nr.ks_p > 0.005);
    }
}

TEST_CASE("sequence statistics match the lattice wrappers") {
    std::vector<std::vector<double>> reps;
    RandomStream rs(5);
    for (int r = 0; r < 150; ++r) {
        std::vector<double> x(200);
        for (auto& v : x) v = rs.normal();
        reps.push_back(std::move(x));
    }
    const auto st = sequence_mean_stat(reps, 0.0, 1.0);
    CHECK(st.values.size() == 150);
    const auto nr = normality_tests(st.values);
    CHECK(nr.ks_p > 0.005);

    const auto ac = sequence_autocov_stat(reps, {0, 1}, {1.0, 0.0}, 0.0);
    CHECK(ac.empirical_R[0] == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("experiment report finalization") {
    ExperimentReport rep;
    rep.statistic = "mean";
    rep.level = 0.01;
    rep.standardized_values = normal_draws(2000, 99);
    rep.finalize();
    CHECK(rep.ks_pass);
    CHECK(rep.jb_pass);
    rep.standardized_values.assign(2000, 1.0);
    rep.finalize();
    CHECK_FALSE(rep.jb_pass);
}
