#pragma once

// Monte Carlo harness for the limit-theorem experiments: standardized partial
// sums, sample autocovariances and higher sample moments across replications,
// plus Kolmogorov-Smirnov and Jarque-Bera normality testing of the
// standardized values.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "simulate.hpp"
#include "special.hpp"

namespace levyfield {

struct NormalityResult {
    double ks_stat = 0.0, ks_p = 0.0;
    double jb_stat = 0.0, jb_p = 0.0;
};

inline NormalityResult normality_tests(std::vector<double> values) {
    if (values.size() < 100) throw TooFewValues("normality tests need at least 100 values");
    const size_t n = values.size();
    std::sort(values.begin(), values.end());
    double d = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double F = normal_cdf(values[i]);
        d = std::max(d, (i + 1.0) / n - F);
        d = std::max(d, F - i / double(n));
    }
    NormalityResult r;
    r.ks_stat = d;
    const double rn = std::sqrt(double(n));
    r.ks_p = kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d);

    double m1 = 0.0;
    for (double v : values) m1 += v;
    m1 /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : values) {
        const double c = v - m1;
        m2 += c * c;
        m3 += c * c * c;
        m4 += c * c * c * c;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 <= 0.0) {
        r.jb_stat = kInfinite;
        r.jb_p = 0.0;
        return r;
    }
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    r.jb_stat = n / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));
    r.jb_p = chi2_survival_2(r.jb_stat);
    return r;
}

namespace detail {

inline double int_pow(double x, int p) {
    double r = x;
    for (int i = 1; i < p; ++i) r *= x;
    return r;
}

} // namespace detail

// |E_n|^{-1/2} sum (X_u^p - mu_p) per replication, standardized by sqrt(sigma2)
// when positive (analytic long-run variance of the pth-power field); when
// sigma2 <= 0 the cross-replication empirical variance is used and flagged.
struct StandardizedStat {
    std::vector<double> values;
    bool empirical_standardization = false;
};

inline StandardizedStat pth_moment_stat(const std::vector<LatticeSample>& samples, int p,
                                        double mu_p, double sigma2) {
    if (p < 1) throw ParameterOutOfRange("moment order must be a positive integer");
    StandardizedStat out;
    out.values.reserve(samples.size());
    for (const auto& s : samples) {
        double acc = 0.0;
        for (double v : s.values) acc += detail::int_pow(v, p) - mu_p;
        out.values.push_back(acc / std::sqrt(double(s.values.size())));
    }
    if (sigma2 > 0.0) {
        const double sd = std::sqrt(sigma2);
        for (double& v : out.values) v /= sd;
    } else {
        out.empirical_standardization = true;
        double m = 0.0;
        for (double v : out.values) m += v;
        m /= out.values.size();
        double var = 0.0;
        for (double v : out.values) var += (v - m) * (v - m);
        var /= (out.values.size() - 1);
        if (var <= 0.0) throw VarianceUnavailable("degenerate cross-replication variance");
        const double sd = std::sqrt(var);
        for (double& v : out.values) v /= sd;
    }
    return out;
}

inline StandardizedStat sample_mean_stat(const std::vector<LatticeSample>& samples,
                                         double mean, double sigma2) {
    if (sigma2 <= 0.0) throw VarianceUnavailable("long-run variance must be positive");
    return pth_moment_stat(samples, 1, mean, sigma2);
}

// Same statistics for plain sequences (the discrete benchmark processes).
inline StandardizedStat sequence_pth_moment_stat(const std::vector<std::vector<double>>& reps,
                                                 int p, double mu_p, double sigma2) {
    std::vector<LatticeSample> wrapped;
    wrapped.reserve(reps.size());
    for (const auto& r : reps) {
        LatticeSample s;
        s.window.n = static_cast<int>(r.size());
        s.window.m = 1;
        s.values = r;
        wrapped.push_back(std::move(s));
    }
    return pth_moment_stat(wrapped, p, mu_p, sigma2);
}

inline StandardizedStat sequence_mean_stat(const std::vector<std::vector<double>>& reps,
                                           double mean, double sigma2) {
    if (sigma2 <= 0.0) throw VarianceUnavailable("long-run variance must be positive");
    return sequence_pth_moment_stat(reps, 1, mean, sigma2);
}

// ---------------------------------------------------------------------------
// Sample autocovariances.

// Empirical autocovariance of a (2-D lattice) sample at an integer lag,
// computed on the reduced window E_{n-k} with the supplied (analytic or
// pre-estimated) mean.
inline double empirical_autocov(const LatticeSample& s, int kt, int kx, double mean) {
    const int n = s.window.n;
    const int nt = n - std::abs(kt), nx = n - std::abs(kx);
    if (nt <= 0 || nx <= 0) throw ParameterOutOfRange("lag exceeds window size");
    const int ot = std::max(0, -kt), ox = std::max(0, -kx);
    double acc = 0.0;
    for (int t = 0; t < nt; ++t)
        for (int x = 0; x < nx; ++x)
            acc += (s.at(t + ot, x + ox) - mean) * (s.at(t + ot + kt, x + ox + kx) - mean);
    return acc / (static_cast<double>(nt) * nx);
}

inline double sequence_autocov(const std::vector<double>& x, int k, double mean) {
    const int n = static_cast<int>(x.size()) - k;
    if (n <= 0) throw ParameterOutOfRange("lag exceeds sequence length");
    double acc = 0.0;
    for (int t = 0; t < n; ++t) acc += (x[t] - mean) * (x[t + k] - mean);
    return acc / n;
}

// Per replication and lag: |E_{n-k}|^{1/2} (R_hat(k) - R(k)), standardized
// marginally by the cross-replication standard deviation of each lag.
struct AutocovStat {
    std::vector<std::vector<double>> values;  // [lag][rep]
    std::vector<double> empirical_R;          // mean of R_hat per lag
};

inline AutocovStat sample_autocov_stat(const std::vector<LatticeSample>& samples,
                                       const std::vector<std::pair<int, int>>& lags,
                                       const std::vector<double>& R, double mean) {
    if (lags.size() != R.size()) throw ParameterOutOfRange("one target R per lag required");
    AutocovStat out;
    out.values.assign(lags.size(), {});
    out.empirical_R.assign(lags.size(), 0.0);
    for (size_t li = 0; li < lags.size(); ++li) {
        auto [kt, kx] = lags[li];
        const int n = samples.front().window.n;
        const double cells = static_cast<double>(n - std::abs(kt)) * (n - std::abs(kx));
        for (const auto& s : samples) {
            const double rh = empirical_autocov(s, kt, kx, mean);
            out.empirical_R[li] += rh / samples.size();
            out.values[li].push_back(std::sqrt(cells) * (rh - R[li]));
        }
        // marginal standardization across replications
        double m = 0.0;
        for (double v : out.values[li]) m += v;
        m /= out.values[li].size();
        double var = 0.0;
        for (double v : out.values[li]) var += (v - m) * (v - m);
        var /= (out.values[li].size() - 1);
        if (var <= 0.0) throw VarianceUnavailable("degenerate autocovariance statistic");
        for (double& v : out.values[li]) v /= std::sqrt(var);
    }
    return out;
}

inline AutocovStat sequence_autocov_stat(const std::vector<std::vector<double>>& reps,
                                         const std::vector<int>& lags,
                                         const std::vector<double>& R, double mean) {
    if (lags.size() != R.size()) throw ParameterOutOfRange("one target R per lag required");
    AutocovStat out;
    out.values.assign(lags.size(), {});
    out.empirical_R.assign(lags.size(), 0.0);
    for (size_t li = 0; li < lags.size(); ++li) {
        const int k = lags[li];
        for (const auto& x : reps) {
            const double rh = sequence_autocov(x, k, mean);
            out.empirical_R[li] += rh / reps.size();
            out.values[li].push_back(std::sqrt(double(x.size() - k)) * (rh - R[li]));
        }
        double m = 0.0;
        for (double v : out.values[li]) m += v;
        m /= out.values[li].size();
        double var = 0.0;
        for (double v : out.values[li]) var += (v - m) * (v - m);
        var /= (out.values[li].size() - 1);
        if (var <= 0.0) throw VarianceUnavailable("degenerate autocovariance statistic");
        for (double& v : out.values[li]) v /= std::sqrt(var);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Experiment report.

struct ExperimentReport {
    std::string model_hash;
    std::string statistic;
    int window_n = 0;
    int replications = 0;
    double sigma_target = 0.0;
    bool empirical_standardization = false;
    NormalityResult normality;
    std::string clt_verdict;  // pass/fail note from the admissibility check
    std::vector<double> standardized_values;
    double level = 0.01;
    bool ks_pass = false, jb_pass = false;

    void finalize() {
        normality = normality_tests(standardized_values);
        ks_pass = normality.ks_p > level;
        jb_pass = normality.jb_p > level;
    }
};

} // namespace levyfield
