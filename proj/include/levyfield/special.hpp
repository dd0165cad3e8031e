#pragma once

// Small special-function kit: regularized incomplete gamma, normal CDF,
// Kolmogorov distribution tail. Implementations follow the classic
// series/continued-fraction split (Lentz's method for the CF part).

#include <cmath>
#include <limits>
#include <stdexcept>

namespace levyfield {

namespace detail {

inline double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

inline double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace detail

// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_contfrac(a, x);
}

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::domain_error("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// P(sup|B| > lambda) for the Kolmogorov distribution (asymptotic KS tail).
inline double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::min(1.0, std::max(0.0, 2.0 * sum));
}

// Survival function of chi-square with 2 degrees of freedom (Jarque-Bera).
inline double chi2_survival_2(double x) {
    return x <= 0.0 ? 1.0 : std::exp(-0.5 * x);
}

} // namespace levyfield
