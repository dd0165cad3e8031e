#pragma once

// Quadrature rules used throughout: Gauss-Legendre and generalized
// Gauss-Laguerre nodes via the Golub-Welsch eigenvalue method (Eigen's
// symmetric tridiagonal solver), plus adaptive and semi-infinite helpers.

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace levyfield {

struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline QuadRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                             double mu0) {
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        J(i, i) = diag(i);
        if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = offdiag(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    QuadRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        r.weights[i] = mu0 * v0 * v0;
    }
    return r;
}

} // namespace detail

// n-point Gauss-Legendre rule on [-1, 1]; cached per n.
inline const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n), e(n - 1 > 0 ? n - 1 : 0);
    for (int k = 1; k < n; ++k) e(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    return cache.emplace(n, detail::golub_welsch(d, e, 2.0)).first->second;
}

// n-point generalized Gauss-Laguerre rule for weight x^a e^{-x} on (0, inf).
inline const QuadRule& gauss_laguerre(int n, double a) {
    static std::map<std::pair<int, long long>, QuadRule> cache;
    static std::mutex mtx;
    if (a <= -1.0) throw ParameterOutOfRange("gauss_laguerre: parameter must exceed -1");
    const auto key = std::make_pair(n, static_cast<long long>(a * 1e12));
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    Eigen::VectorXd d(n), e(n - 1 > 0 ? n - 1 : 0);
    for (int k = 0; k < n; ++k) {
        d(k) = 2.0 * k + a + 1.0;
        if (k + 1 < n) e(k) = std::sqrt((k + 1.0) * (k + 1.0 + a));
    }
    return cache.emplace(key, detail::golub_welsch(d, e, std::tgamma(a + 1.0))).first->second;
}

// Fixed-order Gauss-Legendre integral of f over [a, b].
template <typename F>
double integrate_gl(F&& f, double a, double b, int n = 32) {
    const QuadRule& r = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
    return s * half;
}

// Adaptive bisection on top of a 16/32-point pair; absolute-or-relative tol.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-10, int depth = 0) {
    const double coarse = integrate_gl(f, a, b, 16);
    const double fine = integrate_gl(f, a, b, 32);
    if (std::fabs(fine - coarse) <= tol * std::max(1.0, std::fabs(fine)) || depth > 24)
        return fine;
    const double mid = 0.5 * (a + b);
    return integrate_adaptive(f, a, mid, tol / 1.4, depth + 1) +
           integrate_adaptive(f, mid, b, tol / 1.4, depth + 1);
}

// Integral of f over [a, inf): panels of geometrically growing width,
// stopping when a panel contributes less than tol relative to the total.
template <typename F>
double integrate_semi_infinite(F&& f, double a, double first_width, double tol = 1e-12,
                               int n = 32) {
    double total = 0.0, left = a, width = first_width;
    for (int p = 0; p < 120; ++p) {
        const double piece = integrate_gl(f, left, left + width, n);
        total += piece;
        left += width;
        width *= 2.0;
        if (p > 2 && std::fabs(piece) <= tol * std::max(std::fabs(total), 1e-300)) break;
    }
    return total;
}

// Expectation E[g(lambda)] against a Gamma(alpha, beta) density using
// generalized Gauss-Laguerre. sing_order k means g(lambda) = lambda^{-k} *
// g_reg(lambda) with g_reg smooth; the singular factor is folded into the
// weight (requires alpha > k).
template <typename F>
double gamma_expectation(F&& g_reg, double alpha, double beta, int sing_order, int n = 48) {
    if (alpha <= sing_order)
        throw ParameterOutOfRange("gamma_expectation: alpha must exceed the singularity order");
    const double a = alpha - sing_order - 1.0;
    const QuadRule& r = gauss_laguerre(n, a);
    // E[lambda^{-k} g_reg] = beta^k / Gamma(alpha) * int g_reg(x/beta) x^{a} e^{-x} dx
    double s = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * g_reg(r.nodes[i] / beta);
    return std::exp(sing_order * std::log(beta) - std::lgamma(alpha)) * s;
}

} // namespace levyfield
