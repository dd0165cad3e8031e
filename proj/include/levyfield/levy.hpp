#pragma once

// Lévy bases via characteristic quadruplets (gamma, Sigma, nu, pi), scalar
// case. Jump laws expose the partial moments needed by the moment and
// weak-dependence formulas; closed forms are cross-checked against adaptive
// quadrature in the tests.

#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "special.hpp"

namespace levyfield {

constexpr double kInfinite = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Jump laws

enum class JumpFamily {
    none,                   // nu = 0
    point_masses,           // sum of p_i * delta_{x_i}
    normal,                 // N(0, sd^2)
    gamma_law,              // Gamma(shape, scale), positive jumps
    two_sided_exponential,  // density e^{-|x|/scale} / (2 scale)
    pareto,                 // density a xm^a x^{-a-1} on (xm, inf)
};

struct JumpLaw {
    JumpFamily family = JumpFamily::none;
    std::vector<std::pair<double, double>> masses;  // (x_i, p_i), point_masses
    double sd = 1.0;                                // normal
    double shape = 1.0, scale = 1.0;                // gamma_law / two_sided_exponential
    double tail_index = 2.0, xm = 1.0;              // pareto

    static JumpLaw none() { return {}; }
    static JumpLaw point(std::vector<std::pair<double, double>> m) {
        JumpLaw l;
        l.family = JumpFamily::point_masses;
        l.masses = std::move(m);
        return l;
    }
    static JumpLaw rademacher() { return point({{-1.0, 0.5}, {1.0, 0.5}}); }
    static JumpLaw normal_law(double sd) {
        JumpLaw l;
        l.family = JumpFamily::normal;
        l.sd = sd;
        return l;
    }
    static JumpLaw gamma(double shape, double scale) {
        JumpLaw l;
        l.family = JumpFamily::gamma_law;
        l.shape = shape;
        l.scale = scale;
        return l;
    }
    static JumpLaw laplace(double scale) {
        JumpLaw l;
        l.family = JumpFamily::two_sided_exponential;
        l.scale = scale;
        return l;
    }
    static JumpLaw pareto_law(double tail_index, double xm) {
        JumpLaw l;
        l.family = JumpFamily::pareto;
        l.tail_index = tail_index;
        l.xm = xm;
        return l;
    }

    bool abs_moment_finite(double r) const {
        return family != JumpFamily::pareto || r < tail_index;
    }

    // E|J|^r (full absolute moment); +inf when divergent.
    double abs_moment(double r) const {
        switch (family) {
            case JumpFamily::none:
                return 0.0;
            case JumpFamily::point_masses: {
                double s = 0.0;
                for (auto& [x, p] : masses) s += p * std::pow(std::fabs(x), r);
                return s;
            }
            case JumpFamily::normal:
                return std::pow(sd, r) * std::pow(2.0, r / 2.0) *
                       std::tgamma((r + 1.0) / 2.0) / std::sqrt(M_PI);
            case JumpFamily::gamma_law:
                return std::exp(std::lgamma(shape + r) - std::lgamma(shape)) *
                       std::pow(scale, r);
            case JumpFamily::two_sided_exponential:
                return std::tgamma(r + 1.0) * std::pow(scale, r);
            case JumpFamily::pareto:
                if (r >= tail_index) return kInfinite;
                return tail_index * std::pow(xm, r) / (tail_index - r);
        }
        return 0.0;
    }

    // E[|J|^r 1_{|J| > 1}]; +inf when divergent.
    double tail_abs_moment(double r) const {
        switch (family) {
            case JumpFamily::none:
                return 0.0;
            case JumpFamily::point_masses: {
                double s = 0.0;
                for (auto& [x, p] : masses)
                    if (std::fabs(x) > 1.0) s += p * std::pow(std::fabs(x), r);
                return s;
            }
            case JumpFamily::normal:
                return abs_moment(r) * gamma_q((r + 1.0) / 2.0, 1.0 / (2.0 * sd * sd));
            case JumpFamily::gamma_law:
                return std::exp(std::lgamma(shape + r) - std::lgamma(shape)) *
                       std::pow(scale, r) * gamma_q(shape + r, 1.0 / scale);
            case JumpFamily::two_sided_exponential:
                return std::tgamma(r + 1.0) * std::pow(scale, r) * gamma_q(r + 1.0, 1.0 / scale);
            case JumpFamily::pareto: {
                if (r >= tail_index) return kInfinite;
                const double lo = std::max(1.0, xm);
                return tail_index * std::pow(xm, tail_index) * std::pow(lo, r - tail_index) /
                       (tail_index - r);
            }
        }
        return 0.0;
    }

    // E[|J|^r 1_{|J| <= 1}] (boundary inclusive).
    double small_abs_moment(double r) const {
        if (family == JumpFamily::point_masses) {
            double s = 0.0;
            for (auto& [x, p] : masses)
                if (std::fabs(x) <= 1.0) s += p * std::pow(std::fabs(x), r);
            return s;
        }
        const double full = abs_moment(r);
        if (!std::isfinite(full)) return full;  // pareto heavy tail: small part still finite
        return full - tail_abs_moment(r);
    }

    // E[J 1_{|J| > 1}] (signed).
    double tail_signed_mean() const {
        switch (family) {
            case JumpFamily::none:
                return 0.0;
            case JumpFamily::point_masses: {
                double s = 0.0;
                for (auto& [x, p] : masses)
                    if (std::fabs(x) > 1.0) s += p * x;
                return s;
            }
            case JumpFamily::normal:
            case JumpFamily::two_sided_exponential:
                return 0.0;  // symmetric
            case JumpFamily::gamma_law:
            case JumpFamily::pareto:
                return tail_abs_moment(1.0);  // positive support
        }
        return 0.0;
    }

    // E[J 1_{|J| <= 1}] (signed, boundary inclusive).
    double small_signed_mean() const {
        switch (family) {
            case JumpFamily::none:
                return 0.0;
            case JumpFamily::point_masses: {
                double s = 0.0;
                for (auto& [x, p] : masses)
                    if (std::fabs(x) <= 1.0) s += p * x;
                return s;
            }
            case JumpFamily::normal:
            case JumpFamily::two_sided_exponential:
                return 0.0;
            case JumpFamily::gamma_law:
                return shape * scale * gamma_p(shape + 1.0, 1.0 / scale);
            case JumpFamily::pareto: {
                if (xm >= 1.0) return 0.0;
                // int_xm^1 x * a xm^a x^{-a-1} dx
                if (tail_index == 1.0) return xm * std::log(1.0 / xm);
                return tail_index * std::pow(xm, tail_index) *
                       (1.0 - std::pow(xm, 1.0 - tail_index)) / (1.0 - tail_index);
            }
        }
        return 0.0;
    }

    // Density of the continuous laws (0 for point masses); used by the
    // quadrature cross-checks in the tests.
    double density(double x) const {
        switch (family) {
            case JumpFamily::normal:
                return std::exp(-x * x / (2.0 * sd * sd)) / (sd * std::sqrt(2.0 * M_PI));
            case JumpFamily::gamma_law:
                if (x <= 0.0) return 0.0;
                return std::exp((shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) -
                                shape * std::log(scale));
            case JumpFamily::two_sided_exponential:
                return std::exp(-std::fabs(x) / scale) / (2.0 * scale);
            case JumpFamily::pareto:
                if (x <= xm) return 0.0;
                return tail_index * std::pow(xm, tail_index) * std::pow(x, -tail_index - 1.0);
            default:
                return 0.0;
        }
    }
};

// ---------------------------------------------------------------------------
// Lévy measure: jump law scaled by an intensity (rate per unit (pi x leb)
// volume -- a convention recorded in the project notes, not from any source).

enum class LevyMeasureKind { finite_activity, truncated_infinite_activity };

struct LevyMeasure {
    LevyMeasureKind kind = LevyMeasureKind::finite_activity;
    JumpLaw jump_law;
    double total_intensity = 0.0;
    double truncation_epsilon = 0.0;  // 0 for finite activity

    // m_nu(r) = int |x|^r nu(dx)
    double abs_moment(double r) const { return total_intensity * jump_law.abs_moment(r); }
    double tail_abs_moment(double r) const {
        return total_intensity * jump_law.tail_abs_moment(r);
    }
    double small_abs_moment(double r) const {
        return total_intensity * jump_law.small_abs_moment(r);
    }
    double tail_signed_mean() const { return total_intensity * jump_law.tail_signed_mean(); }
    double small_signed_mean() const { return total_intensity * jump_law.small_signed_mean(); }
    bool abs_moment_finite(double r) const {
        return total_intensity == 0.0 || jump_law.abs_moment_finite(r);
    }
};

// ---------------------------------------------------------------------------
// Mixing law for the parameter A (the mean-reversion rate for MSTOU models).

enum class MixingKind { degenerate, finite_discrete, gamma_density };

struct MixingLaw {
    MixingKind kind = MixingKind::degenerate;
    double lambda0 = 1.0;                             // degenerate
    std::vector<std::pair<double, double>> atoms;     // (lambda_i, p_i)
    double alpha = 2.0, beta = 1.0;                   // Gamma density

    static MixingLaw degenerate_at(double l0) {
        MixingLaw m;
        m.kind = MixingKind::degenerate;
        m.lambda0 = l0;
        return m;
    }
    static MixingLaw discrete(std::vector<std::pair<double, double>> a) {
        MixingLaw m;
        m.kind = MixingKind::finite_discrete;
        m.atoms = std::move(a);
        return m;
    }
    static MixingLaw gamma(double alpha, double beta) {
        if (alpha <= 0.0 || beta <= 0.0)
            throw ParameterOutOfRange("MixingLaw::gamma: alpha, beta must be positive");
        MixingLaw m;
        m.kind = MixingKind::gamma_density;
        m.alpha = alpha;
        m.beta = beta;
        return m;
    }

    // E[lambda^{-k} g_reg(lambda)] where g_reg stays smooth at 0.
    template <typename F>
    double expect_inv_weighted(F&& g_reg, int sing_order, int n = 48) const {
        switch (kind) {
            case MixingKind::degenerate:
                return g_reg(lambda0) * std::pow(lambda0, -sing_order);
            case MixingKind::finite_discrete: {
                double s = 0.0;
                for (auto& [l, p] : atoms) s += p * g_reg(l) * std::pow(l, -sing_order);
                return s;
            }
            case MixingKind::gamma_density:
                return gamma_expectation(g_reg, alpha, beta, sing_order, n);
        }
        return 0.0;
    }

    template <typename F>
    double expect(F&& g, int n = 48) const {
        return expect_inv_weighted(std::forward<F>(g), 0, n);
    }

    // Closed-form E[lambda^{-k}]; +inf when it diverges (Gamma, alpha <= k).
    double inverse_moment(int k) const {
        switch (kind) {
            case MixingKind::degenerate:
                return std::pow(lambda0, -k);
            case MixingKind::finite_discrete: {
                double s = 0.0;
                for (auto& [l, p] : atoms) s += p * std::pow(l, -k);
                return s;
            }
            case MixingKind::gamma_density: {
                if (alpha <= k) return kInfinite;
                double r = std::pow(beta, k);
                for (int j = 1; j <= k; ++j) r /= (alpha - j);
                return r;
            }
        }
        return 0.0;
    }
};

// ---------------------------------------------------------------------------
// Characteristic quadruplet and moment functionals.

struct CharacteristicQuadruplet {
    double gamma = 0.0;
    double sigma = 0.0;  // Gaussian variance, >= 0
    LevyMeasure nu;
    MixingLaw pi;

    bool finite_variation() const {
        return sigma == 0.0 && std::isfinite(nu.small_abs_moment(1.0));
    }
};

struct MomentFunctionals {
    double mu_Lambda = 0.0;               // gamma + int_{|x|>1} x nu(dx)
    double Sigma_Lambda = 0.0;            // sigma + int x^2 nu(dx)
    double Sigma_Lambda_small = 0.0;      // sigma + int_{|x|<=1} x^2 nu(dx)
    double big_jump_abs_mean = 0.0;       // int_{|x|>1} |x| nu(dx)
    std::optional<double> gamma0;         // finite-variation drift
    std::optional<double> gamma_abs;      // |gamma0| + int |x| nu(dx)
};

inline MomentFunctionals moment_functionals(const CharacteristicQuadruplet& q) {
    MomentFunctionals m;
    m.mu_Lambda = q.gamma + q.nu.tail_signed_mean();
    m.Sigma_Lambda = q.sigma + q.nu.abs_moment(2.0);
    m.Sigma_Lambda_small = q.sigma + q.nu.small_abs_moment(2.0);
    m.big_jump_abs_mean = q.nu.tail_abs_moment(1.0);
    if (q.finite_variation()) {
        m.gamma0 = q.gamma - q.nu.small_signed_mean();
        const double a1 = q.nu.abs_moment(1.0);
        if (std::isfinite(a1)) m.gamma_abs = std::fabs(*m.gamma0) + a1;
    }
    return m;
}

inline double require_gamma0(const CharacteristicQuadruplet& q) {
    if (!q.finite_variation())
        throw RequestUnavailable("gamma0 requires the finite-variation case");
    return q.gamma - q.nu.small_signed_mean();
}

// true iff int_{|x|>1} |x|^r nu(dx) < inf.
inline bool check_moment_condition(const CharacteristicQuadruplet& q, double r) {
    if (r <= 0.0) throw ParameterOutOfRange("check_moment_condition: r must be positive");
    return q.nu.abs_moment_finite(r);
}

} // namespace levyfield
