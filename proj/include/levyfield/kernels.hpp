#pragma once

// Concrete kernel models: the MSTOU exponential kernel on light cones,
// exponentially bounded (CARMA-type) kernels given as (M, K, evaluator),
// the geometric moving-average sequence kernel, and tabulated kernels with
// multilinear interpolation.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "levy.hpp"
#include "quadrature.hpp"

namespace levyfield {

enum class KernelKind { mstou_exp, exp_bounded, geometric_ma, tabulated };

struct TabulatedGrid {
    int dim = 1;
    std::array<double, 4> origin{};  // coordinate of node (0, ..., 0)
    std::array<double, 4> step{};
    std::array<int, 4> shape{};
    std::vector<double> values;  // row-major

    double at(const std::array<int, 4>& idx) const {
        int flat = 0;
        for (int d = 0; d < dim; ++d) flat = flat * shape[d] + idx[d];
        return values[flat];
    }
};

struct KernelModel {
    KernelKind kind = KernelKind::mstou_exp;
    SphereOfInfluence support;              // mstou_exp
    double M = 1.0, K = 1.0;                // exp_bounded envelope ||f(t)||^2 <= M e^{-K||t||}
    std::function<double(const Point&)> evaluator;  // exp_bounded
    double ratio = 0.5;                     // geometric_ma
    TabulatedGrid grid;                     // tabulated

    static KernelModel mstou(double c, int m_space) {
        KernelModel k;
        k.kind = KernelKind::mstou_exp;
        k.support = SphereOfInfluence::cone(c, m_space);
        return k;
    }
    static KernelModel exp_bounded_kernel(double M, double K,
                                          std::function<double(const Point&)> f) {
        KernelModel k;
        k.kind = KernelKind::exp_bounded;
        k.M = M;
        k.K = K;
        k.evaluator = std::move(f);
        return k;
    }
    static KernelModel geometric() {
        KernelModel k;
        k.kind = KernelKind::geometric_ma;
        return k;
    }
    static KernelModel tabulated(TabulatedGrid g) {
        KernelModel k;
        k.kind = KernelKind::tabulated;
        k.grid = std::move(g);
        return k;
    }

    // Verify the exponential envelope on a sample of points.
    void check_envelope() const {
        if (kind != KernelKind::exp_bounded) return;
        for (double t = 0.0; t <= 40.0; t += 0.37) {
            Point p = Point::of({t});
            const double v = evaluator(p);
            if (v * v > M * std::exp(-K * t) * (1.0 + 1e-9))
                throw ValidationError("exp-bounded kernel violates its (M, K) envelope");
        }
    }
};

// f(A, s): kernel value at relative position s (a point of A_0's ambient
// space) for mixing value A. Exactly 0 outside the support.
inline double evaluate(const KernelModel& k, double A, const Point& s) {
    switch (k.kind) {
        case KernelKind::mstou_exp: {
            Point origin;
            origin.dim = s.dim;
            if (!k.support.contains(origin, s)) return 0.0;
            return std::exp(A * s[0]);  // s[0] = -(time lag) <= 0 inside the cone
        }
        case KernelKind::exp_bounded:
            return k.evaluator(s);
        case KernelKind::geometric_ma: {
            const double j = s[0];
            if (j < 0.0 || j != std::floor(j)) return 0.0;
            return std::pow(k.ratio, j + 1.0);
        }
        case KernelKind::tabulated: {
            const auto& g = k.grid;
            std::array<double, 4> f{};
            std::array<int, 4> i0{};
            for (int d = 0; d < g.dim; ++d) {
                const double u = (s[d] - g.origin[d]) / g.step[d];
                if (u < 0.0 || u > g.shape[d] - 1) return 0.0;
                i0[d] = std::min(static_cast<int>(u), g.shape[d] - 2);
                if (g.shape[d] == 1) i0[d] = 0;
                f[d] = u - i0[d];
            }
            // multilinear interpolation over the 2^dim cell corners
            double acc = 0.0;
            const int corners = 1 << g.dim;
            for (int cbits = 0; cbits < corners; ++cbits) {
                double w = 1.0;
                std::array<int, 4> idx = i0;
                for (int d = 0; d < g.dim; ++d) {
                    const bool hi = (cbits >> d) & 1;
                    if (g.shape[d] == 1) {
                        if (hi) w = 0.0;
                        continue;
                    }
                    w *= hi ? f[d] : 1.0 - f[d];
                    idx[d] = i0[d] + (hi ? 1 : 0);
                }
                if (w != 0.0) acc += w * g.at(idx);
            }
            return acc;
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Cone-profile integrals for the MSTOU kernel. Everything reduces to
//   J_p(psi') = E_pi[ int_{psi'}^inf V_m(c) u^m e^{-p lambda u} du ],
// computed either by generic quadrature or by the Gamma-function closed form.

// Fixed lambda, numeric u-integral (generic path).
inline double mstou_profile_quad(double lambda, double p, int m_space, double c,
                                 double u_min) {
    const double vm = ball_volume(m_space, c);
    const double a = p * lambda;
    auto f = [&](double u) { return vm * std::pow(u, m_space) * std::exp(-a * u); };
    return integrate_semi_infinite(f, u_min, std::max(1.0 / a, u_min * 0.25 + 1e-12));
}

// Fixed lambda, closed form: V_m(c) e^{-a psi} m!/a^{m+1} sum (a psi)^k / k!.
inline double mstou_profile_closed(double lambda, double p, int m_space, double c,
                                   double u_min) {
    const double vm = ball_volume(m_space, c);
    const double a = p * lambda;
    double fact = 1.0, powsum = 0.0, term = 1.0;
    for (int k = 0; k <= m_space; ++k) {
        if (k > 0) {
            fact *= k;
            term *= a * u_min / k;
        }
        powsum += term;
    }
    double mfact = 1.0;
    for (int k = 2; k <= m_space; ++k) mfact *= k;
    return vm * std::exp(-a * u_min) * mfact / std::pow(a, m_space + 1) * powsum;
}

// J_p over the (possibly truncated) cone, mixed over pi. `closed` picks the
// per-lambda closed form; otherwise the u-integral is numeric.
inline double mstou_truncated_mass(const KernelModel& k, const MixingLaw& pi, double p,
                                   double u_min, bool closed = true, int nodes = 48) {
    if (k.kind != KernelKind::mstou_exp)
        throw UnsupportedShape("cone-profile masses require the mstou-exp kernel");
    const int m = k.support.m_space;
    const double c = k.support.c;
    if (pi.kind == MixingKind::gamma_density && pi.alpha <= m + 1)
        throw ParameterOutOfRange("mstou kernel requires alpha > m + 1");
    // The profile decays like e^{-p u_min lambda}; fold that tilt into the
    // Gamma weight (beta -> beta + p u_min, with the exact Laplace-transform
    // scale) so the quadrature nodes track the effective decay rate.
    const double tilt = p * u_min;
    MixingLaw mix = pi;
    double scale = 1.0;
    if (pi.kind == MixingKind::gamma_density && tilt > 0.0) {
        scale = std::pow(pi.beta / (pi.beta + tilt), pi.alpha);
        mix = MixingLaw::gamma(pi.alpha, pi.beta + tilt);
    }
    auto g_reg = [&](double lam) {
        const double prof = closed ? mstou_profile_closed(lam, p, m, c, u_min)
                                   : mstou_profile_quad(lam, p, m, c, u_min);
        const double detilt = scale != 1.0 ? std::exp(tilt * lam) : 1.0;
        return std::pow(lam, m + 1) * prof * detilt;
    };
    return scale * mix.expect_inv_weighted(g_reg, m + 1, nodes);
}

// (int |f|^p)^{1/p} over the full support, mixed over pi.
inline double lp_norm(const KernelModel& k, double p, const MixingLaw& pi) {
    switch (k.kind) {
        case KernelKind::mstou_exp:
            return std::pow(mstou_truncated_mass(k, pi, p, 0.0), 1.0 / p);
        case KernelKind::geometric_ma: {
            // sum_j ratio^{p(j+1)}
            const double r = std::pow(k.ratio, p);
            return std::pow(r / (1.0 - r), 1.0 / p);
        }
        case KernelKind::exp_bounded: {
            // numeric integral of |f|^p over the whole line
            auto f = [&](double t) { return std::pow(std::fabs(k.evaluator(Point::of({t}))), p); };
            const double pos = integrate_semi_infinite(f, 0.0, 1.0);
            const double neg = integrate_semi_infinite([&](double t) { return f(-t); }, 0.0, 1.0);
            return std::pow(pos + neg, 1.0 / p);
        }
        case KernelKind::tabulated: {
            const auto& g = k.grid;
            if (g.dim > 2) throw UnsupportedShape("tabulated lp_norm supports dim <= 2");
            double cell = 1.0;
            for (int d = 0; d < g.dim; ++d) cell *= g.step[d];
            // midpoint rule on a refined grid
            double acc = 0.0;
            const int refine = 4;
            const int n0 = (g.shape[0] - 1) * refine, n1 = g.dim > 1 ? (g.shape[1] - 1) * refine : 1;
            for (int i = 0; i < n0; ++i)
                for (int j = 0; j < n1; ++j) {
                    Point s;
                    s.dim = g.dim;
                    s[0] = g.origin[0] + (i + 0.5) * g.step[0] / refine;
                    if (g.dim > 1) s[1] = g.origin[1] + (j + 0.5) * g.step[1] / refine;
                    acc += std::pow(std::fabs(evaluate(k, 0.0, s)), p);
                }
            return std::pow(acc * cell / (refine * (g.dim > 1 ? refine : 1)), 1.0 / p);
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Ambit models: Y_t(x) = int_{A_t(x)} l(x - xi, t - s) sigma_s(xi) L(dxi, ds).

enum class VolatilityKind { constant_one, mmaf, p_dependent };

struct AmbitModel {
    KernelModel l;                       // deterministic weight (mstou-exp expected)
    CharacteristicQuadruplet quad;       // driving basis; quad.pi mixes l

    VolatilityKind vol_kind = VolatilityKind::constant_one;
    // mmaf volatility: sigma = int j dL^sigma, j mixed by quad_sigma.pi
    KernelModel j;
    CharacteristicQuadruplet quad_sigma;
    // p-dependent volatility: i.i.d. values on unit cells. The generator
    // contract: it must supply mean and variance; its covariance is
    // Var * 1{same unit cell} (this is what the cell construction realizes).
    int p_horizon = 1;
    double vol_mean = 1.0;
    double vol_var = 0.0;

    double sigma_mean() const {
        switch (vol_kind) {
            case VolatilityKind::constant_one:
                return 1.0;
            case VolatilityKind::mmaf: {
                const MomentFunctionals mf = moment_functionals(quad_sigma);
                return mf.mu_Lambda * mstou_truncated_mass(j, quad_sigma.pi, 1.0, 0.0);
            }
            case VolatilityKind::p_dependent:
                return vol_mean;
        }
        return 1.0;
    }

    double sigma_second_moment() const {
        switch (vol_kind) {
            case VolatilityKind::constant_one:
                return 1.0;
            case VolatilityKind::mmaf: {
                const MomentFunctionals mf = moment_functionals(quad_sigma);
                const double j2 = mstou_truncated_mass(j, quad_sigma.pi, 2.0, 0.0);
                const double j1 = mstou_truncated_mass(j, quad_sigma.pi, 1.0, 0.0);
                return mf.Sigma_Lambda * j2 + mf.mu_Lambda * mf.mu_Lambda * j1 * j1;
            }
            case VolatilityKind::p_dependent:
                return vol_var + vol_mean * vol_mean;
        }
        return 1.0;
    }

    // E|sigma| under nonnegativity of the volatility field; for the mmaf case
    // this requires a nonnegative kernel and driving basis (checked loosely
    // via mu >= 0) and then E|sigma| = E[sigma].
    double sigma_abs_mean() const {
        if (vol_kind == VolatilityKind::mmaf) {
            const MomentFunctionals mf = moment_functionals(quad_sigma);
            if (mf.mu_Lambda < 0.0)
                throw ConditionViolated(
                    "E|sigma| in closed form needs a nonnegative volatility field");
        }
        return sigma_mean();
    }
};

} // namespace levyfield
