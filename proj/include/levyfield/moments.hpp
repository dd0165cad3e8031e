#pragma once

// Means, variances and autocovariances of mixed moving averages and ambit
// fields, plus the long-run variance with a truncation certificate. Cone
// integrals use (u, radius) coordinates: the radial part collapses to the
// m-ball volume and everything becomes 1-D integrals against u^m e^{-lambda u},
// with Gamma mixing handled by generalized Gauss-Laguerre.

#include <cmath>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "kernels.hpp"
#include "levy.hpp"
#include "quadrature.hpp"

namespace levyfield {

struct QuadratureEngine {
    double rel_tol = 1e-8;
    int max_refinements = 24;
    int mixing_nodes = 48;   // Gauss-Laguerre order for the mixing expectation
    int tensor_nodes = 16;   // per-axis order for the ambit double integral
    std::int64_t double_integral_budget = 4'000'000;  // max integrand evaluations
};

// ---------------------------------------------------------------------------
// MMAF first and second moments.

inline double mmaf_mean(const KernelModel& k, const CharacteristicQuadruplet& q,
                        const QuadratureEngine& eng = {}) {
    if (!check_moment_condition(q, 1.0))
        throw MomentUnavailable("mean requires a finite first tail moment of nu");
    const MomentFunctionals mf = moment_functionals(q);
    if (mf.mu_Lambda == 0.0) return 0.0;
    switch (k.kind) {
        case KernelKind::mstou_exp:
            return mf.mu_Lambda * mstou_truncated_mass(k, q.pi, 1.0, 0.0, true, eng.mixing_nodes);
        case KernelKind::geometric_ma:
            return mf.mu_Lambda * k.ratio / (1.0 - k.ratio);
        case KernelKind::exp_bounded: {
            auto f = [&](double t) { return k.evaluator(Point::of({t})); };
            return mf.mu_Lambda * (integrate_semi_infinite(f, 0.0, 1.0) +
                                   integrate_semi_infinite([&](double t) { return f(-t); }, 0.0, 1.0));
        }
        case KernelKind::tabulated:
            throw UnsupportedShape("mmaf_mean: tabulated kernels are not integrated here");
    }
    return 0.0;
}

// Area of the intersection of two discs with radii r1, r2 and center distance d.
inline double lens_area(double r1, double r2, double d) {
    if (d >= r1 + r2) return 0.0;
    if (d <= std::fabs(r1 - r2)) {
        const double r = std::min(r1, r2);
        return M_PI * r * r;
    }
    const double a1 = r1 * r1 * std::acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1));
    const double a2 = r2 * r2 * std::acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2));
    const double s = (-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2);
    return a1 + a2 - 0.5 * std::sqrt(std::max(0.0, s));
}

namespace detail {

// Overlap integral int f(lam, -s) f(lam, lag - s) ds for the cone-exponential
// kernel at fixed mixing value, spatial dimension 1 (closed form) or 2 (lens).
inline double mstou_overlap_fixed_lambda(double lam, double c, int m_space, double tau,
                                         double vnorm) {
    tau = std::fabs(tau);
    if (m_space == 1) {
        const double u0 = std::max(0.0, vnorm - c * tau) / (2.0 * c);
        return 0.5 * c / (lam * lam) * std::exp(-lam * (tau + 2.0 * u0));
    }
    if (m_space == 2) {
        auto f = [&](double u) {
            return std::exp(-lam * (2.0 * u + tau)) * lens_area(c * u, c * (tau + u), vnorm);
        };
        return integrate_semi_infinite(f, 0.0, std::max(0.5 / lam, 0.125 * vnorm / c + 1e-12));
    }
    throw UnsupportedShape("cone overlap integrals support 1 or 2 spatial dimensions");
}

} // namespace detail

// Cov(X_0, X_lag) = Sigma_Lambda * E_pi[ int f(A,-s) f(A, lag-s) ds ].
// The lag point is (time, space...) on the field's index set; geometric-ma
// takes a scalar integer lag.
inline double mmaf_cov(const KernelModel& k, const CharacteristicQuadruplet& q,
                       const Point& lag, const QuadratureEngine& eng = {}) {
    if (!check_moment_condition(q, 2.0))
        throw MomentUnavailable("covariances require a finite second moment of nu");
    const MomentFunctionals mf = moment_functionals(q);
    if (!std::isfinite(mf.Sigma_Lambda))
        throw MomentUnavailable("Sigma_Lambda is infinite for this basis");
    switch (k.kind) {
        case KernelKind::mstou_exp: {
            const int m = k.support.m_space;
            const double c = k.support.c;
            if (lag.dim != m + 1)
                throw ParameterOutOfRange("lag dimension must match the spacetime dimension");
            const double tau = lag[0];
            double v2 = 0.0;
            for (int i = 1; i < lag.dim; ++i) v2 += lag[i] * lag[i];
            const double vnorm = std::sqrt(v2);
            auto g_reg = [&](double lam) {
                return std::pow(lam, m + 1) *
                       detail::mstou_overlap_fixed_lambda(lam, c, m, tau, vnorm);
            };
            if (q.pi.kind == MixingKind::gamma_density && q.pi.alpha <= m + 1)
                throw ParameterOutOfRange("mstou covariance requires alpha > m + 1");
            return mf.Sigma_Lambda * q.pi.expect_inv_weighted(g_reg, m + 1, eng.mixing_nodes);
        }
        case KernelKind::geometric_ma: {
            const double h = std::fabs(lag[0]);
            if (h != std::floor(h)) throw ParameterOutOfRange("geometric-ma lags are integers");
            const double r = k.ratio;
            // sum_j r^{j+1} r^{j+h+1} = r^{h+2} / (1 - r^2)
            return mf.Sigma_Lambda * std::pow(r, h + 2.0) / (1.0 - r * r);
        }
        case KernelKind::exp_bounded: {
            const double tau = lag[0];
            auto prod = [&](double t) {
                return k.evaluator(Point::of({t})) * k.evaluator(Point::of({t + tau}));
            };
            return mf.Sigma_Lambda *
                   (integrate_semi_infinite(prod, 0.0, 1.0) +
                    integrate_semi_infinite([&](double t) { return prod(-t); }, 0.0, 1.0));
        }
        case KernelKind::tabulated:
            throw UnsupportedShape("mmaf_cov: tabulated kernels are not integrated here");
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Covariance tables and the long-run variance.

struct CovarianceTable {
    int m = 1;                      // lattice dimension of the lags
    int radius = 0;                 // lags cover ||k||_inf <= radius
    std::vector<std::pair<std::array<int, 4>, double>> entries;
    double tail_bound = kInfinite;  // bound on sum of |Cov| over omitted lags

    double var() const {
        for (auto& [k, v] : entries) {
            bool zero = true;
            for (int i = 0; i < m; ++i) zero = zero && k[i] == 0;
            if (zero) return v;
        }
        throw TooFewValues("covariance table has no lag-0 entry");
    }

    void write_csv(std::ostream& os) const {
        for (int i = 0; i < m; ++i) os << "lag" << i << ",";
        os << "cov,tail_flag\n";
        for (auto& [k, v] : entries) {
            int nrm = 0;
            for (int i = 0; i < m; ++i) {
                os << k[i] << ",";
                nrm = std::max(nrm, std::abs(k[i]));
            }
            os << v << "," << (nrm == radius ? 1 : 0) << "\n";
        }
    }
};

// Evaluate Cov over all integer lags ||k||_inf <= radius using the lag
// symmetry Cov(k) = Cov(-k).
inline CovarianceTable covariance_table(const KernelModel& k, const CharacteristicQuadruplet& q,
                                        int m_lattice, int radius,
                                        const QuadratureEngine& eng = {}) {
    CovarianceTable t;
    t.m = m_lattice;
    t.radius = radius;
    std::array<int, 4> idx{};
    std::function<void(int)> rec = [&](int d) {
        if (d == m_lattice) {
            // compute only lexicographically nonnegative lags, mirror the rest
            bool neg = false, pos = false;
            for (int i = 0; i < m_lattice && !neg && !pos; ++i) {
                if (idx[i] > 0) pos = true;
                if (idx[i] < 0) neg = true;
            }
            if (neg) return;
            Point lag;
            lag.dim = m_lattice;
            for (int i = 0; i < m_lattice; ++i) lag[i] = idx[i];
            const double v = mmaf_cov(k, q, lag, eng);
            t.entries.push_back({idx, v});
            if (pos) {
                std::array<int, 4> mir{};
                for (int i = 0; i < m_lattice; ++i) mir[i] = -idx[i];
                t.entries.push_back({mir, v});
            }
            return;
        }
        for (int v = -radius; v <= radius; ++v) {
            idx[d] = v;
            rec(d + 1);
        }
    };
    rec(0);
    return t;
}

struct LongRunVariance {
    double sigma = 0.0;       // truncated lag sum plus nothing
    double tail_bound = 0.0;  // certified bound on the omitted mass
    int radius = 0;
};

// Sum the table and certify the omitted lags with a caller-supplied shell
// majorant: shell_bound(j) >= sum over ||k||_inf = j of |Cov(k)|. The
// majorant is summed until it contributes less than eps relative; if it does
// not visibly converge the covariances are declared non-summable.
inline LongRunVariance long_run_variance(const CovarianceTable& t,
                                         const std::function<double(int)>& shell_bound,
                                         double eps = 1e-10) {
    LongRunVariance r;
    r.radius = t.radius;
    for (auto& [k, v] : t.entries) r.sigma += v;
    double tail = 0.0;
    bool converged = false;
    for (int j = t.radius + 1; j <= t.radius + 100000; ++j) {
        const double piece = shell_bound(j);
        if (piece < 0.0) throw ValidationError("shell bound must be nonnegative");
        tail += piece;
        if (piece <= eps * std::max(1.0, std::fabs(r.sigma) + tail)) {
            converged = true;
            break;
        }
    }
    if (!converged || !std::isfinite(tail))
        throw NotSummable("covariance shell bounds do not converge");
    r.tail_bound = tail;
    return r;
}

// Shell majorant for the cone-exponential kernel with Gamma mixing on the
// (m_space+1)-dimensional lattice: |Cov(k)| is decreasing in the effective
// time t(k) >= ||k||_inf / max(1, c), and the closed covariance form gives
// Cov <= C / (beta + t)^{alpha - 2} with C = c Sigma beta^alpha /
// (2 (alpha-1)(alpha-2)).
inline std::function<double(int)> mstou_gamma_shell_bound(const KernelModel& k,
                                                          const CharacteristicQuadruplet& q) {
    if (k.kind != KernelKind::mstou_exp || q.pi.kind != MixingKind::gamma_density)
        throw UnsupportedShape("this shell bound covers the Gamma-mixed cone kernel");
    const int m = k.support.m_space;
    const double c = k.support.c;
    const double alpha = q.pi.alpha, beta = q.pi.beta;
    if (alpha - 2.0 <= m + 1)
        throw NotSummable("covariance decay order too small for a summable lag series");
    const double Sigma = moment_functionals(q).Sigma_Lambda;
    const int dim = m + 1;
    return [=](int j) {
        // number of lattice points on the shell ||k||_inf = j in Z^dim
        double shell = std::pow(2.0 * j + 1.0, dim) - std::pow(2.0 * j - 1.0, dim);
        const double t = j / std::max(1.0, c);
        double mix;  // E[lambda^{-2} e^{-lambda t}] for m=1; lambda^{-3}(..) for m=2
        if (m == 1) {
            mix = std::pow(beta, alpha) /
                  ((alpha - 1.0) * (alpha - 2.0) * std::pow(beta + t, alpha - 2.0));
        } else {
            // m = 2: bound the lens by the full smaller disc, giving
            // Cov <= Sigma pi c^2 E[lambda^{-3} e^{-lambda t}] / 4
            mix = M_PI * c * c / 4.0 * std::pow(beta, alpha) *
                  std::exp(std::lgamma(alpha - 3.0) - std::lgamma(alpha)) /
                  std::pow(beta + t, alpha - 3.0);
            return Sigma * shell * mix;
        }
        return Sigma * shell * 0.5 * c * mix;
    };
}

// ---------------------------------------------------------------------------
// Ambit moments.

inline double ambit_mean(const AmbitModel& a, const QuadratureEngine& eng = {}) {
    if (!check_moment_condition(a.quad, 1.0))
        throw MomentUnavailable("ambit mean requires a finite first tail moment of nu");
    const MomentFunctionals mf = moment_functionals(a.quad);
    if (mf.mu_Lambda == 0.0) return 0.0;
    return mf.mu_Lambda * a.sigma_mean() *
           mstou_truncated_mass(a.l, a.quad.pi, 1.0, 0.0, true, eng.mixing_nodes);
}

struct AmbitCovResult {
    double value = 0.0;
    double residual_bound = 0.0;  // bound on the truncated part of the rho term
};

namespace detail {

// Volatility autocovariance rho(delta) = Cov(sigma_s(xi), sigma_{s'}(xi')),
// delta = s - s' in spacetime coordinates.
inline double volatility_rho(const AmbitModel& a, const Point& delta,
                             const QuadratureEngine& eng) {
    switch (a.vol_kind) {
        case VolatilityKind::constant_one:
            return 0.0;
        case VolatilityKind::mmaf: {
            const double var_term = mmaf_cov(a.j, a.quad_sigma, delta, eng);
            return var_term;  // mmaf_cov is already the centered covariance
        }
        case VolatilityKind::p_dependent: {
            // user contract: i.i.d. values on unit cells of the lattice, so
            // rho = Var * 1{both points fall in the same cell}; as a smoothed
            // proxy for quadrature we use the same-cell indicator on the lag
            for (int i = 0; i < delta.dim; ++i)
                if (std::fabs(delta[i]) >= 1.0) return 0.0;
            return a.vol_var;
        }
    }
    return 0.0;
}

} // namespace detail

// Cov(Y_0(0), Y_lag): Sigma_Lambda E[sigma^2] times the kernel overlap plus
// mu_Lambda^2 times the double integral of l x l against the volatility
// autocovariance rho. The rho term uses tensorized Gauss-Legendre on the
// truncated cones with a certified exponential-tail residual.
inline AmbitCovResult ambit_cov(const AmbitModel& a, const Point& lag,
                                const QuadratureEngine& eng = {}) {
    if (!check_moment_condition(a.quad, 2.0))
        throw MomentUnavailable("ambit covariance requires a finite second moment of nu");
    if (a.l.kind != KernelKind::mstou_exp)
        throw UnsupportedShape("ambit covariance is parameterized for cone kernels");
    const MomentFunctionals mf = moment_functionals(a.quad);
    AmbitCovResult out;
    out.value = a.sigma_second_moment() * mmaf_cov(a.l, a.quad, lag, eng);
    const double mu2 = mf.mu_Lambda * mf.mu_Lambda;
    if (mu2 == 0.0 || a.vol_kind == VolatilityKind::constant_one) return out;

    const int m = a.l.support.m_space;
    if (m != 1)
        throw UnsupportedShape("the rho double integral is implemented for one spatial dim");
    const double c = a.l.support.c;
    const double tau = lag[0], x = lag.dim > 1 ? lag[1] : 0.0;

    // choose the u-truncation U from the e^{-lambda u} tail at the smallest
    // relevant mixing mass; certified below
    double lam_lo;
    switch (a.quad.pi.kind) {
        case MixingKind::degenerate:
            lam_lo = a.quad.pi.lambda0;
            break;
        case MixingKind::finite_discrete: {
            lam_lo = kInfinite;
            for (auto& [l, p] : a.quad.pi.atoms) lam_lo = std::min(lam_lo, l);
            break;
        }
        case MixingKind::gamma_density:
            lam_lo = 1.0 / a.quad.pi.beta;  // scale of the density; tail handled by E below
            break;
        default:
            lam_lo = 1.0;
    }
    const double U = std::max(30.0 / lam_lo, 8.0);
    const int n = eng.tensor_nodes;
    const std::int64_t evals = static_cast<std::int64_t>(n) * n * n * n;
    if (evals > eng.double_integral_budget)
        throw DoubleIntegralBudgetExceeded(
            "rho double integral exceeds the evaluation budget; partial value " +
            std::to_string(out.value));

    const QuadRule& gl = gauss_legendre(n);
    auto node = [&](int i, double a0, double b0) {
        return 0.5 * (a0 + b0) + 0.5 * (b0 - a0) * gl.nodes[i];
    };
    auto wgt = [&](int i, double a0, double b0) { return 0.5 * (b0 - a0) * gl.weights[i]; };

    auto rho_term_for = [&](double lam) {
        double acc = 0.0;
        for (int iu = 0; iu < n; ++iu) {
            const double u = node(iu, 0.0, U), wu = wgt(iu, 0.0, U);
            for (int ix = 0; ix < n; ++ix) {
                const double xi = node(ix, -c * u, c * u), wx = wgt(ix, -c * u, c * u);
                for (int ju = 0; ju < n; ++ju) {
                    const double up = node(ju, 0.0, U), wup = wgt(ju, 0.0, U);
                    const double lamfac = std::exp(-lam * (u + up));
                    for (int jx = 0; jx < n; ++jx) {
                        const double xip = node(jx, -c * up, c * up),
                                     wxp = wgt(jx, -c * up, c * up);
                        // s = (-u, xi), s' = (tau - up, x + xip) ... delta = s - s'
                        Point delta = Point::of({-u - tau + up, xi - x - xip});
                        const double rho = detail::volatility_rho(a, delta, eng);
                        if (rho != 0.0) acc += wu * wx * wup * wxp * lamfac * rho;
                    }
                }
            }
        }
        return acc;
    };

    double rho_term;
    switch (a.quad.pi.kind) {
        case MixingKind::degenerate:
            rho_term = rho_term_for(a.quad.pi.lambda0);
            break;
        case MixingKind::finite_discrete: {
            rho_term = 0.0;
            for (auto& [l, p] : a.quad.pi.atoms) rho_term += p * rho_term_for(l);
            break;
        }
        case MixingKind::gamma_density: {
            // low-order outer expectation; each node re-runs the tensor grid
            const int outer = 8;
            if (evals * outer > eng.double_integral_budget)
                throw DoubleIntegralBudgetExceeded(
                    "rho double integral with mixing exceeds the budget; partial value " +
                    std::to_string(out.value));
            rho_term = a.quad.pi.expect([&](double l) { return rho_term_for(l); }, outer);
            break;
        }
        default:
            rho_term = 0.0;
    }
    out.value += mu2 * rho_term;

    // residual: |rho| <= Var(sigma); truncating either cone at u > U leaves
    // mass <= Var * L1(l) * int_U^inf 2 c u e^{-lam u} du (two symmetric terms)
    double var_sigma;
    switch (a.vol_kind) {
        case VolatilityKind::mmaf:
            var_sigma = mmaf_cov(a.j, a.quad_sigma, Point::of({0.0, 0.0}), eng);
            break;
        case VolatilityKind::p_dependent:
            var_sigma = a.vol_var;
            break;
        default:
            var_sigma = 0.0;
    }
    const double l1 = mstou_truncated_mass(a.l, a.quad.pi, 1.0, 0.0);
    auto tail_mass = [&](double lam) {
        return 2.0 * c * std::exp(-lam * U) * (U / lam + 1.0 / (lam * lam));
    };
    double tail;
    if (a.quad.pi.kind == MixingKind::gamma_density) {
        tail = a.quad.pi.expect([&](double l) { return tail_mass(l); });
    } else {
        tail = tail_mass(lam_lo);
    }
    out.residual_bound = mu2 * var_sigma * 2.0 * l1 * tail;
    return out;
}

} // namespace levyfield
