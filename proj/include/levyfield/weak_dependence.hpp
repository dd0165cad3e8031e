#pragma once

// Weak-dependence coefficient bounds as computable curves: theta-lex and eta
// bounds for mixed moving averages (four cases each, tracking which moment
// assumptions are in force), Gamma-mixing closed forms with decay metadata,
// the exponential bound for exponentially bounded kernels, ambit-field
// bounds, hereditary and shifted-vector transforms, decay-order fitting, and
// the central-limit admissibility checks.

#include <cmath>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "kernels.hpp"
#include "levy.hpp"
#include "moments.hpp"

namespace levyfield {

// ---------------------------------------------------------------------------
// Coefficient curves.

enum class CurveKind { theta_lex, eta };
enum class DecayType { none, polynomial, exponential };

struct DecayFit {
    DecayType type = DecayType::none;
    double order = 0.0;  // bound = O(h^{-order}) when polynomial
    double rate = 0.0;   // bound = O(e^{-rate h}) when exponential
    double r2 = 0.0;
};

struct CoefficientCurve {
    CurveKind kind = CurveKind::theta_lex;
    std::string label;
    std::vector<double> h;
    std::vector<double> bound;
    DecayFit fit;
    std::function<double(double)> evaluator;  // present for analytic curves

    void check_invariants() const {
        for (size_t i = 0; i < bound.size(); ++i) {
            if (!(bound[i] >= 0.0)) throw NumericError("coefficient bound went negative");
            if (i > 0 && bound[i] > bound[i - 1] * (1.0 + 1e-9))
                throw NumericError("coefficient bound is not nonincreasing");
        }
    }

    void write_csv(std::ostream& os) const {
        os << "h,bound,kind,label\n";
        const char* k = kind == CurveKind::theta_lex ? "theta-lex" : "eta";
        for (size_t i = 0; i < h.size(); ++i)
            os << h[i] << "," << bound[i] << "," << k << "," << label << "\n";
    }
};

namespace detail {

struct LsFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

inline LsFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n < 3) throw TooFewValues("decay fit needs at least three points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    LsFit f;
    const double den = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (size_t i = 0; i < n; ++i) {
        const double pred = f.intercept + f.slope * x[i];
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

} // namespace detail

// Fit the decay on the positive part of the curve: log bound vs log h
// (polynomial) against log bound vs h (exponential); the better R^2 wins.
inline DecayFit fit_decay(const CoefficientCurve& c) {
    std::vector<double> lh, lb, hh;
    for (size_t i = 0; i < c.h.size(); ++i) {
        if (c.h[i] > 0.0 && c.bound[i] > 0.0) {
            lh.push_back(std::log(c.h[i]));
            hh.push_back(c.h[i]);
            lb.push_back(std::log(c.bound[i]));
        }
    }
    DecayFit out;
    if (lh.size() < 3) return out;
    const auto poly = detail::least_squares(lh, lb);
    const auto expo = detail::least_squares(hh, lb);
    if (expo.r2 > poly.r2 && expo.slope < 0.0) {
        out.type = DecayType::exponential;
        out.rate = -expo.slope;
        out.r2 = expo.r2;
    } else {
        out.type = DecayType::polynomial;
        out.order = -poly.slope;
        out.r2 = poly.r2;
    }
    return out;
}

inline CoefficientCurve make_curve(CurveKind kind, std::string label,
                                   std::function<double(double)> eval,
                                   const std::vector<double>& grid) {
    CoefficientCurve c;
    c.kind = kind;
    c.label = std::move(label);
    c.evaluator = std::move(eval);
    c.h = grid;
    c.bound.reserve(grid.size());
    for (double hv : grid) c.bound.push_back(c.evaluator(hv));
    c.fit = fit_decay(c);
    c.check_invariants();
    return c;
}

inline std::vector<double> geometric_grid(double h_min, double h_max, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = h_min * std::pow(h_max / h_min, i / double(n - 1));
    return g;
}

// ---------------------------------------------------------------------------
// Truncated kernel masses on the two truncation geometries.

enum class BoundCase { i, ii, iii, iv };

namespace detail {

// J_p over the cone truncated at ||s|| >= psi-equivalent (theta geometry).
// This is the generic quadrature path: numeric u-integration, Gauss-Laguerre
// mixing; the Gamma closed forms are cross-checked against it.
inline double cone_mass_theta(const KernelModel& k, const MixingLaw& pi, double p,
                              double h) {
    const double ps = psi(k.support, h, PsiKind::mmaf);
    const IntegrationDomain d = truncated_cone_domain(k.support, ps);
    return mstou_truncated_mass(k, pi, p, d.u_min, /*closed=*/false);
}

// Disc(r) intersect concentric square of half-side a: area.
inline double disc_square_area(double r, double a) {
    if (r <= a) return M_PI * r * r;
    if (r * r >= 2.0 * a * a) return 4.0 * a * a;
    const double seg = r * r * std::acos(a / r) - a * std::sqrt(r * r - a * a);
    return M_PI * r * r - 4.0 * seg;
}

// J_p over the cone minus the centered open cube (-h/2, h/2)^{m+1}
// (eta geometry), at fixed mixing value.
inline double cone_cube_complement_fixed(double lam, double c, int m_space, double p,
                                         double h) {
    const double a = 0.5 * h;
    const double full = mstou_profile_closed(lam, p, m_space, c, 0.0);
    if (a <= 0.0) return full;
    double inner;
    if (m_space == 1) {
        auto f = [&](double u) {
            return 2.0 * std::min(c * u, a) * std::exp(-p * lam * u);
        };
        inner = integrate_adaptive(f, 0.0, a, 1e-12);
    } else if (m_space == 2) {
        auto f = [&](double u) { return disc_square_area(c * u, a) * std::exp(-p * lam * u); };
        inner = integrate_adaptive(f, 0.0, a, 1e-12);
    } else {
        throw UnsupportedShape("cube-complement masses cover 1 or 2 spatial dimensions");
    }
    return full - inner;
}

inline double cone_mass_eta(const KernelModel& k, const MixingLaw& pi, double p, double h) {
    const int m = k.support.m_space;
    const double c = k.support.c;
    auto g_reg = [&](double lam) {
        return std::pow(lam, m + 1) * cone_cube_complement_fixed(lam, c, m, p, h);
    };
    if (pi.kind == MixingKind::gamma_density && pi.alpha <= m + 1)
        throw ParameterOutOfRange("eta masses require alpha > m + 1");
    return pi.expect_inv_weighted(g_reg, m + 1);
}

// Discrete analog for the geometric moving average: tail sums over j >= h.
inline double geometric_tail_mass(const KernelModel& k, double p, double h) {
    const double r = std::pow(k.ratio, p);
    const double j0 = std::max(0.0, std::ceil(h));
    return std::pow(std::pow(k.ratio, j0 + 1.0), p) / (1.0 - r);
}

// Dispatch on kernel kind for the two geometries.
inline double truncated_mass(const KernelModel& k, const MixingLaw& pi, double p, double h,
                             CurveKind geom) {
    switch (k.kind) {
        case KernelKind::mstou_exp:
            return geom == CurveKind::theta_lex ? cone_mass_theta(k, pi, p, h)
                                                : cone_mass_eta(k, pi, p, h);
        case KernelKind::geometric_ma:
            return geometric_tail_mass(k, p, h);
        default:
            throw UnsupportedShape("truncated masses cover cone and geometric kernels");
    }
}

// Case bound assembled from the truncated masses; `lead` is the outer factor
// (2 for theta-lex, 1 for eta).
inline double case_bound(const KernelModel& k, const CharacteristicQuadruplet& q,
                         BoundCase cs, double h, CurveKind geom, double lead) {
    const MomentFunctionals mf = moment_functionals(q);
    switch (cs) {
        case BoundCase::i: {
            if (std::fabs(mf.mu_Lambda) > 1e-12)
                throw CaseInapplicable(
                    "case (i) needs a centered basis: gamma + big-jump mean = 0");
            if (!check_moment_condition(q, 2.0) || !std::isfinite(mf.Sigma_Lambda))
                throw CaseInapplicable("case (i) needs a finite second moment");
            const double j2 = truncated_mass(k, q.pi, 2.0, h, geom);
            return lead * std::sqrt(mf.Sigma_Lambda * j2);
        }
        case BoundCase::ii: {
            if (!check_moment_condition(q, 2.0) || !std::isfinite(mf.Sigma_Lambda))
                throw CaseInapplicable("case (ii) needs a finite second moment");
            const double j2 = truncated_mass(k, q.pi, 2.0, h, geom);
            const double j1 = truncated_mass(k, q.pi, 1.0, h, geom);
            return lead * std::sqrt(mf.Sigma_Lambda * j2 + mf.mu_Lambda * mf.mu_Lambda * j1 * j1);
        }
        case BoundCase::iii: {
            if (!q.finite_variation() || !mf.gamma_abs)
                throw CaseInapplicable("case (iii) needs finite variation and int |x| nu < inf");
            const double j1 = truncated_mass(k, q.pi, 1.0, h, geom);
            return lead * *mf.gamma_abs * j1;
        }
        case BoundCase::iv: {
            if (!check_moment_condition(q, 1.0) || !std::isfinite(mf.big_jump_abs_mean))
                throw CaseInapplicable("case (iv) needs a finite first tail moment");
            const double j2 = truncated_mass(k, q.pi, 2.0, h, geom);
            const double j1 = truncated_mass(k, q.pi, 1.0, h, geom);
            const double core = mf.Sigma_Lambda_small * j2 + q.gamma * q.gamma * j1 * j1;
            return lead * std::sqrt(core) + lead * mf.big_jump_abs_mean * j1;
        }
    }
    throw ValidationError("unknown bound case");
}

} // namespace detail

// ---------------------------------------------------------------------------
// MMAF theta-lex bounds, cases (i)-(iv).

inline double theta_bound_mmaf(const KernelModel& k, const CharacteristicQuadruplet& q,
                               BoundCase cs, double h) {
    return detail::case_bound(k, q, cs, h, CurveKind::theta_lex, 2.0);
}

// MMAF eta bounds: same case structure over the cube-complement geometry,
// without the leading factor 2.
inline double eta_bound_mmaf(const KernelModel& k, const CharacteristicQuadruplet& q,
                             BoundCase cs, double h) {
    if (k.kind == KernelKind::exp_bounded) {
        // closed exponential bound from the (M, K) envelope; scalar basis
        const MomentFunctionals mf = moment_functionals(q);
        const int m = 1;
        return m * std::sqrt(mf.Sigma_Lambda) * std::sqrt(k.M) /
               std::pow(2.0 * k.K, m / 2.0) * std::exp(-k.K * h / 4.0);
    }
    return detail::case_bound(k, q, cs, h, CurveKind::eta, 1.0);
}

// Closed exponential eta bound for exponentially bounded kernels on an
// m-dimensional lattice: (m ||Sigma^{1/2}||_F sqrt(M) / (2K)^{m/2}) e^{-Kh/4}.
inline double eta_bound_exp_kernel(int m, double sigma_fro, double M, double K, double h) {
    if (m < 1 || M <= 0.0 || K <= 0.0)
        throw ParameterOutOfRange("eta_bound_exp_kernel: m >= 1, M > 0, K > 0 required");
    return m * sigma_fro * std::sqrt(M) / std::pow(2.0 * K, m / 2.0) * std::exp(-K * h / 4.0);
}

// ---------------------------------------------------------------------------
// Gamma-mixing closed forms.

enum class MstouBoundCase { L2, FV };

struct MstouGammaBound {
    double value = 0.0;
    double decay_order = 0.0;  // bound = O(h^{-decay_order})
    bool outer_bound = false;  // c > 1: truncation replaced by its outer bound
};

// Closed-form theta-lex bound for the Gamma-mixed cone-exponential kernel.
// scale is Sigma_Lambda in the L2 case and gamma_abs in the FV case.
inline MstouGammaBound theta_bound_mstou_gamma(double alpha, double beta, double c, int m,
                                               double scale, MstouBoundCase cs, double h) {
    if (alpha <= m + 1 || beta <= 0.0 || c <= 0.0 || m < 1)
        throw ParameterOutOfRange("closed bound needs alpha > m+1, beta > 0, c > 0");
    const SphereOfInfluence a0 = SphereOfInfluence::cone(c, m);
    double ps = psi(a0, h);
    MstouGammaBound out;
    if (c > 1.0) {
        ps /= c;
        out.outer_bound = h > 0.0;
    }
    const double vm = ball_volume(m, c);
    double mfact = 1.0;
    for (int k = 2; k <= m; ++k) mfact *= k;
    auto gamma_sum = [&](double q) {
        // sum_k (q psi)^k / (k! (q psi + beta)^{alpha-m-1+k}) Gamma(alpha-m-1+k)/Gamma(alpha)
        double s = 0.0, pw = 1.0, kfact = 1.0;
        for (int k = 0; k <= m; ++k) {
            if (k > 0) {
                pw *= q * ps;
                kfact *= k;
            }
            s += pw / (kfact * std::pow(q * ps + beta, alpha - m - 1 + k)) *
                 std::exp(std::lgamma(alpha - m - 1 + k) - std::lgamma(alpha));
        }
        return s;
    };
    if (cs == MstouBoundCase::L2) {
        const double inner = vm * mfact * scale * std::pow(beta, alpha) /
                             std::pow(2.0, m + 1) * gamma_sum(2.0);
        out.value = 2.0 * std::sqrt(inner);
        out.decay_order = (alpha - (m + 1)) / 2.0;
    } else {
        out.value = 2.0 * vm * mfact * std::pow(beta, alpha) * scale * gamma_sum(1.0);
        out.decay_order = alpha - (m + 1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ambit-field theta-lex bounds.

enum class AmbitBoundCase { i, ii, iii, p_dep, vol_fv };

inline double theta_bound_ambit(const AmbitModel& a, AmbitBoundCase cs, double h) {
    if (a.l.kind != KernelKind::mstou_exp)
        throw UnsupportedShape("ambit bounds are parameterized for cone kernels");
    const double ps = psi(a.l.support, h, PsiKind::ambit);
    const IntegrationDomain dom = truncated_cone_domain(a.l.support, ps);
    const MomentFunctionals mf = moment_functionals(a.quad);

    auto Jl = [&](double p, bool truncated) {
        return mstou_truncated_mass(a.l, a.quad.pi, p, truncated ? dom.u_min : 0.0);
    };
    const double Esig2 = a.sigma_second_moment();

    if (cs == AmbitBoundCase::p_dep) {
        if (a.vol_kind != VolatilityKind::p_dependent)
            throw CaseInapplicable("the p-dependent bound needs p-dependent volatility");
        if (!(ps > a.p_horizon))
            throw HorizonNotReached("h below the independence horizon of the volatility");
        return 2.0 * std::sqrt(mf.Sigma_Lambda * Esig2 * Jl(2.0, true));
    }

    if (a.vol_kind == VolatilityKind::p_dependent)
        throw CaseInapplicable("cases (i)-(iii) and vol-fv need mmaf or constant volatility");
    const bool const_vol = a.vol_kind == VolatilityKind::constant_one;
    auto Jj = [&](double p) {
        return const_vol ? 0.0 : mstou_truncated_mass(a.j, a.quad_sigma.pi, p, ps);
    };
    auto Jj0 = [&](double p) {
        return const_vol ? 0.0 : mstou_truncated_mass(a.j, a.quad_sigma.pi, p, 0.0);
    };
    // volatility tail factor S(psi) built from the truncated j-masses; a
    // constant volatility has no tail, so the second terms vanish
    double S = 0.0;
    if (!const_vol) {
        const MomentFunctionals mfs = moment_functionals(a.quad_sigma);
        S = mfs.Sigma_Lambda * Jj(2.0) + mfs.mu_Lambda * mfs.mu_Lambda * Jj(1.0) * Jj(1.0);
    }

    switch (cs) {
        case AmbitBoundCase::i: {
            if (std::fabs(mf.mu_Lambda) > 1e-12)
                throw CaseInapplicable("ambit case (i) needs a centered driving basis");
            const double first = 2.0 * std::sqrt(mf.Sigma_Lambda * Esig2 * Jl(2.0, true));
            const double second =
                2.0 * std::sqrt(S * mf.Sigma_Lambda * (Jl(2.0, false) - Jl(2.0, true)));
            return first + second;
        }
        case AmbitBoundCase::ii: {
            const double mu2 = mf.mu_Lambda * mf.mu_Lambda;
            const double first = 2.0 * std::sqrt(mf.Sigma_Lambda * Esig2 * Jl(2.0, true) +
                                                 mu2 * Esig2 * Jl(1.0, true) * Jl(1.0, true));
            const double dl2 = Jl(2.0, false) - Jl(2.0, true);
            const double dl1 = Jl(1.0, false) - Jl(1.0, true);
            const double second =
                2.0 * std::sqrt(S * (mf.Sigma_Lambda * dl2 + mu2 * dl1 * dl1));
            return first + second;
        }
        case AmbitBoundCase::iii: {
            if (!a.quad.finite_variation())
                throw CaseInapplicable("ambit case (iii) needs a finite-variation basis");
            const double gabs = *moment_functionals(a.quad).gamma_abs;
            const double Eabs = a.sigma_abs_mean();
            const double first = 2.0 * Eabs * gabs * Jl(1.0, true);
            const double second =
                2.0 * std::sqrt(S) * gabs * (Jl(1.0, false) - Jl(1.0, true));
            return first + second;
        }
        case AmbitBoundCase::vol_fv: {
            if (!a.quad.finite_variation() || !a.quad_sigma.finite_variation())
                throw CaseInapplicable("vol-fv needs finite variation of both bases");
            const double gabs = *moment_functionals(a.quad).gamma_abs;
            const double gabs_s = *moment_functionals(a.quad_sigma).gamma_abs;
            return 2.0 * gabs_s * gabs *
                   (Jj0(1.0) * Jl(1.0, true) + (Jl(1.0, false) - Jl(1.0, true)) * Jj(1.0));
        }
        default:
            throw ValidationError("unknown ambit bound case");
    }
}

// ---------------------------------------------------------------------------
// Transforms.

// Coefficients survive Lipschitz-type functions of the field: theta_Y(h) <=
// C theta_X(h)^{(p-a)/(p-1)} when moments of order p exist and the function
// grows at order a. C is normalized to 1 (only the decay order feeds the
// admissibility checks).
inline CoefficientCurve hereditary_transform(const CoefficientCurve& c, double p, double a) {
    if (!(a >= 1.0 && a < p)) throw ExponentInvalid("need 1 <= a < p");
    const double e = (p - a) / (p - 1.0);
    auto base = c.evaluator;
    if (!base) throw ValidationError("hereditary transform needs an analytic curve");
    auto eval = [base, e](double h) { return std::pow(base(h), e); };
    CoefficientCurve out = make_curve(c.kind, c.label + " hereditary", eval, c.h);
    return out;
}

inline std::int64_t shift_set_size(int k, int m) {
    std::int64_t s = k + 1;
    for (int i = 1; i < m; ++i) s *= 2 * k + 1;
    return s;
}

// Bounds for vectors of shifted field values: horizontal shift by psi^{-1}(k)
// and multiplication by |S_k|^{m/2} (or |S_k|^m for the L1-type cases).
inline CoefficientCurve shifted_vector_bound(const CoefficientCurve& c, int k,
                                             const SphereOfInfluence& a0, int m_lattice,
                                             bool l1_case = false) {
    if (k < 0) throw ParameterOutOfRange("shift k must be nonnegative");
    auto base = c.evaluator;
    if (!base) throw ValidationError("shifted bound needs an analytic curve");
    if (k == 0) return c;
    const double b = cone_constant_b(a0);
    const double shift = k * std::sqrt(double(a0.dim())) / (-b);  // psi^{-1}(k)
    bool reachable = false;
    for (double hv : c.h)
        if (psi(a0, hv) > k) reachable = true;
    if (!reachable) throw ShiftTooLarge("psi(h) <= k over the whole grid");
    const double D = std::pow(double(shift_set_size(k, m_lattice)),
                              l1_case ? double(m_lattice) : m_lattice / 2.0);
    auto eval = [base, D, shift](double h) { return D * base(std::max(0.0, h - shift)); };
    return make_curve(c.kind, c.label + " shifted", eval, c.h);
}

// ---------------------------------------------------------------------------
// Central-limit admissibility.

enum class CltTarget { mean, autocov, pth_moment, eta_mean };

struct CltVerdict {
    bool pass = false;
    double required_order = 0.0;
    double fitted_order = 0.0;
    DecayType decay = DecayType::none;
    std::string note;
};

// Thresholds on the polynomial decay order of the coefficient bound for an
// m-dimensional lattice and moments of order 2 + delta (p for pth_moment).
inline double clt_required_order(int m, double delta, CltTarget target, double p = 3.0) {
    if (m < 1 || delta <= 0.0) throw ParameterOutOfRange("need m >= 1, delta > 0");
    const double base = m * (1.0 + 1.0 / delta);
    switch (target) {
        case CltTarget::mean:
            return base;
        case CltTarget::autocov:
            return base * (3.0 + delta) / (2.0 + delta);
        case CltTarget::pth_moment:
            if (p < 2.0) throw ParameterOutOfRange("pth-moment target needs p >= 2");
            return base * (2.0 * p - 1.0 + delta) / (p + delta);
        case CltTarget::eta_mean:
            return m * std::max(2.0, 1.0 + 1.0 / delta);
    }
    throw ValidationError("unknown CLT target");
}

inline CltVerdict clt_condition_check(const CoefficientCurve& c, int m, double delta,
                                      CltTarget target, double p = 3.0) {
    CltVerdict v;
    v.required_order = clt_required_order(m, delta, target, p);
    v.decay = c.fit.type;
    switch (c.fit.type) {
        case DecayType::exponential:
            v.pass = true;
            v.fitted_order = kInfinite;
            v.note = "exponential decay dominates every polynomial threshold";
            break;
        case DecayType::polynomial:
            v.fitted_order = c.fit.order;
            v.pass = c.fit.order > v.required_order;
            break;
        case DecayType::none:
            throw RequestUnavailable("curve has no fitted decay; refit on a longer grid");
    }
    return v;
}

// Sufficient alpha for the Gamma-mixed model to satisfy the corresponding
// admissibility condition directly (spatial dimension m_space, lattice
// dimension m_space + 1).
inline double mstou_clt_alpha_threshold(int m_space, double delta, CltTarget target) {
    const double d1 = m_space + 1;
    switch (target) {
        case CltTarget::mean:
            return d1 * (3.0 + 2.0 / delta);
        case CltTarget::eta_mean:
            return d1 * (2.0 + 2.0 / delta);
        case CltTarget::autocov:
            return d1 * (3.0 + 2.0 / delta) * (3.0 + delta) / (2.0 + delta);
        default:
            throw RequestUnavailable("no closed alpha threshold for this target");
    }
}

} // namespace levyfield
