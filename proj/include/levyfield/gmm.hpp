#pragma once

// Moment-matching estimation of the Gamma-mixed cone-exponential model from
// lattice data: empirical moment conditions (variance and temporal
// autocovariances), the analytic moment map, and a derivative-free first-stage
// objective minimized by Nelder-Mead with random restarts in transformed
// coordinates.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "errors.hpp"
#include "mc.hpp"
#include "moments.hpp"
#include "rng.hpp"

namespace levyfield {

struct MstouParams {
    double alpha = 4.0;
    double beta = 1.0;
    double c = 1.0;
    double Sigma_Lambda = 1.0;
};

// Closed-form Cov(X_0, X_(tau,v)) for the Gamma-mixed model, one spatial dim.
inline double mstou_gamma_cov(const MstouParams& p, double tau, double v) {
    const double u0 = std::max(0.0, std::fabs(v) - p.c * std::fabs(tau)) / (2.0 * p.c);
    const double t = std::fabs(tau) + 2.0 * u0;
    return 0.5 * p.c * p.Sigma_Lambda * std::pow(p.beta, p.alpha) /
           ((p.alpha - 1.0) * (p.alpha - 2.0) * std::pow(p.beta + t, p.alpha - 2.0));
}

struct MomentConditions {
    std::vector<std::pair<int, int>> lags;  // (temporal, spatial) lags; (0,0) = Var
    std::vector<double> empirical;
};

inline MomentConditions empirical_conditions(const LatticeSample& s,
                                             const std::vector<std::pair<int, int>>& lags) {
    MomentConditions mc;
    mc.lags = lags;
    double mean = 0.0;
    for (double v : s.values) mean += v;
    mean /= s.values.size();
    for (auto [kt, kx] : lags) mc.empirical.push_back(empirical_autocov(s, kt, kx, mean));
    return mc;
}

struct FitOptions {
    MstouParams init;
    int m_space = 1;
    double alpha_margin = 0.25;  // keep alpha > m+1 + margin
    bool fix_c = false;
    bool fix_Sigma = false;
    int restarts = 5;
    int max_iterations = 2000;
    double tol = 1e-10;
    std::uint64_t seed = 7;
};

struct FitResult {
    MstouParams estimate;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    bool identifiability_warning = false;
    std::string note;
};

namespace detail {

// transformed coordinates: x = (log(alpha - floor), log beta [, log c][, log Sigma])
struct ParamMap {
    double alpha_floor;
    bool fix_c, fix_Sigma;
    MstouParams fixed;

    int dim() const { return 2 + (fix_c ? 0 : 1) + (fix_Sigma ? 0 : 1); }

    std::vector<double> to_x(const MstouParams& p) const {
        std::vector<double> x{std::log(p.alpha - alpha_floor), std::log(p.beta)};
        if (!fix_c) x.push_back(std::log(p.c));
        if (!fix_Sigma) x.push_back(std::log(p.Sigma_Lambda));
        return x;
    }
    MstouParams from_x(const std::vector<double>& x) const {
        MstouParams p = fixed;
        p.alpha = alpha_floor + std::exp(x[0]);
        p.beta = std::exp(x[1]);
        int i = 2;
        if (!fix_c) p.c = std::exp(x[i++]);
        if (!fix_Sigma) p.Sigma_Lambda = std::exp(x[i++]);
        return p;
    }
};

// Standard Nelder-Mead on R^d; returns best point and value.
inline std::pair<std::vector<double>, double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
    double step, int max_iter, double tol, int& iterations) {
    const size_t d = x0.size();
    std::vector<std::vector<double>> simplex(d + 1, x0);
    std::vector<double> fv(d + 1);
    for (size_t i = 1; i <= d; ++i) simplex[i][i - 1] += step;
    for (size_t i = 0; i <= d; ++i) fv[i] = f(simplex[i]);

    auto order = [&] {
        std::vector<size_t> idx(d + 1);
        for (size_t i = 0; i <= d; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (size_t i : idx) {
            s2.push_back(simplex[i]);
            f2.push_back(fv[i]);
        }
        simplex.swap(s2);
        fv.swap(f2);
    };

    int it = 0;
    for (; it < max_iter; ++it) {
        order();
        if (fv[d] - fv[0] < tol * (std::fabs(fv[0]) + tol)) break;
        std::vector<double> centroid(d, 0.0);
        for (size_t i = 0; i < d; ++i)
            for (size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j] / d;
        auto point = [&](double t) {
            std::vector<double> p(d);
            for (size_t j = 0; j < d; ++j) p[j] = centroid[j] + t * (simplex[d][j] - centroid[j]);
            return p;
        };
        auto xr = point(-1.0);
        const double fr = f(xr);
        if (fr < fv[0]) {
            auto xe = point(-2.0);
            const double fe = f(xe);
            if (fe < fr) {
                simplex[d] = xe;
                fv[d] = fe;
            } else {
                simplex[d] = xr;
                fv[d] = fr;
            }
        } else if (fr < fv[d - 1]) {
            simplex[d] = xr;
            fv[d] = fr;
        } else {
            auto xc = point(0.5);
            const double fc = f(xc);
            if (fc < fv[d]) {
                simplex[d] = xc;
                fv[d] = fc;
            } else {
                for (size_t i = 1; i <= d; ++i) {
                    for (size_t j = 0; j < d; ++j)
                        simplex[i][j] = simplex[0][j] + 0.5 * (simplex[i][j] - simplex[0][j]);
                    fv[i] = f(simplex[i]);
                }
            }
        }
    }
    order();
    iterations = it;
    return {simplex[0], fv[0]};
}

} // namespace detail

// First-stage objective Q = sum (empirical - model)^2 (identity weights),
// minimized over the free parameters; 5 deterministic random restarts.
inline FitResult fit_mstou(const MomentConditions& mc, const FitOptions& opt) {
    if (mc.lags.empty()) throw TooFewValues("no moment conditions supplied");
    const size_t n_free = 2 + (opt.fix_c ? 0 : 1) + (opt.fix_Sigma ? 0 : 1);
    const bool underdetermined = mc.lags.size() < n_free;
    detail::ParamMap map;
    map.alpha_floor = opt.m_space + 1 + opt.alpha_margin;
    map.fix_c = opt.fix_c;
    map.fix_Sigma = opt.fix_Sigma;
    map.fixed = opt.init;
    if (opt.init.alpha <= map.alpha_floor)
        throw ParameterOutOfRange("initial alpha below the well-definedness floor");

    auto objective = [&](const std::vector<double>& x) {
        const MstouParams p = map.from_x(x);
        double q = 0.0;
        for (size_t i = 0; i < mc.lags.size(); ++i) {
            const double model = mstou_gamma_cov(p, mc.lags[i].first, mc.lags[i].second);
            const double g = mc.empirical[i] - model;
            q += g * g;
        }
        return q;
    };

    FitResult best;
    best.objective = kInfinite;
    RandomStream rs(opt.seed);
    for (int r = 0; r < opt.restarts; ++r) {
        std::vector<double> x0 = map.to_x(opt.init);
        if (r > 0) {
            RandomStream rr = rs.child(static_cast<std::uint64_t>(r));
            for (double& xi : x0) xi += rr.uniform(-0.7, 0.7);
        }
        int iters = 0;
        auto [x, fx] =
            detail::nelder_mead(objective, x0, 0.25, opt.max_iterations, opt.tol, iters);
        if (fx < best.objective) {
            best.objective = fx;
            best.estimate = map.from_x(x);
            best.iterations = iters;
            best.converged = iters < opt.max_iterations;
        }
    }

    // identifiability proxy: condition number of the finite-difference
    // Jacobian of the moment map at the estimate (transformed coordinates)
    const auto xhat = map.to_x(best.estimate);
    const int d = map.dim();
    const int ncond = static_cast<int>(mc.lags.size());
    Eigen::MatrixXd J(ncond, d);
    const double hstep = 1e-5;
    for (int j = 0; j < d; ++j) {
        auto xp = xhat, xm = xhat;
        xp[j] += hstep;
        xm[j] -= hstep;
        const MstouParams pp = map.from_x(xp), pm = map.from_x(xm);
        for (int i = 0; i < ncond; ++i) {
            const double fp = mstou_gamma_cov(pp, mc.lags[i].first, mc.lags[i].second);
            const double fm = mstou_gamma_cov(pm, mc.lags[i].first, mc.lags[i].second);
            J(i, j) = (fp - fm) / (2.0 * hstep);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    const double cond =
        sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : kInfinite;
    if (cond > 1e6 || underdetermined) {
        best.identifiability_warning = true;
        best.note = underdetermined ? "fewer moment conditions than free parameters"
                                    : "moment-map condition number " + std::to_string(cond);
    }
    return best;
}

} // namespace levyfield
