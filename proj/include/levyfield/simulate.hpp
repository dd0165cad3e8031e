#pragma once

// Lattice simulation of MMAF / ambit fields for finite-activity bases: one
// basis realization (jump points + Gaussian cells) serves every lattice point
// of a window, so the joint law across the lattice is respected. All
// randomness flows through counter-based streams keyed by (master seed,
// replication, component), making output independent of thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "kernels.hpp"
#include "levy.hpp"
#include "moments.hpp"
#include "rng.hpp"

namespace levyfield {

struct BiasReport {
    double kernel_tail = 0.0;   // sd of the omitted kernel tail past T
    double small_jump = 0.0;    // omitted sub-epsilon jump variance (0: finite activity)
    double gaussian_step = 0.0; // O(delta) midpoint bias proxy for the Gaussian part
};

struct SimPlan {
    SamplingWindow window;          // lattice (0, n]^m
    double T = 0.0;                 // kernel truncation depth in time; 0 = choose from eps
    double delta = 0.25;            // Gaussian/drift cell size
    std::uint64_t master_seed = 1;
    int replications = 1;
    double eps_bias = 1e-3;
    BiasReport bias;
};

struct LatticeSample {
    SamplingWindow window;
    std::vector<double> values;  // row-major, first coordinate (time) slowest
    std::uint64_t master_seed = 0;
    int rep_index = 0;
    double T = 0.0, delta = 0.0;

    double& at(int i, int j) { return values[static_cast<size_t>(i) * window.n + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * window.n + j]; }
};

namespace detail {

struct BasisPoint {
    double s = 0.0;   // time coordinate
    double xi = 0.0;  // spatial coordinate (m_space = 1)
    double lambda = 1.0;
    double size = 0.0;  // jump size, or Gaussian cell increment
};

inline double draw_jump(const JumpLaw& law, RandomStream& rs) {
    switch (law.family) {
        case JumpFamily::none:
            return 0.0;
        case JumpFamily::point_masses: {
            double u = rs.uniform();
            for (auto& [x, p] : law.masses) {
                if (u < p) return x;
                u -= p;
            }
            return law.masses.back().first;
        }
        case JumpFamily::normal:
            return law.sd * rs.normal();
        case JumpFamily::gamma_law:
            return rs.gamma_draw(law.shape, law.scale);
        case JumpFamily::two_sided_exponential: {
            const double e = rs.exponential(1.0 / law.scale);
            return rs.uniform() < 0.5 ? -e : e;
        }
        case JumpFamily::pareto:
            return law.xm * std::pow(rs.uniform(), -1.0 / law.tail_index);
    }
    return 0.0;
}

inline double draw_mixing(const MixingLaw& pi, RandomStream& rs) {
    switch (pi.kind) {
        case MixingKind::degenerate:
            return pi.lambda0;
        case MixingKind::finite_discrete: {
            double u = rs.uniform();
            for (auto& [l, p] : pi.atoms) {
                if (u < p) return l;
                u -= p;
            }
            return pi.atoms.back().first;
        }
        case MixingKind::gamma_density:
            return rs.gamma_draw(pi.alpha, 1.0 / pi.beta);
    }
    return 1.0;
}

// Pick T so that the variance of the omitted kernel tail (u > T) is below
// eps^2; closed form for the cone-exponential kernel.
inline double choose_truncation(const KernelModel& k, const CharacteristicQuadruplet& q,
                                double eps) {
    const MomentFunctionals mf = moment_functionals(q);
    const double sig = std::isfinite(mf.Sigma_Lambda) ? mf.Sigma_Lambda : 1.0;
    for (double T = 4.0; T <= 4096.0; T *= 1.5) {
        const double tail_var = sig * mstou_truncated_mass(k, q.pi, 2.0, T);
        if (std::sqrt(tail_var) < eps) return T;
    }
    throw PlanBiasTooLarge("no truncation depth meets the requested bias");
}

// Realize the basis over the influence region of the window: jump points of
// the compound-Poisson part plus midpoint cells for the Gaussian part.
struct BasisRealization {
    std::vector<BasisPoint> jumps;
    std::vector<BasisPoint> cells;  // Gaussian increments at cell centers
    double det_offset = 0.0;        // drift minus small-jump compensation
};

inline BasisRealization realize_basis(const KernelModel& k, const CharacteristicQuadruplet& q,
                                      const SimPlan& plan, RandomStream stream) {
    if (k.kind != KernelKind::mstou_exp || k.support.m_space != 1)
        throw UnsupportedShape("lattice simulation covers the cone kernel with one spatial dim");
    if (q.nu.kind != LevyMeasureKind::finite_activity && q.nu.total_intensity > 0.0)
        throw UnsupportedShape("only finite-activity jump parts are simulated exactly");
    const int n = plan.window.n;
    const double c = k.support.c;
    const double T = plan.T;
    const double s_lo = 1.0 - T, s_hi = n;
    const double x_lo = 1.0 - c * T, x_hi = n + c * T;
    if (s_hi <= s_lo || x_hi <= x_lo) throw DegenerateDomain("empty simulation domain");
    const double area = (s_hi - s_lo) * (x_hi - x_lo);

    BasisRealization b;
    // deterministic part: (gamma - I E[J 1_{|J|<=1}]) * L1(f); exact L1 mass
    const double comp = q.nu.small_signed_mean();
    const double l1 = mstou_truncated_mass(k, q.pi, 1.0, 0.0);
    b.det_offset = (q.gamma - comp) * l1;

    RandomStream js = stream.child(1);
    const double inten = q.nu.total_intensity;
    if (inten > 0.0) {
        const std::uint64_t npts = js.poisson(inten * area);
        b.jumps.reserve(npts);
        for (std::uint64_t i = 0; i < npts; ++i) {
            BasisPoint p;
            p.s = js.uniform(s_lo, s_hi);
            p.xi = js.uniform(x_lo, x_hi);
            p.lambda = draw_mixing(q.pi, js);
            p.size = draw_jump(q.nu.jump_law, js);
            b.jumps.push_back(p);
        }
    }

    if (q.sigma > 0.0) {
        RandomStream gs = stream.child(2);
        const double d = plan.delta;
        const int ns = static_cast<int>(std::ceil((s_hi - s_lo) / d));
        const int nx = static_cast<int>(std::ceil((x_hi - x_lo) / d));
        const double sd = std::sqrt(q.sigma * d * d);
        b.cells.reserve(static_cast<size_t>(ns) * nx);
        for (int i = 0; i < ns; ++i)
            for (int j = 0; j < nx; ++j) {
                BasisPoint p;
                p.s = s_lo + (i + 0.5) * d;
                p.xi = x_lo + (j + 0.5) * d;
                p.lambda = draw_mixing(q.pi, gs);
                p.size = sd * gs.normal();
                b.cells.push_back(p);
            }
    }
    return b;
}

} // namespace detail

// Scatter the contribution of every basis point into its forward cone on the
// lattice; sigma_at returns the volatility factor at a basis point (1 for
// plain MMAFs).
template <typename SigmaFn>
LatticeSample assemble_field(const KernelModel& k, const detail::BasisRealization& b,
                             const SimPlan& plan, int rep_index, double sigma_mean_offset,
                             SigmaFn&& sigma_at) {
    const int n = plan.window.n;
    const double c = k.support.c;
    LatticeSample out;
    out.window = plan.window;
    out.values.assign(static_cast<size_t>(n) * n, b.det_offset * sigma_mean_offset);
    out.master_seed = plan.master_seed;
    out.rep_index = rep_index;
    out.T = plan.T;
    out.delta = plan.delta;

    auto scatter = [&](const detail::BasisPoint& p) {
        if (p.size == 0.0) return;
        const double w = p.size * sigma_at(p.s, p.xi);
        if (w == 0.0) return;
        const int t0 = std::max(1, static_cast<int>(std::ceil(p.s)));
        const int t1 = std::min<double>(n, std::floor(p.s + plan.T));
        for (int t = t0; t <= t1; ++t) {
            const double du = t - p.s;
            const double reach = c * du;
            const int xa = std::max(1, static_cast<int>(std::ceil(p.xi - reach)));
            const int xb = std::min<double>(n, std::floor(p.xi + reach));
            if (xa > xb) continue;
            const double kv = std::exp(-p.lambda * du) * w;
            double* row = &out.at(t - 1, 0);
            for (int x = xa; x <= xb; ++x) row[x - 1] += kv;
        }
    };
    for (const auto& p : b.jumps) scatter(p);
    for (const auto& p : b.cells) scatter(p);
    return out;
}

inline LatticeSample simulate_mmaf(const KernelModel& k, const CharacteristicQuadruplet& q,
                                   SimPlan plan, int rep_index) {
    if (plan.T <= 0.0) plan.T = detail::choose_truncation(k, q, plan.eps_bias);
    const MomentFunctionals mf = moment_functionals(q);
    plan.bias.kernel_tail = std::sqrt(std::max(0.0, mf.Sigma_Lambda) *
                                      mstou_truncated_mass(k, q.pi, 2.0, plan.T));
    plan.bias.gaussian_step = q.sigma > 0.0 ? plan.delta : 0.0;
    if (plan.bias.kernel_tail > plan.eps_bias)
        throw PlanBiasTooLarge("kernel tail bias exceeds the requested tolerance");
    RandomStream master(plan.master_seed);
    const auto basis = detail::realize_basis(
        k, q, plan, master.child(static_cast<std::uint64_t>(rep_index)).child(10));
    return assemble_field(k, basis, plan, rep_index, 1.0,
                          [](double, double) { return 1.0; });
}

// ---------------------------------------------------------------------------
// Ambit fields: two-stage sampling with disjoint stream branches for the
// volatility and the driving basis.

inline LatticeSample simulate_ambit(const AmbitModel& a, SimPlan plan, int rep_index) {
    if (plan.T <= 0.0) plan.T = detail::choose_truncation(a.l, a.quad, plan.eps_bias);
    RandomStream master(plan.master_seed);
    RandomStream rep = master.child(static_cast<std::uint64_t>(rep_index));
    const auto basis = detail::realize_basis(a.l, a.quad, plan, rep.child(10));

    switch (a.vol_kind) {
        case VolatilityKind::constant_one:
            return assemble_field(a.l, basis, plan, rep_index, 1.0,
                                  [](double, double) { return 1.0; });
        case VolatilityKind::p_dependent: {
            // i.i.d. positive values on unit cells, Gamma-distributed with the
            // declared mean and variance (artifact choice for the generator)
            const double mean = a.vol_mean, var = a.vol_var;
            RandomStream vol = rep.child(20);
            auto cell_value = [mean, var, &vol](long long ci, long long cj) {
                if (var <= 0.0) return mean;
                RandomStream cs = vol.child(static_cast<std::uint64_t>(ci * 2654435761LL + cj));
                const double shape = mean * mean / var;
                return cs.gamma_draw(shape, var / mean);
            };
            auto sig = [&](double s, double xi) {
                return cell_value(static_cast<long long>(std::floor(s)),
                                  static_cast<long long>(std::floor(xi)));
            };
            return assemble_field(a.l, basis, plan, rep_index, a.vol_mean, sig);
        }
        case VolatilityKind::mmaf: {
            // realize the volatility basis over an enlarged domain and
            // evaluate sigma at every driving-basis point
            SimPlan vplan = plan;
            const double Ts = detail::choose_truncation(a.j, a.quad_sigma, plan.eps_bias);
            vplan.T = plan.T + Ts;  // so sigma is exact on the whole l-domain
            const auto vbasis =
                detail::realize_basis(a.j, a.quad_sigma, vplan, rep.child(20));
            const double cj = a.j.support.c;
            auto sigma_at = [&](double s, double xi) {
                double v = vbasis.det_offset;
                for (const auto& p : vbasis.jumps) {
                    const double du = s - p.s;
                    if (du < 0.0 || du > Ts) continue;
                    if (std::fabs(xi - p.xi) > cj * du) continue;
                    v += p.size * std::exp(-p.lambda * du);
                }
                for (const auto& p : vbasis.cells) {
                    const double du = s - p.s;
                    if (du < 0.0 || du > Ts) continue;
                    if (std::fabs(xi - p.xi) > cj * du) continue;
                    v += p.size * std::exp(-p.lambda * du);
                }
                return v;
            };
            return assemble_field(a.l, basis, plan, rep_index, a.sigma_mean(), sigma_at);
        }
    }
    throw ValidationError("unknown volatility kind");
}

// ---------------------------------------------------------------------------
// The geometric moving average X_t = sum_{j>=0} 2^{-j-1} xi_{t-j} with
// Bernoulli(1/2) noise; truncated at 64 terms (tail below double precision).

inline std::vector<double> simulate_geometric_ma(int n, int rep_index, std::uint64_t seed,
                                                 double ratio = 0.5) {
    if (n < 1) throw ParameterOutOfRange("sequence length must be positive");
    constexpr int J = 64;
    RandomStream rep = RandomStream(seed).child(static_cast<std::uint64_t>(rep_index));
    std::vector<std::uint8_t> xi(n + J);
    for (int i = 0; i < n + J; ++i) xi[i] = rep.uniform() < 0.5 ? 0 : 1;
    std::vector<double> x(n);
    for (int t = 0; t < n; ++t) {
        double acc = 0.0, w = ratio;
        for (int j = 0; j <= J - 1; ++j) {
            if (xi[t + J - j]) acc += w;  // xi index t-j shifted by the J-term warmup
            w *= ratio;
        }
        x[t] = acc;
    }
    return x;
}

} // namespace levyfield
