#pragma once

// Lexicographic order, the past sets V_t and V_t^h, spheres of influence
// (light cones), the cone constant b, the truncation radius psi(h), and cubic
// sampling windows. Points are stored time-first so the lexicographic order
// prioritizes time.

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"

namespace levyfield {

// A point of R^dim (dim <= 4 covers time + up to 3 spatial coordinates).
struct Point {
    std::array<double, 4> x{0.0, 0.0, 0.0, 0.0};
    int dim = 1;

    static Point of(std::initializer_list<double> v) {
        Point p;
        p.dim = static_cast<int>(v.size());
        int i = 0;
        for (double c : v) p.x[i++] = c;
        return p;
    }
    double operator[](int i) const { return x[i]; }
    double& operator[](int i) { return x[i]; }

    double norm_inf() const {
        double m = 0.0;
        for (int i = 0; i < dim; ++i) m = std::max(m, std::fabs(x[i]));
        return m;
    }
    double norm2() const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += x[i] * x[i];
        return std::sqrt(s);
    }
    Point operator-(const Point& o) const {
        Point r = *this;
        for (int i = 0; i < dim; ++i) r.x[i] -= o.x[i];
        return r;
    }
};

inline bool lex_less(const Point& a, const Point& b) {
    for (int i = 0; i < a.dim; ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

// s in V_t = {t} union {s : s <lex t}.
inline bool in_V(const Point& t, const Point& s) { return !lex_less(t, s); }

// s in V_t^h = V_t with ||t - s||_inf >= h.
inline bool in_V_h(const Point& t, const Point& s, double h) {
    return in_V(t, s) && (t - s).norm_inf() >= h;
}

// ---------------------------------------------------------------------------
// Spheres of influence.

enum class InfluenceShape { lex_halfspace, c_cone, rotated_halfspace };

struct SphereOfInfluence {
    InfluenceShape shape = InfluenceShape::c_cone;
    double c = 1.0;           // cone slope, > 0
    bool spacetime = true;    // time-first cone over m_space spatial dims
    int m_space = 1;
    std::array<double, 4> normal{1.0, 0.0, 0.0, 0.0};  // rotated halfspace

    static SphereOfInfluence cone(double c, int m_space) {
        if (c <= 0.0) throw ParameterOutOfRange("cone slope c must be positive");
        SphereOfInfluence a;
        a.shape = InfluenceShape::c_cone;
        a.c = c;
        a.m_space = m_space;
        return a;
    }

    int dim() const { return shape == InfluenceShape::c_cone ? m_space + 1 : m_space; }

    // Exact membership s in A_t (translation invariant).
    bool contains(const Point& t, const Point& s) const {
        const Point d = s - t;  // relative position, d in A_0?
        switch (shape) {
            case InfluenceShape::lex_halfspace:
                return in_V(t, s);
            case InfluenceShape::c_cone: {
                if (d[0] > 0.0) return false;
                double rad = 0.0;
                for (int i = 1; i < d.dim; ++i) rad += d[i] * d[i];
                return std::sqrt(rad) <= c * (-d[0]);
            }
            case InfluenceShape::rotated_halfspace: {
                double dot = 0.0;
                for (int i = 0; i < d.dim; ++i) dot += normal[i] * d[i];
                return dot <= 0.0;
            }
        }
        return false;
    }
};

// b = sup over unit vectors x in A_0 of alpha'x / ||alpha||, in [-1, 0).
// Closed form for cones; halfspaces violate the scalar-product condition.
inline double cone_constant_b(const SphereOfInfluence& a0) {
    switch (a0.shape) {
        case InfluenceShape::c_cone:
            return -1.0 / std::sqrt(1.0 + a0.c * a0.c);
        case InfluenceShape::lex_halfspace:
        case InfluenceShape::rotated_halfspace:
            throw ConditionViolated(
                "halfspace spheres of influence have sup alpha'x/||x|| = 0");
    }
    return -1.0;
}

enum class PsiKind { mmaf, ambit };

// Truncation radius: psi(h) = -b h / sqrt(dim) (mmaf) or -b h / (2 sqrt(m+1))
// for the ambit bounds.
inline double psi(const SphereOfInfluence& a0, double h, PsiKind kind = PsiKind::mmaf) {
    const double b = cone_constant_b(a0);
    const double root = std::sqrt(static_cast<double>(a0.dim()));
    const double val = -b * h / root;
    return kind == PsiKind::mmaf ? val : 0.5 * val;
}

// Parameterization of A_0 truncated at psi in (u, radius) coordinates
// (u = -time). For c <= 1 the set {u >= psi} is exact; for c > 1 only the
// outer bound {u >= psi / c} is available and is flagged.
struct IntegrationDomain {
    double u_min = 0.0;       // integrate over u >= u_min, radius <= c u
    double c = 1.0;
    int m_space = 1;
    bool outer_bound = false;
};

inline IntegrationDomain truncated_cone_domain(const SphereOfInfluence& a0, double psi_val) {
    if (a0.shape != InfluenceShape::c_cone)
        throw UnsupportedShape("truncated domains are parameterized for cones only");
    if (psi_val < 0.0) throw ParameterOutOfRange("psi must be nonnegative");
    IntegrationDomain d;
    d.c = a0.c;
    d.m_space = a0.m_space;
    if (a0.c <= 1.0) {
        d.u_min = psi_val;
    } else {
        d.u_min = psi_val / a0.c;
        d.outer_bound = psi_val > 0.0;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Sampling windows E_n = (0, n]^m on the integer lattice.

struct SamplingWindow {
    int n = 1;
    int m = 1;

    std::int64_t size() const {
        std::int64_t s = 1;
        for (int i = 0; i < m; ++i) s *= n;
        return s;
    }
    std::int64_t boundary_size() const {
        const std::int64_t inner = n > 2 ? n - 2 : 0;
        std::int64_t s = 1;
        for (int i = 0; i < m; ++i) s *= inner;
        return size() - s;
    }
};

// Volume of the m-ball of radius c.
inline double ball_volume(int m, double c) {
    return std::pow(M_PI, m / 2.0) * std::pow(c, m) / std::tgamma(m / 2.0 + 1.0);
}

} // namespace levyfield
