#pragma once

// Counter-based random streams: every stream is keyed by (master seed, path
// of integer ids), so replication r / component c always sees the same
// numbers no matter how many threads run or in which order streams are
// consumed. The generator core is splitmix64 applied to a hashed key plus a
// running counter.

#include <cmath>
#include <cstdint>

namespace levyfield {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

class RandomStream {
  public:
    explicit RandomStream(std::uint64_t master) : key_(detail::splitmix64(master)) {}

    // Derive an independent child stream; ids identify the branch (e.g.
    // replication index, component tag).
    RandomStream child(std::uint64_t id) const {
        RandomStream s(*this);
        s.key_ = detail::splitmix64(s.key_ ^ detail::splitmix64(id + 0x243f6a8885a308d3ULL));
        s.counter_ = 0;
        return s;
    }

    std::uint64_t next_u64() { return detail::splitmix64(key_ + ++counter_); }

    // uniform on (0, 1) -- never exactly 0 or 1
    double uniform() {
        return (next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Box-Muller; draws are consumed in pairs but one value is returned per
    // call to keep the stream stateless-looking (the spare is kept).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform(), u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

    double exponential(double rate = 1.0) { return -std::log(uniform()) / rate; }

    // Poisson: inversion for small means, normal-approximation-free PTRS-like
    // rejection is avoided; for moderate means use the multiplication method
    // in chunks (exact, O(mean) draws).
    std::uint64_t poisson(double mean) {
        std::uint64_t k = 0;
        while (mean > 0.0) {
            const double chunk = std::min(mean, 500.0);
            const double l = std::exp(-chunk);
            double p = 1.0;
            std::uint64_t kk = 0;
            do {
                ++kk;
                p *= uniform();
            } while (p > l);
            k += kk - 1;
            mean -= chunk;
        }
        return k;
    }

    // Marsaglia-Tsang for shape >= 1; boost by a uniform power for shape < 1.
    double gamma_draw(double shape, double scale) {
        if (shape < 1.0) {
            const double u = uniform();
            return gamma_draw(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
        }
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace levyfield
