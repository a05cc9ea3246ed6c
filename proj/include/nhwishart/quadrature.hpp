#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace nhw {

struct GlRule {
    std::vector<double> x;  // nodes on [-1,1]
    std::vector<double> w;
};

// Gauss-Legendre nodes by Newton iteration on the Legendre recurrence.
// Rules are cached; the cache lock makes concurrent first use safe.
inline const GlRule& gauss_legendre(int n) {
    static std::map<int, GlRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    GlRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(r)).first->second;
}

template <typename F>
double integrate_gl(F&& f, double a, double b, int n) {
    const GlRule& r = gauss_legendre(n);
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.w[i] * f(c + h * r.x[i]);
    return h * s;
}

// node doubling until successive estimates agree
template <typename F>
double integrate_doubling(F&& f, double a, double b, double tol = 1e-10, int n0 = 24,
                          int nmax = 3072) {
    double prev = integrate_gl(f, a, b, n0);
    for (int n = 2 * n0; n <= nmax; n *= 2) {
        double cur = integrate_gl(f, a, b, n);
        if (std::abs(cur - prev) <= tol * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

// bisecting adaptive rule, GL15 vs GL31 error estimate per segment
namespace detail {
template <typename F>
double adaptive_rec(F& f, double a, double b, double tol, int depth, int max_depth) {
    double c15 = integrate_gl(f, a, b, 15);
    double c31 = integrate_gl(f, a, b, 31);
    if (std::abs(c31 - c15) <= tol || depth >= max_depth) return c31;
    double m = 0.5 * (a + b);
    return adaptive_rec(f, a, m, 0.5 * tol, depth + 1, max_depth) +
           adaptive_rec(f, m, b, 0.5 * tol, depth + 1, max_depth);
}
}  // namespace detail

template <typename F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-12,
                          int max_subdivisions = 30) {
    return detail::adaptive_rec(f, a, b, abs_tol, 0, max_subdivisions);
}

// grid clustered near 0 like scale*sinh(u), endpoints lo..hi mapped exactly
inline std::vector<double> sinh_grid(double lo, double hi, int n, double scale) {
    std::vector<double> g(n);
    double ulo = std::asinh(lo / scale), uhi = std::asinh(hi / scale);
    for (int i = 0; i < n; ++i) {
        double u = ulo + (uhi - ulo) * i / (n - 1);
        g[i] = scale * std::sinh(u);
    }
    return g;
}

// log | Int exp(L(u)) du | over u in [u0,u1], trapezoid with max subtraction.
// L receives u; any Jacobian belongs inside L.
template <typename F>
double log_trapezoid(F&& L, double u0, double u1, int n) {
    double du = (u1 - u0) / (n - 1);
    double m = -1e308;
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) {
        vals[i] = L(u0 + i * du);
        if (vals[i] > m) m = vals[i];
    }
    if (m <= -1e307) return -1e308;
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        s += w * std::exp(vals[i] - m);
    }
    return m + std::log(s * du);
}

// signed log-sum-exp accumulator: keeps sums like sum_i s_i e^{L_i} stable
// when the L_i span far beyond double range
struct LogAccum {
    double max_log = -1e308;
    double acc = 0.0;

    void add(double log_mag, double sign) {
        if (sign == 0.0 || log_mag <= -1e307) return;
        if (log_mag > max_log) {
            acc = acc * std::exp(max_log - log_mag) + sign;
            max_log = log_mag;
        } else {
            acc += sign * std::exp(log_mag - max_log);
        }
    }
    double log_abs() const {
        if (acc == 0.0 || max_log <= -1e307) return -1e308;
        return max_log + std::log(std::abs(acc));
    }
    double sign() const { return acc > 0 ? 1.0 : (acc < 0 ? -1.0 : 0.0); }
    double value() const { return acc == 0.0 ? 0.0 : acc * std::exp(max_log); }
};

// complex companion of LogAccum: sum of phase_i * e^{L_i}
struct ComplexLogAccum {
    double max_log = -1e308;
    std::complex<double> acc{0.0, 0.0};

    void add(double log_mag, std::complex<double> phase) {
        if (phase == std::complex<double>(0.0, 0.0) || log_mag <= -1e307) return;
        if (log_mag > max_log) {
            acc = acc * std::exp(max_log - log_mag) + phase;
            max_log = log_mag;
        } else {
            acc += phase * std::exp(log_mag - max_log);
        }
    }
    double log_abs() const {
        double a = std::abs(acc);
        if (a == 0.0 || max_log <= -1e307) return -1e308;
        return max_log + std::log(a);
    }
    std::complex<double> phase() const {
        double a = std::abs(acc);
        return a == 0.0 ? std::complex<double>(0.0, 0.0) : acc / a;
    }
    std::complex<double> value() const {
        return acc == std::complex<double>(0.0, 0.0) ? acc : acc * std::exp(max_log);
    }
};

// Euler transform of an alternating tail given as per-segment sums
inline double euler_tail(std::vector<double> seg) {
    double tot = 0.0;
    for (int k = 0; k < 24 && !seg.empty(); ++k) {
        tot += seg.front() / std::pow(2.0, k + 1);
        std::vector<double> nxt(seg.size() - 1);
        for (size_t i = 0; i + 1 < seg.size(); ++i) nxt[i] = seg[i] + seg[i + 1];
        seg = std::move(nxt);
    }
    return tot;
}

}  // namespace nhw
