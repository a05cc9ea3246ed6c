#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_bessel.h>
#include <gsl/gsl_sf_erf.h>
#include <gsl/gsl_sf_gamma.h>

#include "nhwishart/quadrature.hpp"
#include "nhwishart/scaled_value.hpp"

namespace nhw {

namespace detail {
// All GSL calls below go through the *_e interface and handle status codes
// locally; the global abort-on-error handler must stay off.
inline const int gsl_handler_off = [] {
    gsl_set_error_handler_off();
    return 0;
}();
}  // namespace detail

using cplx = std::complex<double>;

inline double lgamma_r(double x) { return std::lgamma(x); }

// ---------------------------------------------------------------- bessel K

// K_order(x), order >= 0, x > 0.  Exponent kept in log_scale so arguments
// like x = 1000 round-trip without underflow.
inline ScaledValue bessel_k(double order, double x) {
    if (!(order >= 0.0)) throw std::domain_error("bessel_k: order must be >= 0");
    if (!(x > 0.0)) throw std::domain_error("bessel_k: x must be > 0");
    gsl_sf_result r;
    int st = gsl_sf_bessel_lnKnu_e(order, x, &r);
    if (st != GSL_SUCCESS) throw std::domain_error("bessel_k: evaluation failed");
    return ScaledValue::from_log(r.val);
}

// log(K_order(x) e^x).  Branch for very large x avoids lnKnu overflow limits.
inline double log_kve(double order, double x) {
    if (!(x > 0.0)) throw std::domain_error("log_kve: x must be > 0");
    if (x >= 1e6) {
        // uniform tail K ~ sqrt(pi/(2x)) e^{-x}; order-dependent corrections
        // are O(order^2/x) and below double precision for our orders
        return 0.5 * std::log(M_PI / (2.0 * x)) + std::log1p((4.0 * order * order - 1.0) / (8.0 * x));
    }
    gsl_sf_result r;
    int st = gsl_sf_bessel_lnKnu_e(order, x, &r);
    if (st != GSL_SUCCESS) throw std::domain_error("log_kve: evaluation failed");
    return r.val + x;
}

// ---------------------------------------------------------------- bessel I

inline ScaledValue bessel_i(double order, double x) {
    if (!(order >= 0.0)) throw std::domain_error("bessel_i: order must be >= 0");
    if (!(x >= 0.0)) throw std::domain_error("bessel_i: x must be >= 0");
    if (x == 0.0) return order == 0.0 ? ScaledValue::from(1.0) : ScaledValue{};
    gsl_sf_result r;
    int st = gsl_sf_bessel_Inu_scaled_e(order, x, &r);
    if (st != GSL_SUCCESS || r.val <= 0.0)
        throw std::domain_error("bessel_i: evaluation failed");
    return ScaledValue::from_log(std::log(r.val) + x);
}

// log(I_order(x) e^{-x}) for x > 0
inline double log_ive(double order, double x) {
    gsl_sf_result r;
    int st = gsl_sf_bessel_Inu_scaled_e(order, x, &r);
    if (st != GSL_SUCCESS || r.val <= 0.0)
        throw std::domain_error("log_ive: evaluation failed");
    return std::log(r.val);
}

// ---------------------------------------------------------------- bessel J

namespace detail {

// power series around 0; adequate to ~1e-13 relative for |z| <= 8
inline cplx bessel_j_series(int n, cplx z) {
    cplx h = 0.5 * z;
    cplx hf = 1.0;
    for (int i = 0; i < n; ++i) hf *= h / double(i + 1);
    cplx q = -h * h;
    cplx term = hf, sum = hf;
    for (int m = 1; m < 80; ++m) {
        term *= q / double(m * (m + n));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-320) break;
    }
    return sum;
}

// Miller backward recurrence, normalized by J_0 + 2 sum J_{2k} = 1.
inline cplx bessel_j_miller(int n, cplx z) {
    int m = static_cast<int>(std::abs(z) * 1.3 + 45.0);
    if (m % 2) ++m;
    cplx jp1 = 0.0, j = 1e-30, sum = 0.0, target = 0.0;
    bool have = false;
    for (int k = m; k >= 1; --k) {
        cplx jm1 = (2.0 * k / z) * j - jp1;
        jp1 = j;
        j = jm1;
        if (k - 1 == n) {
            target = j;
            have = true;
        }
        if ((k - 1) % 2 == 0 && k - 1 > 0) sum += j;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp1 *= 1e-250;
            sum *= 1e-250;
            if (have) target *= 1e-250;
        }
    }
    sum = 2.0 * sum + j;  // j now holds the order-0 iterate
    return target / sum;
}

}  // namespace detail

// J_order(z).  Integer orders accept complex z (|z| up to ~50 at full
// precision); non-integer orders are real-axis only, x >= 0.
inline cplx bessel_j(double order, cplx z) {
    if (!(order >= 0.0)) throw std::domain_error("bessel_j: order must be >= 0");
    double ip;
    if (std::modf(order, &ip) == 0.0) {
        int n = static_cast<int>(ip);
        if (z == cplx(0.0, 0.0)) return n == 0 ? 1.0 : 0.0;
        if (z.imag() == 0.0) {
            gsl_sf_result r;
            double x = z.real();
            int st = gsl_sf_bessel_Jn_e(n, std::abs(x), &r);
            if (st == GSL_SUCCESS) {
                double v = (x < 0.0 && n % 2) ? -r.val : r.val;
                return v;
            }
        }
        if (std::abs(z) <= 8.0) return detail::bessel_j_series(n, z);
        return detail::bessel_j_miller(n, z);
    }
    if (z.imag() != 0.0 || z.real() < 0.0)
        throw std::domain_error("bessel_j: non-integer order needs real x >= 0");
    gsl_sf_result r;
    int st = gsl_sf_bessel_Jnu_e(order, z.real(), &r);
    if (st != GSL_SUCCESS) throw std::domain_error("bessel_j: evaluation failed");
    return r.val;
}

// Entire extension of J_n(sqrt(x)) / sqrt(x)^n to real x of either sign:
// nonnegative x uses the J branch, negative x the I branch.
inline double bessel_jhat(int n, double x) {
    if (std::abs(x) <= 1e-12) {
        double v = 1.0;
        for (int i = 1; i <= n; ++i) v /= 2.0 * i;
        return v;
    }
    double w = std::sqrt(std::abs(x));
    gsl_sf_result r;
    if (x > 0.0) {
        if (gsl_sf_bessel_Jn_e(n, w, &r) != GSL_SUCCESS)
            throw std::domain_error("bessel_jhat: J evaluation failed");
        return r.val / std::pow(w, n);
    }
    if (gsl_sf_bessel_In_scaled_e(n, w, &r) != GSL_SUCCESS)
        throw std::domain_error("bessel_jhat: I evaluation failed");
    double lg = std::log(r.val) + w - n * std::log(w);
    return std::exp(lg);
}

// (log |jhat|, sign); survives negative arguments whose plain value
// overflows (the I branch grows like e^{sqrt(-x)})
inline std::pair<double, double> bessel_jhat_log(int n, double x) {
    if (x > -1e5) {
        double v = bessel_jhat(n, x);
        if (v == 0.0) return {-1e308, 0.0};
        return {std::log(std::abs(v)), v > 0 ? 1.0 : -1.0};
    }
    double w = std::sqrt(-x);
    gsl_sf_result r;
    if (gsl_sf_bessel_In_scaled_e(n, w, &r) != GSL_SUCCESS)
        throw std::domain_error("bessel_jhat_log: I evaluation failed");
    return {std::log(r.val) + w - n * std::log(w), 1.0};
}

// ---------------------------------------------------------------- erfc

inline double erfc(double x) {
    gsl_sf_result r;
    if (gsl_sf_erfc_e(x, &r) != GSL_SUCCESS) throw std::domain_error("erfc failed");
    return r.val;
}

// log erfc(x), usable where erfc underflows (x ~ 30 gives exp(-900) scale)
inline double log_erfc(double x) {
    gsl_sf_result r;
    if (gsl_sf_log_erfc_e(x, &r) != GSL_SUCCESS) throw std::domain_error("log_erfc failed");
    return r.val;
}

// ---------------------------------------------------------------- Laguerre

namespace detail {

inline cplx laguerre_series_large(int k, double alpha, cplx z) {
    // descending binomial series; Kahan compensation keeps the alternating
    // cancellation at |z| > 4k below 1e-12 relative
    double logc0 = lgamma_r(k + alpha + 1.0) - lgamma_r(alpha + 1.0) - lgamma_r(k + 1.0);
    cplx term = std::exp(logc0);
    cplx sum = term, comp = 0.0;
    for (int j = 0; j < k; ++j) {
        term *= -z * (double(k - j) / ((j + 1.0) * (alpha + j + 1.0)));
        cplx y = term - comp;
        cplx t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace detail

// generalized Laguerre L_k^alpha(z), k <= 4096, alpha > -1
inline cplx laguerre(int k, double alpha, cplx z) {
    if (k < 0 || k > 4096) throw std::domain_error("laguerre: k out of range");
    if (!(alpha > -1.0)) throw std::domain_error("laguerre: alpha must be > -1");
    if (k == 0) return 1.0;
    if (std::abs(z) > 4.0 * k) return detail::laguerre_series_large(k, alpha, z);
    cplx lm1 = 1.0, l = 1.0 + alpha - z;
    for (int n = 1; n < k; ++n) {
        cplx lp1 = ((2.0 * n + 1.0 + alpha - z) * l - (n + alpha) * lm1) / double(n + 1);
        lm1 = l;
        l = lp1;
    }
    return l;
}

// L_0..L_kmax at one argument via the recurrence (kernel sums need the row)
inline std::vector<cplx> laguerre_row(int kmax, double alpha, cplx z) {
    std::vector<cplx> out(kmax + 1);
    out[0] = 1.0;
    if (kmax == 0) return out;
    out[1] = 1.0 + alpha - z;
    for (int n = 1; n < kmax; ++n)
        out[n + 1] = ((2.0 * n + 1.0 + alpha - z) * out[n] - (n + alpha) * out[n - 1]) / double(n + 1);
    return out;
}

// ------------------------------------------------- incomplete-gamma pair

enum class pm_sign { minus, plus };

// w^{-(p+1)} Gamma(p+1, w) with w = 2 alpha^2 s^2 and p = nu/2 -+ 1/2.
// Accuracy target is absolute at the e^{-w} scale, so the w > 650 branch
// may underflow to zero legitimately.
inline double exp_integral_pm(pm_sign sign, double s, double alpha, int nu) {
    if (!(s > 0.0 && s <= 1.0)) throw std::domain_error("exp_integral_pm: s must be in (0,1]");
    if (!(alpha > 0.0)) throw std::domain_error("exp_integral_pm: alpha must be > 0");
    if (nu < 0) throw std::domain_error("exp_integral_pm: nu must be >= 0");
    double p = 0.5 * nu + (sign == pm_sign::minus ? -0.5 : 0.5);
    double w = 2.0 * alpha * alpha * s * s;
    if (w <= 650.0) {
        gsl_sf_result r;
        if (gsl_sf_gamma_inc_e(p + 1.0, w, &r) != GSL_SUCCESS)
            throw std::domain_error("exp_integral_pm: gamma_inc failed");
        return std::pow(w, -(p + 1.0)) * r.val;
    }
    // Gamma(p+1,w) = e^{-w} w^p Int_0^inf (1+u/w)^p e^{-u} du, truncated where
    // the integrand is below 1e-16 of its start
    double hi = 120.0 + 3.0 * p;
    double acc = integrate_gl([&](double u) { return std::pow(1.0 + u / w, p) * std::exp(-u); },
                              0.0, hi, 96);
    double lg = -w - std::log(w) + std::log(acc);
    return std::exp(lg);
}

}  // namespace nhw
