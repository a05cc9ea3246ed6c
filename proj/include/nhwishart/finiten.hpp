#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nhwishart/core.hpp"
#include "nhwishart/pfaffian.hpp"
#include "nhwishart/quadrature.hpp"
#include "nhwishart/scaled_value.hpp"
#include "nhwishart/specfun.hpp"

namespace nhw {

// ----------------------------------------------------------------- weights

// log of |z|^{beta nu/2} K_{beta nu/2}(2N eta+ |z|) exp(2N eta- Re z).
// The K exponent and the exponential are combined here, never separately.
inline double log_weight_w(const EnsembleConfig& cfg, cplx z) {
    if (cfg.beta != 2 && cfg.beta != 4)
        throw std::domain_error("weight_w: defined for beta=2,4");
    double s = 0.5 * cfg.beta * cfg.nu;
    double r = std::abs(z);
    double a = 2.0 * cfg.n * cfg.eta_plus;
    if (r == 0.0) {
        if (cfg.nu == 0) throw std::domain_error("weight_w: z=0 with nu=0");
        // r^s K_s(a r) -> 2^{s-1} Gamma(s) / a^s
        return (s - 1.0) * M_LN2 + lgamma_r(s) - s * std::log(a);
    }
    return s * std::log(r) - a * r + log_kve(s, a * r) + 2.0 * cfg.n * cfg.eta_minus * z.real();
}

inline ScaledValue weight_w(const EnsembleConfig& cfg, cplx z) {
    return ScaledValue::from_log(log_weight_w(cfg, z));
}

// --------------------------------------------------------- kernel evaluator

// Per-degree prefactors of the kernel sums, stored as logs, plus the
// constant that fixes Int R_N = N.  Construction requires mu bounded away
// from 1 because every table contains powers of eta-/eta+.
struct KernelEvaluator {
    EnsembleConfig config;
    std::vector<double> log_coeff;   // b2: combined c_k; b4: M_k; b1: collapsed d_j
    std::vector<double> aux_log;     // b4: inner c_j; b1: skew norms s_k
    double log_pref = 0.0;           // b1 collapsed overall prefactor
    double normalization_constant = 1.0;
};

inline KernelEvaluator make_kernel(const EnsembleConfig& cfg) {
    if (1.0 - cfg.mu * cfg.mu < 1e-6) throw std::runtime_error("mu too close to 1");
    const int n = cfg.n, nu = cfg.nu;
    const double mu2 = cfg.mu * cfg.mu;
    const double lr = std::log(cfg.eta_minus / cfg.eta_plus);
    KernelEvaluator ke;
    ke.config = cfg;
    if (cfg.beta == 2) {
        ke.normalization_constant = 1.0 / (2.0 * mu2);
        ke.log_coeff.resize(n);
        for (int k = 0; k < n; ++k)
            ke.log_coeff[k] = (nu + 2.0) * std::log(double(n)) - std::log(M_PI) -
                              nu * std::log1p(mu2) + lgamma_r(k + 1.0) - lgamma_r(k + nu + 1.0) +
                              2.0 * k * lr;
    } else if (cfg.beta == 4) {
        ke.normalization_constant = 0.5;
        ke.log_coeff.resize(n);
        ke.aux_log.resize(n);
        const double ln_n = std::log(double(n));
        for (int j = 0; j < n; ++j)
            ke.aux_log[j] = 2.0 * j * lr + lgamma_r(2.0 * j + 1.0) - j * std::log(4.0) -
                            lgamma_r(j + 1.0) - lgamma_r(j + nu + 1.0);
        for (int k = 0; k < n; ++k) {
            double log_hk = std::log(8.0 * M_PI) + 4.0 * std::log(cfg.mu) +
                            lgamma_r(2.0 * k + 2.0) + lgamma_r(2.0 * k + 2.0 * nu + 2.0) +
                            (4.0 * k + 2.0 * nu) * std::log1p(mu2) -
                            (4.0 * k + 2.0 * nu + 4.0) * ln_n;
            ke.log_coeff[k] = lgamma_r(2.0 * k + 2.0) + (2.0 * k + 1.0) * std::log((1.0 - mu2) / n) +
                              2.0 * k * std::log(2.0 * (1.0 + mu2) / n) + lgamma_r(k + 1.0) +
                              lgamma_r(k + nu + 1.0) - log_hk;
        }
    } else {
        if (n % 2) throw std::runtime_error("odd N unsupported for beta=1 analytics");
        ke.normalization_constant = 1.0;
        ke.log_coeff.resize(n - 1);
        for (int j = 0; j + 1 < n; ++j)
            ke.log_coeff[j] = 2.0 * j * lr + lgamma_r(j + 2.0) - lgamma_r(j + nu + 1.0);
        ke.log_pref = 2.0 * std::log(double(n)) + std::log(cfg.eta_minus) +
                      nu * std::log(double(n)) - std::log(4.0 * M_PI) -
                      (nu + 1.0) * std::log(2.0 * mu2 * cfg.eta_plus);
        const double sp = (1.0 + mu2) / (2.0 * n);
        ke.aux_log.resize(n / 2);
        for (int k = 0; k < n / 2; ++k)
            ke.aux_log[k] = std::log(8.0 * M_PI) + 2.0 * std::log(cfg.mu) +
                            lgamma_r(2.0 * k + 1.0) + lgamma_r(2.0 * k + nu + 1.0) +
                            (4.0 * k + nu + 1.0) * std::log(sp) - 2.0 * std::log(double(n));
    }
    return ke;
}

// ------------------------------------------------------------ beta=2 kernel

// K(z,u) with the conjugation of the second slot applied internally, so the
// diagonal is kernel_b2(ke, z, z).
inline ScaledComplex kernel_b2_scaled(const KernelEvaluator& ke, cplx z, cplx u) {
    const auto& cfg = ke.config;
    const double c = cfg.n / (1.0 - cfg.mu * cfg.mu);
    auto r1 = laguerre_row(cfg.n - 1, cfg.nu, c * z);
    auto r2 = laguerre_row(cfg.n - 1, cfg.nu, c * std::conj(u));
    ComplexLogAccum acc;
    for (int k = 0; k < cfg.n; ++k) {
        cplx p = r1[k] * r2[k];
        double m = std::abs(p);
        if (m == 0.0) continue;
        acc.add(ke.log_coeff[k] + std::log(m), p / m);
    }
    return ScaledComplex::from_log(acc.log_abs(), acc.phase());
}

inline ScaledComplex kernel_b2(const KernelEvaluator& ke, cplx z, cplx u) {
    if (ke.config.beta != 2) throw std::domain_error("kernel_b2: beta=2 evaluator required");
    return kernel_b2_scaled(ke, z, u);
}

// mu=1 limit of the beta=2 kernel (truncated I-Bessel type sum)
inline ScaledComplex kernel_b2_mu1(const EnsembleConfig& cfg, cplx z, cplx u) {
    const int n = cfg.n, nu = cfg.nu;
    cplx w = z * std::conj(u);
    double aw = std::abs(w);
    double lw = aw > 0 ? std::log(aw) : 0.0;
    cplx ph = aw > 0 ? w / aw : cplx(1.0, 0.0);
    const double lpre = (nu + 2.0) * std::log(double(n)) - std::log(M_PI) - nu * M_LN2;
    ComplexLogAccum acc;
    cplx phk = 1.0;
    for (int k = 0; k < n; ++k) {
        acc.add(lpre + k * (2.0 * std::log(double(n)) - 2.0 * M_LN2 + lw) -
                    lgamma_r(k + 1.0) - lgamma_r(k + nu + 1.0),
                phk);
        if (aw == 0.0) break;
        phk *= ph;
    }
    return ScaledComplex::from_log(acc.log_abs(), acc.phase());
}

// ----------------------------------------------------- beta=4 skew objects

// (q_even, q_odd) = (q_{2k}, q_{2k+1}) at z
inline std::pair<cplx, cplx> skew_polys_b4(int k, const EnsembleConfig& cfg, cplx z) {
    if (cfg.beta != 4) throw std::domain_error("skew_polys_b4: beta=4 required");
    if (k < 0 || 2 * k + 1 > 2 * cfg.n - 1) throw std::domain_error("skew_polys_b4: degree out of range");
    if (1.0 - cfg.mu * cfg.mu < 1e-6) throw std::runtime_error("mu too close to 1");
    const int nu = cfg.nu, n = cfg.n;
    const double mu2 = cfg.mu * cfg.mu;
    const double chat = n / (1.0 - mu2);
    const double lr = std::log(cfg.eta_minus / cfg.eta_plus);
    auto rows = laguerre_row(2 * k + 1, 2 * nu, chat * z);
    cplx q_odd = -std::exp(lgamma_r(2.0 * k + 2.0) + (2.0 * k + 1.0) * std::log((1.0 - mu2) / n)) *
                 rows[2 * k + 1];
    cplx inner = 0.0;
    for (int j = 0; j <= k; ++j) {
        double lc = 2.0 * j * lr + lgamma_r(2.0 * j + 1.0) - j * std::log(4.0) -
                    lgamma_r(j + 1.0) - lgamma_r(j + nu + 1.0);
        inner += std::exp(lc) * rows[2 * j];
    }
    cplx q_even = std::exp(2.0 * k * std::log(2.0 * (1.0 + mu2) / n) + lgamma_r(k + 1.0) +
                           lgamma_r(k + nu + 1.0)) *
                  inner;
    return {q_even, q_odd};
}

// antisymmetric kernel, both slots literal (callers pass conjugates where
// the correlators need them)
inline ScaledComplex kernel_b4_scaled(const KernelEvaluator& ke, cplx z1, cplx z2) {
    const auto& cfg = ke.config;
    const int n = cfg.n, nu = cfg.nu;
    const double chat = n / (1.0 - cfg.mu * cfg.mu);
    auto r1 = laguerre_row(2 * n - 1, 2 * nu, chat * z1);
    auto r2 = laguerre_row(2 * n - 1, 2 * nu, chat * z2);
    std::vector<cplx> in1(n), in2(n);
    cplx a1 = 0.0, a2 = 0.0;
    for (int j = 0; j < n; ++j) {
        double cj = std::exp(ke.aux_log[j]);
        a1 += cj * r1[2 * j];
        a2 += cj * r2[2 * j];
        in1[j] = a1;
        in2[j] = a2;
    }
    ComplexLogAccum acc;
    for (int k = 0; k < n; ++k) {
        cplx body = -(r1[2 * k + 1] * in2[k] - r2[2 * k + 1] * in1[k]);
        double m = std::abs(body);
        if (m == 0.0) continue;
        acc.add(ke.log_coeff[k] + std::log(m), body / m);
    }
    return ScaledComplex::from_log(acc.log_abs(), acc.phase());
}

inline cplx kernel_b4(const KernelEvaluator& ke, cplx z1, cplx z2) {
    if (ke.config.beta != 4) throw std::domain_error("kernel_b4: beta=4 evaluator required");
    return kernel_b4_scaled(ke, z1, z2).value();
}

// mu=1 closed form of the beta=4 kernel
inline ScaledComplex kernel_b4_mu1(const EnsembleConfig& cfg, cplx z1, cplx z2) {
    const int n = cfg.n, nu = cfg.nu;
    const double ln_n = std::log(double(n));
    double l1 = std::abs(z1) > 0 ? std::log(std::abs(z1)) : -1e308;
    double l2 = std::abs(z2) > 0 ? std::log(std::abs(z2)) : -1e308;
    double t1 = std::arg(z1), t2 = std::arg(z2);
    ComplexLogAccum acc;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j <= k; ++j) {
            double lc = (2.0 * k + 2.0 * j + 2.0 * nu + 4.0) * ln_n + lgamma_r(k + 1.0) +
                        lgamma_r(k + nu + 1.0) -
                        (std::log(8.0 * M_PI) + 2.0 * nu * M_LN2 + lgamma_r(2.0 * k + 2.0) +
                         lgamma_r(2.0 * k + 2.0 * nu + 2.0) + 4.0 * j * M_LN2 +
                         lgamma_r(j + 1.0) + lgamma_r(j + nu + 1.0));
            // z1^{2k+1} z2^{2j} - z2^{2k+1} z1^{2j}
            double la = lc + (2.0 * k + 1.0) * l1 + 2.0 * j * l2;
            double lb = lc + (2.0 * k + 1.0) * l2 + 2.0 * j * l1;
            acc.add(la, std::polar(1.0, (2.0 * k + 1.0) * t1 + 2.0 * j * t2));
            acc.add(lb, -std::polar(1.0, (2.0 * k + 1.0) * t2 + 2.0 * j * t1));
        }
    return ScaledComplex::from_log(acc.log_abs(), acc.phase());
}

// -------------------------------------------------------- beta=2,4 density

inline double density_max_nh(const EnsembleConfig& cfg, cplx z);

// complex-plane density, normalized to Int R d^2z = N
inline double density(const EnsembleConfig& cfg, cplx z) {
    if (cfg.beta != 2 && cfg.beta != 4) throw std::domain_error("density: beta=2,4 only");
    if (cfg.mu == 1.0) return density_max_nh(cfg, z);
    KernelEvaluator ke = make_kernel(cfg);
    double lw = log_weight_w(cfg, z);
    if (cfg.beta == 2) {
        ScaledComplex k = kernel_b2_scaled(ke, z, z);
        return k.mantissa.real() * std::exp(lw + k.log_scale - std::log(2.0 * cfg.mu * cfg.mu));
    }
    ScaledComplex k = kernel_b4_scaled(ke, z, std::conj(z));
    cplx f = (std::conj(z) - z) * k.mantissa;
    return 0.5 * f.real() * std::exp(lw + k.log_scale);
}

// ---------------------------------------------------------- beta=1 weights

// h (real-eigenvalue weight) and g (complex-pair weight).  g's integrand is
// assembled from scaled Bessel and log-erfc so the net exponent never
// leaves double range; the t-integral runs on a trapezoid in log t, which
// is spectrally accurate for this bump-shaped integrand.
struct Beta1Weights {
    EnsembleConfig config;
    double abs_tol = 1e-12;
    int max_subdivisions = 30;
    int t_nodes = 1801;  // log-t resolution, du = 0.02 over [-20, 16]

    double log_h(double x) const {
        const auto& c = config;
        double ax = std::abs(x);
        double a = 2.0 * c.n * c.eta_plus;
        if (ax == 0.0) {
            if (c.nu == 0) throw std::domain_error("beta1 h: x=0 with nu=0");
            return M_LN2 + (0.5 * c.nu - 1.0) * M_LN2 + lgamma_r(0.5 * c.nu) -
                   0.5 * c.nu * std::log(a);
        }
        return M_LN2 + 0.5 * c.nu * std::log(ax) - a * ax + log_kve(0.5 * c.nu, a * ax) +
               2.0 * c.n * c.eta_minus * x;
    }
    double h(double x) const { return std::exp(log_h(x)); }

    double log_g(cplx z) const {
        const auto& c = config;
        double x = z.real(), y = z.imag(), r2 = std::norm(z);
        if (r2 == 0.0) throw std::domain_error("beta1 g: z=0");
        const double a = 8.0 * double(c.n) * c.n * c.eta_plus * c.eta_plus;
        const double b = 4.0 * c.n * c.eta_plus;  // erfc slope against |Im z|
        double pref = M_LN2 + 0.5 * c.nu * std::log(r2) + 4.0 * c.n * c.eta_minus * x;
        auto L = [&](double u) {
            double t = std::exp(u);
            return -a * t * (x * x - y * y) - 1.0 / (4.0 * t) +
                   log_kve(0.5 * c.nu, a * t * r2) - a * t * r2 +
                   log_erfc(b * std::sqrt(t) * std::abs(y));
        };
        return pref + log_trapezoid(L, -20.0, 16.0, t_nodes);
    }
    double g(cplx z) const { return std::exp(log_g(z)); }
};

inline Beta1Weights beta1_weights(const EnsembleConfig& cfg) {
    if (cfg.beta != 1) throw std::domain_error("beta1_weights: beta=1 required");
    Beta1Weights bw;
    bw.config = cfg;
    return bw;
}

// contract form: the correlators only ever need z2 = conj(z1)
inline double weight_g(const Beta1Weights& bw, cplx z1, cplx z2) {
    if (std::abs(z2 - std::conj(z1)) > 1e-9 * (1.0 + std::abs(z1)))
        throw std::domain_error("weight_g: expects z2 = conj(z1)");
    return bw.g(z1);
}

// closed forms at maximal non-Hermiticity (mu = 1); no Laguerre sum at the
// then-singular argument
inline double density_max_nh(const EnsembleConfig& cfg, cplx z) {
    if (cfg.mu != 1.0) throw std::domain_error("density_max_nh requires mu=1");
    const int n = cfg.n, nu = cfg.nu;
    double r = std::abs(z);
    if (cfg.beta == 2) {
        if (r == 0.0) {
            if (nu == 0) throw std::domain_error("density_max_nh: z=0 with nu=0");
            r = 1e-280;
        }
        LogAccum s;
        double lh = std::log(0.5 * n * r);
        for (int l = 0; l < n; ++l)
            s.add((2.0 * l + nu) * lh - lgamma_r(l + 1.0) - lgamma_r(l + nu + 1.0), 1.0);
        double lk = -n * r + log_kve(nu, n * r);
        return std::exp(lk + s.log_abs() + 2.0 * std::log(double(n)) - std::log(2.0 * M_PI));
    }
    if (cfg.beta == 4) {
        double y = z.imag();
        if (y == 0.0 || r == 0.0) return 0.0;
        double th = std::arg(z), lr = std::log(r);
        const double ln_n = std::log(double(n));
        LogAccum s;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j <= k; ++j) {
                double lc = (2.0 * k + 2.0 * j + 2.0 * nu + 4.0) * ln_n + lgamma_r(k + 1.0) +
                            lgamma_r(k + nu + 1.0) -
                            (std::log(8.0 * M_PI) + 2.0 * nu * M_LN2 + lgamma_r(2.0 * k + 2.0) +
                             lgamma_r(2.0 * k + 2.0 * nu + 2.0) + 4.0 * j * M_LN2 +
                             lgamma_r(j + 1.0) + lgamma_r(j + nu + 1.0));
                double sn = std::sin((2.0 * (k - j) + 1.0) * th);
                if (sn == 0.0) continue;
                s.add(lc + (2.0 * k + 2.0 * j + 1.0) * lr + std::log(std::abs(sn)),
                      sn > 0 ? 1.0 : -1.0);
            }
        if (s.sign() == 0.0) return 0.0;
        double lk = -n * r + log_kve(2.0 * nu, n * r);
        return s.sign() * std::exp(M_LN2 + std::log(std::abs(y)) + 2.0 * nu * lr + lk + s.log_abs());
    }
    // beta=1: complex-part count density
    double y = z.imag();
    if (y == 0.0) return 0.0;
    if (cfg.n % 2) throw std::runtime_error("odd N unsupported for beta=1 analytics");
    if (r == 0.0) return 0.0;
    LogAccum s;
    double lw = 2.0 * (std::log(double(n)) + std::log(r));
    for (int j = 0; j + 1 < n; ++j)
        s.add(j * lw - lgamma_r(j + 1.0) - lgamma_r(j + nu + 1.0), 1.0);
    Beta1Weights bw = beta1_weights(cfg);
    double lk = std::log(std::abs(y)) + s.log_abs() + (nu + 3.0) * std::log(double(n)) -
                std::log(2.0 * M_PI);
    return std::exp(lk + bw.log_g(z));
}

// ------------------------------------------------------ beta=1 skew objects

inline std::pair<cplx, cplx> skew_polys_b1(int k, const EnsembleConfig& cfg, cplx z) {
    if (cfg.beta != 1) throw std::domain_error("skew_polys_b1: beta=1 required");
    if (1.0 - cfg.mu * cfg.mu < 1e-6) throw std::runtime_error("mu too close to 1");
    const int nu = cfg.nu, n = cfg.n;
    const double sm = (1.0 - cfg.mu * cfg.mu) / (2.0 * n);
    const double sp = (1.0 + cfg.mu * cfg.mu) / (2.0 * n);
    auto C = [&](int m) -> cplx {
        return std::exp(m * std::log(sm) + lgamma_r(m + 1.0)) * laguerre(m, nu, z / sm);
    };
    cplx q_even = C(2 * k);
    cplx q_odd = -C(2 * k + 1);
    if (k >= 1) q_odd += sp * sp * (2.0 * k) * (2.0 * k + nu) * C(2 * k - 1);
    return {q_even, q_odd};
}

// log of the skew norm <q_{2k}, q_{2k+1}> for beta = 1, 4
inline double log_skew_norm(const EnsembleConfig& cfg, int k) {
    const int nu = cfg.nu;
    const double mu2 = cfg.mu * cfg.mu;
    if (cfg.beta == 4)
        return std::log(8.0 * M_PI) + 4.0 * std::log(cfg.mu) + lgamma_r(2.0 * k + 2.0) +
               lgamma_r(2.0 * k + 2.0 * nu + 2.0) + (4.0 * k + 2.0 * nu) * std::log1p(mu2) -
               (4.0 * k + 2.0 * nu + 4.0) * std::log(double(cfg.n));
    if (cfg.beta == 1) {
        const double sp = (1.0 + mu2) / (2.0 * cfg.n);
        return std::log(8.0 * M_PI) + 2.0 * std::log(cfg.mu) + lgamma_r(2.0 * k + 1.0) +
               lgamma_r(2.0 * k + nu + 1.0) + (4.0 * k + nu + 1.0) * std::log(sp) -
               2.0 * std::log(double(cfg.n));
    }
    throw std::domain_error("log_skew_norm: beta=1,4 only");
}

// antisymmetric beta=1 kernel, collapsed single-sum form
inline ScaledComplex kernel_b1_scaled(const KernelEvaluator& ke, cplx z1, cplx z2) {
    const auto& cfg = ke.config;
    const double sm = (1.0 - cfg.mu * cfg.mu) / (2.0 * cfg.n);
    auto r1 = laguerre_row(cfg.n - 1, cfg.nu, z1 / sm);
    auto r2 = laguerre_row(cfg.n - 1, cfg.nu, z2 / sm);
    ComplexLogAccum acc;
    for (int j = 0; j + 1 < cfg.n; ++j) {
        cplx body = r2[j + 1] * r1[j] - r1[j + 1] * r2[j];
        double m = std::abs(body);
        if (m == 0.0) continue;
        acc.add(ke.log_pref + ke.log_coeff[j] + std::log(m), body / m);
    }
    return ScaledComplex::from_log(acc.log_abs(), acc.phase());
}

inline cplx kernel_b1(const KernelEvaluator& ke, cplx z1, cplx z2) {
    if (ke.config.beta != 1) throw std::domain_error("kernel_b1: beta=1 evaluator required");
    return kernel_b1_scaled(ke, z1, z2).value();
}

// independent route through the skew-orthogonal polynomials; agrees with
// kernel_b1 to 1e-10 and exists so the two stay mutually checking
inline cplx kernel_b1_skew(const EnsembleConfig& cfg, cplx z1, cplx z2) {
    if (cfg.n % 2) throw std::runtime_error("odd N unsupported for beta=1 analytics");
    KernelEvaluator ke = make_kernel(cfg);
    cplx sum = 0.0;
    for (int k = 0; k < cfg.n / 2; ++k) {
        auto [e1, o1] = skew_polys_b1(k, cfg, z1);
        auto [e2, o2] = skew_polys_b1(k, cfg, z2);
        sum += (o1 * e2 - o2 * e1) * std::exp(-ke.aux_log[k]);
    }
    return sum;
}

// mu=1 closed form
inline ScaledComplex kernel_b1_mu1(const EnsembleConfig& cfg, cplx z1, cplx z2) {
    const int n = cfg.n, nu = cfg.nu;
    cplx diff = z1 - z2;
    double md = std::abs(diff);
    if (md == 0.0) return ScaledComplex{};
    cplx w = z1 * z2;
    double aw = std::abs(w);
    double lw = aw > 0 ? std::log(aw) : 0.0;
    cplx ph = aw > 0 ? w / aw : cplx(1.0, 0.0);
    ComplexLogAccum acc;
    cplx phj = 1.0;
    for (int j = 0; j + 1 < n; ++j) {
        acc.add(j * (2.0 * std::log(double(n)) + lw) - lgamma_r(j + 1.0) - lgamma_r(j + nu + 1.0),
                phj);
        if (aw == 0.0) break;
        phj *= ph;
    }
    double lpre = (nu + 3.0) * std::log(double(n)) - std::log(8.0 * M_PI);
    return ScaledComplex::from_log(lpre + std::log(md) + acc.log_abs(), (diff / md) * acc.phase());
}

namespace detail {

inline ScaledComplex kernel_b1_any(const EnsembleConfig& cfg, cplx z1, cplx z2) {
    if (cfg.mu == 1.0) return kernel_b1_mu1(cfg, z1, z2);
    KernelEvaluator ke = make_kernel(cfg);
    return kernel_b1_scaled(ke, z1, z2);
}

}  // namespace detail

// --------------------------------------------------------- beta=1 density

// (complex-part count density at z, real-axis count density at Re z).
// Complex part integrates over the plane, real part over the line; the two
// masses together make N.
inline std::pair<double, double> density_b1(const Beta1Weights& bw, cplx z) {
    const EnsembleConfig& cfg = bw.config;
    if (cfg.beta != 1) throw std::domain_error("density_b1: beta=1 required");
    if (cfg.n % 2) throw std::runtime_error("odd N unsupported for beta=1 analytics");

    double rc = 0.0;
    if (z.imag() != 0.0) {
        if (cfg.mu == 1.0) {
            rc = density_max_nh(cfg, z);
        } else {
            ScaledComplex k = detail::kernel_b1_any(cfg, z, std::conj(z));
            double sgn_y = z.imag() > 0 ? 1.0 : -1.0;
            double body = 2.0 * sgn_y * k.mantissa.imag();
            rc = body == 0.0 ? 0.0 : body * std::exp(k.log_scale + bw.log_g(z));
        }
    }

    // real-axis part at x = Re z
    double x = z.real();
    double lo = -(40.0 * cfg.mu * cfg.mu / cfg.n + 2.0);
    double hi = 40.0 / cfg.n + 6.0;
    std::vector<double> splits = {lo, 0.0, hi};
    if (x > lo && x < hi) splits.push_back(x);
    std::sort(splits.begin(), splits.end());
    double acc = 0.0;
    auto seg_quad = [&](double a, double b, double sgn) {
        if (b - a < 1e-300) return;
        // panels geometrically refined toward an endpoint at 0, where h has
        // its integrable kink; panel count and early-out come from bw
        std::vector<double> bounds;
        const int np = std::max(6, std::min(bw.max_subdivisions, 40));
        bool shrinking_tail = false;  // panel widths decrease along iteration
        if (a == 0.0) {
            bounds.push_back(a);
            for (int i = np - 1; i >= 0; --i) bounds.push_back(b * std::pow(0.5, i));
        } else if (b == 0.0) {
            bounds.push_back(a);
            for (int i = 0; i < np; ++i) bounds.push_back(a * std::pow(0.5, i + 1));
            bounds.push_back(0.0);
            shrinking_tail = true;
        } else {
            int nu_ = std::min(np, 14);
            for (int i = 0; i <= nu_; ++i) bounds.push_back(a + (b - a) * i / nu_);
        }
        for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
            double p = bounds[i], q = bounds[i + 1];
            if (q - p < 1e-300) continue;
            double part = integrate_gl(
                [&](double xp) {
                    ScaledComplex kk = detail::kernel_b1_any(cfg, x, xp);
                    // kernel of two real arguments is real
                    return kk.mantissa.real() * std::exp(kk.log_scale + bw.log_h(xp));
                },
                p, q, 12);
            acc += sgn * part;
            if (shrinking_tail && i > 4 &&
                std::abs(part) < bw.abs_tol * std::max(1.0, std::abs(acc)))
                break;
        }
    };
    for (std::size_t i = 0; i + 1 < splits.size(); ++i) {
        double a = splits[i], b = splits[i + 1];
        double mid = 0.5 * (a + b);
        seg_quad(a, b, mid < x ? 1.0 : -1.0);  // sgn(x - x')
    }
    double rr = bw.h(x) * acc;
    return {rc, rr};
}

inline std::pair<double, double> density_b1(const EnsembleConfig& cfg, cplx z) {
    return density_b1(beta1_weights(cfg), z);
}

// ----------------------------------------------------------------- kpoint

// k-point correlation function at complex points, all betas.  k <= 4.
inline double kpoint(const EnsembleConfig& cfg, const std::vector<cplx>& points) {
    const int k = static_cast<int>(points.size());
    if (k < 1 || k > 4) throw std::domain_error("kpoint: k must be in 1..4");

    if (cfg.beta == 2) {
        Eigen::MatrixXcd a(k, k);
        std::vector<double> lw(k);
        for (int i = 0; i < k; ++i) lw[i] = log_weight_w(cfg, points[i]);
        double lnorm = std::log(2.0 * cfg.mu * cfg.mu);
        std::vector<ScaledComplex> ks(k * k);
        double mx = -1e308;
        KernelEvaluator ke;
        bool mu1 = cfg.mu == 1.0;
        if (!mu1) ke = make_kernel(cfg);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                ScaledComplex kk = mu1 ? kernel_b2_mu1(cfg, points[i], points[j])
                                       : kernel_b2_scaled(ke, points[i], points[j]);
                double lm = kk.log_abs() + 0.5 * (lw[i] + lw[j]) - lnorm;
                ks[i * k + j] = ScaledComplex::from_log(lm, kk.phase());
                mx = std::max(mx, lm);
            }
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                const auto& s = ks[i * k + j];
                a(i, j) = s.phase() * std::exp(std::max(s.log_abs() - mx, -745.0));
            }
        return a.determinant().real() * std::exp(k * mx);
    }

    if (cfg.beta == 4) {
        std::vector<cplx> u(2 * k);
        for (int i = 0; i < k; ++i) {
            u[2 * i] = points[i];
            u[2 * i + 1] = std::conj(points[i]);
        }
        bool mu1 = cfg.mu == 1.0;
        KernelEvaluator ke;
        if (!mu1) ke = make_kernel(cfg);
        Eigen::MatrixXcd m(2 * k, 2 * k);
        double mx = -1e308;
        std::vector<ScaledComplex> ks(4 * k * k);
        for (int i = 0; i < 2 * k; ++i)
            for (int j = 0; j < 2 * k; ++j) {
                if (i == j) {
                    ks[i * 2 * k + j] = ScaledComplex{};
                    continue;
                }
                ScaledComplex kk = mu1 ? kernel_b4_mu1(cfg, u[i], u[j])
                                       : kernel_b4_scaled(ke, u[i], u[j]);
                ks[i * 2 * k + j] = kk;
                mx = std::max(mx, kk.log_abs());
            }
        for (int i = 0; i < 2 * k; ++i)
            for (int j = 0; j < 2 * k; ++j) {
                const auto& s = ks[i * 2 * k + j];
                m(i, j) = s.phase() * std::exp(std::max(s.log_abs() - mx, -745.0));
            }
        cplx pf = pfaffian<cplx>(m);
        double lsum = 0.0;
        cplx prod = 1.0;
        for (int i = 0; i < k; ++i) {
            lsum += log_weight_w(cfg, points[i]);
            prod *= std::conj(points[i]) - points[i];
        }
        cplx val = pf * prod;
        return val.real() * std::exp(lsum + k * mx - k * M_LN2);
    }

    // beta = 1: complex points only
    if (cfg.n % 2) throw std::runtime_error("odd N unsupported for beta=1 analytics");
    for (cplx p : points)
        if (std::abs(p.imag()) < 1e-12 * (1.0 + std::abs(p)))
            throw std::domain_error("kpoint: beta=1 needs strictly complex points");
    Beta1Weights bw = beta1_weights(cfg);
    std::vector<double> lg(k), sg(k);
    for (int i = 0; i < k; ++i) {
        lg[i] = bw.log_g(points[i]);
        sg[i] = points[i].imag() > 0 ? 1.0 : -1.0;
    }
    // blocks of the 2k x 2k Pfaffian form, balanced with d_i = g^{1/2}
    auto K = [&](cplx a, cplx b) { return detail::kernel_b1_any(cfg, a, b); };
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * k, 2 * k);
    double mx = -1e308;
    std::vector<std::pair<double, cplx>> ent(4 * k * k, {-1e308, cplx(0, 0)});
    auto put = [&](int i, int j, double lmag, cplx phase) {
        ent[i * 2 * k + j] = {lmag, phase};
        if (phase != cplx(0, 0)) mx = std::max(mx, lmag);
    };
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            if (i != j) {
                // A = K(u_i, u_j), scaled by e^{(lg_i+lg_j)/2}
                ScaledComplex kk = K(points[i], points[j]);
                put(i, j, kk.log_abs() + 0.5 * (lg[i] + lg[j]), kk.phase());
            }
            // B = -G(u_i, u_j); G(u,v) = i sgn(Im v) g(v) K(u, conj v);
            // scaling multiplies by e^{(lg_i - lg_j)/2}
            ScaledComplex kg = K(points[i], std::conj(points[j]));
            put(i, k + j, kg.log_abs() + lg[j] + 0.5 * (lg[i] - lg[j]),
                -cplx(0, 1) * sg[j] * kg.phase());
            // C = -W(u_i, u_j); W = sgn_i sgn_j g_i g_j K(conj u_i, conj u_j)
            if (i != j) {
                ScaledComplex kw = K(std::conj(points[i]), std::conj(points[j]));
                put(k + i, k + j, kw.log_abs() + lg[i] + lg[j] - 0.5 * (lg[i] + lg[j]),
                    -sg[i] * sg[j] * kw.phase());
            }
        }
    // lower-left = -upper-right transposed
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            auto [lm, ph] = ent[i * 2 * k + (k + j)];
            ent[(k + j) * 2 * k + i] = {lm, -ph};
        }
    // rows must interleave as (z_1, conj z_1, ..., z_k, conj z_k); the
    // batched layout above differs by a shuffle whose sign would otherwise
    // enter the Pfaffian
    auto slot = [&](int b) { return b < k ? 2 * b : 2 * (b - k) + 1; };
    for (int i = 0; i < 2 * k; ++i)
        for (int j = 0; j < 2 * k; ++j) {
            auto [lm, ph] = ent[i * 2 * k + j];
            m(slot(i), slot(j)) =
                ph == cplx(0, 0) ? cplx(0, 0) : ph * std::exp(std::max(lm - mx, -745.0));
        }
    cplx pf = pfaffian<cplx>(m);
    return std::pow(2.0, k) * pf.real() * std::exp(k * mx);
}

// ------------------------------------------------------------ ortho check

// 2-D quadrature of the Laguerre orthogonality integral against its closed
// norm.  Direct parameter form; a > b > 0.
inline std::pair<double, double> ortho_check(int j, int k, int nu, double a, double b) {
    if (!(a > b && b > 0.0)) throw std::domain_error("ortho_check: need a > b > 0");
    const double c = (a * a - b * b) / (2.0 * b);
    const double rstar = 45.0 / (a - b);
    auto theta_integral = [&](double r, int ntheta) {
        // periodic trapezoid; integrand is entire in theta
        double s = 0.0;
        for (int i = 0; i < ntheta; ++i) {
            double th = 2.0 * M_PI * i / ntheta;
            cplx w = c * r * std::polar(1.0, th);
            auto row = laguerre_row(std::max(j, k), nu, w);
            s += std::exp(b * r * std::cos(th) - a * r) * (row[j] * std::conj(row[k])).real();
        }
        return s * (2.0 * M_PI / ntheta);
    };
    int ntheta = 64 + 8 * (j + k);
    // panel boundaries doubling away from the K_nu log/power singularity at 0
    std::vector<double> bounds{0.0};
    for (int i = 40; i >= 0; --i) bounds.push_back(rstar * std::ldexp(1.0, -i));
    auto radial = [&](int nt) {
        double total = 0.0;
        for (std::size_t sgi = 0; sgi + 1 < bounds.size(); ++sgi)
            total += integrate_gl(
                [&](double r) {
                    double lk_ = log_kve(nu, a * r);  // log of K_nu(ar) e^{ar}
                    return std::pow(r, nu + 1.0) * std::exp(lk_) * theta_integral(r, nt);
                },
                bounds[sgi], bounds[sgi + 1], 16);
        return total;
    };
    double i1 = radial(ntheta), i2 = radial(2 * ntheta);
    for (int it = 0; it < 3 && std::abs(i2 - i1) > 1e-10 * std::max(1.0, std::abs(i2)); ++it) {
        ntheta *= 2;
        i1 = i2;
        i2 = radial(2 * ntheta);
    }
    double lh = std::log(M_PI) + lgamma_r(j + nu + 1.0) - std::log(a) - lgamma_r(j + 1.0) +
                2.0 * j * std::log(a / b) + (nu + 1.0) * std::log(2.0 * a / (a * a - b * b));
    return {i2, j == k ? std::exp(lh) : 0.0};
}

inline std::pair<double, double> ortho_check(const EnsembleConfig& cfg, int j, int k) {
    if (cfg.mu == 1.0) throw std::domain_error("ortho_check: needs eta- > 0 (mu < 1)");
    return ortho_check(j, k, cfg.nu, 2.0 * cfg.n * cfg.eta_plus, 2.0 * cfg.n * cfg.eta_minus);
}

}  // namespace nhw
