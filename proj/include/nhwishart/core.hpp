#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace nhw {

using cplx = std::complex<double>;

struct EnsembleConfig {
    int beta = 2;
    int n = 1;      // number of nonzero eigenvalue pairs
    int nu = 0;     // rectangularity, also the zero-mode count
    double mu = 1.0;
    double eta_plus = 0.5;
    double eta_minus = 0.0;
    // true for beta=1 with odd n: sampling works, the finite-N correlation
    // formulas do not (they raise when asked)
    bool beta1_odd = false;

    int m() const { return n + nu; }
};

inline EnsembleConfig make_config(int beta, int n, int nu, double mu) {
    if (beta != 1 && beta != 2 && beta != 4)
        throw std::domain_error("make_config: beta must be 1, 2 or 4");
    if (n < 1) throw std::domain_error("make_config: n must be >= 1");
    if (nu < 0) throw std::domain_error("make_config: nu must be >= 0");
    if (!(mu > 0.0 && mu <= 1.0)) throw std::domain_error("make_config: mu must be in (0,1]");
    EnsembleConfig c;
    c.beta = beta;
    c.n = n;
    c.nu = nu;
    c.mu = mu;
    double mu2 = mu * mu;
    c.eta_plus = (1.0 + mu2) / (4.0 * mu2);
    c.eta_minus = (1.0 - mu2) / (4.0 * mu2);
    c.beta1_odd = (beta == 1 && n % 2 == 1);
    return c;
}

// v = z^2 picture change: the two Dirac points of a product eigenvalue
inline std::pair<cplx, cplx> wishart_to_dirac_point(cplx v) {
    cplx z = std::sqrt(v);  // principal branch
    return {z, -z};
}

// Density transport under v = z^2 for k-point correlators on the complex
// plane: factor 2^{2k} prod |z_j|^2.
inline double wishart_to_dirac_density(
    int k, const std::function<double(const std::vector<cplx>&)>& wishart_values,
    const std::vector<cplx>& dirac_points) {
    if (k < 1 || static_cast<int>(dirac_points.size()) != k)
        throw std::domain_error("wishart_to_dirac_density: need k points");
    std::vector<cplx> v(k);
    double jac = 1.0;
    for (int i = 0; i < k; ++i) {
        v[i] = dirac_points[i] * dirac_points[i];
        jac *= 4.0 * std::norm(dirac_points[i]);
    }
    return jac * wishart_values(v);
}

// beta=1 real line transport: one factor 2|x| per coordinate
inline double dirac_axis_density(const std::function<double(double)>& wishart_line_density,
                                 double x) {
    return 2.0 * std::abs(x) * wishart_line_density(x * x);
}

enum class GridKind { empirical, analytic };
enum class Picture { wishart, dirac };

struct DensityGrid {
    double x_min = -2.5, x_max = 2.5, y_min = -2.5, y_max = 2.5;
    int nx = 80, ny = 80;
    std::vector<double> values;  // row-major [iy*nx+ix], per unit area
    GridKind kind = GridKind::empirical;
    Picture picture = Picture::dirac;

    double cell_area() const {
        return (x_max - x_min) / nx * ((y_max - y_min) / ny);
    }
    double cell_x(int ix) const { return x_min + (ix + 0.5) * (x_max - x_min) / nx; }
    double cell_y(int iy) const { return y_min + (iy + 0.5) * (y_max - y_min) / ny; }
    int index_of(double x, double y) const {
        if (x < x_min || x >= x_max || y < y_min || y >= y_max) return -1;
        int ix = static_cast<int>((x - x_min) / (x_max - x_min) * nx);
        int iy = static_cast<int>((y - y_min) / (y_max - y_min) * ny);
        if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return -1;
        return iy * nx + ix;
    }
};

struct MacroParams {
    double c = 1.0;        // N/(N+nu)
    double q = 0.0;        // nu/N
    double v_ellipse = 1.0;
};

inline MacroParams make_macro(const EnsembleConfig& cfg) {
    MacroParams p;
    p.c = double(cfg.n) / double(cfg.n + cfg.nu);
    p.q = double(cfg.nu) / double(cfg.n);
    p.v_ellipse = cfg.mu;
    return p;
}

}  // namespace nhw
