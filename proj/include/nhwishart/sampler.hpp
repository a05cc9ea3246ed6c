#pragma once

#include <algorithm>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "nhwishart/core.hpp"
#include "nhwishart/rng.hpp"

namespace nhw {

struct MatrixPair {
    EnsembleConfig config;
    Eigen::MatrixXcd c;  // N x M   (2N x 2M for beta=4 in the complex embedding)
    Eigen::MatrixXcd d;  // M x N   (2M x 2N for beta=4)
};

namespace detail {

inline Eigen::MatrixXd gauss_matrix(Philox& rng, int rows, int cols, double sigma) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = sigma * rng.normal();
    return m;
}

// complex quaternion embedding from four real component matrices
inline Eigen::MatrixXcd quaternion_embed(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                         const Eigen::MatrixXd& c, const Eigen::MatrixXd& d) {
    const int n = static_cast<int>(a.rows()), m = static_cast<int>(a.cols());
    Eigen::MatrixXcd out(2 * n, 2 * m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            out(2 * i, 2 * j) = cplx(a(i, j), b(i, j));
            out(2 * i, 2 * j + 1) = cplx(c(i, j), d(i, j));
            out(2 * i + 1, 2 * j) = cplx(-c(i, j), d(i, j));
            out(2 * i + 1, 2 * j + 1) = cplx(a(i, j), -b(i, j));
        }
    return out;
}

}  // namespace detail

// One draw of the coupled pair (C, D).  `stream` selects an independent
// substream of the same seed; draw i of a batch uses stream i so results
// do not depend on how draws are divided among threads.
inline MatrixPair sample_pair_stream(const EnsembleConfig& cfg, std::uint64_t seed,
                                     std::uint64_t stream) {
    const int n = cfg.n, m = cfg.m();
    const double sigma = 1.0 / std::sqrt(2.0 * cfg.n);
    const double mu = cfg.mu;
    Philox rng(seed, stream);
    MatrixPair out;
    out.config = cfg;

    if (cfg.beta == 2) {
        Eigen::MatrixXd fr = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXd fi = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXd pr = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXd pi = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXcd phi = fr.cast<cplx>() + cplx(0, 1) * fi.cast<cplx>();
        Eigen::MatrixXcd psi = pr.cast<cplx>() + cplx(0, 1) * pi.cast<cplx>();
        out.c = phi + cplx(0, mu) * psi;
        out.d = phi.adjoint() + cplx(0, mu) * psi.adjoint();
    } else if (cfg.beta == 1) {
        Eigen::MatrixXd phi = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXd psi = detail::gauss_matrix(rng, n, m, sigma);
        out.c = (phi + mu * psi).cast<cplx>();
        out.d = (phi.transpose() - mu * psi.transpose()).cast<cplx>();
    } else {
        Eigen::MatrixXd pa = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXd pb = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXd pc = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXd pd = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXd qa = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXd qb = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXd qc = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXd qd = detail::gauss_matrix(rng, n, m, sigma);
        Eigen::MatrixXcd phi = detail::quaternion_embed(pa, pb, pc, pd);
        Eigen::MatrixXcd psi = detail::quaternion_embed(qa, qb, qc, qd);
        // E = I (x) diag(i,-i).  The sign of E is the calibration that makes
        // the sampled spectrum reproduce the analytic density, whose real
        // part is enhanced on the positive axis; flipping it mirrors x -> -x.
        Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            e(2 * i, 2 * i) = cplx(0, 1);
            e(2 * i + 1, 2 * i + 1) = cplx(0, -1);
        }
        out.c = phi + mu * (e * psi);
        out.d = phi.adjoint() + mu * (psi.adjoint() * e);
    }
    return out;
}

inline MatrixPair sample_pair(const EnsembleConfig& cfg, std::uint64_t seed) {
    return sample_pair_stream(cfg, seed, 0);
}

namespace detail {

inline std::vector<cplx> pair_conjugates(std::vector<cplx> vals, double tol) {
    // match each value with its complex conjugate partner, return the
    // members with nonnegative imaginary part
    std::vector<cplx> reps;
    std::vector<bool> used(vals.size(), false);
    std::sort(vals.begin(), vals.end(),
              [](cplx a, cplx b) { return a.imag() > b.imag(); });
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        cplx target = std::conj(vals[i]);
        double best = 1e300;
        std::size_t bj = vals.size();
        for (std::size_t j = 0; j < vals.size(); ++j) {
            if (used[j]) continue;
            double dist = std::abs(vals[j] - target);
            if (dist < best) {
                best = dist;
                bj = j;
            }
        }
        double scale = std::max(1.0, std::abs(vals[i]));
        if (bj == vals.size() || best > tol * scale)
            throw std::runtime_error("unpairable spectrum");
        used[bj] = true;
        reps.push_back(vals[i].imag() >= 0 ? vals[i] : vals[bj]);
    }
    return reps;
}

}  // namespace detail

// Eigenvalues of CD: N product eigenvalues; for beta=4, the N conjugate-pair
// representatives (nonnegative imaginary part) of the 2N embedding values.
inline std::vector<cplx> wishart_spectrum(const MatrixPair& pair) {
    const auto& cfg = pair.config;
    Eigen::MatrixXcd prod = pair.c * pair.d;
    if (cfg.beta == 1) {
        Eigen::MatrixXd rp = prod.real();
        Eigen::EigenSolver<Eigen::MatrixXd> es(rp, false);
        std::vector<cplx> out(cfg.n);
        for (int i = 0; i < cfg.n; ++i) out[i] = es.eigenvalues()(i);
        return out;
    }
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(prod, false);
    std::vector<cplx> vals(prod.rows());
    for (int i = 0; i < prod.rows(); ++i) vals[i] = schur.matrixT()(i, i);
    if (cfg.beta == 2) return vals;
    return detail::pair_conjugates(std::move(vals), 1e-6);
}

struct Beta1Classification {
    std::vector<double> reals;
    std::vector<cplx> pairs;  // one representative per pair, Im > 0
};

// Split a beta=1 spectrum into real eigenvalues and conjugate pairs.
// tol_rel is the realness threshold relative to max(1,|v|); a sensible
// default is 1e-9 * N (Schur rounding grows with N).
inline Beta1Classification classify_beta1(const std::vector<cplx>& spectrum, double tol_rel) {
    Beta1Classification out;
    std::vector<cplx> rest;
    for (cplx v : spectrum) {
        if (std::abs(v.imag()) <= tol_rel * std::max(1.0, std::abs(v)))
            out.reals.push_back(v.real());
        else
            rest.push_back(v);
    }
    if (rest.size() % 2) throw std::runtime_error("unpairable spectrum");
    std::vector<bool> used(rest.size(), false);
    for (std::size_t i = 0; i < rest.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        cplx target = std::conj(rest[i]);
        double best = 1e300;
        std::size_t bj = rest.size();
        for (std::size_t j = i + 1; j < rest.size(); ++j) {
            if (used[j]) continue;
            double dist = std::abs(rest[j] - target);
            if (dist < best) {
                best = dist;
                bj = j;
            }
        }
        double scale = std::max(1.0, std::abs(rest[i]));
        if (bj == rest.size() || best > 10.0 * tol_rel * scale)
            throw std::runtime_error("unpairable spectrum");
        used[bj] = true;
        out.pairs.push_back(rest[i].imag() > 0 ? rest[i] : rest[bj]);
    }
    return out;
}

inline double classify_beta1_default_tol(const EnsembleConfig& cfg) { return 1e-9 * cfg.n; }

struct SampledSpectrum {
    EnsembleConfig config;
    std::vector<cplx> wishart;  // N values (beta=4: pair representatives)
    int zero_modes = 0;         // nu exact Dirac zeros, not part of the list
};

inline SampledSpectrum make_sampled_spectrum(const EnsembleConfig& cfg, std::uint64_t seed,
                                             std::uint64_t stream = 0) {
    SampledSpectrum s;
    s.config = cfg;
    s.wishart = wishart_spectrum(sample_pair_stream(cfg, seed, stream));
    s.zero_modes = cfg.nu;
    return s;
}

// 2N Dirac points (+sqrt(v), -sqrt(v) per product eigenvalue); the nu zero
// modes are deliberately not appended
inline std::vector<cplx> dirac_spectrum(const SampledSpectrum& s) {
    std::vector<cplx> out;
    out.reserve(2 * s.wishart.size());
    for (cplx v : s.wishart) {
        auto [zp, zm] = wishart_to_dirac_point(v);
        out.push_back(zp);
        out.push_back(zm);
    }
    return out;
}

}  // namespace nhw
