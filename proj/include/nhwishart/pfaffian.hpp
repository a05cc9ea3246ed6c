#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace nhw {

// Pfaffian by skew-symmetric (Parlett-Reid) elimination with pivoting.
// Keeps the sign, which the sqrt(det) route loses.  Matrices up to 32x32
// (k <= 16); antisymmetry is a precondition and is verified.
template <typename Scalar>
Scalar pfaffian(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a) {
    using std::abs;
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n || n % 2 != 0 || n == 0 || n > 32)
        throw std::invalid_argument("pfaffian: need even-dimensional square matrix, size <= 32");
    double scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) scale = std::max(scale, static_cast<double>(abs(a(i, j))));
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            worst = std::max(worst, static_cast<double>(abs(a(i, j) + a(j, i))));
    if (worst > 1e-12 * std::max(scale, 1.0))
        throw std::invalid_argument("not antisymmetric");

    Scalar pf = Scalar(1);
    for (int k = 0; k + 1 < n; k += 2) {
        int kp = k + 1;
        double best = static_cast<double>(abs(a(k + 1, k)));
        for (int i = k + 2; i < n; ++i) {
            double v = static_cast<double>(abs(a(i, k)));
            if (v > best) {
                best = v;
                kp = i;
            }
        }
        if (kp != k + 1) {
            a.row(k + 1).swap(a.row(kp));
            a.col(k + 1).swap(a.col(kp));
            pf = -pf;
        }
        if (a(k + 1, k) == Scalar(0)) return Scalar(0);
        pf *= a(k, k + 1);
        if (k + 2 < n) {
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1> tau =
                a.row(k).segment(k + 2, n - k - 2).transpose() / a(k, k + 1);
            // column below the pivot; by antisymmetry the negative of row k+1
            Eigen::Matrix<Scalar, Eigen::Dynamic, 1> col1 =
                a.col(k + 1).segment(k + 2, n - k - 2);
            auto block = a.block(k + 2, k + 2, n - k - 2, n - k - 2);
            block += tau * col1.transpose() - col1 * tau.transpose();
        }
    }
    return pf;
}

}  // namespace nhw
