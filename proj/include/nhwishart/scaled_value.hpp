#pragma once

#include <cmath>
#include <complex>
#include <limits>

namespace nhw {

// Number held as mantissa * exp(log_scale) so that quantities far outside
// double range (Bessel tails, high-degree polynomial norms) stay exact in
// the exponent. |mantissa| is kept in [1/2, 2) unless the value is zero.
struct ScaledValue {
    double mantissa = 0.0;
    double log_scale = 0.0;

    static ScaledValue from(double x) {
        if (x == 0.0 || !std::isfinite(x)) return {x, 0.0};
        int e = 0;
        double f = std::frexp(x, &e);  // |f| in [1/2,1)
        return {f, e * M_LN2};
    }

    // value = sign * exp(log_magnitude)
    static ScaledValue from_log(double log_magnitude, double sign = 1.0) {
        if (sign == 0.0 || !(log_magnitude > -1e307)) return {0.0, 0.0};
        double k = std::floor(log_magnitude / M_LN2);
        double m = std::exp(log_magnitude - k * M_LN2);  // in [1,2)
        return {sign < 0 ? -m : m, k * M_LN2};
    }

    double value() const {
        if (mantissa == 0.0) return 0.0;
        if (std::abs(log_scale) > 745.0) return mantissa * std::exp(log_scale);
        // log_scale produced by from() is an exact multiple of ln 2; snapping
        // to it makes from(x).value() == x to the last bit.
        double k = std::llround(log_scale / M_LN2);
        if (std::abs(log_scale - k * M_LN2) < 1e-9)
            return std::ldexp(mantissa, static_cast<int>(k));
        return mantissa * std::exp(log_scale);
    }

    double log_abs() const {
        if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(std::abs(mantissa)) + log_scale;
    }

    double sign() const { return mantissa > 0 ? 1.0 : (mantissa < 0 ? -1.0 : 0.0); }

    bool is_zero() const { return mantissa == 0.0; }

    ScaledValue normalized() const {
        if (mantissa == 0.0 || !std::isfinite(mantissa)) return *this;
        int e = 0;
        double f = std::frexp(mantissa, &e);
        return {f, log_scale + e * M_LN2};
    }

    friend ScaledValue operator*(const ScaledValue& a, const ScaledValue& b) {
        return ScaledValue{a.mantissa * b.mantissa, a.log_scale + b.log_scale}.normalized();
    }
    friend ScaledValue operator*(const ScaledValue& a, double b) {
        return (a * ScaledValue::from(b)).normalized();
    }
};

// Complex companion with one shared real exponent.
struct ScaledComplex {
    std::complex<double> mantissa{0.0, 0.0};
    double log_scale = 0.0;

    static ScaledComplex from(std::complex<double> z) {
        double a = std::abs(z);
        if (a == 0.0 || !std::isfinite(a)) return {z, 0.0};
        int e = 0;
        std::frexp(a, &e);
        double s = std::ldexp(1.0, -e);
        return {z * s, e * M_LN2};
    }

    static ScaledComplex from_log(double log_magnitude, std::complex<double> phase) {
        if (phase == std::complex<double>(0.0, 0.0) || !(log_magnitude > -1e307)) return {};
        double k = std::floor(log_magnitude / M_LN2);
        double m = std::exp(log_magnitude - k * M_LN2);
        return {phase * m, k * M_LN2};
    }

    std::complex<double> value() const {
        if (mantissa == std::complex<double>(0.0, 0.0)) return mantissa;
        if (std::abs(log_scale) > 745.0) return mantissa * std::exp(log_scale);
        double k = std::llround(log_scale / M_LN2);
        if (std::abs(log_scale - k * M_LN2) < 1e-9) {
            double s = std::ldexp(1.0, static_cast<int>(k));
            return mantissa * s;
        }
        return mantissa * std::exp(log_scale);
    }

    double log_abs() const {
        double a = std::abs(mantissa);
        if (a == 0.0) return -std::numeric_limits<double>::infinity();
        return std::log(a) + log_scale;
    }

    std::complex<double> phase() const {
        double a = std::abs(mantissa);
        return a == 0.0 ? std::complex<double>(0.0, 0.0) : mantissa / a;
    }
};

}  // namespace nhw
