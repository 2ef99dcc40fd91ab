#pragma once
/**
 * special_functions.hpp
 * ---------------------
 * Modified Bessel functions of the first kind for complex arguments
 * (series form), plus the two closed-form radial integrals and the
 * closed-form angular integral that the first-order jump coefficient
 * is assembled from.
 *
 * Everything here is a pure function of its arguments. The series is
 * intentionally the only Bessel evaluation strategy: the library's use
 * stays well inside |z| <= 50 where it converges quickly, and a single
 * code path keeps the accuracy story auditable.
 */

#include <complex>

#include "torsionwave/common.hpp"

namespace torsionwave {

/** Validated complex scalar: construction rejects NaN/Inf components. */
struct ComplexScalar {
    Complex value{0.0, 0.0};

    ComplexScalar() = default;
    ComplexScalar(const Complex& v) : value(v) {
        if (!is_finite(v)) throw ValidationError("ComplexScalar: non-finite component");
    }
    ComplexScalar(double re, double im = 0.0) : ComplexScalar(Complex(re, im)) {}

    operator Complex() const { return value; }
};

namespace detail {

/**
 * Sum of the ratio series I_nu(z)/z^nu written in w = z^2:
 *     I_nu(z)/z^nu = 2^{-nu} * sum_n (w/4)^n / (n! (n+nu)!)
 * This is entire in w, so callers can use it at (and through) z = 0
 * without branch bookkeeping. Same convergence policy as bessel_i.
 */
inline Complex bessel_i_ratio(int nu, const Complex& w) {
    double fact = 1.0;  // nu!
    for (int j = 2; j <= nu; ++j) fact *= j;
    Complex term = 1.0 / fact;
    Complex sum = term;
    const Complex w4 = w / 4.0;
    for (int n = 1; n <= 500; ++n) {
        term *= w4 / (static_cast<double>(n) * static_cast<double>(n + nu));
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) {
            return sum / std::pow(2.0, nu);
        }
    }
    throw ConvergenceError("bessel series: 500-term cap reached before tolerance");
}

}  // namespace detail

/**
 * Modified Bessel function of the first kind, integer order nu >= 0,
 * complex argument, via the ascending series
 *     I_nu(z) = sum_n (z/2)^{nu+2n} / (n! (n+nu)!).
 * Terms are added until one falls below 1e-16 * |partial sum|, with a
 * 500-term cap. Documented domain |z| <= 50; outside it the series is
 * refused rather than silently degraded.
 */
inline ComplexScalar bessel_i(int nu, const ComplexScalar& z) {
    if (nu < 0) throw DomainError("bessel_i: order must be a nonnegative integer");
    const Complex zv = z.value;
    if (std::abs(zv) > 50.0) throw DomainError("bessel_i: |z| > 50 outside documented domain");
    const Complex ratio = detail::bessel_i_ratio(nu, zv * zv);
    Complex zp = 1.0;
    for (int j = 0; j < nu; ++j) zp *= zv;
    return ComplexScalar(zp * ratio);
}

/**
 * Closed form of the angular integral
 *     int_0^{2pi} cos^2(t) sin(t) exp(a cos t + b sin t) dt
 *       = 2 pi b I_2(s)/s^2 + 2 pi a^2 b I_3(s)/s^3,   s = sqrt(a^2+b^2).
 * Implemented through the ratio series in s^2 = a^2 + b^2, which is
 * entire: no square root, no branch cut, and the s -> 0 point is a
 * removable singularity handled exactly (a = b = 0 gives 0 from the
 * overall factor b).
 */
inline ComplexScalar angular_integral(const ComplexScalar& a, const ComplexScalar& b) {
    const Complex av = a.value, bv = b.value;
    const Complex s_sq = av * av + bv * bv;
    const Complex r2 = detail::bessel_i_ratio(2, s_sq);
    const Complex r3 = detail::bessel_i_ratio(3, s_sq);
    return ComplexScalar(kTwoPi * bv * r2 + kTwoPi * av * av * bv * r3);
}

namespace detail {

/**
 * g2(s)/s^2 with g2(s) = 1 + (s-1) e^s, as the entire series
 *     sum_{m>=0} (m+1)/(m+2)! s^m = 1/2 + s/3 + ...
 * Used by the small-s fallback of radial_integral_i2.
 */
inline Complex g2_ratio_series(const Complex& s) {
    double fact = 2.0;  // (m+2)!
    Complex term = 1.0 / fact;
    Complex sum = term;
    Complex sp = 1.0;
    for (int m = 1; m <= 60; ++m) {
        fact *= (m + 2);
        sp *= s;
        term = (m + 1.0) / fact * sp;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

/**
 * g3(s)/s^3 with g3(s) = -2 + (2 - 2s + s^2) e^s, as the entire series
 *     sum_{m>=0} (m+2)(m+1)/(m+3)! s^m = 1/3 + ...
 * Used by the small-s fallback of radial_integral_i3.
 */
inline Complex g3_ratio_series(const Complex& s) {
    double fact = 6.0;  // (m+3)!
    Complex term = 2.0 / fact;
    Complex sum = term;
    Complex sp = 1.0;
    for (int m = 1; m <= 60; ++m) {
        fact *= (m + 3);
        sp *= s;
        term = (m + 2.0) * (m + 1.0) / fact * sp;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace detail

/**
 * Threshold below which |alpha beta^2| switches to the Taylor fallback.
 * The closed-form brackets cancel to O(s^2) (first) and O(s^3) (second), so
 * evaluating them directly at |s| = t leaves a relative rounding error of
 * roughly 1e-16 / t^2; at t = 1e-2 that is ~1e-12, while the entire series
 * needs only ~8 terms.  Both branches are therefore fully accurate at the
 * crossover.
 */
inline constexpr double kRadialTaylorThreshold = 1e-2;

/**
 * Closed form of the first radial integral,
 *     int_0^inf r e^{-alpha r^2} I_2(2 alpha r sqrt(beta^2)) dr
 *       = [1 + (s - 1) e^s] / (2 alpha^2 beta^2),   s = alpha beta^2.
 * Requires Re(alpha) > 0 (convergence) and beta^2 != 0. Near s = 0 the
 * bracket cancels to O(s^2); below the threshold above the entire-series form
 *     (beta^2 / 2) * sum_m (m+1)/(m+2)! s^m
 * is used instead to avoid the cancellation.
 */
inline ComplexScalar radial_integral_i2(const ComplexScalar& alpha, const ComplexScalar& beta_sq) {
    const Complex al = alpha.value, b2 = beta_sq.value;
    if (al.real() <= 0.0) throw ConvergenceError("radial_integral_i2: Re(alpha) <= 0");
    if (b2 == Complex(0.0, 0.0)) throw DomainError("radial_integral_i2: beta^2 = 0");
    const Complex s = al * b2;
    if (std::abs(s) < kRadialTaylorThreshold) {
        return ComplexScalar(0.5 * b2 * detail::g2_ratio_series(s));
    }
    const Complex bracket = 1.0 + (s - 1.0) * std::exp(s);
    return ComplexScalar(bracket / (2.0 * al * al * b2));
}

/**
 * Closed form of the second radial integral,
 *     int_0^inf r^2 e^{-alpha r^2} I_3(2 alpha r sqrt(beta^2)) dr
 *       = [-2 + (2 - 2s + s^2) e^s] / (2 alpha^3 (beta^2)^{3/2}),
 * with s = alpha beta^2 and the principal branch of (beta^2)^{3/2}.
 * Same preconditions and small-s fallback strategy as radial_integral_i2,
 * with the entire series ((beta^2)^{3/2} / 2) * sum_m (m+2)(m+1)/(m+3)! s^m.
 */
inline ComplexScalar radial_integral_i3(const ComplexScalar& alpha, const ComplexScalar& beta_sq) {
    const Complex al = alpha.value, b2 = beta_sq.value;
    if (al.real() <= 0.0) throw ConvergenceError("radial_integral_i3: Re(alpha) <= 0");
    if (b2 == Complex(0.0, 0.0)) throw DomainError("radial_integral_i3: beta^2 = 0");
    const Complex s = al * b2;
    const Complex b2_32 = std::pow(b2, 1.5);  // principal branch
    if (std::abs(s) < kRadialTaylorThreshold) {
        return ComplexScalar(0.5 * b2_32 * detail::g3_ratio_series(s));
    }
    const Complex bracket = -2.0 + (2.0 - 2.0 * s + s * s) * std::exp(s);
    return ComplexScalar(bracket / (2.0 * al * al * al * b2_32));
}

}  // namespace torsionwave
