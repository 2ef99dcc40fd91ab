#pragma once
/**
 * common.hpp
 * ----------
 * Shared plumbing for the torsionwave library: 2-vectors, 2x2 matrices,
 * complex alias, and the error taxonomy used across modules.
 *
 * Units convention (used throughout the library):
 *   lengths in nm, wave numbers in nm^-1, hbar = m = 1 unless stated
 *   otherwise, so times carry nm^2 units.
 */

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace torsionwave {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/** Base class for all library errors. */
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/** A constructor/config contract was violated (bad parameter values). */
struct ValidationError : Error {
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

/** An evaluation point coincided (within tolerance) with a singular point. */
struct SingularPointError : Error {
    explicit SingularPointError(const std::string& msg) : Error(msg) {}
};

/** A closed integration path passed through (or too near) a singular point. */
struct PathThroughDefectError : SingularPointError {
    explicit PathThroughDefectError(const std::string& msg) : SingularPointError(msg) {}
};

/** Input outside the documented domain of an operation. */
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/** An iterative/numerical procedure failed to reach its tolerance. */
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

inline bool is_finite(double x) { return std::isfinite(x); }
inline bool is_finite(const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/** Plane vector (components follow the x^1, x^2 index convention). */
struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    Vec2() = default;
    Vec2(double a, double b) : x1(a), x2(b) {}

    Vec2 operator+(const Vec2& o) const { return {x1 + o.x1, x2 + o.x2}; }
    Vec2 operator-(const Vec2& o) const { return {x1 - o.x1, x2 - o.x2}; }
    Vec2 operator*(double s) const { return {x1 * s, x2 * s}; }
    Vec2 operator/(double s) const { return {x1 / s, x2 / s}; }

    double dot(const Vec2& o) const { return x1 * o.x1 + x2 * o.x2; }
    double norm_sq() const { return x1 * x1 + x2 * x2; }
    double norm() const { return std::hypot(x1, x2); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/** Dense 2x2 real matrix, row-major; rows/cols are 0-based. */
struct Mat2 {
    double m[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    static Mat2 identity() {
        Mat2 r;
        r.m[0][0] = 1.0;
        r.m[1][1] = 1.0;
        return r;
    }

    double& operator()(int r, int c) { return m[r][c]; }
    double operator()(int r, int c) const { return m[r][c]; }

    Mat2 operator+(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
        return r;
    }
    Mat2 operator-(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
        return r;
    }
    Mat2 operator*(double s) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[i][j] * s;
        return r;
    }
    Mat2 operator*(const Mat2& o) const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j];
        return r;
    }

    Mat2 transposed() const {
        Mat2 r;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r.m[i][j] = m[j][i];
        return r;
    }

    double det() const { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

    double max_abs() const {
        double r = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) r = std::max(r, std::abs(m[i][j]));
        return r;
    }
};

}  // namespace torsionwave
