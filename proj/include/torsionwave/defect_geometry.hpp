#pragma once
/**
 * defect_geometry.hpp
 * -------------------
 * Geometry of parallel screw dislocations piercing a plane: the
 * multivalued angle field and its derivatives, the torsion-carrying
 * frame (tetrad) with its induced metric, loop integrals that realize
 * the delta-like torsion distributionally, and finite-difference
 * flatness checks.
 *
 * The delta ridge along each dislocation line is never gridded: all
 * distributional content enters through winding integrals of the
 * (single-valued) gradient field and through closed-form jumps handled
 * by the wave-function layer.
 */

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "torsionwave/common.hpp"

namespace torsionwave {

/** Evaluation points closer than this (nm) to a defect are refused. */
inline constexpr double kSingularRadius = 1e-9;

/**
 * A finite set of identical screw dislocations piercing the plane at
 * the given positions (nm), with common dimensionless strength epsilon.
 * Construction validates: 0 <= epsilon < 0.5 (first-order theory) and
 * pairwise distinct positions.
 */
struct DefectSet {
    std::vector<Vec2> positions;
    double epsilon = 0.0;

    DefectSet(std::vector<Vec2> pos, double eps) : positions(std::move(pos)), epsilon(eps) {
        if (!is_finite(eps) || eps < 0.0)
            throw ValidationError("DefectSet: epsilon must be finite and >= 0");
        if (eps >= 0.5)
            throw ValidationError("DefectSet: epsilon >= 0.5 is outside the first-order regime");
        for (const auto& p : positions)
            if (!is_finite(p.x1) || !is_finite(p.x2))
                throw ValidationError("DefectSet: non-finite defect position");
        for (std::size_t i = 0; i < positions.size(); ++i)
            for (std::size_t j = i + 1; j < positions.size(); ++j)
                if ((positions[i] - positions[j]).norm() < kSingularRadius)
                    throw ValidationError("DefectSet: defect positions must be pairwise distinct");
    }

    /** Number of defects (the multiplicity q in multi-defect formulas). */
    int count() const { return static_cast<int>(positions.size()); }
};

/**
 * Pointwise sample of the torsion frame: tetrad e^a_i (row a, column i),
 * its first-order inverse e_a^i, and the induced metric g = e^T e
 * (exact in epsilon, not truncated).
 */
struct FrameField {
    Mat2 tetrad;
    Mat2 inverse_tetrad;
    Mat2 metric;
};

namespace detail {

inline void ensure_off_defects(const Vec2& x, const DefectSet& defects, const char* op) {
    for (const auto& p : defects.positions)
        if ((x - p).norm() < kSingularRadius)
            throw SingularPointError(std::string(op) + ": evaluation point coincides with a defect");
}

}  // namespace detail

/**
 * Multivalued angle field: sum over defects of atan2(x2 - x2_n, x1 - x1_n).
 * Each term is continuous except across its atan2 cut; the gradient below
 * is single-valued everywhere off the defects, which is what every other
 * operation consumes.
 */
inline double phase(const Vec2& x, const DefectSet& defects) {
    detail::ensure_off_defects(x, defects, "phase");
    double sum = 0.0;
    for (const auto& p : defects.positions) sum += std::atan2(x.x2 - p.x2, x.x1 - p.x1);
    return sum;
}

/**
 * Single-valued gradient of the angle field:
 *     grad phi = sum_n ( -(x2 - x2_n), (x1 - x1_n) ) / r_n^2.
 */
inline Vec2 grad_phase(const Vec2& x, const DefectSet& defects) {
    detail::ensure_off_defects(x, defects, "grad_phase");
    Vec2 g{0.0, 0.0};
    for (const auto& p : defects.positions) {
        const double X = x.x1 - p.x1;
        const double Y = x.x2 - p.x2;
        const double r2 = X * X + Y * Y;
        g.x1 += -Y / r2;
        g.x2 += X / r2;
    }
    return g;
}

/**
 * Analytic Hessian of the angle field (second derivatives of the atan2
 * terms), symmetric and traceless off defects:
 *     H = sum_n [[2XY, Y^2 - X^2], [Y^2 - X^2, -2XY]] / r_n^4.
 */
inline Mat2 phase_hessian(const Vec2& x, const DefectSet& defects) {
    detail::ensure_off_defects(x, defects, "phase_hessian");
    Mat2 h;
    for (const auto& p : defects.positions) {
        const double X = x.x1 - p.x1;
        const double Y = x.x2 - p.x2;
        const double r2 = X * X + Y * Y;
        const double r4 = r2 * r2;
        h(0, 0) += 2.0 * X * Y / r4;
        h(0, 1) += (Y * Y - X * X) / r4;
        h(1, 0) += (Y * Y - X * X) / r4;
        h(1, 1) += -2.0 * X * Y / r4;
    }
    return h;
}

/**
 * Torsion frame at a point:
 *     e^1_i = delta^1_i,   e^2_i = delta^2_i + eps * d_i(phi).
 * The inverse tetrad is the first-order inverse
 *     e_1^i = delta_1^i,   e_2^i = delta_2^i - eps * d_i(phi),
 * so e^a_i e_a^j = delta + O(eps^2). The metric is the exact product
 * e^T e; its first-order truncation is [[1, eps p], [eps p, 1 + 2 eps q]]
 * with p = d1(phi), q = d2(phi).
 */
inline FrameField frame(const Vec2& x, const DefectSet& defects) {
    const Vec2 g = grad_phase(x, defects);
    const double ep = defects.epsilon * g.x1;
    const double eq = defects.epsilon * g.x2;

    FrameField f;
    f.tetrad(0, 0) = 1.0;
    f.tetrad(0, 1) = 0.0;
    f.tetrad(1, 0) = ep;
    f.tetrad(1, 1) = 1.0 + eq;

    f.inverse_tetrad(0, 0) = 1.0;
    f.inverse_tetrad(0, 1) = 0.0;
    f.inverse_tetrad(1, 0) = -ep;
    f.inverse_tetrad(1, 1) = 1.0 - eq;

    f.metric = f.tetrad.transposed() * f.tetrad;
    return f;
}

/**
 * Connection coefficients Gamma^i_jk = delta^i_2 * eps * d_j d_k(phi).
 * Returned as one 2x2 matrix per upper index i; the i = 1 block is
 * identically zero, the i = 2 block is eps times the analytic Hessian.
 */
inline std::array<Mat2, 2> connection(const Vec2& x, const DefectSet& defects) {
    std::array<Mat2, 2> gamma;
    gamma[0] = Mat2{};
    gamma[1] = phase_hessian(x, defects) * defects.epsilon;
    return gamma;
}

/**
 * Line integral of grad_phase along a closed polyline (final vertex is
 * joined back to the first if not already closed). Each straight segment
 * is integrated with fixed 16-node Gauss-Legendre quadrature, which is
 * far inside 1e-8 accuracy for paths that keep a sane distance from the
 * defects. Returns 2*pi times the number of enclosed defects.
 */
inline double winding_integral(const std::vector<Vec2>& path, const DefectSet& defects) {
    if (path.size() < 3) throw ValidationError("winding_integral: need at least 3 vertices");

    // 16-point Gauss-Legendre nodes/weights on [-1, 1] (symmetric halves).
    static const double kNodes[8] = {0.0950125098376374, 0.2816035507792589,
                                     0.4580167776572274, 0.6178762444026438,
                                     0.7554044083550030, 0.8656312023878318,
                                     0.9445750230732326, 0.9894009349916499};
    static const double kWeights[8] = {0.1894506104550685, 0.1826034150449236,
                                       0.1691565193950025, 0.1495959888165767,
                                       0.1246289712555339, 0.0951585116824928,
                                       0.0622535239386479, 0.0271524594117541};

    auto segment_clearance = [&](const Vec2& a, const Vec2& b) {
        for (const auto& p : defects.positions) {
            const Vec2 ab = b - a;
            const double len2 = ab.norm_sq();
            double tt = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
            tt = std::min(1.0, std::max(0.0, tt));
            const Vec2 closest = a + ab * tt;
            if ((p - closest).norm() < kSingularRadius)
                throw PathThroughDefectError("winding_integral: path passes through a defect");
        }
    };

    double total = 0.0;
    const std::size_t n = path.size();
    const bool closed = (path.front() - path.back()).norm() < 1e-15;
    const std::size_t nseg = closed ? n - 1 : n;
    for (std::size_t s = 0; s < nseg; ++s) {
        const Vec2 a = path[s];
        const Vec2 b = path[(s + 1) % n];
        segment_clearance(a, b);
        const Vec2 mid = (a + b) * 0.5;
        const Vec2 half = (b - a) * 0.5;
        double seg = 0.0;
        for (int q = 0; q < 8; ++q) {
            const Vec2 xp = mid + half * kNodes[q];
            const Vec2 xm = mid - half * kNodes[q];
            seg += kWeights[q] * (grad_phase(xp, defects).dot(half) + grad_phase(xm, defects).dot(half));
        }
        total += seg;
    }
    return total;
}

/**
 * Torsion flux through a closed polyline: (eps / 2 pi) * winding integral,
 * i.e. eps times the number of enclosed defects. This is the distributional
 * torsion charge realized without gridding the delta.
 */
inline double torsion_flux(const std::vector<Vec2>& path, const DefectSet& defects) {
    return defects.epsilon / kTwoPi * winding_integral(path, defects);
}

/**
 * Flatness check: finite-difference commutator (d1 d2 - d2 d1) applied to
 * each tetrad component. The inner derivatives are the analytic ones
 * (eps times Hessian rows), the outer derivative is a central difference
 * with step h, so the residual is pure FD truncation error, O(h^2) times
 * a local third-derivative scale. Rows index the tetrad leg a, columns
 * the coordinate i; the a = 1 row is identically zero.
 */
inline Mat2 curvature_check(const Vec2& x, const DefectSet& defects, double h) {
    if (!(h > 0.0)) throw ValidationError("curvature_check: step h must be positive");
    // Analytic first derivative of the tetrad in direction j: only the
    // a = 2 row is nonzero and equals eps * (H_j1, H_j2).
    auto dtetrad = [&](const Vec2& p, int j) {
        const Mat2 hess = phase_hessian(p, defects);
        Mat2 d;
        d(1, 0) = defects.epsilon * hess(j, 0);
        d(1, 1) = defects.epsilon * hess(j, 1);
        return d;
    };
    const Vec2 e1{1.0, 0.0}, e2{0.0, 1.0};
    const Mat2 d1_of_d2 = (dtetrad(x + e1 * h, 1) - dtetrad(x - e1 * h, 1)) * (1.0 / (2.0 * h));
    const Mat2 d2_of_d1 = (dtetrad(x + e2 * h, 0) - dtetrad(x - e2 * h, 0)) * (1.0 / (2.0 * h));
    return d1_of_d2 - d2_of_d1;
}

/**
 * The gauge field entering the first-order transform of wave functions:
 *     Lambda(x) = eps * d2(phi).
 * Harmonic off the defects (phi is harmonic), which the tests verify by
 * finite-difference Laplacian.
 */
inline double lambda_field(const Vec2& x, const DefectSet& defects) {
    return defects.epsilon * grad_phase(x, defects).x2;
}

/**
 * Metric volume factor sqrt(det g) = |det e| = |1 + eps * d2(phi)|.
 * Satisfies e^{-Lambda} * sqrt_g = 1 + O(eps^2) pointwise (the first-order
 * identity used by the probability layer).
 */
inline double sqrt_g(const Vec2& x, const DefectSet& defects) {
    return std::abs(1.0 + defects.epsilon * grad_phase(x, defects).x2);
}

}  // namespace torsionwave
