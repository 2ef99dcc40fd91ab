#pragma once
/**
 * wavefunction.hpp
 * ----------------
 * Free and first-order-corrected wave functions in the plane with a
 * delta-like torsion line at the origin: plane waves with their jump
 * coefficient and phase shift, Gaussian packets with their closed-form
 * first-order correction coefficient B_L, and the piecewise perturbed
 * wave on the two sides of the crossing line.
 *
 * Convention map (each closed form is used verbatim, never mixed):
 *   - plane waves:  psi_L = A (1 + eps B_L) e^{i k.x},  B_L = -i k1^2 k2 / k^2,
 *                   theta = arctan(q eps k1^2 k2 / k^2);
 *   - packets:      psi_1 = -i B_L psi_0 with the closed-form B_L below;
 *   - crossing:     psi = psi_0 (x^1 < 0),  psi_0 [1 - (i eps/2) B_L] (x^1 > 0).
 *
 * Normalization note on the packet B_L: the closed form below carries an
 * overall 1/2 relative to a common way of writing it. This normalization
 * is the one that matches the defining k-space integral
 *     B_L = (alpha/pi) int d^2k (k1^2 k2 / k^2) e^{-alpha (k - beta)^2},
 * which the oracle module integrates directly; the agreement is part of
 * the acceptance gate.
 */

#include <array>
#include <cmath>
#include <complex>

#include "torsionwave/common.hpp"

namespace torsionwave {

/**
 * Gaussian packet parameters. Natural units hbar = m = 1 by default; both
 * are carried explicitly so dimensional formulas stay verbatim.
 * Defaults reproduce the canonical two-slit packet (a = 0.1 nm,
 * k0 = (50, 0) nm^-1, prepared at the origin).
 */
struct PacketParams {
    double a = 0.1;        // packet width (nm)
    Vec2 x0{0.0, 0.0};     // initial center (nm)
    Vec2 k0{50.0, 0.0};    // central wave vector (nm^-1)
    double mass = 1.0;
    double hbar = 1.0;

    PacketParams() = default;
    PacketParams(double a_, Vec2 x0_, Vec2 k0_, double mass_ = 1.0, double hbar_ = 1.0)
        : a(a_), x0(x0_), k0(k0_), mass(mass_), hbar(hbar_) {
        if (!(a > 0.0) || !is_finite(a)) throw ValidationError("PacketParams: width a must be > 0");
        if (!(mass > 0.0) || !is_finite(mass)) throw ValidationError("PacketParams: mass must be > 0");
        if (!(hbar > 0.0) || !is_finite(hbar)) throw ValidationError("PacketParams: hbar must be > 0");
        if (!is_finite(x0.x1) || !is_finite(x0.x2) || !is_finite(k0.x1) || !is_finite(k0.x2))
            throw ValidationError("PacketParams: non-finite x0/k0");
    }
};

/** A point of evaluation: position (nm) and time (natural units). */
struct SpacetimePoint {
    Vec2 x{0.0, 0.0};
    double t = 0.0;
};

/**
 * Auxiliary quantities of the packet correction:
 *     alpha  = (a^2 + 2 i hbar t / m) / 4          (nm^2)
 *     beta_j = (a^2 (k_j)_0 / 2 + i Dx_j) / (2 alpha)   (nm^-1)
 *     beta_sq = beta_1^2 + beta_2^2 (complex; not |beta|^2)
 * with Dx = x - x0. Re(alpha) = a^2/4 > 0 identically.
 */
struct AuxiliaryAlphaBeta {
    Complex alpha;
    Complex beta1;
    Complex beta2;
    Complex beta_sq;
};

/** Free plane wave A e^{i (k.x - w t)}, w = hbar k^2 / 2m (natural units). */
inline Complex psi0_plane(const Vec2& k, const SpacetimePoint& p, const Complex& amplitude,
                          double mass = 1.0, double hbar = 1.0) {
    const double omega = hbar * k.norm_sq() / (2.0 * mass);
    return amplitude * std::exp(Complex(0.0, k.dot(p.x) - omega * p.t));
}

/** Plane-wave jump coefficient B_L = -i k1^2 k2 / k^2. */
inline Complex jump_coefficient_plane(const Vec2& k) {
    const double k2 = k.norm_sq();
    if (k2 == 0.0) throw DomainError("jump_coefficient_plane: zero wave vector");
    return Complex(0.0, -1.0) * (k.x1 * k.x1 * k.x2 / k2);
}

/**
 * Interference phase shift for q identical defects:
 *     theta = arctan(q eps k1^2 k2 / k^2).
 */
inline double phase_shift(double epsilon, const Vec2& k, int q) {
    const double k2 = k.norm_sq();
    if (k2 == 0.0) throw DomainError("phase_shift: zero wave vector");
    if (q < 1) throw ValidationError("phase_shift: q must be a positive integer");
    return std::atan(q * epsilon * k.x1 * k.x1 * k.x2 / k2);
}

/**
 * Free Gaussian packet (2-D), closed form:
 *     psi_0 = (2a/sqrt(2 pi)) e^{-i xi} (a^4 + 4 hbar^2 t^2/m^2)^{-1/2}
 *             e^{i k0.Dx} exp[-(Dx - hbar t k0/m)^2 / (a^2 + 2 i hbar t/m)]
 * with xi = hbar t k0^2/(2m) + arctan(2 hbar t/(a^2 m)), Dx = x - x0.
 * Unit L^2 norm at all times.
 */
inline Complex psi0_packet(const SpacetimePoint& p, const PacketParams& params) {
    const double a = params.a, m = params.mass, hb = params.hbar;
    const double sig = 2.0 * hb * p.t / m;  // 2 hbar t / m
    const Vec2 dx = p.x - params.x0;
    const Vec2 drift = dx - params.k0 * (hb * p.t / m);
    const double xi = hb * p.t * params.k0.norm_sq() / (2.0 * m) + std::atan(sig / (a * a));
    const Complex denom(a * a, sig);  // a^2 + 2 i hbar t / m
    const Complex gauss_arg = -(drift.x1 * drift.x1 + drift.x2 * drift.x2) / denom;
    const double prefac = 2.0 * a / std::sqrt(kTwoPi) / std::sqrt(a * a * a * a + sig * sig);
    return prefac * std::exp(Complex(0.0, -xi) + Complex(0.0, params.k0.dot(dx)) + gauss_arg);
}

/**
 * Analytic spatial gradient of psi0_packet:
 *     d_j psi_0 = psi_0 [ i (k_j)_0 - 2 (Dx_j - hbar t (k_j)_0/m) / (a^2 + 2 i hbar t/m) ].
 */
inline std::array<Complex, 2> grad_psi0_packet(const SpacetimePoint& p, const PacketParams& params) {
    const double a = params.a, m = params.mass, hb = params.hbar;
    const Vec2 dx = p.x - params.x0;
    const Vec2 drift = dx - params.k0 * (hb * p.t / m);
    const Complex denom(a * a, 2.0 * hb * p.t / m);
    const Complex psi = psi0_packet(p, params);
    return {psi * (Complex(0.0, params.k0.x1) - 2.0 * drift.x1 / denom),
            psi * (Complex(0.0, params.k0.x2) - 2.0 * drift.x2 / denom)};
}

/** Auxiliary alpha/beta of the packet correction at a spacetime point. */
inline AuxiliaryAlphaBeta alpha_beta(const SpacetimePoint& p, const PacketParams& params) {
    const double a = params.a, m = params.mass, hb = params.hbar;
    AuxiliaryAlphaBeta ab;
    ab.alpha = Complex(a * a / 4.0, hb * p.t / (2.0 * m));
    const Vec2 dx = p.x - params.x0;
    ab.beta1 = (Complex(a * a * params.k0.x1 / 2.0, dx.x1)) / (2.0 * ab.alpha);
    ab.beta2 = (Complex(a * a * params.k0.x2 / 2.0, dx.x2)) / (2.0 * ab.alpha);
    ab.beta_sq = ab.beta1 * ab.beta1 + ab.beta2 * ab.beta2;
    return ab;
}

namespace detail {

/** e^{-s} + s - 1, with a Taylor guard against cancellation near s = 0. */
inline Complex expm_group(const Complex& s) {
    if (std::abs(s) < 1e-6) {
        // sum_{n>=2} (-1)^n s^n / n! = s^2/2 - s^3/6 + s^4/24 - ...
        const Complex s2 = s * s;
        return s2 * (0.5 + s * (-1.0 / 6.0 + s * (1.0 / 24.0 + s * (-1.0 / 120.0))));
    }
    return std::exp(-s) + s - 1.0;
}

/** d/ds of expm_group: 1 - e^{-s}, with matching Taylor guard. */
inline Complex expm_group_prime(const Complex& s) {
    if (std::abs(s) < 1e-6) {
        return s * (1.0 + s * (-0.5 + s * (1.0 / 6.0 - s / 24.0)));
    }
    return 1.0 - std::exp(-s);
}

}  // namespace detail

/**
 * Closed-form first-order packet correction coefficient:
 *     B_L = beta2 [ (beta^2 - 4 beta1^2)(e^{-alpha beta^2} + alpha beta^2 - 1)
 *                   + 2 alpha^2 (beta^2)^2 beta1^2 ] / (2 alpha^2 (beta^2)^3).
 * Pure kinematics: independent of eps (the caller attaches the coupling).
 * beta2 = 0 (on-axis points with (k2)_0 = 0) gives exactly 0; the complex
 * degenerate point beta^2 -> 0 at nonzero beta is refused.
 */
inline Complex b_l_packet(const SpacetimePoint& p, const PacketParams& params) {
    const AuxiliaryAlphaBeta ab = alpha_beta(p, params);
    if (ab.beta2 == Complex(0.0, 0.0)) return Complex(0.0, 0.0);
    const double scale = std::norm(ab.beta1) + std::norm(ab.beta2);
    if (std::abs(ab.beta_sq) < 1e-12 * scale)
        throw DomainError("b_l_packet: degenerate beta^2 (complex zero)");
    const Complex u = ab.beta_sq;
    const Complex s = ab.alpha * u;
    const Complex g = detail::expm_group(s);
    const Complex numer = (u - 4.0 * ab.beta1 * ab.beta1) * g
                        + 2.0 * ab.alpha * ab.alpha * u * u * ab.beta1 * ab.beta1;
    return ab.beta2 * numer / (2.0 * ab.alpha * ab.alpha * u * u * u);
}

/**
 * Analytic spatial gradient of b_l_packet, by the chain rule through
 * beta_j (d beta_j / d x_k = i delta_jk / (2 alpha)). Writing
 *     B = F(beta1, beta2, u),  u = beta^2,
 *     F = beta2 N / (2 alpha^2 u^3),  N = (u - 4 beta1^2) G(alpha u)
 *                                        + 2 alpha^2 u^2 beta1^2,
 * the partials are assembled explicitly below. Verified against central
 * finite differences in the test suite.
 */
inline std::array<Complex, 2> grad_b_l_packet(const SpacetimePoint& p, const PacketParams& params) {
    const AuxiliaryAlphaBeta ab = alpha_beta(p, params);
    const double scale = std::norm(ab.beta1) + std::norm(ab.beta2);
    if (std::abs(ab.beta_sq) < 1e-12 * scale)
        throw DomainError("grad_b_l_packet: degenerate beta^2 (complex zero)");
    const Complex al = ab.alpha, b1 = ab.beta1, b2 = ab.beta2, u = ab.beta_sq;
    const Complex s = al * u;
    const Complex g = detail::expm_group(s);
    const Complex gp = detail::expm_group_prime(s);
    const Complex u3 = u * u * u;
    const Complex al2 = al * al;
    const Complex numer = (u - 4.0 * b1 * b1) * g + 2.0 * al2 * u * u * b1 * b1;

    const Complex dF_db1 = b2 * (-8.0 * b1 * g + 4.0 * al2 * u * u * b1) / (2.0 * al2 * u3);
    const Complex dF_db2 = numer / (2.0 * al2 * u3);
    const Complex dN_du = g + (u - 4.0 * b1 * b1) * al * gp + 4.0 * al2 * u * b1 * b1;
    const Complex dF_du = b2 / (2.0 * al2) * (dN_du / u3 - 3.0 * numer / (u3 * u));

    const Complex chain = Complex(0.0, 1.0) / (2.0 * al);  // d beta_j / d x_j
    return {chain * (dF_db1 + 2.0 * b1 * dF_du),
            chain * (dF_db2 + 2.0 * b2 * dF_du)};
}

/** First-order packet correction, psi_1 = -i B_L psi_0. */
inline Complex psi1_packet(const SpacetimePoint& p, const PacketParams& params) {
    return Complex(0.0, -1.0) * b_l_packet(p, params) * psi0_packet(p, params);
}

/**
 * Perturbed wave of a packet whose path crossed the defect line:
 *     psi = psi_0                      for x^1 < 0,
 *     psi = psi_0 [1 - (i eps / 2) B_L] for x^1 >= 0,
 * when branch_crossed is set; plain psi_0 otherwise. The 1/2 factor is the
 * packet-branch convention used verbatim (the plane-wave convention above
 * differs; they are never combined).
 */
inline Complex psi_perturbed(const SpacetimePoint& p, const PacketParams& params, double epsilon,
                             bool branch_crossed) {
    const Complex psi0 = psi0_packet(p, params);
    if (!branch_crossed || epsilon == 0.0 || p.x.x1 < 0.0) return psi0;
    const Complex bl = b_l_packet(p, params);
    return psi0 * (1.0 - Complex(0.0, 0.5) * epsilon * bl);
}

/**
 * Total plane-wave discontinuity amplitude across the cut for q defects:
 *     q * eps * A * jump_coefficient_plane(k).
 */
inline Complex jump_magnitude(const Vec2& k, const Complex& amplitude, double epsilon, int q) {
    if (q < 1) throw ValidationError("jump_magnitude: q must be a positive integer");
    return static_cast<double>(q) * epsilon * amplitude * jump_coefficient_plane(k);
}

}  // namespace torsionwave
