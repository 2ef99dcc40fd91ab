#pragma once
/**
 * probability.hpp
 * ---------------
 * The modified Born rule over a torsion line defect: probability
 * density of the perturbed packet, the continuity-equation source at
 * the defect, the time-integrated point mass ("atom") it feeds, plain
 * and modified norms, expectation values against the atom-bearing
 * measure, the modified inner product, and its reconstruction through
 * the polarization identity.
 *
 * Geometry factors: the volume weight sqrt(g) = |1 + eps d2(phi)| has an
 * integrable 1/r singularity at each defect. Quadratures split it as
 *     sqrt(g) = 1 + eps d2(phi) + fold,
 * integrate the smooth part on a Cartesian trapezoid grid, and the
 * defect-centered parts on polar grids where the integrands are bounded
 * (eps d2(phi) r dr dtheta = eps cos(theta) dr dtheta). The "fold" term
 * 2 max(0, -(1 + eps d2(phi))) is supported only within r < eps of a
 * defect and is second order in eps; it is kept for honesty.
 */

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "torsionwave/common.hpp"
#include "torsionwave/defect_geometry.hpp"
#include "torsionwave/wavefunction.hpp"

namespace torsionwave {

/** Axis-aligned rectangle (integration region). */
struct Rect {
    Vec2 lo{0.0, 0.0};
    Vec2 hi{0.0, 0.0};
};

/**
 * Default integration region for one packet at time t: a square centered at
 * x0/2 (midway between the packet's start and the defect at the origin)
 * whose half-width covers the drift |x0| + (hbar |k0|/m) t plus six widths
 * of the dispersively broadened envelope, sqrt(a^4 + (2 hbar t / m)^2) / a.
 * Captures all but ~1e-15 of the Gaussian mass at any time in [0, t].
 */
inline Rect default_region(const PacketParams& params, double t) {
    const double v = params.hbar * params.k0.norm() / params.mass;
    const double tau = 2.0 * params.hbar * t / params.mass;
    const double width =
        std::sqrt(params.a * params.a * params.a * params.a + tau * tau) / params.a;
    const double r = params.x0.norm() + v * t + 6.0 * width;
    const Vec2 c = params.x0 * 0.5;
    return {{c.x1 - r, c.x2 - r}, {c.x1 + r, c.x2 + r}};
}

/**
 * Probability density of the crossing packet, |psi_perturbed|^2, with the
 * first-order identity e^{-Lambda} sqrt(g) = 1 + O(eps^2) already applied
 * (the identity itself is verifiable through defect-geometry factors).
 * Refuses evaluation on top of a defect, like every pointwise geometric
 * quantity.
 */
inline double probability_density(const SpacetimePoint& p, const PacketParams& params,
                                  double epsilon, const DefectSet& defects) {
    for (const auto& d : defects.positions)
        if ((p.x - d).norm() < kSingularRadius)
            throw SingularPointError("probability_density: point coincides with a defect");
    return std::norm(psi_perturbed(p, params, epsilon, /*branch_crossed=*/true));
}

/**
 * Closed-form continuity source at the defect (origin):
 *     Im(psi0* d1 psi0)|_{x=0}
 *       = [2 a^2 (a^4 k0_1 - (4 hbar t/m) x0_1) / (pi (a^4 + 4 hbar^2 t^2/m^2)^2)]
 *         * exp[-2 a^2 (x0 + hbar t k0/m)^2 / (a^4 + 4 hbar^2 t^2/m^2)]
 * Positive while a right-moving packet from x0_1 < 0 crosses the defect
 * (probability drains into the atom); the mirrored setup flips the sign.
 */
inline double continuity_source(double t, const PacketParams& params) {
    const double a = params.a, m = params.mass, hb = params.hbar;
    const double a4 = a * a * a * a;
    const double tau = 2.0 * hb * t / m;           // 2 hbar t / m
    const double den = a4 + tau * tau;             // a^4 + 4 hbar^2 t^2 / m^2
    const Vec2 center = params.x0 + params.k0 * (hb * t / m);
    const double num = 2.0 * a * a * (a4 * params.k0.x1 - 2.0 * tau * params.x0.x1);
    return num / (kPi * den * den) * std::exp(-2.0 * a * a * center.norm_sq() / den);
}

/**
 * Free-packet current density j_k = (hbar/m) Im(psi0* d_k psi0), using the
 * closed-form packet gradient.
 */
inline Vec2 current_density(const SpacetimePoint& p, const PacketParams& params) {
    const Complex psi = psi0_packet(p, params);
    const auto grad = grad_psi0_packet(p, params);
    const double f = params.hbar / params.mass;
    return {f * std::imag(std::conj(psi) * grad[0]), f * std::imag(std::conj(psi) * grad[1])};
}

/** Result of a norm quadrature, with the region-size advisory. */
struct NormResult {
    double value = 0.0;
    bool boundary_ok = true;      // false: boundary density > 1e-12 * max (region too small)
    double boundary_max = 0.0;    // largest density sampled on the region boundary

    operator double() const { return value; }
};

/**
 * Plain norm: 2-D trapezoid of the perturbed density over `region` on a
 * grid_n x grid_n node grid. Evaluates |psi_perturbed|^2 directly (the
 * density value is defined and smooth at the defect; only geometry
 * factors are singular there). Sets boundary_ok = false if the sampled
 * density on the region edge exceeds 1e-12 of the grid maximum.
 */
inline NormResult norm(const PacketParams& params, double epsilon, const Rect& region, int grid_n,
                       double t) {
    if (grid_n < 2) throw ValidationError("norm: grid_n must be >= 2");
    if (!(region.hi.x1 > region.lo.x1) || !(region.hi.x2 > region.lo.x2))
        throw ValidationError("norm: empty region");
    const double hx = (region.hi.x1 - region.lo.x1) / (grid_n - 1);
    const double hy = (region.hi.x2 - region.lo.x2) / (grid_n - 1);
    double sum = 0.0, maxv = 0.0, bmax = 0.0;
    for (int i = 0; i < grid_n; ++i) {
        const double x = region.lo.x1 + hx * i;
        const double wx = (i == 0 || i == grid_n - 1) ? 0.5 : 1.0;
        for (int j = 0; j < grid_n; ++j) {
            const double y = region.lo.x2 + hy * j;
            const double wy = (j == 0 || j == grid_n - 1) ? 0.5 : 1.0;
            const double rho = std::norm(psi_perturbed({{x, y}, t}, params, epsilon, true));
            sum += wx * wy * rho;
            maxv = std::max(maxv, rho);
            if (i == 0 || i == grid_n - 1 || j == 0 || j == grid_n - 1)
                bmax = std::max(bmax, rho);
        }
    }
    NormResult r;
    r.value = sum * hx * hy;
    r.boundary_max = bmax;
    r.boundary_ok = bmax <= 1e-12 * maxv;
    return r;
}

/** Convenience overload on the default region (256-node grid). */
inline NormResult norm(const PacketParams& params, double epsilon, double t, int grid_n = 256) {
    return norm(params, epsilon, default_region(params, t), grid_n, t);
}

/**
 * Time-integrated point mass at the defect:
 *     atom_weight(t) = (eps hbar / m) * int_{t0}^{t} continuity_source dt',
 * by globally refined trapezoid, doubling panels until the Richardson
 * estimate |T_{2n} - T_n| drops below tol * max(1, |T_{2n}|).
 */
inline double atom_weight(const PacketParams& params, double epsilon, double t0, double t,
                          double tol = 1e-8) {
    if (t < t0) throw ValidationError("atom_weight: t must be >= t0");
    if (t == t0 || epsilon == 0.0) return 0.0;
    const auto f = [&](double tt) { return continuity_source(tt, params); };
    const double len = t - t0;
    // Trapezoid refinement reusing previous nodes: T_{2n} = T_n/2 + h * (odd nodes).
    int n = 16;
    double tn = 0.5 * len * (f(t0) + f(t));
    for (int m = 1; m < n; m *= 2) {
        double odd = 0.0;
        const double hh = len / (2 * m);
        for (int i = 0; i < m; ++i) odd += f(t0 + (2 * i + 1) * hh);
        tn = 0.5 * tn + hh * odd;
    }
    for (int iter = 0; iter < 20; ++iter) {
        double odd = 0.0;
        const double h = len / (2 * n);
        for (int i = 0; i < n; ++i) odd += f(t0 + (2 * i + 1) * h);
        const double t2n = 0.5 * tn + h * odd;
        if (std::abs(t2n - tn) < tol * std::max(1.0, std::abs(t2n)))
            return epsilon * params.hbar / params.mass * t2n;
        tn = t2n;
        n *= 2;
    }
    throw ConvergenceError("atom_weight: time quadrature did not reach tolerance");
}

namespace detail {

/** Gauss-Legendre 16-point nodes/weights on [-1, 1] (positive half). */
inline constexpr double kGl16Nodes[8] = {0.0950125098376374, 0.2816035507792589,
                                         0.4580167776572274, 0.6178762444026438,
                                         0.7554044083550030, 0.8656312023878318,
                                         0.9445750230732326, 0.9894009349916499};
inline constexpr double kGl16Weights[8] = {0.1894506104550685, 0.1826034150449236,
                                           0.1691565193950025, 0.1495959888165767,
                                           0.1246289712555339, 0.0951585116824928,
                                           0.0622535239386479, 0.0271524594117541};

/**
 * Defect-centered polar integral of w(r, theta) * f(x), with w either the
 * eps cos(theta) weight (already multiplied by r dr dtheta) or the fold
 * weight r * [|1 + eps d2phi| - (1 + eps d2phi)]. Composite GL16 radial
 * panels x periodic trapezoid in theta.
 */
template <class F>
auto polar_integral(F&& integrand, const Vec2& center, double r_max, double panel_w, int m_theta)
    -> decltype(integrand(Vec2{}, 0.0, 0.0)) {
    using R = decltype(integrand(Vec2{}, 0.0, 0.0));
    R total{};
    const int npan = std::max(1, static_cast<int>(std::ceil(r_max / panel_w)));
    const double pw = r_max / npan;
    const double dth = kTwoPi / m_theta;
    for (int p = 0; p < npan; ++p) {
        const double rmid = (p + 0.5) * pw;
        for (int q = 0; q < 8; ++q) {
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                const double r = rmid + sgn * 0.5 * pw * kGl16Nodes[q];
                const double wr = 0.5 * pw * kGl16Weights[q];
                R ring{};
                for (int jt = 0; jt < m_theta; ++jt) {
                    const double th = dth * jt;
                    const Vec2 x{center.x1 + r * std::cos(th), center.x2 + r * std::sin(th)};
                    ring += integrand(x, r, th);
                }
                total += ring * (wr * dth);
            }
        }
    }
    return total;
}

/**
 * Integral of sqrt(g) * f over `region`:
 *     trapezoid[f] + sum_defects polar[eps cos(theta) f] + polar[fold * f].
 * `f` returns double or Complex; `osc_scale` is the largest spatial
 * frequency of f (sets the theta resolution), `len_scale` its smallest
 * length scale (sets radial panel width).
 */
template <class F>
auto sqrtg_weighted_integral(F&& f, const Rect& region, int grid_n, const DefectSet& defects,
                             double osc_scale, double len_scale)
    -> decltype(f(Vec2{})) {
    using R = decltype(f(Vec2{}));
    // Smooth Cartesian part.
    const double hx = (region.hi.x1 - region.lo.x1) / (grid_n - 1);
    const double hy = (region.hi.x2 - region.lo.x2) / (grid_n - 1);
    R total{};
    for (int i = 0; i < grid_n; ++i) {
        const double x = region.lo.x1 + hx * i;
        const double wx = (i == 0 || i == grid_n - 1) ? 0.5 : 1.0;
        R row{};
        for (int j = 0; j < grid_n; ++j) {
            const double y = region.lo.x2 + hy * j;
            const double wy = (j == 0 || j == grid_n - 1) ? 0.5 : 1.0;
            row += f(Vec2{x, y}) * wy;
        }
        total += row * wx;
    }
    total = total * (hx * hy);

    const double eps = defects.epsilon;
    if (eps == 0.0) return total;

    for (const auto& d : defects.positions) {
        // Covering radius of the region as seen from this defect.
        double r_max = 0.0;
        for (const double cx : {region.lo.x1, region.hi.x1})
            for (const double cy : {region.lo.x2, region.hi.x2})
                r_max = std::max(r_max, (Vec2{cx, cy} - d).norm());
        const double panel_w = std::max(len_scale / 3.0, r_max / 512.0);
        // Periodic trapezoid resolves circular harmonics up to ~osc * r.
        const int m_theta = std::max(64, static_cast<int>(std::ceil(1.5 * osc_scale * r_max)) + 32);

        // eps * d2(phi_this) f: the r dr dtheta Jacobian cancels the 1/r.
        total += polar_integral(
            [&](const Vec2& x, double /*r*/, double th) { return f(x) * (eps * std::cos(th)); },
            d, r_max, panel_w, m_theta);

        // Fold term: 2 max(0, -(1 + eps d2phi_total)) f, supported near the
        // defect only; full gradient so multi-defect cross terms are exact.
        const double fold_rad = 3.0 * eps + 10.0 * kSingularRadius;
        total += polar_integral(
            [&](const Vec2& x, double r, double /*th*/) -> R {
                const double w = 1.0 + eps * grad_phase(x, defects).x2;
                if (w >= 0.0) return R{};
                return f(x) * (-2.0 * w * r);
            },
            d, fold_rad, std::max(fold_rad / 24.0, 1e-12), 96);
    }
    return total;
}

}  // namespace detail

/**
 * The atom-bearing probability measure at time t: sampled density on a
 * rectangular grid plus a point mass at the (first) defect. Carries a
 * re-evaluation callback so consumers can quadrature off-grid.
 */
struct MeasureWithAtom {
    Rect region;
    int grid_n = 0;
    std::vector<double> grid_density;  // row-major grid_n x grid_n node samples
    Vec2 atom_position{0.0, 0.0};
    double atom_weight = 0.0;
    double t0 = 0.0;
    double t = 0.0;
    std::function<double(const Vec2&)> density;  // off-grid density at time t
};

/**
 * Builds the measure for the canonical crossing setup: grid-sampled
 * perturbed density plus the accumulated atom weight at the defect.
 * Uses the first defect as the atom site.
 */
inline MeasureWithAtom measure_with_atom(const PacketParams& params, double epsilon,
                                         const DefectSet& defects, double t0, double t,
                                         int grid_n = 256) {
    if (defects.positions.empty())
        throw ValidationError("measure_with_atom: need at least one defect");
    MeasureWithAtom m;
    m.region = default_region(params, t);
    m.grid_n = grid_n;
    m.atom_position = defects.positions.front();
    m.atom_weight = atom_weight(params, epsilon, t0, t);
    m.t0 = t0;
    m.t = t;
    // Raw density values; smooth across the defect (geometry factors are
    // handled by the quadratures that consume this callback).
    m.density = [params, epsilon, t](const Vec2& x) {
        return std::norm(psi_perturbed({x, t}, params, epsilon, true));
    };
    m.grid_density.resize(static_cast<std::size_t>(grid_n) * grid_n);
    const double hx = (m.region.hi.x1 - m.region.lo.x1) / (grid_n - 1);
    const double hy = (m.region.hi.x2 - m.region.lo.x2) / (grid_n - 1);
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j)
            m.grid_density[static_cast<std::size_t>(i) * grid_n + j] =
                m.density(Vec2{m.region.lo.x1 + hx * i, m.region.lo.x2 + hy * j});
    return m;
}

/**
 * Expectation value of a spatial function against the atom-bearing
 * measure:  <V> = integral sqrt(g) * density * V  +  atom_weight * V(atom).
 * V must be finite at the atom (point masses require function values, not
 * measure-zero indicators).
 */
inline double expectation(const std::function<double(const Vec2&)>& V,
                          const MeasureWithAtom& measure, const DefectSet& defects) {
    if (!measure.density) throw ValidationError("expectation: measure has no density callback");
    const double v_atom = V(measure.atom_position);
    if (!is_finite(v_atom)) throw DomainError("expectation: V is not finite at the atom position");
    const auto f = [&](const Vec2& x) { return measure.density(x) * V(x); };
    const double grid_term =
        detail::sqrtg_weighted_integral(f, measure.region, std::max(2, measure.grid_n), defects,
                                        /*osc_scale=*/0.0, /*len_scale=*/0.5);
    return grid_term + measure.atom_weight * v_atom;
}

/**
 * A finite superposition of free Gaussian packets, the state family used
 * by the modified inner product. All component packets must share mass
 * and hbar.
 */
struct PacketSuperposition {
    std::vector<Complex> coeffs;
    std::vector<PacketParams> packets;

    PacketSuperposition() = default;
    PacketSuperposition(Complex c, const PacketParams& p) : coeffs{c}, packets{p} {}

    void validate() const {
        if (coeffs.size() != packets.size() || coeffs.empty())
            throw ValidationError("PacketSuperposition: coefficient/packet mismatch");
        for (const auto& p : packets)
            if (p.mass != packets.front().mass || p.hbar != packets.front().hbar)
                throw ValidationError("PacketSuperposition: mixed mass/hbar not supported");
    }

    Complex eval(const SpacetimePoint& p) const {
        Complex s{0.0, 0.0};
        for (std::size_t i = 0; i < coeffs.size(); ++i) s += coeffs[i] * psi0_packet(p, packets[i]);
        return s;
    }

    Complex d1(const SpacetimePoint& p) const {
        Complex s{0.0, 0.0};
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            s += coeffs[i] * grad_psi0_packet(p, packets[i])[0];
        return s;
    }

    /** ca * a + cb * b as one superposition. */
    static PacketSuperposition combine(const Complex& ca, const PacketSuperposition& a,
                                       const Complex& cb, const PacketSuperposition& b) {
        PacketSuperposition r;
        for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
            r.coeffs.push_back(ca * a.coeffs[i]);
            r.packets.push_back(a.packets[i]);
        }
        for (std::size_t i = 0; i < b.coeffs.size(); ++i) {
            r.coeffs.push_back(cb * b.coeffs[i]);
            r.packets.push_back(b.packets[i]);
        }
        return r;
    }
};

/** Square region centered on the defect covering every packet of both states. */
inline Rect common_region(const PacketSuperposition& a, const PacketSuperposition& b, double t) {
    double r = 0.0;
    auto grow = [&](const PacketSuperposition& s) {
        for (const auto& p : s.packets) {
            const double v = p.hbar * p.k0.norm() / p.mass;
            r = std::max(r, p.x0.norm() + v * t + 6.0 * p.a);
        }
    };
    grow(a);
    grow(b);
    return {{-r, -r}, {r, r}};
}

/**
 * A wave function sampled on a rectangular grid at one instant, together
 * with the packet data that generated it (needed for the analytic d1
 * values entering the defect time integral).
 */
struct SampledState {
    Rect region;
    int grid_n = 0;
    double t = 0.0;
    std::vector<Complex> values;  // row-major grid_n x grid_n node samples
    PacketSuperposition source;

    bool same_grid(const SampledState& o) const {
        return grid_n == o.grid_n && t == o.t && region.lo.x1 == o.region.lo.x1 &&
               region.lo.x2 == o.region.lo.x2 && region.hi.x1 == o.region.hi.x1 &&
               region.hi.x2 == o.region.hi.x2;
    }
};

/** Samples a packet superposition onto a grid at time t. */
inline SampledState sample_state(const PacketSuperposition& gen, const Rect& region, int grid_n,
                                 double t) {
    gen.validate();
    if (grid_n < 2) throw ValidationError("sample_state: grid_n must be >= 2");
    SampledState s;
    s.region = region;
    s.grid_n = grid_n;
    s.t = t;
    s.source = gen;
    s.values.resize(static_cast<std::size_t>(grid_n) * grid_n);
    const double hx = (region.hi.x1 - region.lo.x1) / (grid_n - 1);
    const double hy = (region.hi.x2 - region.lo.x2) / (grid_n - 1);
    for (int i = 0; i < grid_n; ++i)
        for (int j = 0; j < grid_n; ++j)
            s.values[static_cast<std::size_t>(i) * grid_n + j] =
                gen.eval({{region.lo.x1 + hx * i, region.lo.x2 + hy * j}, t});
    return s;
}

/** Sample-wise linear combination ca*a + cb*b on a shared grid. */
inline SampledState combine_states(const Complex& ca, const SampledState& a, const Complex& cb,
                                   const SampledState& b) {
    if (!a.same_grid(b)) throw ValidationError("combine_states: grid mismatch");
    SampledState z = a;
    for (std::size_t i = 0; i < z.values.size(); ++i)
        z.values[i] = ca * a.values[i] + cb * b.values[i];
    z.source = PacketSuperposition::combine(ca, a.source, cb, b.source);
    return z;
}

namespace detail {

/** Adaptive panel-doubling trapezoid of a complex function on [t0, t]. */
template <class F>
Complex adaptive_time_integral(F&& f, double t0, double t, double tol, const char* who) {
    const double len = t - t0;
    if (len <= 0.0) return {0.0, 0.0};
    int n = 16;
    Complex tn = 0.5 * len * (f(t0) + f(t));
    for (int m = 1; m < n; m *= 2) {
        Complex odd{0.0, 0.0};
        const double hh = len / (2 * m);
        for (int i = 0; i < m; ++i) odd += f(t0 + (2 * i + 1) * hh);
        tn = 0.5 * tn + hh * odd;
    }
    for (int iter = 0; iter < 18; ++iter) {
        Complex odd{0.0, 0.0};
        const double h = len / (2 * n);
        for (int i = 0; i < n; ++i) odd += f(t0 + (2 * i + 1) * h);
        const Complex t2n = 0.5 * tn + h * odd;
        const bool done = std::abs(t2n - tn) < tol * std::max(1.0, std::abs(t2n));
        tn = t2n;
        n *= 2;
        if (done) return tn;
    }
    throw ConvergenceError(std::string(who) + ": time quadrature did not reach tolerance");
}

}  // namespace detail

/**
 * Modified inner product of two sampled states over a common grid:
 *     <a|b> = integral sqrt(g) a* b d^2x
 *             + (eps hbar/m) sum_defects int_{t0}^{t} (a* d1 b - b d1 a*)/(2i) dt'
 * with analytic d1 of the packet forms at the defect. Sesquilinear
 * (antilinear in a) and Hermitian by construction. When the two states
 * coincide this is the state's geometric norm plus the accumulated atom
 * weight (the flat-measure norm agrees with the geometric one to first
 * order; the difference is the integrated eps*d2(phase) weight).
 */
inline Complex modified_inner_product(const SampledState& psi_a, const SampledState& psi_b,
                                      double epsilon, const DefectSet& defects, double t0,
                                      double t) {
    if (!psi_a.same_grid(psi_b))
        throw ValidationError("modified_inner_product: grid mismatch");
    if (psi_a.t != t)
        throw ValidationError("modified_inner_product: states sampled at a different instant");
    const double m = psi_a.source.packets.front().mass;
    const double hb = psi_a.source.packets.front().hbar;
    if (m != psi_b.source.packets.front().mass || hb != psi_b.source.packets.front().hbar)
        throw ValidationError("modified_inner_product: states must share mass/hbar");

    // Grid term: trapezoid of sqrt(g) a* b over the common grid. Nodes that
    // land exactly on a defect are skipped (integrable measure-zero cells).
    const int n = psi_a.grid_n;
    const Rect& region = psi_a.region;
    const double hx = (region.hi.x1 - region.lo.x1) / (n - 1);
    const double hy = (region.hi.x2 - region.lo.x2) / (n - 1);
    Complex grid{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        const double x = region.lo.x1 + hx * i;
        const double wx = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        Complex row{0.0, 0.0};
        for (int j = 0; j < n; ++j) {
            const double y = region.lo.x2 + hy * j;
            const double wy = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            double w = 1.0;
            if (epsilon != 0.0) {
                bool on_defect = false;
                for (const auto& d : defects.positions)
                    if ((Vec2{x, y} - d).norm() < kSingularRadius) on_defect = true;
                if (on_defect) continue;
                w = sqrt_g(Vec2{x, y}, defects);
            }
            const std::size_t idx = static_cast<std::size_t>(i) * n + j;
            row += wy * w * std::conj(psi_a.values[idx]) * psi_b.values[idx];
        }
        grid += wx * row;
    }
    Complex result = grid * (hx * hy);

    // Atom term: the defect-time integral of the antisymmetrized current.
    if (epsilon != 0.0) {
        for (const auto& dpos : defects.positions) {
            const auto srcfn = [&](double tt) {
                const SpacetimePoint p{dpos, tt};
                const Complex va = psi_a.source.eval(p), vb = psi_b.source.eval(p);
                const Complex da = psi_a.source.d1(p), db = psi_b.source.d1(p);
                return (std::conj(va) * db - vb * std::conj(da)) / Complex(0.0, 2.0);
            };
            result += epsilon * hb / m *
                      detail::adaptive_time_integral(srcfn, t0, t, 1e-10, "modified_inner_product");
        }
    }
    return result;
}

/**
 * Reconstructs the modified inner product from four modified norms via
 * the polarization identity
 *     <x|y> = 1/4 (||x+y||^2 - ||x-y||^2 - i ||x+iy||^2 + i ||x-iy||^2).
 * Uses the identical discrete form underneath, so agreement with
 * modified_inner_product is exact up to roundoff.
 */
inline Complex polarization_reconstruction(const SampledState& psi_a, const SampledState& psi_b,
                                           double epsilon, const DefectSet& defects, double t0,
                                           double t) {
    const Complex one{1.0, 0.0}, iu{0.0, 1.0};
    auto norm_sq = [&](const SampledState& z) {
        return modified_inner_product(z, z, epsilon, defects, t0, t).real();
    };
    const double n_plus = norm_sq(combine_states(one, psi_a, one, psi_b));
    const double n_minus = norm_sq(combine_states(one, psi_a, -one, psi_b));
    const double n_plus_i = norm_sq(combine_states(one, psi_a, iu, psi_b));
    const double n_minus_i = norm_sq(combine_states(one, psi_a, -iu, psi_b));
    return 0.25 * (Complex(n_plus - n_minus, 0.0) + iu * (n_minus_i - n_plus_i));
}

}  // namespace torsionwave
