/**
 * Acceptance gate: ten end-to-end checks of the first-order torsion
 * pipeline at its published operating points. Each test prints exactly
 * one "[CRITERION k] PASS/FAIL" line with the measured numbers; the
 * assertions enforce the stated tolerances, so any FAIL line is
 * accompanied by a failing assertion that pinpoints the quantity.
 *
 * Expected outcome on this implementation: criteria 4 (linearity leg),
 * 5, and 6 (drain-rate and conservation legs) fail for a shared physical
 * reason — at eps = 0.1 and beamline parameters the correction
 * coefficient reaches |B_L| ~ 12, so eps * |B_L| / 2 is order one and the
 * first-order truncation underneath those three statements is outside
 * its domain of validity. The checks are implemented exactly as stated
 * and report honest numbers; see the README's "Known limitations".
 */

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "torsionwave/config.hpp"
#include "torsionwave/interference.hpp"
#include "torsionwave/oracle.hpp"
#include "torsionwave/probability.hpp"
#include "torsionwave/special_functions.hpp"

namespace tw = torsionwave;
using tw::Complex;

namespace {

void report(int k, bool pass, const std::string& detail) {
    std::printf("[CRITERION %d] %s - %s\n", k, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string sci(double v) {
    std::ostringstream o;
    o << std::scientific << std::setprecision(2) << v;
    return o.str();
}

std::string fix(double v, int prec) {
    std::ostringstream o;
    o << std::fixed << std::setprecision(prec) << v;
    return o.str();
}

double rel_err(const Complex& got, const Complex& want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const tw::PacketParams kBeam;    // a = 0.1 nm, k0 = (50, 0) nm^-1
const tw::SlitExperiment kSlit;  // separation 10, aperture 0.1, screen 20 nm

}  // namespace

// ---------------------------------------------------------------------------
// 1. closed-form packet jump coefficient vs raw k-space quadrature
// ---------------------------------------------------------------------------

TEST(Acceptance, C01PacketJumpCoefficient) {
    const auto t0 = std::chrono::steady_clock::now();
    const tw::QuadratureSpec spec = tw::QuadratureSpec::for_packet(kBeam);
    double worst = 0.0;
    for (const double x2 : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
        for (const double t : {0.1, 0.2, 0.3, 0.4, 0.5}) {
            const tw::SpacetimePoint p{{20.0, x2}, t};
            const tw::Quad2DResult q = tw::quad2d_bl_full(p, kBeam, spec);
            const Complex closed = tw::b_l_packet(p, kBeam);
            // Near the parity zero at x2 = 0 the meaningful scale is the
            // quadrature's cancellation floor, not the vanishing value.
            const double denom = std::max(std::abs(closed), 1e-10 * q.l1_mass);
            worst = std::max(worst, std::abs(q.value - closed) / denom);
        }
    }
    const double secs = seconds_since(t0);
    report(1, worst < 1e-6 && secs < 60.0,
           "packet jump coefficient, closed form vs k-space quadrature on the 5x5 screen grid: "
           "max rel err " + sci(worst) + " (tol 1e-06), " + fix(secs, 1) + " s (budget 60 s)");
    EXPECT_LT(worst, 1e-6);
    EXPECT_LT(secs, 60.0);
}

// ---------------------------------------------------------------------------
// 2. angular identity, radial integrals, Bessel recurrence
// ---------------------------------------------------------------------------

TEST(Acceptance, C02RadialAngularBessel) {
    const Complex alphas[] = {{1.0, 0.0}, {0.5, 0.0}, {1.0, 0.3}};
    const Complex betas[] = {{0.25, 0.0}, {1.0, 0.0}, {2.0, 1.0}};
    double worst_quad = 0.0;
    for (const Complex& alpha : alphas) {
        for (const Complex& beta_sq : betas) {
            worst_quad = std::max(worst_quad,
                                  rel_err(tw::radial_quadrature_check(alpha, beta_sq, 2),
                                          tw::radial_integral_i2(alpha, beta_sq)));
            worst_quad = std::max(worst_quad,
                                  rel_err(tw::radial_quadrature_check(alpha, beta_sq, 3),
                                          tw::radial_integral_i3(alpha, beta_sq)));
            const Complex sb = std::sqrt(beta_sq);
            const Complex a = 2.0 * alpha * 0.6 * sb;
            const Complex b = 2.0 * alpha * 0.8 * sb;
            worst_quad = std::max(
                worst_quad, rel_err(tw::angular_quadrature_check(a, b), tw::angular_integral(a, b)));
        }
    }
    double worst_rec = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double r = 0.1 * std::pow(100.0, static_cast<double>(i) / 40.0);
        for (const Complex z : {Complex(r, 0.0), Complex(0.6 * r, 0.8 * r)}) {
            const Complex lhs = Complex(tw::bessel_i(1, z)) - Complex(tw::bessel_i(3, z));
            const Complex rhs = 4.0 / z * Complex(tw::bessel_i(2, z));
            worst_rec = std::max(worst_rec, rel_err(lhs, rhs));
        }
    }
    report(2, worst_quad < 1e-10 && worst_rec < 1e-12,
           "angular + radial integrals vs direct quadrature: max rel err " + sci(worst_quad) +
               " (tol 1e-10); Bessel three-term recurrence on |z| in [0.1,10]: max rel err " +
               sci(worst_rec) + " (tol 1e-12)");
    EXPECT_LT(worst_quad, 1e-10);
    EXPECT_LT(worst_rec, 1e-12);
}

// ---------------------------------------------------------------------------
// 3. plane-wave jump coefficient recovered by the shrinking loop
// ---------------------------------------------------------------------------

TEST(Acceptance, C03ShrinkingLoopJump) {
    double worst = 0.0;
    for (const tw::Vec2 k : {tw::Vec2{1.0, 1.0}, tw::Vec2{2.0, 1.0}, tw::Vec2{1.0, 3.0}})
        worst = std::max(worst, rel_err(tw::shrink_loop_jump(k), tw::jump_coefficient_plane(k)));
    const Complex z1 = tw::shrink_loop_jump({1.5, 0.0});
    const Complex z2 = tw::shrink_loop_jump({0.0, 2.5});
    const bool zeros_exact = (z1 == Complex(0.0, 0.0)) && (z2 == Complex(0.0, 0.0));
    report(3, worst < 1e-4 && zeros_exact,
           "shrinking-loop flux balance vs -i k1^2 k2/k^2: max rel err " + sci(worst) +
               " (tol 1e-04); k1=0 / k2=0 orientations exactly zero: " +
               (zeros_exact ? "yes" : "no"));
    EXPECT_LT(worst, 1e-4);
    EXPECT_EQ(z1, Complex(0.0, 0.0));
    EXPECT_EQ(z2, Complex(0.0, 0.0));
}

// ---------------------------------------------------------------------------
// 4. double-slit pattern: symmetry, peak displacement, linearity in eps
// ---------------------------------------------------------------------------

TEST(Acceptance, C04FringeDisplacement) {
    const auto t0 = std::chrono::steady_clock::now();
    const tw::IntensityProfile free_profile = tw::pattern_scan(kBeam, 0.0, kSlit, 1);

    // (a) torsion-free profile mirror-symmetric about the axis.
    const std::size_t n = free_profile.values.size();
    const double vmax = free_profile.max_value();
    double worst_sym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst_sym = std::max(
            worst_sym, std::abs(free_profile.values[i] - free_profile.values[n - 1 - i]) / vmax);

    // (b) displacement of the principal fringes at eps = 0.1.
    const tw::IntensityProfile tors = tw::pattern_scan(kBeam, 0.1, kSlit, 1);
    const double disp = tw::peak_displacement(tors, free_profile);

    // (c) linearity of the displacement across eps.
    const std::vector<double> eps_grid{0.05, 0.1, 0.2};
    std::vector<double> disps;
    for (const double e : eps_grid)
        disps.push_back(tw::peak_displacement(tw::pattern_scan(kBeam, e, kSlit, 1), free_profile));
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(eps_grid.size());
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        sx += eps_grid[i];
        sy += disps[i];
        sxx += eps_grid[i] * eps_grid[i];
        sxy += eps_grid[i] * disps[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / m;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
        const double fit = slope * eps_grid[i] + intercept;
        ss_res += (disps[i] - fit) * (disps[i] - fit);
        ss_tot += (disps[i] - sy / m) * (disps[i] - sy / m);
    }
    const double r2 = 1.0 - ss_res / ss_tot;

    const double secs = seconds_since(t0);
    const bool pass = worst_sym < 1e-12 && disp >= 0.002 && disp <= 0.05 && r2 > 0.999 &&
                      secs < 30.0;
    report(4, pass,
           "free pattern symmetric to " + sci(worst_sym) + " (tol 1e-12); peak displacement " +
               fix(disp, 6) + " nm (accept [0.002, 0.05]); displacement-vs-eps fit R^2 " +
               fix(r2, 5) + " (need > 0.999, eps in {0.05, 0.1, 0.2}); " + fix(secs, 1) +
               " s (budget 30 s)");
    EXPECT_LT(worst_sym, 1e-12);
    EXPECT_GE(disp, 0.002);
    EXPECT_LE(disp, 0.05);
    EXPECT_GT(r2, 0.999);  // fails: the response visibly saturates by eps = 0.2
    EXPECT_LT(secs, 30.0);
}

// ---------------------------------------------------------------------------
// 5. valley caveat: first-order dips bounded by -eps * max
// ---------------------------------------------------------------------------

TEST(Acceptance, C05ValleyBound) {
    const tw::IntensityProfile tors = tw::pattern_scan(kBeam, 0.1, kSlit, 1);
    double vmin = tors.values.front();
    for (const double v : tors.values) vmin = std::min(vmin, v);
    const double bound = -0.1 * tors.max_value();
    const bool ok = tors.valley_bound_ok();
    report(5, ok,
           "minimum first-order intensity " + sci(vmin) + " vs -eps*max " + sci(bound) +
               " at eps = 0.1; bound " + (ok ? "holds" : "violated (correction exceeds O(eps) "
               "in the valleys, where the first-order expansion self-reports breakdown)"));
    EXPECT_TRUE(ok);  // fails: |B_L| ~ 12 makes the valley dips order one, not order eps
    EXPECT_GE(vmin, bound);
}

// ---------------------------------------------------------------------------
// 6. probability bookkeeping across the defect crossing
// ---------------------------------------------------------------------------

TEST(Acceptance, C06ProbabilityBookkeeping) {
    // (i) free evolution: norm constant to 1e-8 over t in [0, 0.8].
    double free_drift = 0.0;
    const double n_at_0 = tw::norm(kBeam, 0.0, 0.0);
    for (int i = 1; i <= 8; ++i) {
        const double t = 0.1 * i;
        free_drift = std::max(free_drift, std::abs(double(tw::norm(kBeam, 0.0, t)) - n_at_0));
    }

    // (ii) eps = 0.1: finite-difference dN/dt vs -(eps hbar/m) * source while
    // the packet is actually crossing the defect (x0 = 0, transit ~ a/v).
    const double eps = 0.1;
    double rate_mismatch = 0.0;
    for (const double t : {0.002, 0.004, 0.006}) {
        const double dt = 1e-4;
        const tw::Rect region = tw::default_region(kBeam, t + dt);
        const double n_plus = tw::norm(kBeam, eps, region, 256, t + dt);
        const double n_minus = tw::norm(kBeam, eps, region, 256, t - dt);
        const double dn_dt = (n_plus - n_minus) / (2.0 * dt);
        const double drain = -eps * tw::continuity_source(t, kBeam);  // hbar = m = 1
        rate_mismatch = std::max(rate_mismatch, std::abs(dn_dt - drain) / std::abs(drain));
    }

    // (iii) norm + atom weight constant to 1e-6 over the same time span.
    double total_drift = 0.0;
    const double total_0 = double(tw::norm(kBeam, eps, 0.0)) + tw::atom_weight(kBeam, eps, 0.0, 0.0);
    for (int i = 1; i <= 8; ++i) {
        const double t = 0.1 * i;
        const double total = double(tw::norm(kBeam, eps, t)) + tw::atom_weight(kBeam, eps, 0.0, t);
        total_drift = std::max(total_drift, std::abs(total - total_0));
    }

    // (iv) mirrored initial data flips the source sign bit-for-bit.
    const tw::PacketParams fwd(0.8, {-2.0, 0.5}, {2.0, 0.4}, 1.0, 1.0);
    const tw::PacketParams mir(0.8, {2.0, 0.5}, {-2.0, 0.4}, 1.0, 1.0);
    bool mirror_exact = true;
    for (const double t : {0.0, 0.3, 0.9, 1.4})
        mirror_exact =
            mirror_exact && (tw::continuity_source(t, mir) == -tw::continuity_source(t, fwd));

    const bool pass =
        free_drift < 1e-8 && rate_mismatch < 0.01 && total_drift < 1e-6 && mirror_exact;
    report(6, pass,
           "free-norm drift " + sci(free_drift) + " (tol 1e-08); crossing drain-rate mismatch " +
               sci(rate_mismatch) + " (tol 1e-02); norm+atom drift " + sci(total_drift) +
               " (tol 1e-06); mirrored source sign flip exact: " + (mirror_exact ? "yes" : "no"));
    EXPECT_LT(free_drift, 1e-8);
    EXPECT_LT(rate_mismatch, 0.01);  // fails: the O(eps^2) correction mass dominates the drain
    EXPECT_LT(total_drift, 1e-6);    // fails: same root cause, the jump in |1 - i eps B/2|^2
    EXPECT_TRUE(mirror_exact);
}

// ---------------------------------------------------------------------------
// 7. modified inner product: polarization identity + coincidence reduction
// ---------------------------------------------------------------------------

TEST(Acceptance, C07ModifiedInnerProduct) {
    std::mt19937 rng(20260825u);
    std::uniform_real_distribution<double> ua(0.7, 1.3), ux(-1.0, 1.0), uk(-2.0, 2.0);
    const double t = 0.4;
    double worst = 0.0;
    for (int pair = 0; pair < 20; ++pair) {
        const tw::PacketSuperposition a(Complex(ux(rng), ux(rng)),
                                        tw::PacketParams(ua(rng), {ux(rng), ux(rng)},
                                                         {uk(rng), uk(rng)}, 1.0, 1.0));
        const tw::PacketSuperposition b(Complex(ux(rng), ux(rng)),
                                        tw::PacketParams(ua(rng), {ux(rng), ux(rng)},
                                                         {uk(rng), uk(rng)}, 1.0, 1.0));
        const tw::Rect region = tw::common_region(a, b, t);
        const tw::SampledState sa = tw::sample_state(a, region, 96, t);
        const tw::SampledState sb = tw::sample_state(b, region, 96, t);
        for (const double eps : {0.0, 0.05, 0.1}) {
            const tw::DefectSet d({{0.0, 0.0}}, eps);
            const Complex direct = tw::modified_inner_product(sa, sb, eps, d, 0.0, t);
            const Complex rebuilt = tw::polarization_reconstruction(sa, sb, eps, d, 0.0, t);
            worst = std::max(worst, std::abs(direct - rebuilt) / std::max(1.0, std::abs(direct)));
        }
    }

    // Coincidence reduction: <psi|psi> = (weighted) norm + atom weight. The
    // flat-measure norm stands in for the weighted one up to an O(eps)
    // moment, so demand exact agreement at eps = 0 and first-order agreement
    // beyond.
    const tw::PacketParams mild(1.0, {0.0, 0.0}, {1.3, 0.7}, 1.0, 1.0);
    const tw::PacketSuperposition s(Complex(1.0, 0.0), mild);
    const tw::Rect region = tw::common_region(s, s, t);
    const tw::SampledState ss = tw::sample_state(s, region, 96, t);
    bool reduction_ok = true;
    double coincide_gap0 = 0.0;
    for (const double eps : {0.0, 0.05, 0.1}) {
        const tw::DefectSet d({{0.0, 0.0}}, eps);
        const Complex ip = tw::modified_inner_product(ss, ss, eps, d, 0.0, t);
        const double book =
            double(tw::norm(mild, 0.0, region, 96, t)) + tw::atom_weight(mild, eps, 0.0, t);
        const double slack = (eps == 0.0) ? 1e-9 : eps * std::abs(book);
        if (eps == 0.0) coincide_gap0 = std::abs(ip.real() - book);
        reduction_ok = reduction_ok && std::abs(ip.real() - book) <= slack &&
                       std::abs(ip.imag()) <= 1e-9 * std::abs(book);
    }

    report(7, worst < 1e-6 && reduction_ok,
           "polarization identity vs direct form on 20 random pairs x eps in {0, 0.05, 0.1}: "
           "max deviation " + sci(worst) + " (tol 1e-06); coincidence reduces to norm + atom "
           "weight (exact at eps = 0, gap " + sci(coincide_gap0) + "; first-order beyond): " +
               (reduction_ok ? "yes" : "no"));
    EXPECT_LT(worst, 1e-6);
    EXPECT_TRUE(reduction_ok);
}

// ---------------------------------------------------------------------------
// 8. defect geometry: winding, flux, flatness orders, exact metric
// ---------------------------------------------------------------------------

TEST(Acceptance, C08DefectGeometry) {
    const tw::DefectSet two({{0.0, 0.0}, {3.0, 1.0}}, 0.1);
    const auto circle = [](tw::Vec2 c, double r, int n) {
        std::vector<tw::Vec2> path;
        for (int i = 0; i < n; ++i) {
            const double th = tw::kTwoPi * i / n;
            path.push_back({c.x1 + r * std::cos(th), c.x2 + r * std::sin(th)});
        }
        return path;
    };
    const std::vector<tw::Vec2> one_loop = circle({0.0, 0.0}, 1.0, 64);
    const std::vector<tw::Vec2> both_loop = circle({1.5, 0.5}, 4.0, 96);
    double worst_wind = std::abs(tw::winding_integral(one_loop, two) - tw::kTwoPi) / tw::kTwoPi;
    worst_wind = std::max(worst_wind, std::abs(tw::winding_integral(both_loop, two) -
                                               2.0 * tw::kTwoPi) /
                                          (2.0 * tw::kTwoPi));
    worst_wind =
        std::max(worst_wind, std::abs(tw::winding_integral(circle({10.0, 10.0}, 1.0, 64), two)));
    const double flux_err = std::max(std::abs(tw::torsion_flux(one_loop, two) - 0.1),
                                     std::abs(tw::torsion_flux(both_loop, two) - 0.2));

    const tw::DefectSet d({{0.0, 0.0}}, 0.1);
    const tw::Vec2 p{0.9, 0.4};
    const auto max_abs = [](const tw::Mat2& m) {
        return std::max(std::max(std::abs(m(0, 0)), std::abs(m(0, 1))),
                        std::max(std::abs(m(1, 0)), std::abs(m(1, 1))));
    };
    const double curv_ratio =
        max_abs(tw::curvature_check(p, d, 0.02)) / max_abs(tw::curvature_check(p, d, 0.01));
    const auto lap_lambda = [&](double h) {
        const auto L = [&](tw::Vec2 q) { return tw::lambda_field(q, d); };
        return std::abs(L({p.x1 + h, p.x2}) + L({p.x1 - h, p.x2}) + L({p.x1, p.x2 + h}) +
                        L({p.x1, p.x2 - h}) - 4.0 * L(p)) /
               (h * h);
    };
    const double lap_ratio = lap_lambda(0.02) / lap_lambda(0.01);

    double metric_gap = 0.0;
    for (const tw::Vec2 q : {tw::Vec2{0.9, 0.4}, tw::Vec2{-0.5, 0.7}, tw::Vec2{1.2, -1.1}}) {
        const tw::FrameField f = tw::frame(q, two);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double prod = f.tetrad(0, i) * f.tetrad(0, j) +
                                    f.tetrad(1, i) * f.tetrad(1, j);
                metric_gap = std::max(metric_gap, std::abs(f.metric(i, j) - prod));
            }
    }

    const bool orders_ok = std::abs(curv_ratio / 4.0 - 1.0) < 0.15 &&
                           std::abs(lap_ratio / 4.0 - 1.0) < 0.15;
    const bool pass = worst_wind < 1e-8 && flux_err < 1e-8 && orders_ok && metric_gap == 0.0;
    report(8, pass,
           "winding = 2 pi per enclosed defect: max rel err " + sci(worst_wind) +
               " (tol 1e-08); torsion flux = q*eps: err " + sci(flux_err) +
               "; h->h/2 residual ratios (expect 4): curvature " + fix(curv_ratio, 3) +
               ", Laplacian of the gauge field " + fix(lap_ratio, 3) +
               "; metric minus tetrad^T tetrad: " + sci(metric_gap));
    EXPECT_LT(worst_wind, 1e-8);
    EXPECT_LT(flux_err, 1e-8);
    EXPECT_NEAR(curv_ratio, 4.0, 0.6);
    EXPECT_NEAR(lap_ratio, 4.0, 0.6);
    EXPECT_EQ(metric_gap, 0.0);
}

// ---------------------------------------------------------------------------
// 9. q defects at eps vs one defect at q*eps: identical plane-wave pattern
// ---------------------------------------------------------------------------

TEST(Acceptance, C09MultiDefectEquivalence) {
    int mismatches = 0;
    double worst = 0.0;
    for (const tw::Vec2 k : {tw::Vec2{50.0, 5.0}, tw::Vec2{1.3, 0.7}}) {
        for (int i = 0; i < kSlit.samples; ++i) {
            const double x2 =
                kSlit.screen_min + (kSlit.screen_max - kSlit.screen_min) * i / (kSlit.samples - 1);
            const double two_defects = tw::intensity_plane_wave(x2, k, 0.05, 2, 1.0, kSlit);
            const double one_defect = tw::intensity_plane_wave(x2, k, 0.1, 1, 1.0, kSlit);
            if (two_defects != one_defect) ++mismatches;
            worst = std::max(worst, std::abs(two_defects - one_defect));
        }
    }
    report(9, mismatches == 0,
           "plane-wave pattern, two defects at eps = 0.05 vs one at eps = 0.1: " +
               std::to_string(mismatches) + " of " + std::to_string(2 * kSlit.samples) +
               " screen points differ (max abs gap " + sci(worst) + "; bitwise identity expected)");
    EXPECT_EQ(mismatches, 0);
}

// ---------------------------------------------------------------------------
// 10. byte-identical CLI output across runs and thread counts
// ---------------------------------------------------------------------------

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

}  // namespace

TEST(Acceptance, C10Determinism) {
    const std::string cli = TORSION_CLI_PATH;
    const std::string dir = testing::TempDir();
    struct Run {
        std::string tag;
        std::string env;
    };
    const Run runs[] = {{"repeat1", "env -u TORSION_THREADS"},
                        {"repeat2", "env -u TORSION_THREADS"},
                        {"threads1", "env TORSION_THREADS=1"},
                        {"threads2", "env TORSION_THREADS=2"},
                        {"threads4", "env TORSION_THREADS=4"}};
    std::vector<std::string> pattern_bytes, free_bytes, stdout_bytes;
    for (const Run& r : runs) {
        const std::string out = dir + "tw_accept_" + r.tag + ".csv";
        const std::string out_free = dir + "tw_accept_" + r.tag + "_free.csv";
        const std::string out_log = dir + "tw_accept_" + r.tag + ".stdout";
        const std::string cmd =
            r.env + " '" + cli + "' pattern --out " + out + " > " + out_log + " 2>&1";
        const int rc = std::system(cmd.c_str());
        ASSERT_EQ(rc, 0) << cmd;
        pattern_bytes.push_back(slurp(out));
        free_bytes.push_back(slurp(out_free));
        stdout_bytes.push_back(slurp(out_log));
        ASSERT_FALSE(pattern_bytes.back().empty());
    }
    int mismatched_runs = 0;
    for (std::size_t i = 1; i < pattern_bytes.size(); ++i) {
        const bool same = pattern_bytes[i] == pattern_bytes[0] &&
                          free_bytes[i] == free_bytes[0] && stdout_bytes[i] == stdout_bytes[0];
        if (!same) ++mismatched_runs;
        EXPECT_EQ(pattern_bytes[i], pattern_bytes[0]) << runs[i].tag;
        EXPECT_EQ(free_bytes[i], free_bytes[0]) << runs[i].tag;
        EXPECT_EQ(stdout_bytes[i], stdout_bytes[0]) << runs[i].tag;
    }
    report(10, mismatched_runs == 0,
           "pattern subcommand run 5x (repeat, TORSION_THREADS in {1,2,4}): " +
               std::to_string(mismatched_runs) +
               " runs deviate from the baseline (CSV + sibling free CSV + report, byte compare)");
}
