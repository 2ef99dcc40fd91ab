/**
 * Unit tests for the probability layer: norm bookkeeping, the defect-site
 * drain term, weighted expectations, and the modified inner product on
 * sampled states.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "torsionwave/probability.hpp"

namespace tw = torsionwave;
using tw::Complex;

namespace {

const tw::PacketParams kBeam;  // a = 0.1, k0 = (50, 0)
const tw::PacketParams kMild(1.0, {0.0, 0.0}, {1.3, 0.7}, 1.0, 1.0);

tw::DefectSet origin_defect(double eps) { return tw::DefectSet({{0.0, 0.0}}, eps); }

}  // namespace

// ---------------------------------------------------------------------------
// regions and the free norm
// ---------------------------------------------------------------------------

TEST(RegionTest, DefaultRegionTracksDriftAndSpreading) {
    for (const double t : {0.0, 0.2, 0.8}) {
        const tw::Rect r = tw::default_region(kBeam, t);
        // The packet center x0 + v t plus several broadened widths must fit;
        // 5.9 widths (instead of the designed six) leaves rounding headroom.
        const double center = 50.0 * t;
        const double width = std::sqrt(std::pow(0.1, 4) + 4.0 * t * t) / 0.1;
        EXPECT_LT(center + 5.9 * width, r.hi.x1);
        EXPECT_GT(r.hi.x2, 5.9 * width);
        EXPECT_LT(r.lo.x2, -5.9 * width);
    }
}

TEST(NormTest, FreeEvolutionPreservesUnitNorm) {
    for (const double t : {0.0, 0.2, 0.5, 0.8}) {
        const double n = tw::norm(kBeam, 0.0, t);
        EXPECT_NEAR(n, 1.0, 1e-8) << "at t = " << t;
    }
}

TEST(NormTest, ReportsWhenTheWindowClipsThePacket) {
    // A region that cuts through the packet body must trip the boundary flag.
    const tw::Rect tight{{-0.05, -0.05}, {0.05, 0.05}};
    const tw::NormResult r = tw::norm(kBeam, 0.0, tight, 64, 0.0);
    EXPECT_FALSE(r.boundary_ok);
    const tw::NormResult good = tw::norm(kBeam, 0.0, tw::default_region(kBeam, 0.0), 128, 0.0);
    EXPECT_TRUE(good.boundary_ok);
}

// ---------------------------------------------------------------------------
// continuity source and atom weight
// ---------------------------------------------------------------------------

TEST(ContinuitySourceTest, MatchesFiniteDifferenceCurrentAtDefect) {
    const tw::PacketParams drain(0.8, {-2.0, 0.0}, {2.0, 0.4}, 1.0, 1.0);
    const double h = 1e-5;
    for (const double t : {0.3, 0.9, 1.4}) {
        const Complex psi = tw::psi0_packet({{0.0, 0.0}, t}, drain);
        const Complex d1 = (tw::psi0_packet({{h, 0.0}, t}, drain) -
                            tw::psi0_packet({{-h, 0.0}, t}, drain)) /
                           (2.0 * h);
        const double direct = std::imag(std::conj(psi) * d1);
        EXPECT_NEAR(tw::continuity_source(t, drain), direct,
                    1e-8 * std::max(1.0, std::abs(direct)));
    }
}

TEST(ContinuitySourceTest, MirroredInitialDataFlipsSignExactly) {
    const tw::PacketParams fwd(0.8, {-2.0, 0.5}, {2.0, 0.4}, 1.0, 1.0);
    const tw::PacketParams mir(0.8, {2.0, 0.5}, {-2.0, 0.4}, 1.0, 1.0);
    for (const double t : {0.0, 0.3, 0.9, 1.4}) {
        EXPECT_EQ(tw::continuity_source(t, mir), -tw::continuity_source(t, fwd));
    }
}

TEST(AtomWeightTest, VanishesWithoutCouplingOrElapsedTime) {
    EXPECT_EQ(tw::atom_weight(kBeam, 0.0, 0.0, 0.5), 0.0);
    EXPECT_EQ(tw::atom_weight(kBeam, 0.1, 0.3, 0.3), 0.0);
    EXPECT_THROW(tw::atom_weight(kBeam, 0.1, 0.5, 0.3), tw::ValidationError);
}

TEST(AtomWeightTest, MatchesIndependentQuadratureOfSource) {
    // Simpson integration of the closed-form source, fine enough to be an
    // independent cross-check of the adaptive trapezoid.
    const double t0 = 0.0, t1 = 0.6, eps = 0.1;
    const int n = 4000;  // even
    const double h = (t1 - t0) / n;
    double simpson = tw::continuity_source(t0, kMild) + tw::continuity_source(t1, kMild);
    for (int i = 1; i < n; ++i) {
        simpson += (i % 2 ? 4.0 : 2.0) * tw::continuity_source(t0 + i * h, kMild);
    }
    simpson *= eps * h / 3.0;  // hbar = m = 1
    EXPECT_NEAR(tw::atom_weight(kMild, eps, t0, t1), simpson, 1e-8);
}

TEST(AtomWeightTest, AccumulatesMonotonicallyForForwardBeam) {
    // With x0 = 0 and k0_1 > 0 the source is positive for all t, so the atom
    // weight grows; the slow packet keeps the increments far above quadrature
    // noise.
    double prev = 0.0;
    for (const double t : {0.1, 0.2, 0.4, 0.8}) {
        const double w = tw::atom_weight(kMild, 0.1, 0.0, t);
        EXPECT_GT(w, prev);
        prev = w;
    }
}

// ---------------------------------------------------------------------------
// density and expectations
// ---------------------------------------------------------------------------

TEST(DensityTest, IsSquaredMagnitudeOfCrossedWave) {
    const tw::DefectSet d = origin_defect(0.1);
    const tw::SpacetimePoint p{{0.7, -0.4}, 0.3};
    EXPECT_EQ(tw::probability_density(p, kMild, 0.1, d),
              std::norm(tw::psi_perturbed(p, kMild, 0.1, true)));
}

TEST(DensityTest, RefusesEvaluationOnTheDefect) {
    const tw::DefectSet d = origin_defect(0.1);
    EXPECT_THROW(tw::probability_density({{0.0, 0.0}, 0.3}, kMild, 0.1, d),
                 tw::SingularPointError);
}

TEST(ExpectationTest, ConstantPotentialGivesTotalWeightToFirstOrder) {
    // <1> = integral of density * sqrt(g) + atom weight; the flat-measure
    // norm differs from the sqrt(g)-weighted integral only through the
    // moment of eps * d2(phase) against the density, an O(eps) quantity, so
    // the two bookkeepings agree to ~eps at eps = 0.1.
    const double eps = 0.1;
    const tw::DefectSet d = origin_defect(eps);
    const tw::MeasureWithAtom m = tw::measure_with_atom(kMild, eps, d, 0.0, 0.5, 192);
    const double total = tw::expectation([](const tw::Vec2&) { return 1.0; }, m, d);
    const double flat = tw::norm(kMild, eps, m.region, 192, 0.5) + m.atom_weight;
    EXPECT_NEAR(total, flat, eps * std::abs(flat));
}

TEST(ExpectationTest, RefusesPotentialSingularAtAtomSite) {
    const tw::DefectSet d = origin_defect(0.1);
    const tw::MeasureWithAtom m = tw::measure_with_atom(kMild, 0.1, d, 0.0, 0.5, 96);
    const auto coulomb = [](const tw::Vec2& x) { return 1.0 / x.norm(); };
    EXPECT_THROW(tw::expectation(coulomb, m, d), tw::DomainError);
}

// ---------------------------------------------------------------------------
// sampled states and the modified inner product
// ---------------------------------------------------------------------------

namespace {

tw::PacketSuperposition single(const tw::PacketParams& p, Complex c = Complex(1.0, 0.0)) {
    return tw::PacketSuperposition(c, p);
}

}  // namespace

TEST(SampledStateTest, GridMismatchIsRejected) {
    const tw::PacketSuperposition a = single(kMild);
    const tw::Rect r = tw::common_region(a, a, 0.4);
    const tw::SampledState s64 = tw::sample_state(a, r, 64, 0.4);
    const tw::SampledState s96 = tw::sample_state(a, r, 96, 0.4);
    EXPECT_THROW(
        tw::modified_inner_product(s64, s96, 0.1, origin_defect(0.1), 0.0, 0.4),
        tw::ValidationError);
}

TEST(SampledStateTest, DifferentSamplingInstantsAreRejected) {
    const tw::PacketSuperposition a = single(kMild);
    const tw::Rect r = tw::common_region(a, a, 0.5);
    const tw::SampledState s1 = tw::sample_state(a, r, 64, 0.4);
    const tw::SampledState s2 = tw::sample_state(a, r, 64, 0.5);
    EXPECT_THROW(
        tw::modified_inner_product(s1, s2, 0.1, origin_defect(0.1), 0.0, 0.5),
        tw::ValidationError);
}

TEST(InnerProductTest, FlatCouplingReducesToPlainOverlap) {
    const tw::PacketSuperposition a = single(kMild);
    const tw::Rect r = tw::common_region(a, a, 0.4);
    const tw::SampledState s = tw::sample_state(a, r, 256, 0.4);
    const Complex n = tw::modified_inner_product(s, s, 0.0, origin_defect(0.0), 0.0, 0.4);
    EXPECT_NEAR(n.real(), 1.0, 1e-6);
    EXPECT_NEAR(n.imag(), 0.0, 1e-12);
}

TEST(InnerProductTest, ConjugateSymmetryHolds) {
    const tw::PacketSuperposition a = single(kMild, Complex(0.8, 0.3));
    const tw::PacketSuperposition b =
        single(tw::PacketParams(0.9, {0.3, -0.2}, {1.0, 0.5}, 1.0, 1.0), Complex(0.2, -0.7));
    const tw::Rect r = tw::common_region(a, b, 0.4);
    const tw::SampledState sa = tw::sample_state(a, r, 96, 0.4);
    const tw::SampledState sb = tw::sample_state(b, r, 96, 0.4);
    const tw::DefectSet d = origin_defect(0.1);
    const Complex ab = tw::modified_inner_product(sa, sb, 0.1, d, 0.0, 0.4);
    const Complex ba = tw::modified_inner_product(sb, sa, 0.1, d, 0.0, 0.4);
    EXPECT_LT(std::abs(ab - std::conj(ba)), 1e-12 * std::abs(ab));
}

TEST(InnerProductTest, SesquilinearInTheSecondArgument) {
    const tw::PacketSuperposition a = single(kMild);
    const tw::PacketSuperposition b =
        single(tw::PacketParams(0.9, {0.3, -0.2}, {1.0, 0.5}, 1.0, 1.0));
    const tw::PacketSuperposition c =
        single(tw::PacketParams(1.1, {-0.4, 0.1}, {0.8, -0.3}, 1.0, 1.0));
    const tw::Rect r = tw::common_region(a, b, 0.4);
    const tw::SampledState sa = tw::sample_state(a, r, 96, 0.4);
    const tw::SampledState sb = tw::sample_state(b, r, 96, 0.4);
    const tw::SampledState sc = tw::sample_state(c, r, 96, 0.4);
    const Complex la(0.6, -0.2), mu(-0.3, 0.9);
    const tw::SampledState combo = tw::combine_states(la, sb, mu, sc);
    const tw::DefectSet d = origin_defect(0.1);
    const Complex lhs = tw::modified_inner_product(sa, combo, 0.1, d, 0.0, 0.4);
    const Complex rhs = la * tw::modified_inner_product(sa, sb, 0.1, d, 0.0, 0.4) +
                        mu * tw::modified_inner_product(sa, sc, 0.1, d, 0.0, 0.4);
    EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(lhs)));
}

TEST(InnerProductTest, PolarizationIdentityReconstruction) {
    const tw::PacketSuperposition a = single(kMild, Complex(0.9, 0.1));
    const tw::PacketSuperposition b =
        single(tw::PacketParams(0.9, {0.3, -0.2}, {1.0, 0.5}, 1.0, 1.0), Complex(-0.4, 0.6));
    const tw::Rect r = tw::common_region(a, b, 0.4);
    const tw::SampledState sa = tw::sample_state(a, r, 96, 0.4);
    const tw::SampledState sb = tw::sample_state(b, r, 96, 0.4);
    for (const double eps : {0.0, 0.1}) {
        const tw::DefectSet d = origin_defect(eps);
        const Complex direct = tw::modified_inner_product(sa, sb, eps, d, 0.0, 0.4);
        const Complex rebuilt = tw::polarization_reconstruction(sa, sb, eps, d, 0.0, 0.4);
        EXPECT_LT(std::abs(direct - rebuilt), 1e-6 * std::max(1.0, std::abs(direct)))
            << "eps = " << eps;
    }
}

TEST(InnerProductTest, CoincidingStatesMatchNormPlusAtomBookkeeping) {
    // <psi, psi> carries the sqrt(g) weight and the time-integrated defect
    // term; the flat norm plus atom_weight agrees exactly at eps = 0 and to
    // O(eps) otherwise.
    const tw::PacketSuperposition a = single(kMild);
    const double t = 0.5;
    const tw::Rect r = tw::common_region(a, a, t);

    const tw::SampledState s0 = tw::sample_state(a, r, 256, t);
    const Complex flat = tw::modified_inner_product(s0, s0, 0.0, origin_defect(0.0), 0.0, t);
    EXPECT_NEAR(flat.real(), double(tw::norm(kMild, 0.0, r, 256, t)), 1e-9);

    const double eps = 0.1;
    const Complex ip = tw::modified_inner_product(s0, s0, eps, origin_defect(eps), 0.0, t);
    const double book =
        double(tw::norm(kMild, eps, r, 256, t)) + tw::atom_weight(kMild, eps, 0.0, t);
    EXPECT_NEAR(ip.real(), book, 0.1 * std::abs(book));
    EXPECT_LT(std::abs(ip.imag()), 1e-8 * std::abs(book));
}
