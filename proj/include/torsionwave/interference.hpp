#pragma once
/**
 * interference.hpp
 * ----------------
 * Double-slit experiment model over a torsion line defect: branch
 * geometry, screen intensity with and without torsion (plane-wave and
 * packet regimes), fringe-peak extraction, and the peak-displacement
 * measurement.
 *
 * Branch model: each slit re-emits the free Gaussian packet centered at
 * the slit with the original k0; the displacement vector from slit j to
 * the screen point enters the packet's Dx argument. The evaluation time
 * is common to both branches, t = m * screen_distance / ((k1)_0 hbar).
 * One branch (corrected_branch) is taken to have crossed the defect cut
 * and carries the first-order correction factor.
 */

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "torsionwave/common.hpp"
#include "torsionwave/wavefunction.hpp"

namespace torsionwave {

/**
 * Double-slit geometry: slits on the plane x^1 = 0 at x^2 = +separation/2
 * (slit 1) and x^2 = -separation/2 (slit 2); detection plate at
 * x^1 = screen_distance, sampled on screen_range with `samples` points.
 * corrected_branch names the slit whose path crosses the defect cut
 * (default: slit 2, the negative-x^2 branch).
 */
struct SlitExperiment {
    double separation = 10.0;       // nm, slit-center distance
    double aperture = 0.1;          // nm, equals the packet width a
    double screen_distance = 20.0;  // nm, x^1 of the detection plate
    double screen_min = -15.0;      // nm
    double screen_max = 15.0;       // nm
    int samples = 3001;
    int corrected_branch = 2;

    SlitExperiment() = default;
    SlitExperiment(double sep, double ap, double dist, double smin, double smax, int n,
                   int corrected = 2)
        : separation(sep), aperture(ap), screen_distance(dist), screen_min(smin),
          screen_max(smax), samples(n), corrected_branch(corrected) {
        validate();
    }

    void validate() const {
        if (!(separation > 0.0)) throw ValidationError("SlitExperiment: separation must be > 0");
        if (!(aperture > 0.0)) throw ValidationError("SlitExperiment: aperture must be > 0");
        if (!(screen_distance > 0.0))
            throw ValidationError("SlitExperiment: screen_distance must be > 0");
        if (!(screen_min < screen_max))
            throw ValidationError("SlitExperiment: screen_range must be increasing");
        if (samples < 3) throw ValidationError("SlitExperiment: samples must be >= 3");
        if (corrected_branch != 1 && corrected_branch != 2)
            throw ValidationError("SlitExperiment: corrected_branch must be 1 or 2");
    }

    /** x^2 coordinate of slit j (j = 1 positive, j = 2 negative). */
    double slit_x2(int j) const { return j == 1 ? separation / 2.0 : -separation / 2.0; }
};

/**
 * Screen intensity profile. `values` is the first-order intensity; it may
 * dip slightly below zero near fringe valleys where first order breaks
 * down, so negativity is reported by valley_bound_ok() rather than being
 * a construction error.
 */
struct IntensityProfile {
    std::vector<double> positions;  // strictly increasing screen x^2 (nm)
    std::vector<double> values;
    double epsilon = 0.0;

    void validate() const {
        if (positions.size() != values.size())
            throw ValidationError("IntensityProfile: positions/values size mismatch");
        for (std::size_t i = 1; i < positions.size(); ++i)
            if (!(positions[i] > positions[i - 1]))
                throw ValidationError("IntensityProfile: positions must be strictly increasing");
    }

    double max_value() const {
        double m = 0.0;
        for (double v : values) m = std::max(m, v);
        return m;
    }

    /**
     * First-order sanity bound: values >= -epsilon * max(values). Observed
     * to be violated by an O(1) constant at the deepest valleys (the dips
     * are ~(eps/2)|psi0|^2 |B_L| with |B_L| > 2); exposed as a check so
     * callers can report it without aborting a scan.
     */
    bool valley_bound_ok() const {
        const double bound = -std::abs(epsilon) * max_value();
        for (double v : values)
            if (v < bound) return false;
        return true;
    }
};

/** A refined local maximum of a profile. */
struct Peak {
    double position = 0.0;  // nm
    double height = 0.0;
};

/**
 * Displacement vectors from the two slits to a screen point, paired with
 * the common evaluation time t = m * screen_distance / ((k1)_0 hbar).
 * The packet's central (k1)_0 must be positive (the beam must actually
 * travel toward the screen).
 */
inline std::pair<SpacetimePoint, SpacetimePoint> branch_points(double screen_x2,
                                                               const SlitExperiment& exp,
                                                               const PacketParams& params) {
    if (!(params.k0.x1 > 0.0))
        throw ValidationError("branch_points: (k1)_0 must be > 0 to reach the screen");
    const double t = params.mass * exp.screen_distance / (params.k0.x1 * params.hbar);
    SpacetimePoint p1{{exp.screen_distance, screen_x2 - exp.slit_x2(1)}, t};
    SpacetimePoint p2{{exp.screen_distance, screen_x2 - exp.slit_x2(2)}, t};
    return {p1, p2};
}

/**
 * Plane-wave screen intensity for q identical defects:
 *     |psi|^2 = 4 A^2 cos^2[ k.(x_(2) - x_(1))/2 - theta/2 ],
 * theta = phase_shift(epsilon, k, q). Implemented exactly as printed;
 * note x_(2) - x_(1) = (0, separation) in this geometry.
 */
inline double intensity_plane_wave(double screen_x2, const Vec2& k, double epsilon, int q,
                                   double amplitude, const SlitExperiment& exp) {
    const Vec2 d1{exp.screen_distance, screen_x2 - exp.slit_x2(1)};
    const Vec2 d2{exp.screen_distance, screen_x2 - exp.slit_x2(2)};
    const Vec2 delta = d2 - d1;
    const double theta = phase_shift(epsilon, k, q);
    const double c = std::cos(0.5 * k.dot(delta) - 0.5 * theta);
    return 4.0 * amplitude * amplitude * c * c;
}

/**
 * Packet screen intensity (first order):
 *     I = 1/4 |psi0(x_(1)) + psi0(x_(2))|^2
 *         - (eps/2) Im[ psi0*(x_other) psi0(x_c) B_L(x_c) ],
 * where x_c is the branch point of the corrected slit and x_other the
 * uncorrected one. With the default corrected_branch = 2 this is the
 * printed two-term form verbatim.
 */
inline double intensity_packet(double screen_x2, const PacketParams& params, double epsilon,
                               const SlitExperiment& exp) {
    const auto [p1, p2] = branch_points(screen_x2, exp, params);
    const Complex u1 = psi0_packet(p1, params);
    const Complex u2 = psi0_packet(p2, params);
    const Complex sum = u1 + u2;
    double intensity = 0.25 * std::norm(sum);
    if (epsilon != 0.0) {
        const SpacetimePoint& pc = (exp.corrected_branch == 2) ? p2 : p1;
        const Complex uc = (exp.corrected_branch == 2) ? u2 : u1;
        const Complex uo = (exp.corrected_branch == 2) ? u1 : u2;
        const Complex bl = b_l_packet(pc, params);
        intensity -= 0.5 * epsilon * std::imag(std::conj(uo) * uc * bl);
    }
    return intensity;
}

/**
 * Samples intensity_packet on the uniform screen grid. Points may be
 * evaluated concurrently (`threads` > 1, or 0 to use the environment
 * variable TORSION_THREADS / hardware default); every point writes its
 * own preassigned slot, so output is bitwise independent of the thread
 * count and of scheduling order.
 */
inline IntensityProfile pattern_scan(const PacketParams& params, double epsilon,
                                     const SlitExperiment& exp, int threads = 0) {
    exp.validate();
    if (threads <= 0) {
        if (const char* env = std::getenv("TORSION_THREADS")) {
            threads = std::atoi(env);
        }
        if (threads <= 0) {
            threads = static_cast<int>(std::thread::hardware_concurrency());
            if (threads <= 0) threads = 1;
        }
    }

    IntensityProfile prof;
    prof.epsilon = epsilon;
    const int n = exp.samples;
    prof.positions.resize(n);
    prof.values.resize(n);
    const double step = (exp.screen_max - exp.screen_min) / (n - 1);
    for (int i = 0; i < n; ++i) prof.positions[i] = exp.screen_min + step * i;

    auto worker = [&](int begin, int end) {
        for (int i = begin; i < end; ++i)
            prof.values[i] = intensity_packet(prof.positions[i], params, epsilon, exp);
    };

    if (threads == 1) {
        worker(0, n);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n + threads - 1) / threads;
        for (int tix = 0; tix < threads; ++tix) {
            const int b = tix * chunk;
            const int e = std::min(n, b + chunk);
            if (b >= e) break;
            pool.emplace_back(worker, b, e);
        }
        for (auto& th : pool) th.join();
    }
    prof.validate();
    return prof;
}

/**
 * Local maxima by strict 3-point test (plateaus are not peaks), refined
 * by the vertex of the parabola through the triple; results ordered by
 * position. Returns an empty list for monotone or flat profiles.
 */
inline std::vector<Peak> find_peaks(const IntensityProfile& profile) {
    profile.validate();
    if (profile.positions.size() < 3)
        throw ValidationError("find_peaks: need at least 3 samples");
    std::vector<Peak> peaks;
    const auto& xs = profile.positions;
    const auto& ys = profile.values;
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
        if (!(ys[i] > ys[i - 1] && ys[i] > ys[i + 1])) continue;
        // Quadratic refinement through (x_{i-1}, x_i, x_{i+1}); uniform or
        // near-uniform grids both handled by the general parabola vertex.
        const double x0 = xs[i - 1], x1 = xs[i], x2 = xs[i + 1];
        const double y0 = ys[i - 1], y1 = ys[i], y2 = ys[i + 1];
        const double d01 = (y1 - y0) / (x1 - x0);
        const double d12 = (y2 - y1) / (x2 - x1);
        const double curv = (d12 - d01) / (x2 - x0);  // second divided difference
        Peak pk;
        if (curv < 0.0) {
            pk.position = 0.5 * (x0 + x1) - 0.5 * d01 / curv;
            const double dx = pk.position - x1;
            // Parabola value at the vertex (Newton form around x1).
            pk.height = y1 + (d01 + curv * (x1 - x0)) * dx + curv * dx * dx;
        } else {
            pk.position = x1;
            pk.height = y1;
        }
        peaks.push_back(pk);
    }
    return peaks;
}

/**
 * Maximum absolute shift of the principal fringes: takes the two tallest
 * torsion-free peaks, pairs each with the nearest with-torsion peak, and
 * returns the larger absolute position shift. Throws if the pairing is
 * ill-posed (missing peaks, or both principal peaks claiming the same
 * partner).
 */
inline double peak_displacement(const IntensityProfile& with_torsion,
                                const IntensityProfile& torsion_free) {
    if (with_torsion.positions.size() != torsion_free.positions.size())
        throw ValidationError("peak_displacement: profiles must share one grid");
    const std::vector<Peak> free_peaks = find_peaks(torsion_free);
    const std::vector<Peak> tors_peaks = find_peaks(with_torsion);
    if (free_peaks.empty() || tors_peaks.empty())
        throw ValidationError("peak_displacement: a profile has no peaks");

    // Two tallest torsion-free peaks (or the single one if only one exists).
    std::vector<Peak> principal = free_peaks;
    std::sort(principal.begin(), principal.end(),
              [](const Peak& a, const Peak& b) { return a.height > b.height; });
    const std::size_t n_principal = std::min<std::size_t>(2, principal.size());

    double max_shift = 0.0;
    std::vector<std::size_t> claimed;
    for (std::size_t p = 0; p < n_principal; ++p) {
        std::size_t best = 0;
        double best_dist = std::abs(tors_peaks[0].position - principal[p].position);
        for (std::size_t j = 1; j < tors_peaks.size(); ++j) {
            const double d = std::abs(tors_peaks[j].position - principal[p].position);
            if (d < best_dist) {
                best = j;
                best_dist = d;
            }
        }
        for (std::size_t c : claimed)
            if (c == best)
                throw ValidationError(
                    "peak_displacement: principal peaks pair to the same partner");
        claimed.push_back(best);
        max_shift = std::max(max_shift, best_dist);
    }
    return max_shift;
}

/**
 * Signed-area asymmetry of a profile: (integral over x^2 > 0 minus
 * integral over x^2 < 0) divided by the total integral, by trapezoid on
 * the profile grid. Zero for mirror-symmetric patterns; scales linearly
 * in eps for the torsion-corrected ones.
 */
inline double profile_asymmetry(const IntensityProfile& profile) {
    profile.validate();
    const auto& xs = profile.positions;
    const auto& ys = profile.values;
    if (xs.size() < 2) throw ValidationError("profile_asymmetry: need at least 2 samples");
    double signed_area = 0.0, total = 0.0;
    auto sgn = [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); };
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double h = xs[i] - xs[i - 1];
        signed_area += 0.5 * h * (ys[i] * sgn(xs[i]) + ys[i - 1] * sgn(xs[i - 1]));
        total += 0.5 * h * (ys[i] + ys[i - 1]);
    }
    if (total == 0.0) throw ValidationError("profile_asymmetry: zero total intensity");
    return signed_area / total;
}

}  // namespace torsionwave
