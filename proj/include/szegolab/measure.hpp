#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "szegolab/coefficients.hpp"

namespace szegolab {

enum class DensityMethod { via_T, via_m };

// Pointwise estimate of the a.c. density nu'(x) on a grid inside (-2, 2).
// values[i] = NaN marks a point where the estimate is unavailable; flags[i]
// marks points that needed a fallback (complex-offset retry or clamping).
struct DensityEstimate {
    std::vector<double> grid;      // strictly increasing, inside (-2, 2)
    std::vector<double> values;    // nu' >= 0 (or NaN)
    std::vector<double> gap_hint;  // change under depth halving/doubling
    std::vector<std::uint8_t> flags;
    DensityMethod method = DensityMethod::via_m;
    long depth = 0;
    // via_T only: the bounded-variation proxy looked settled over [depth/2, depth]
    bool variation_ok = true;
};

// Canonical interior grid: x_j = 2 cos(theta_j), theta_j = pi (j+1/2)/count,
// returned in increasing x order.  Uniform in the angle variable, which is the
// measure the integrals below use.
std::vector<double> theta_grid(int count);

// nu'(x) ~ sqrt(4-x^2) / (2 pi T_n(x)) from the envelope recursion at level
// depth.  Points where T <= 0 are flagged and absent.  variation_ok reflects a
// tail check of sum |a_{n+1}-a_n| + |b_{n+1}-b_n|.
DensityEstimate density_via_T(const CoefficientSequence& seq, std::span<const double> grid,
                              long depth = 100000);

// nu'(x) = Im m(x+i0) / pi by the backward continued fraction
//   m^{(k-1)} = 1 / (b_k - z - a_k^2 m^{(k)}),
// seeded at the given depth with the free half-line limit
// m_0(x+i0) = (-x + i sqrt(4-x^2)) / 2.   Zero denominators retry at
// z = x + 1e-9 i and flag the point.
DensityEstimate density_via_m(const CoefficientSequence& seq, std::span<const double> grid,
                              long depth = 1 << 16);

// Weighted log integrals of the density against the free one.  With
// x = 2 cos(theta) and L = ln( sqrt(4-x^2) / (2 pi nu') ):
//   Z        : (1/2pi) integral of L dtheta
//   Z1_plus  : (1/2pi) integral of L (1 + cos theta) dtheta
//   Z1_minus : (1/2pi) integral of L (1 - cos theta) dtheta
//   Z2_minus : (1/pi)  integral of L sin^2(theta) dtheta
// each over x in [-2+eps, 2-eps] for every rung of the epsilon ladder.
enum class SzegoKind { Z, Z1_plus, Z1_minus, Z2_minus };

enum class EdgeVerdict { converges, diverges, borderline };

struct SzegoValue {
    SzegoKind kind = SzegoKind::Z;
    double value = 0.0;    // extrapolated when convergent, else raw at eps_min
    double epsilon = 0.0;  // smallest ladder rung used
    bool diverged = false;
    EdgeVerdict at_plus2 = EdgeVerdict::converges;
    EdgeVerdict at_minus2 = EdgeVerdict::converges;
    double slope = 0.0;        // whole-integral fit vs ln(1/eps)
    double slope_plus = 0.0;   // +2-edge restricted fit
    double slope_minus = 0.0;  // -2-edge restricted fit
    double noise_plus = 0.0;
    double noise_minus = 0.0;
    int clamped_points = 0;  // grid points clamped at the density floor
    std::vector<double> ladder_eps;
    std::vector<double> ladder_values;
};

std::vector<double> default_eps_ladder();  // 2^-4 .. 2^-12

// Quadrature + ladder + per-edge slope classification.  The grid must resolve
// the substituted angle (>= 32 points per unit theta); throws otherwise.
SzegoValue szego_integral(const DensityEstimate& density, SzegoKind kind,
                          std::span<const double> eps_ladder = {});

// Slope thresholds separating the edge verdicts (see szego_integral): an edge
// diverges when its slope >= kDivergenceSlope (and >= twice its noise floor),
// converges when its slope <= kConvergenceSlope, and is borderline between.
inline constexpr double kDivergenceSlope = 0.08;
inline constexpr double kConvergenceSlope = 0.04;

struct EdgeClassification {
    EdgeVerdict at_plus2 = EdgeVerdict::converges;
    EdgeVerdict at_minus2 = EdgeVerdict::converges;
    double slope_plus = 0.0;
    double slope_minus = 0.0;
};

struct ClassifyConfig {
    int grid_count = 2048;
    long depth = 1 << 16;
    std::vector<double> eps_ladder;  // empty -> default ladder
};

// Edge-by-edge Szego verdict for the sequence: the +2 edge is classified from
// the Z1_plus ladder (whose weight vanishes at -2) and the -2 edge from
// Z1_minus, using the via-m density.
EdgeClassification divergence_classify(const CoefficientSequence& seq,
                                       const ClassifyConfig& config = {});

// Truncated positive-part envelope integrals
//   I_n = int_0^{2 - n^-2} ln_+ T_n(x) dx / sqrt(2-x)
//       + int_{-2 + n^-2}^0 ln_+ T_n(x) dx / sqrt(2+x),
// advanced incrementally over n = 1..n_max on a fixed u = sqrt(2 -+ x) grid.
struct EnvelopeIntegralScan {
    double max_value = 0.0;
    long argmax = 0;
    std::vector<long> sample_n;       // log-spaced sample of the curve
    std::vector<double> sample_value;
};

EnvelopeIntegralScan truncated_log_integrals(const CoefficientSequence& seq, long n_max,
                                             int u_points = 512);

}  // namespace szegolab
