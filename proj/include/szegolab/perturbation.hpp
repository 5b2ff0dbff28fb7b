#pragma once

#include <span>
#include <vector>

#include "szegolab/coefficients.hpp"
#include "szegolab/spectrum.hpp"

namespace szegolab {

// Finite-support perturbation shapes.  All decreases are by nonnegative
// amounts; windows on the ratios are exactly the ones under which the shapes
// provably never push a bound state away from the band.
//   a_pair   : a_n -> a_n - c, a_{n+k} -> a_{n+k} - d, ratio window
//              c/d in [1/(4k^2-3), 4k^2-3]  (k = 2 gives [1/13, 13])
//   a_run    : a_m -> a_m - c for m = n..n+k (same c, k >= 2)
//   a_pair_b : a_n, a_{n+2} -> -c each and b_n -> b_n + d, d in [-c/2, c/2]
//   a_single : a_n -> a_n - c (single off-diagonal)
//   b_single : b_n -> b_n + d (single diagonal, either sign)
enum class PerturbationKind { a_pair, a_run, a_pair_b, a_single, b_single };

struct PerturbationSpec {
    PerturbationKind kind = PerturbationKind::a_single;
    long site = 1;   // n >= 1; shapes touching n-1 rows require n >= 2
    double c = 0.0;  // decrease amount (>= 0)
    double d = 0.0;  // second amount (a_pair: second decrease; a_pair_b / b_single: b change)
    int k = 2;       // spacing (a_pair) or run extent (a_run)
};

// Throws std::invalid_argument when the shape's window or sign constraints
// fail (e.g. a_pair with c/d outside the ratio window).
void validate(const PerturbationSpec& spec);

// Largest admissible c/d ratio for an a_pair with spacing k: 4k^2 - 3.
double ratio_window_max(int k);

// True when the shape relies on the generalized (k > 2) window.
bool remark_based(const PerturbationSpec& spec);

// Sequence with the perturbation applied at full strength (table overrides on
// a copy; the input is untouched).  Validates first.
CoefficientSequence apply_perturbation(const CoefficientSequence& seq,
                                       const PerturbationSpec& spec);

// Sequence moved along the perturbation's unit-rate direction by t: the entry with
// ratio 1 moves by t, the others by their rate ratios.  t = full_strength(spec)
// recovers apply_perturbation.
CoefficientSequence apply_direction(const CoefficientSequence& seq,
                                    const PerturbationSpec& spec, double t);
double full_strength(const PerturbationSpec& spec);

// First-order eigenvalue velocity  dE/dt = <p, A p>  along the perturbation's
// unit-rate direction, for the j-th (1-based) eigenvalue on the given side of
// the truncation's spectrum.  Throws std::out_of_range if that eigenvalue
// does not exist.
double dE_dt(const TruncatedJacobi& J, const PerturbationSpec& spec, int j, Side side);

// Minoration audit: tracks every eigenvalue with |E| < 2 + delta across the
// perturbation stages, pairing by rank (missing partners pair against the band
// edge).  verdict: no tracked |E| increased beyond tolerance and no new bound
// state appeared in the window, at every stage.  hypothesis_ok: the touched
// sites had |a_m - 1| < delta and |b_m| < delta before and after.
struct MinorationAudit {
    double delta = 0.0;
    struct TrackedPair {
        double before;
        double after;
    };
    std::vector<TrackedPair> tracked_above;  // first vs last stage
    std::vector<TrackedPair> tracked_below;
    bool verdict = false;
    bool hypothesis_ok = false;
    bool remark_based = false;
    std::vector<std::uint8_t> stage_verdicts;
    int new_states = 0;  // bound states that appeared inside the window
};

MinorationAudit minoration_audit(const CoefficientSequence& seq,
                                 std::span<const PerturbationSpec> stages, double delta,
                                 int N, double eig_tol = 1e-12);

// Asymptotic phase classification for the gamma = 1 two-parameter family by
// the sign structure of (2 alpha, beta): interior of the right cone -> Szego
// at both edges; top / bottom cones -> one edge only; left cone -> neither.
// On the critical lines 2 alpha = +-beta: alpha >= 0 keeps both edges;
// alpha < 0 is the open borderline case.
enum class PhaseClass {
    szego_both,
    szego_plus2_only,
    szego_minus2_only,
    szego_neither,
    borderline_open,
};

PhaseClass askey_classify(double alpha, double beta);

// Staged approximation run: starting matrix = `base` with a_n raised by
// 6 C n^{-1-eps} (C = error amplitude bound) and entries below start_site
// replaced by `target`'s, then per-site stages (site = start_site, ...,
// start_site + stage_count - 1), each stage being the b-adjusting pair move
// followed by the ratio-13 pair move that lands a_site, b_site exactly on the
// target.  Returns the audit across all stages plus the stage list.
struct StagedAuditResult {
    MinorationAudit audit;
    std::vector<PerturbationSpec> stages;
    CoefficientSequence start;  // the staged run's initial sequence
    CoefficientSequence final;  // after every stage
    std::vector<double> z_samples;  // Z estimates along the run (sampled)
};

StagedAuditResult staged_error_audit(const CoefficientSequence& base,
                                     const CoefficientSequence& target, double C,
                                     double eps, double delta, int N, long start_site,
                                     int stage_count, bool with_z_samples = false);

}  // namespace szegolab
