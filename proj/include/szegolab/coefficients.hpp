#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>

#include "szegolab/common.hpp"

namespace szegolab {

// One row of Jacobi data: off-diagonal a_n > 0 and diagonal b_n.
struct CoefficientPair {
    double a;
    double b;
};

enum class SeqKind {
    free_laplacian,  // a == 1, b == 0
    coulomb,         // a_n = 1 + alpha n^-gamma + err, b_n = beta n^-gamma + err
    table,           // explicit finite overrides over the free values
    transformed,     // base sequence plus shifts and/or a row offset
};

// Hypothesis class a caller claims when registering an additive shift
// (e_n on a, f_n on b).  The claim is recorded, not proven here.
enum class ShiftHypothesis {
    none,
    // 2 e_n >= |f_n| with summable weighted variation of (e, f)
    weighted_variation,
    // e_n monotone -> 0 with n e_n (a or b increment) bounded
    monotone_envelope,
};

// Half-line Jacobi coefficient sequence, 1-based: a_1, a_2, ... and b_1, b_2, ...
// Value semantics; evaluation is pure (same parameters + seed -> same values),
// so a const sequence is safe to share across threads.
struct CoefficientSequence {
    SeqKind kind = SeqKind::free_laplacian;

    // coulomb parameters
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 1.0;  // decay exponent, in (0, 1]

    // seeded error term: error_amp * n^{-1-error_exp} * u_n with u_n in [-1,1]
    double error_amp = 0.0;
    double error_exp = 1.0;
    std::uint64_t error_seed = 0;

    // overrides take precedence for listed n (any kind)
    std::map<long, CoefficientPair> table;

    // transformed only
    std::shared_ptr<const CoefficientSequence> base;
    std::function<double(long)> shift_a;  // e_n added to a_n
    std::function<double(long)> shift_b;  // f_n added to b_n
    long offset = 0;                      // rows stripped off the base
    ShiftHypothesis hypothesis = ShiftHypothesis::none;
};

// Factories.
CoefficientSequence free_sequence();
CoefficientSequence coulomb_sequence(double alpha, double beta, double gamma = 1.0);
CoefficientSequence coulomb_sequence_with_error(double alpha, double beta, double gamma,
                                                double error_amp, double error_exp,
                                                std::uint64_t error_seed);
CoefficientSequence table_sequence(std::map<long, CoefficientPair> table);

// (a_n, b_n) for n >= 1.  Throws std::domain_error if n < 1 or if the
// resulting a_n is not strictly positive.
CoefficientPair coeffs_at(const CoefficientSequence& seq, long n);

// Clipped one-step defect
//   delta_n = [a_{n+1}^2 - a_n^2 + (a_{n+1}/2)|b_{n+2}-b_{n+1}|
//                                + (a_n/2)|b_{n+1}-b_n|]_+  >= 0.
double delta_n(const CoefficientSequence& seq, long n);

struct AdmissibilityReport {
    bool is_admissible_finite = false;
    long horizon = 0;
    // First index from which a_n >= 1 + |b_n|/2 held through the horizon
    // (last violation + 1; equals 1 when the bound never failed).
    long floor_index = 0;
    long first_violation = 0;   // 0 when the floor bound never failed
    double weighted_sum = 0.0;  // sum_{n<=horizon} n * delta_n
    // Analytic bound on sum_{n>horizon} n * delta_n when available
    // (error-free coulomb, 2*alpha >= |beta|, gamma > 1/2); absent otherwise.
    std::optional<double> tail_estimate;
};

// Checks the admissibility data on [1, horizon]: the floor bound
// a_n >= 1 + |b_n|/2 must hold from some floor_index <= horizon/2 on, and the
// weighted defect sum is accumulated (with a tail bound where the sequence
// kind permits one).
AdmissibilityReport admissibility(const CoefficientSequence& seq, long horizon);

// Registers an additive shift (a_n + e_n, b_n + f_n) with the hypothesis class
// the caller claims for it.  Values are checked lazily: querying an index
// where a_n + e_n <= 0 throws.
CoefficientSequence admissible_shift(const CoefficientSequence& seq,
                                     std::function<double(long)> e,
                                     std::function<double(long)> f,
                                     ShiftHypothesis hypothesis);

// Sequence of the matrix with the first n rows and columns removed:
// row k of the result is row k + n of the input.
CoefficientSequence strip_rows(const CoefficientSequence& seq, long n);

// Copy with extra table overrides (absolute values) applied on top.
CoefficientSequence with_overrides(const CoefficientSequence& seq,
                                   const std::map<long, CoefficientPair>& overrides);

}  // namespace szegolab
