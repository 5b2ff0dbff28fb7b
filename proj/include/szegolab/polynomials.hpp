#pragma once

#include "szegolab/coefficients.hpp"

namespace szegolab {

// State of the orthonormal-polynomial recursion at level n for fixed x:
//   x P_n = a_{n+1} P_{n+1} + b_{n+1} P_n + a_n P_{n-1},  P_0 = 1, P_{-1} = 0,
// together with the running envelope sums
//   s = S_n = sum_{j<=n} [(a_{j+1}^2 - a_j^2) P_j^2 + a_j (b_{j+1}-b_j) P_j P_{j-1}]
//   t = T_n = S_n + (a_{n+1}/2)|b_{n+2}-b_{n+1}| P_n^2
// (a_0 = b_0 = 0 inside the sums).  For the free sequence s = t = 1 for all n, x.
struct PolynomialState {
    long n = 0;
    double x = 0.0;
    double p_curr = 1.0;  // P_n(x)
    double p_prev = 0.0;  // P_{n-1}(x)
    double s = 1.0;       // S_n(x)
    double t = 1.0;       // T_n(x)
};

// |P| cap beyond which advance() signals exponential growth.
inline constexpr double kOverflowCap = 1e150;

// State at n = 0 (P_0 = 1, S_0 = a_1^2, T_0 = a_1^2 + (a_1/2)|b_2 - b_1|).
PolynomialState initial_state(const CoefficientSequence& seq, double x);

// One O(1) step n -> n+1.  Throws recurrence_overflow if |P_{n+1}| > cap.
PolynomialState advance(const PolynomialState& state, const CoefficientSequence& seq,
                        double cap = kOverflowCap);

// Same step with prefetched coefficients: c1 at the level being produced
// (state.n + 1), c2 and c3 at the next two, a_prev = a at state.n (ignored at
// n = 0).  Lets grid sweeps hoist the coefficient lookups out of the inner
// per-point loop; the sequence overload delegates here.
PolynomialState advance(const PolynomialState& state, const CoefficientPair& c1,
                        const CoefficientPair& c2, const CoefficientPair& c3,
                        double a_prev, double cap = kOverflowCap);

// Convenience: run the recursion from 0 up to level n.
PolynomialState advance_to(const CoefficientSequence& seq, double x, long n,
                           double cap = kOverflowCap);

// Defect of the closed quadratic form for S_n,
//   S_n - a_{n+1}^2 [P_{n+1}^2 - ((x-b_{n+1})/a_{n+1}) P_{n+1} P_n + P_n^2],
// identically zero in exact arithmetic.  Scaled comparisons should divide by
// dombrowski_scale().
double dombrowski_residual(const PolynomialState& state, const CoefficientSequence& seq);

// Natural magnitude of the terms entering the residual at this state.
double dombrowski_scale(const PolynomialState& state, const CoefficientSequence& seq);

// Envelope bound checks at level n.  applicable is false when the floor bound
// a_m >= 1 + |b_m|/2 fails somewhere in 1..n+1 after floor_index (the bounds
// are then neither asserted nor denied).
struct EnvelopeBoundsCheck {
    bool applicable = false;
    long floor_index = 0;     // first index from which the floor bound held
    bool pointwise = false;   // (4-x^2) P_n^2 <= 4 T_{n-1} at the given x
    bool sup_poly = false;    // max P_n^2 <= (n+1)^2 max T_{n-1} over the band
    bool ratio = false;       // 0 <= T_n <= exp(4 delta_n/(4-x^2)) T_{n-1} at x
    bool sup_ratio = false;   // max T_n <= exp((n+1)^2 delta_n) max T_{n-1}
};

// Checks all four envelope bounds; the sup bounds sample |x| <= 2 on a
// Chebyshev grid of 4(n+1) nodes.  Requires |x| < 2 and n >= 1.
EnvelopeBoundsCheck envelope_bounds_check(const CoefficientSequence& seq, double x, long n);

// Sign of S_{n+K-1}(x) - S_{n-1}(x) in {-1, 0, +1}; the K-step block test for
// eventual envelope monotonicity.  Requires K >= 3, n >= 1, |x| < 2.
int block_monotonicity_check(const CoefficientSequence& seq, double x, long n, int K);

}  // namespace szegolab
