#include "szegolab/polynomials.hpp"

#include <cmath>
#include <stdexcept>

namespace szegolab {

PolynomialState initial_state(const CoefficientSequence& seq, double x) {
    CoefficientPair c1 = coeffs_at(seq, 1);
    CoefficientPair c2 = coeffs_at(seq, 2);
    PolynomialState st;
    st.n = 0;
    st.x = x;
    st.p_curr = 1.0;
    st.p_prev = 0.0;
    st.s = c1.a * c1.a;
    st.t = st.s + 0.5 * c1.a * std::abs(c2.b - c1.b) * st.p_curr * st.p_curr;
    return st;
}

PolynomialState advance(const PolynomialState& state, const CoefficientSequence& seq,
                        double cap) {
    long m = state.n + 1;  // level being produced
    CoefficientPair c1 = coeffs_at(seq, m);
    CoefficientPair c2 = coeffs_at(seq, m + 1);
    CoefficientPair c3 = coeffs_at(seq, m + 2);
    double a_prev = (m >= 2) ? coeffs_at(seq, m - 1).a : 0.0;
    return advance(state, c1, c2, c3, a_prev, cap);
}

PolynomialState advance(const PolynomialState& state, const CoefficientPair& c1,
                        const CoefficientPair& c2, const CoefficientPair& c3,
                        double a_prev, double cap) {
    long m = state.n + 1;
    if (m == 1) a_prev = 0.0;
    double p_next = ((state.x - c1.b) * state.p_curr - a_prev * state.p_prev) / c1.a;
    if (!(std::abs(p_next) <= cap)) throw recurrence_overflow(m, std::abs(p_next));

    PolynomialState out;
    out.n = m;
    out.x = state.x;
    out.p_curr = p_next;
    out.p_prev = state.p_curr;
    out.s = state.s + (c2.a * c2.a - c1.a * c1.a) * p_next * p_next +
            c1.a * (c2.b - c1.b) * p_next * state.p_curr;
    out.t = out.s + 0.5 * c2.a * std::abs(c3.b - c2.b) * p_next * p_next;
    return out;
}

PolynomialState advance_to(const CoefficientSequence& seq, double x, long n, double cap) {
    if (n < 0) throw std::domain_error("recursion level must be >= 0");
    PolynomialState st = initial_state(seq, x);
    for (long m = 0; m < n; ++m) st = advance(st, seq, cap);
    return st;
}

double dombrowski_residual(const PolynomialState& state, const CoefficientSequence& seq) {
    PolynomialState next = advance(state, seq);
    CoefficientPair c2 = coeffs_at(seq, state.n + 1);
    double q = next.p_curr * next.p_curr -
               ((state.x - c2.b) / c2.a) * next.p_curr * next.p_prev +
               state.p_curr * state.p_curr;
    return state.s - c2.a * c2.a * q;
}

double dombrowski_scale(const PolynomialState& state, const CoefficientSequence& seq) {
    PolynomialState next = advance(state, seq);
    CoefficientPair c2 = coeffs_at(seq, state.n + 1);
    double scale = c2.a * c2.a * (next.p_curr * next.p_curr + state.p_curr * state.p_curr);
    return std::max({std::abs(state.s), scale, 1e-300});
}

namespace {

// First index from which a_m >= 1 + |b_m|/2 holds through `upto`.
long floor_index_through(const CoefficientSequence& seq, long upto) {
    long last_violation = 0;
    for (long m = 1; m <= upto; ++m) {
        CoefficientPair c = coeffs_at(seq, m);
        if (c.a < 1.0 + 0.5 * std::abs(c.b)) last_violation = m;
    }
    return last_violation + 1;
}

}  // namespace

EnvelopeBoundsCheck envelope_bounds_check(const CoefficientSequence& seq, double x, long n) {
    if (n < 1) throw std::domain_error("envelope bound level must be >= 1");
    if (!(std::abs(x) < 2.0)) throw std::domain_error("envelope bounds need |x| < 2");

    EnvelopeBoundsCheck out;
    out.floor_index = floor_index_through(seq, n + 1);
    // The bounds at level n are proven from the floor condition at levels n
    // and n+1; a later floor_index makes them inapplicable rather than false.
    out.applicable = (out.floor_index <= n);
    if (!out.applicable) return out;

    double dn = delta_n(seq, n);

    PolynomialState prev = advance_to(seq, x, n - 1);
    PolynomialState curr = advance(prev, seq);
    out.pointwise = (4.0 - x * x) * curr.p_curr * curr.p_curr <= 4.0 * prev.t + 1e-12;
    double ratio_cap = std::exp(std::min(4.0 * dn / (4.0 - x * x), 700.0)) * prev.t;
    out.ratio = curr.t >= -1e-15 && curr.t <= ratio_cap * (1.0 + 1e-12) + 1e-15;

    // Band suprema sampled on a Chebyshev grid of 4(n+1) nodes.
    long nodes = 4 * (n + 1);
    double max_p2 = 0.0, max_t_prev = 0.0, max_t_curr = 0.0;
    for (long j = 0; j < nodes; ++j) {
        double theta = M_PI * (static_cast<double>(j) + 0.5) / static_cast<double>(nodes);
        double xx = 2.0 * std::cos(theta);
        PolynomialState pj = advance_to(seq, xx, n - 1);
        PolynomialState cj = advance(pj, seq);
        max_p2 = std::max(max_p2, cj.p_curr * cj.p_curr);
        max_t_prev = std::max(max_t_prev, pj.t);
        max_t_curr = std::max(max_t_curr, cj.t);
    }
    double np1 = static_cast<double>(n + 1);
    out.sup_poly = max_p2 <= np1 * np1 * max_t_prev * (1.0 + 1e-12);
    double sup_cap = std::exp(std::min(np1 * np1 * dn, 700.0));
    out.sup_ratio = max_t_curr <= sup_cap * max_t_prev * (1.0 + 1e-12);
    return out;
}

int block_monotonicity_check(const CoefficientSequence& seq, double x, long n, int K) {
    if (K < 3) throw std::domain_error("block length K must be >= 3");
    if (n < 1) throw std::domain_error("block start must be >= 1");
    if (!(std::abs(x) < 2.0)) throw std::domain_error("block test needs |x| < 2");
    PolynomialState st = advance_to(seq, x, n - 1);
    double s_start = st.s;
    for (int step = 0; step < K; ++step) st = advance(st, seq);
    double diff = st.s - s_start;
    if (diff > 0.0) return 1;
    if (diff < 0.0) return -1;
    return 0;
}

}  // namespace szegolab
