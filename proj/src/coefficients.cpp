#include "szegolab/coefficients.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace szegolab {

namespace {

double power_decay(long n, double gamma) {
    if (gamma == 1.0) return 1.0 / static_cast<double>(n);
    return std::pow(static_cast<double>(n), -gamma);
}

void check_gamma(double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0)
        throw std::domain_error("decay exponent must lie in (0, 1]");
}

CoefficientPair raw_value(const CoefficientSequence& seq, long n) {
    switch (seq.kind) {
        case SeqKind::free_laplacian:
            return {1.0, 0.0};
        case SeqKind::coulomb: {
            double decay = power_decay(n, seq.gamma);
            double a = 1.0 + seq.alpha * decay;
            double b = seq.beta * decay;
            if (seq.error_amp != 0.0) {
                double env = seq.error_amp * std::pow(static_cast<double>(n), -1.0 - seq.error_exp);
                a += env * unit_noise(seq.error_seed, n, 0);
                b += env * unit_noise(seq.error_seed, n, 1);
            }
            return {a, b};
        }
        case SeqKind::table:
            return {1.0, 0.0};  // free values outside the table
        case SeqKind::transformed: {
            CoefficientPair v = coeffs_at(*seq.base, n + seq.offset);
            if (seq.shift_a) v.a += seq.shift_a(n);
            if (seq.shift_b) v.b += seq.shift_b(n);
            return v;
        }
    }
    throw std::logic_error("unreachable sequence kind");
}

}  // namespace

CoefficientSequence free_sequence() { return {}; }

CoefficientSequence coulomb_sequence(double alpha, double beta, double gamma) {
    check_gamma(gamma);
    CoefficientSequence seq;
    seq.kind = SeqKind::coulomb;
    seq.alpha = alpha;
    seq.beta = beta;
    seq.gamma = gamma;
    return seq;
}

CoefficientSequence coulomb_sequence_with_error(double alpha, double beta, double gamma,
                                                double error_amp, double error_exp,
                                                std::uint64_t error_seed) {
    check_gamma(gamma);
    if (error_amp < 0.0) throw std::domain_error("error amplitude must be >= 0");
    if (!(error_exp > 0.0)) throw std::domain_error("error decay exponent must be > 0");
    CoefficientSequence seq = coulomb_sequence(alpha, beta, gamma);
    seq.error_amp = error_amp;
    seq.error_exp = error_exp;
    seq.error_seed = error_seed;
    return seq;
}

CoefficientSequence table_sequence(std::map<long, CoefficientPair> table) {
    CoefficientSequence seq;
    seq.kind = SeqKind::table;
    seq.table = std::move(table);
    return seq;
}

CoefficientPair coeffs_at(const CoefficientSequence& seq, long n) {
    if (n < 1) throw std::domain_error("coefficient index must be >= 1");
    CoefficientPair v;
    auto it = seq.table.find(n);
    if (it != seq.table.end()) {
        v = it->second;
    } else {
        v = raw_value(seq, n);
    }
    if (!(v.a > 0.0))
        throw std::domain_error("off-diagonal entry a_" + std::to_string(n) +
                                " = " + std::to_string(v.a) + " is not positive");
    return v;
}

double delta_n(const CoefficientSequence& seq, long n) {
    if (n < 1) throw std::domain_error("defect index must be >= 1");
    CoefficientPair c1 = coeffs_at(seq, n);
    CoefficientPair c2 = coeffs_at(seq, n + 1);
    CoefficientPair c3 = coeffs_at(seq, n + 2);
    double raw = c2.a * c2.a - c1.a * c1.a + 0.5 * c2.a * std::abs(c3.b - c2.b) +
                 0.5 * c1.a * std::abs(c2.b - c1.b);
    return raw > 0.0 ? raw : 0.0;
}

namespace {

// Tail bound on sum_{n>N} n delta_n for the error-free coulomb family with
// alpha >= 0, 2 alpha >= |beta|, gamma in (1/2, 1].  For n > N,
//   delta_n <= gamma (n+1)^{-gamma-1} [ -2 alpha
//              + (|beta|/2)(1 + alpha n^-gamma)(1 + (1+1/n)^{gamma+1}) ]_+
// and the bracket is bounded by (|beta|/2) eps_n with
//   eps_n <= 3 alpha n^-gamma + 2(gamma+1)/n  (valid for n >= 4),
// so  n delta_n <= gamma (|beta|/2) (3 alpha n^{-2 gamma} + 2(gamma+1) n^{-gamma-1})
// and integral comparison gives the closed tail below.  When the bracket is
// already non-positive at N (strict cone interior), the tail is 0.
std::optional<double> coulomb_tail_bound(const CoefficientSequence& seq, long N) {
    if (seq.kind != SeqKind::coulomb || seq.error_amp != 0.0) return std::nullopt;
    if (!seq.table.empty() && seq.table.rbegin()->first > N) return std::nullopt;
    double alpha = seq.alpha, beta = std::abs(seq.beta), gamma = seq.gamma;
    if (alpha < 0.0 || 2.0 * alpha < beta) return std::nullopt;
    if (!(gamma > 0.5) || N < 4) return std::nullopt;
    double n = static_cast<double>(N);
    double bracket = -2.0 * alpha + 0.5 * beta * (1.0 + alpha * std::pow(n, -gamma)) *
                                        (1.0 + std::pow(1.0 + 1.0 / n, gamma + 1.0));
    if (bracket <= 0.0) return 0.0;  // decreasing in n, so the whole tail clips to 0
    double tail = gamma * 0.5 * beta *
                  (3.0 * alpha * std::pow(n, 1.0 - 2.0 * gamma) / (2.0 * gamma - 1.0) +
                   2.0 * (gamma + 1.0) * std::pow(n, -gamma) / gamma);
    return tail;
}

}  // namespace

AdmissibilityReport admissibility(const CoefficientSequence& seq, long horizon) {
    if (horizon < 4) throw std::domain_error("admissibility horizon must be >= 4");
    AdmissibilityReport report;
    report.horizon = horizon;

    long last_violation = 0;
    KahanSum weighted;
    CoefficientPair c1 = coeffs_at(seq, 1);
    CoefficientPair c2 = coeffs_at(seq, 2);
    for (long n = 1; n <= horizon; ++n) {
        if (c1.a < 1.0 + 0.5 * std::abs(c1.b)) {
            if (report.first_violation == 0) report.first_violation = n;
            last_violation = n;
        }
        CoefficientPair c3 = coeffs_at(seq, n + 2);
        double raw = c2.a * c2.a - c1.a * c1.a + 0.5 * c2.a * std::abs(c3.b - c2.b) +
                     0.5 * c1.a * std::abs(c2.b - c1.b);
        if (raw > 0.0) weighted.add(static_cast<double>(n) * raw);
        c1 = c2;
        c2 = c3;
    }
    report.floor_index = last_violation + 1;
    report.weighted_sum = weighted.value();
    report.is_admissible_finite = (report.floor_index <= horizon / 2);
    report.tail_estimate = coulomb_tail_bound(seq, horizon);
    return report;
}

CoefficientSequence admissible_shift(const CoefficientSequence& seq,
                                     std::function<double(long)> e,
                                     std::function<double(long)> f,
                                     ShiftHypothesis hypothesis) {
    CoefficientSequence out;
    out.kind = SeqKind::transformed;
    out.base = std::make_shared<CoefficientSequence>(seq);
    out.shift_a = std::move(e);
    out.shift_b = std::move(f);
    out.hypothesis = hypothesis;
    return out;
}

CoefficientSequence strip_rows(const CoefficientSequence& seq, long n) {
    if (n < 0) throw std::domain_error("cannot strip a negative number of rows");
    if (n == 0) return seq;
    CoefficientSequence out;
    out.kind = SeqKind::transformed;
    out.base = std::make_shared<CoefficientSequence>(seq);
    out.offset = n;
    return out;
}

CoefficientSequence with_overrides(const CoefficientSequence& seq,
                                   const std::map<long, CoefficientPair>& overrides) {
    CoefficientSequence out = seq;
    for (const auto& [n, v] : overrides) out.table[n] = v;
    return out;
}

}  // namespace szegolab
