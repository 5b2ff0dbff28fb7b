#include "szegolab/sumrules.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "szegolab/common.hpp"

namespace szegolab {

namespace {

SzegoKind integral_kind(RuleKind kind) {
    switch (kind) {
        case RuleKind::z_step:
            return SzegoKind::Z;
        case RuleKind::z1_plus_step:
            return SzegoKind::Z1_plus;
        case RuleKind::z1_minus_step:
            return SzegoKind::Z1_minus;
    }
    throw std::logic_error("unreachable rule kind");
}

// Bound-state weight entering the rule: ln|beta| for the symmetric rule,
// xi^{+-} for the one-sided ones.  All three vanish at beta = +-1, the value
// unpaired ranks are padded with.
double weight(RuleKind kind, double beta) {
    switch (kind) {
        case RuleKind::z_step:
            return std::log(std::abs(beta));
        case RuleKind::z1_plus_step:
            return xi(Side::plus, beta);
        case RuleKind::z1_minus_step:
            return xi(Side::minus, beta);
    }
    throw std::logic_error("unreachable rule kind");
}

// |d(weight)/dE| at energy E: 1/sqrt(E^2-4) for ln|beta|, (1 +- E/2) times
// that for xi^{+-}.  Used to convert the eigenvalue tolerance into a noise
// budget for the weight sums.
double weight_sensitivity(RuleKind kind, double E) {
    double gap = std::sqrt(std::max(E * E - 4.0, 0.0));
    if (gap <= 0.0) return std::numeric_limits<double>::infinity();
    switch (kind) {
        case RuleKind::z_step:
            return 1.0 / gap;
        case RuleKind::z1_plus_step:
            return std::abs(1.0 + E / 2.0) / gap;
        case RuleKind::z1_minus_step:
            return std::abs(1.0 - E / 2.0) / gap;
    }
    throw std::logic_error("unreachable rule kind");
}

struct PairedSums {
    double term = 0.0;
    double noise = 0.0;
};

// Rank-paired weight differences over one side's lists, padding the shorter
// list with the band edge (weight 0).
PairedSums paired_weights(RuleKind kind, const std::vector<double>& full_E,
                          const std::vector<double>& stripped_E, double tol) {
    PairedSums out;
    KahanSum term;
    KahanSum noise;
    std::size_t ranks = std::max(full_E.size(), stripped_E.size());
    for (std::size_t j = 0; j < ranks; ++j) {
        double wf = 0.0, ws = 0.0;
        if (j < full_E.size()) {
            wf = weight(kind, beta_of_energy(full_E[j]));
            noise.add(tol * weight_sensitivity(kind, full_E[j]));
        }
        if (j < stripped_E.size()) {
            ws = weight(kind, beta_of_energy(stripped_E[j]));
            noise.add(tol * weight_sensitivity(kind, stripped_E[j]));
        }
        term.add(wf - ws);
    }
    out.term = term.value();
    out.noise = noise.value();
    return out;
}

// Half the quadrature machinery: Szego value of `seq` for the rule's kind.
SzegoValue rule_integral(const CoefficientSequence& seq, RuleKind kind,
                         const SumRuleConfig& config) {
    std::vector<double> grid = theta_grid(config.grid_count);
    DensityEstimate density = density_via_m(seq, grid, config.m_depth);
    return szego_integral(density, integral_kind(kind), config.eps_ladder);
}

SumRuleReport run_rule(const CoefficientSequence& seq, RuleKind kind, int n, int N,
                       const SumRuleConfig& config) {
    if (n < 1) throw std::domain_error("step count must be >= 1");
    if (4 * n >= N) throw std::domain_error("truncation size must exceed four times the step count");

    SumRuleReport report;
    report.kind = kind;
    report.n = n;
    report.N = N;

    SzegoValue lhs = rule_integral(seq, kind, config);
    report.lhs = lhs.value;
    report.lhs_diverged = lhs.diverged;
    report.lhs_plus2 = lhs.at_plus2;
    report.lhs_minus2 = lhs.at_minus2;

    CoefficientSequence stripped = strip_rows(seq, n);
    SzegoValue rhs = rule_integral(stripped, kind, config);
    report.rhs_tail = rhs.value;
    report.rhs_diverged = rhs.diverged;

    KahanSum coeff;
    for (int j = 1; j <= n; ++j) {
        CoefficientPair c = coeffs_at(seq, j);
        double term = std::log(c.a);
        if (kind == RuleKind::z1_plus_step) term += 0.5 * c.b;
        if (kind == RuleKind::z1_minus_step) term -= 0.5 * c.b;
        coeff.add(-term);
    }
    report.coeff_term = coeff.value();

    TruncatedJacobi full = truncate(seq, N);
    TruncatedJacobi tail = truncate(seq, N, n);
    EigenvalueSet full_set = eigenvalues_outside(full, 0.0, config.eig_tol);
    EigenvalueSet tail_set = eigenvalues_outside(tail, 0.0, config.eig_tol);
    report.marginal_count =
        static_cast<int>(full_set.marginal.size() + tail_set.marginal.size());

    PairedSums above = paired_weights(kind, full_set.above, tail_set.above, config.eig_tol);
    PairedSums below = paired_weights(kind, full_set.below, tail_set.below, config.eig_tol);
    report.eig_term = above.term + below.term;
    report.eig_noise = above.noise + below.noise;

    double lhs_spread =
        lhs.ladder_values.empty() ? 0.0 : std::abs(lhs.value - lhs.ladder_values.back());
    double rhs_spread =
        rhs.ladder_values.empty() ? 0.0 : std::abs(rhs.value - rhs.ladder_values.back());
    report.error_budget = lhs_spread + rhs_spread + report.eig_noise;

    if (report.lhs_diverged || report.rhs_diverged)
        report.residual = std::numeric_limits<double>::quiet_NaN();
    else
        report.residual =
            report.lhs - (report.coeff_term + report.eig_term + report.rhs_tail);
    return report;
}

}  // namespace

SumRuleReport step_sum_rule(const CoefficientSequence& seq, int n, int N,
                            const SumRuleConfig& config) {
    return run_rule(seq, RuleKind::z_step, n, N, config);
}

SumRuleReport one_sided_step_rule(const CoefficientSequence& seq, Side side, int n, int N,
                                  const SumRuleConfig& config) {
    RuleKind kind = side == Side::plus ? RuleKind::z1_plus_step : RuleKind::z1_minus_step;
    return run_rule(seq, kind, n, N, config);
}

CoefficientVsEigenvalueScan a0_e0(const CoefficientSequence& seq, int horizon) {
    if (horizon < 10) throw std::domain_error("scan horizon must be >= 10");
    CoefficientVsEigenvalueScan out;
    out.a0_partial.reserve(static_cast<std::size_t>(horizon));
    KahanSum partial;
    for (int j = 1; j <= horizon; ++j) {
        partial.add(-std::log(coeffs_at(seq, j).a));
        out.a0_partial.push_back(partial.value());
    }
    TruncatedJacobi J = truncate(seq, horizon);
    EigenvalueSet set = eigenvalues_outside(J);
    KahanSum e0;
    for (double b : set.betas_above) e0.add(std::log(std::abs(b)));
    for (double b : set.betas_below) e0.add(std::log(std::abs(b)));
    out.e0 = e0.value();
    out.bound_states_above = static_cast<int>(set.above.size());
    out.bound_states_below = static_cast<int>(set.below.size());
    return out;
}

}  // namespace szegolab
