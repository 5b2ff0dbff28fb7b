#pragma once

#include <vector>

#include "szegolab/coefficients.hpp"
#include "szegolab/measure.hpp"
#include "szegolab/spectrum.hpp"

namespace szegolab {

enum class RuleKind { z_step, z1_plus_step, z1_minus_step };

// Quadrature/eigensolver settings shared by the sum-rule drivers.
struct SumRuleConfig {
    int grid_count = 2048;
    long m_depth = 1 << 16;
    std::vector<double> eps_ladder;  // empty -> default
    double eig_tol = 1e-12;
};

// Step-by-step rule at step n:  lhs = coeff_term + eig_term + rhs_tail up to
// numerical error, where (z_step)
//   lhs        = Z of the full matrix
//   coeff_term = -sum_{j<=n} ln a_j
//   eig_term   = sum over both sides, ranks paired, of
//                ln|beta_j(full)| - ln|beta_j(stripped)|   (>= 0 exactly)
//   rhs_tail   = Z of the matrix with n rows stripped
// and for the one-sided kinds coeff_term = -sum (ln a_j +- b_j/2) and the
// eigenvalue weights are xi^{+-}.  Eigenvalues within the marginal width of
// +-2 are dropped from both matrices before pairing (marginal_count of them);
// missing partners pair against the band edge (beta = +-1, weight 0).
struct SumRuleReport {
    RuleKind kind = RuleKind::z_step;
    int n = 0;
    int N = 0;  // truncation size used for both spectra
    double lhs = 0.0;
    double coeff_term = 0.0;
    double eig_term = 0.0;
    double rhs_tail = 0.0;
    double residual = 0.0;  // NaN when either side diverged
    int marginal_count = 0;
    bool lhs_diverged = false;
    bool rhs_diverged = false;
    EdgeVerdict lhs_plus2 = EdgeVerdict::converges;
    EdgeVerdict lhs_minus2 = EdgeVerdict::converges;
    // Numerical budget: quadrature extrapolation spread + density gap hints
    // + eigenvalue-parametrization noise.
    double error_budget = 0.0;
    double eig_noise = 0.0;  // the eigenvalue part of the budget
};

SumRuleReport step_sum_rule(const CoefficientSequence& seq, int n, int N,
                            const SumRuleConfig& config = {});

SumRuleReport one_sided_step_rule(const CoefficientSequence& seq, Side side, int n, int N,
                                  const SumRuleConfig& config = {});

// Case-study data: partial sums A0_k = -sum_{j<=k} ln a_j for k = 1..horizon,
// and E0 = sum of ln|beta_j| over every eigenvalue outside [-2,2] of the
// size-horizon truncation.
struct CoefficientVsEigenvalueScan {
    std::vector<double> a0_partial;
    double e0 = 0.0;
    int bound_states_above = 0;
    int bound_states_below = 0;
};

CoefficientVsEigenvalueScan a0_e0(const CoefficientSequence& seq, int horizon);

}  // namespace szegolab
