#pragma once

#include <span>
#include <vector>

#include "szegolab/coefficients.hpp"

namespace szegolab {

// Side of the essential spectrum [-2, 2] an object refers to.
enum class Side { plus, minus };

// N x N truncation of the half-line matrix with `strip` leading rows removed:
// diagonal b_{strip+1} .. b_{strip+N}, off-diagonal a_{strip+1} .. a_{strip+N-1}.
// Immutable after construction; safe to share across threads.
struct TruncatedJacobi {
    std::vector<double> diag;
    std::vector<double> offdiag;
    long strip = 0;

    int size() const noexcept { return static_cast<int>(diag.size()); }
};

TruncatedJacobi truncate(const CoefficientSequence& seq, int N, long strip = 0);

// Eigenvalues outside [-2, 2] of a truncation.
//   above:  E_1^+ > E_2^+ > ... > 2 (descending)
//   below:  E_1^- < E_2^- < ... < -2 (ascending toward -2)
// betas_* hold the matching |beta| parametrization E = beta + 1/beta, |beta| > 1
// (beta < -1 below the band).  Eigenvalues within marginal_width of +-2 land in
// `marginal` instead of above/below; eigenvalues inside (2-pad, 2] and
// [-2, -2+pad) land in pad_above/pad_below as edge diagnostics when pad > 0.
struct EigenvalueSet {
    std::vector<double> above;
    std::vector<double> below;
    std::vector<double> betas_above;
    std::vector<double> betas_below;
    std::vector<double> marginal;
    std::vector<double> pad_above;
    std::vector<double> pad_below;
    double tolerance = 1e-12;
    double marginal_width = 1e-11;
    int size = 0;
    long strip = 0;
};

// Bisection on certified Sturm counts, absolute tolerance tol; the totals per
// window are re-checked by inertia counts at the window ends.
EigenvalueSet eigenvalues_outside(const TruncatedJacobi& J, double pad = 0.0,
                                  double tol = 1e-12);

// Number of eigenvalues of J strictly below sigma (Sturm count).
int sturm_count_below(const TruncatedJacobi& J, double sigma);

// beta with E = beta + 1/beta and |beta| >= 1; same sign as E.
// beta(+-2) = +-1.  Throws std::domain_error for |E| < 2.
double beta_of_energy(double E);

// xi^{side}(beta) = ln|beta| +- (beta - 1/beta)/2; the one-sided bound-state
// weight.  xi^+(beta(2)) = xi^-(beta(-2)) = 0 at the band edges.
double xi(Side side, double beta);

// l2-normalized eigenvector for eigenvalue E by two rounds of inverse
// iteration (deterministic start), orthogonalized against `previous`.
// Sign convention: first nonzero entry positive.  Throws std::invalid_argument
// if the residual ||(J - E) p|| exceeds residual_tol.
std::vector<double> eigenvector_at(const TruncatedJacobi& J, double E,
                                   std::span<const std::vector<double>> previous = {},
                                   double residual_tol = 1e-8);

// Number of sign changes over consecutive entries, skipping zeros and entries
// below the numerical noise floor (10^-12 of the largest modulus).
int oscillation_count(std::span<const double> p);

}  // namespace szegolab
