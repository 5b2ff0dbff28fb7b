#include "szegolab/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace szegolab {

TruncatedJacobi truncate(const CoefficientSequence& seq, int N, long strip) {
    if (N < 1) throw std::domain_error("truncation size must be >= 1");
    if (strip < 0) throw std::domain_error("strip count must be >= 0");
    TruncatedJacobi J;
    J.strip = strip;
    J.diag.resize(N);
    J.offdiag.resize(N > 1 ? N - 1 : 0);
    for (int i = 0; i < N; ++i) {
        CoefficientPair c = coeffs_at(seq, strip + i + 1);
        J.diag[i] = c.b;
        if (i + 1 < N) J.offdiag[i] = c.a;
    }
    return J;
}

namespace {

// Smallest pivot magnitude the factorization count tolerates; a vanishing
// pivot is replaced by -pivmin so the count stays defined (the perturbation
// this models is far below the eigenvalue tolerance).
double pivot_floor(const TruncatedJacobi& J) {
    double scale = 0.0;
    for (double d : J.diag) scale = std::max(scale, std::abs(d));
    for (double e : J.offdiag) scale = std::max(scale, std::abs(e));
    if (scale == 0.0) scale = 1.0;
    return scale * std::numeric_limits<double>::min() * 1e4 /
           std::numeric_limits<double>::epsilon();
}

int count_below(const TruncatedJacobi& J, double sigma, double pivmin) {
    int count = 0;
    double q = 1.0;
    const int N = J.size();
    for (int i = 0; i < N; ++i) {
        double e2 = (i > 0) ? J.offdiag[i - 1] * J.offdiag[i - 1] : 0.0;
        q = J.diag[i] - sigma - (i > 0 ? e2 / q : 0.0);
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

// Gershgorin bound on the spectrum radius.
double spectral_bound(const TruncatedJacobi& J) {
    double r = 0.0;
    const int N = J.size();
    for (int i = 0; i < N; ++i) {
        double row = std::abs(J.diag[i]);
        if (i > 0) row += std::abs(J.offdiag[i - 1]);
        if (i + 1 < N) row += std::abs(J.offdiag[i]);
        r = std::max(r, row);
    }
    return r + 1.0;
}

// Eigenvalues of J inside (lo, hi], each found by index bisection on the
// certified count function.  Returns them in ascending order.
std::vector<double> eigenvalues_in(const TruncatedJacobi& J, double lo, double hi,
                                   double tol, double pivmin) {
    std::vector<double> out;
    int c_lo = count_below(J, lo, pivmin);
    int c_hi = count_below(J, hi, pivmin);
    for (int idx = c_lo + 1; idx <= c_hi; ++idx) {
        double a = lo, b = hi;
        while (b - a > tol) {
            double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;  // interval at rounding resolution
            if (count_below(J, mid, pivmin) >= idx)
                b = mid;
            else
                a = mid;
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

}  // namespace

int sturm_count_below(const TruncatedJacobi& J, double sigma) {
    return count_below(J, sigma, pivot_floor(J));
}

EigenvalueSet eigenvalues_outside(const TruncatedJacobi& J, double pad, double tol) {
    if (!(tol > 0.0)) throw std::domain_error("eigenvalue tolerance must be > 0");
    if (pad < 0.0) throw std::domain_error("edge diagnostic pad must be >= 0");
    EigenvalueSet set;
    set.tolerance = tol;
    set.marginal_width = 10.0 * tol;
    set.size = J.size();
    set.strip = J.strip;

    double pivmin = pivot_floor(J);
    double bound = spectral_bound(J);

    // Above +2: ascending list, reversed into E_1^+ > E_2^+ > ...
    std::vector<double> up = eigenvalues_in(J, 2.0, bound, tol, pivmin);
    // Inertia certification: totals over the window must match.
    if (static_cast<int>(up.size()) !=
        count_below(J, bound, pivmin) - count_below(J, 2.0, pivmin))
        throw std::runtime_error("bound-state count above +2 failed certification");
    for (auto it = up.rbegin(); it != up.rend(); ++it) {
        double E = *it;
        if (E - 2.0 < set.marginal_width)
            set.marginal.push_back(E);
        else {
            set.above.push_back(E);
            set.betas_above.push_back(beta_of_energy(E));
        }
    }

    // Below -2: ascending already matches E_1^- < E_2^- < ...
    std::vector<double> down = eigenvalues_in(J, -bound, -2.0, tol, pivmin);
    if (static_cast<int>(down.size()) !=
        count_below(J, -2.0, pivmin) - count_below(J, -bound, pivmin))
        throw std::runtime_error("bound-state count below -2 failed certification");
    for (double E : down) {
        if (-2.0 - E < set.marginal_width)
            set.marginal.push_back(E);
        else {
            set.below.push_back(E);
            set.betas_below.push_back(beta_of_energy(E));
        }
    }

    if (pad > 0.0) {
        std::vector<double> in_hi = eigenvalues_in(J, 2.0 - pad, 2.0, tol, pivmin);
        set.pad_above.assign(in_hi.rbegin(), in_hi.rend());
        std::vector<double> in_lo = eigenvalues_in(J, -2.0, -2.0 + pad, tol, pivmin);
        set.pad_below.assign(in_lo.begin(), in_lo.end());
    }
    return set;
}

double beta_of_energy(double E) {
    double aE = std::abs(E);
    if (aE < 2.0) throw std::domain_error("beta parametrization needs |E| >= 2");
    double root = std::sqrt(std::max(E * E - 4.0, 0.0));
    return (E + std::copysign(root, E)) / 2.0;
}

double xi(Side side, double beta) {
    if (std::abs(beta) < 1.0)
        throw std::domain_error("bound-state weight needs |beta| >= 1");
    double half = 0.5 * (beta - 1.0 / beta);
    return std::log(std::abs(beta)) + (side == Side::plus ? half : -half);
}

namespace {

// Solve (J - E) x = rhs by LU with partial pivoting on the tridiagonal band;
// rhs is overwritten with the solution.  Near-singular is fine (that is the
// point of inverse iteration); exact zero pivots get the tiny-floor treatment.
void solve_shifted(const TruncatedJacobi& J, double E, std::vector<double>& rhs) {
    const int N = J.size();
    // Band rows: low[i] x_{i-1} + mid[i] x_i + up1[i] x_{i+1} (+ up2 fill-in).
    std::vector<double> mid(N), up1(N, 0.0), up2(N, 0.0), low(N, 0.0);
    for (int i = 0; i < N; ++i) {
        mid[i] = J.diag[i] - E;
        if (i + 1 < N) up1[i] = J.offdiag[i];
        if (i > 0) low[i] = J.offdiag[i - 1];
    }
    double tiny = pivot_floor(J);
    for (int i = 0; i + 1 < N; ++i) {
        if (std::abs(low[i + 1]) > std::abs(mid[i])) {
            std::swap(mid[i], low[i + 1]);
            std::swap(up1[i], mid[i + 1]);
            std::swap(up2[i], up1[i + 1]);
            std::swap(rhs[i], rhs[i + 1]);
        }
        if (std::abs(mid[i]) < tiny) mid[i] = std::copysign(tiny, mid[i] == 0.0 ? -1.0 : mid[i]);
        double f = low[i + 1] / mid[i];
        mid[i + 1] -= f * up1[i];
        up1[i + 1] -= f * up2[i];
        rhs[i + 1] -= f * rhs[i];
    }
    if (std::abs(mid[N - 1]) < tiny)
        mid[N - 1] = std::copysign(tiny, mid[N - 1] == 0.0 ? -1.0 : mid[N - 1]);
    for (int i = N - 1; i >= 0; --i) {
        double v = rhs[i];
        if (i + 1 < N) v -= up1[i] * rhs[i + 1];
        if (i + 2 < N) v -= up2[i] * rhs[i + 2];
        rhs[i] = v / mid[i];
    }
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

std::vector<double> eigenvector_at(const TruncatedJacobi& J, double E,
                                   std::span<const std::vector<double>> previous,
                                   double residual_tol) {
    const int N = J.size();
    std::vector<double> v(N);
    // Deterministic start with no special symmetry.
    for (int i = 0; i < N; ++i)
        v[i] = unit_noise(0x5eed, i, 0) + 0.25;
    for (int round = 0; round < 2; ++round) {
        solve_shifted(J, E, v);
        for (const auto& p : previous) {
            double dot = 0.0;
            for (int i = 0; i < N; ++i) dot += v[i] * p[i];
            for (int i = 0; i < N; ++i) v[i] -= dot * p[i];
        }
        double nrm = norm2(v);
        if (nrm == 0.0) throw std::invalid_argument("inverse iteration collapsed to zero");
        for (double& x : v) x /= nrm;
    }
    // Sign convention: first nonzero entry positive.
    for (int i = 0; i < N; ++i) {
        if (v[i] != 0.0) {
            if (v[i] < 0.0)
                for (double& x : v) x = -x;
            break;
        }
    }
    // Validate the residual ||(J - E) v||.
    double res = 0.0;
    for (int i = 0; i < N; ++i) {
        double r = (J.diag[i] - E) * v[i];
        if (i > 0) r += J.offdiag[i - 1] * v[i - 1];
        if (i + 1 < N) r += J.offdiag[i] * v[i + 1];
        res += r * r;
    }
    res = std::sqrt(res);
    if (!(res <= residual_tol))
        throw std::invalid_argument("inverse iteration residual " + std::to_string(res) +
                                    " exceeds tolerance; E is not an eigenvalue");
    return v;
}

int oscillation_count(std::span<const double> p) {
    // Entries far below the vector's own scale are inverse-iteration noise,
    // not genuine nodes: an exponentially decaying tail reaches the machine
    // floor long before the vector ends, and its garbage signs must not count.
    double scale = 0.0;
    for (double x : p) scale = std::max(scale, std::abs(x));
    const double floor = 1e-12 * scale;
    int changes = 0;
    double prev = 0.0;
    for (double x : p) {
        if (std::abs(x) <= floor) continue;
        if (prev != 0.0 && ((x > 0.0) != (prev > 0.0))) ++changes;
        prev = x;
    }
    return changes;
}

}  // namespace szegolab
