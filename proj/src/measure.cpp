#include "szegolab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "szegolab/common.hpp"
#include "szegolab/polynomials.hpp"

namespace szegolab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDensityFloor = 1e-300;

// Flag bits on DensityEstimate::flags.
constexpr std::uint8_t kFlagAbsent = 1;   // via_T: envelope <= 0, value is NaN
constexpr std::uint8_t kFlagRetried = 2;  // via_m: recomputed at z = x + 1e-9 i

// Tail increment of sum |a_{m+1}-a_m| + |b_{m+1}-b_m| over (depth/2, depth]
// above which a via-T estimate is marked not settled.
constexpr double kVariationTail = 0.05;

// Coarsest angular cell the quadrature accepts (>= 32 points per unit angle).
constexpr double kMaxCellWidth = 1.0 / 32.0;

void check_grid(std::span<const double> grid) {
    if (grid.empty()) throw std::domain_error("density grid must be nonempty");
    double prev = -2.0;
    bool first = true;
    for (double x : grid) {
        if (!(x > -2.0 && x < 2.0))
            throw std::domain_error("density grid must lie strictly inside (-2, 2)");
        if (!first && !(x > prev))
            throw std::domain_error("density grid must be strictly increasing");
        prev = x;
        first = false;
    }
}

// Contiguous blocks of grid points; big enough that the per-level coefficient
// fetch is amortized across the block's inner loop.
constexpr std::size_t kPointsPerChunk = 64;

std::size_t chunk_count_for(std::size_t points) {
    return (points + kPointsPerChunk - 1) / kPointsPerChunk;
}

}  // namespace

std::vector<double> theta_grid(int count) {
    if (count < 1) throw std::domain_error("grid point count must be >= 1");
    std::vector<double> x(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        double theta = kPi * (static_cast<double>(count - j) - 0.5) / static_cast<double>(count);
        x[static_cast<std::size_t>(j)] = 2.0 * std::cos(theta);
    }
    return x;
}

DensityEstimate density_via_T(const CoefficientSequence& seq, std::span<const double> grid,
                              long depth) {
    check_grid(grid);
    if (depth < 1) throw std::domain_error("envelope depth must be >= 1");

    DensityEstimate out;
    out.method = DensityMethod::via_T;
    out.depth = depth;
    out.grid.assign(grid.begin(), grid.end());
    const std::size_t points = grid.size();
    out.values.assign(points, 0.0);
    out.gap_hint.assign(points, 0.0);
    out.flags.assign(points, 0);

    const long half = std::max<long>(depth / 2, 1);

    // Sequence-level settling proxy: the variation sum accumulated over
    // (depth/2, depth] should be a small tail if the estimate has converged.
    {
        KahanSum tail;
        CoefficientPair prev = coeffs_at(seq, half + 1);
        for (long n = half + 1; n <= depth; ++n) {
            CoefficientPair next = coeffs_at(seq, n + 1);
            tail.add(std::abs(next.a - prev.a) + std::abs(next.b - prev.b));
            prev = next;
        }
        out.variation_ok = tail.value() <= kVariationTail;
    }

    const std::size_t chunks = chunk_count_for(points);
    parallel_for(chunks, [&](std::size_t chunk) {
        const std::size_t lo = chunk * kPointsPerChunk;
        const std::size_t hi = std::min(points, lo + kPointsPerChunk);
        std::vector<PolynomialState> st;
        st.reserve(hi - lo);
        for (std::size_t j = lo; j < hi; ++j) st.push_back(initial_state(seq, grid[j]));
        std::vector<double> t_half(hi - lo, 0.0);

        double a_prev = 0.0;
        CoefficientPair c1 = coeffs_at(seq, 1);
        CoefficientPair c2 = coeffs_at(seq, 2);
        for (long lev = 1; lev <= depth; ++lev) {
            CoefficientPair c3 = coeffs_at(seq, lev + 2);
            for (auto& state : st) state = advance(state, c1, c2, c3, a_prev);
            if (lev == half)
                for (std::size_t j = 0; j < st.size(); ++j) t_half[j] = st[j].t;
            a_prev = c1.a;
            c1 = c2;
            c2 = c3;
        }

        for (std::size_t j = 0; j < st.size(); ++j) {
            const std::size_t g = lo + j;
            const double t = st[j].t;
            out.gap_hint[g] = std::abs(t - t_half[j]);
            if (!(t > 0.0)) {
                out.values[g] = std::numeric_limits<double>::quiet_NaN();
                out.flags[g] |= kFlagAbsent;
                continue;
            }
            const double x = grid[g];
            out.values[g] = std::sqrt(4.0 - x * x) / (2.0 * kPi * t);
        }
    });
    return out;
}

namespace {

// Free half-line boundary resolvent value with the upper-half-plane branch.
std::complex<double> free_m(std::complex<double> z) {
    if (z.imag() == 0.0) {
        double x = z.real();
        if (std::abs(x) < 2.0)
            return {-0.5 * x, 0.5 * std::sqrt(4.0 - x * x)};
    }
    std::complex<double> w = std::sqrt(z * z - 4.0);
    std::complex<double> lo = 0.5 * (-z + w);
    std::complex<double> hi = 0.5 * (-z - w);
    if (lo.imag() == hi.imag()) return std::abs(lo) <= std::abs(hi) ? lo : hi;
    return lo.imag() > hi.imag() ? lo : hi;
}

// Backward continued-fraction sweep from `depth` for the points in z[lo..hi):
// m <- 1 / (b_k - z - a_k^2 m), seeded with the free boundary value.  A point
// whose denominator vanishes exactly is marked dead and frozen.
void backward_sweep(const CoefficientSequence& seq, std::span<const std::complex<double>> z,
                    long depth, std::span<std::complex<double>> m,
                    std::span<std::uint8_t> dead) {
    const std::size_t n = z.size();
    for (std::size_t j = 0; j < n; ++j) {
        m[j] = free_m(z[j]);
        dead[j] = 0;
    }
    for (long k = depth; k >= 1; --k) {
        CoefficientPair c = coeffs_at(seq, k);
        const double a2 = c.a * c.a;
        for (std::size_t j = 0; j < n; ++j) {
            if (dead[j]) continue;
            std::complex<double> den = c.b - z[j] - a2 * m[j];
            if (den.real() == 0.0 && den.imag() == 0.0) {
                dead[j] = 1;
                continue;
            }
            m[j] = 1.0 / den;
        }
    }
}

// Density at one point with an automatic complex-offset retry; returns the
// retry indicator.
double m_density_at(const CoefficientSequence& seq, double x, long depth, bool& retried) {
    std::complex<double> z{x, 0.0};
    std::complex<double> m;
    std::uint8_t dead = 0;
    backward_sweep(seq, {&z, 1}, depth, {&m, 1}, {&dead, 1});
    if (dead) {
        retried = true;
        z = {x, 1e-9};
        backward_sweep(seq, {&z, 1}, depth, {&m, 1}, {&dead, 1});
    }
    return std::max(m.imag(), 0.0) / kPi;
}

}  // namespace

DensityEstimate density_via_m(const CoefficientSequence& seq, std::span<const double> grid,
                              long depth) {
    check_grid(grid);
    if (depth < 1) throw std::domain_error("continued-fraction depth must be >= 1");

    DensityEstimate out;
    out.method = DensityMethod::via_m;
    out.depth = depth;
    out.grid.assign(grid.begin(), grid.end());
    const std::size_t points = grid.size();
    out.values.assign(points, 0.0);
    out.gap_hint.assign(points, 0.0);
    out.flags.assign(points, 0);

    const long half = std::max<long>(depth / 2, 1);

    const std::size_t chunks = chunk_count_for(points);
    parallel_for(chunks, [&](std::size_t chunk) {
        const std::size_t lo = chunk * kPointsPerChunk;
        const std::size_t hi = std::min(points, lo + kPointsPerChunk);
        const std::size_t n = hi - lo;
        std::vector<std::complex<double>> z(n), m(n);
        std::vector<std::uint8_t> dead(n);
        for (std::size_t j = 0; j < n; ++j) z[j] = {grid[lo + j], 0.0};

        backward_sweep(seq, z, depth, m, dead);
        for (std::size_t j = 0; j < n; ++j) {
            bool retried = false;
            double nu = dead[j] ? m_density_at(seq, grid[lo + j], depth, retried)
                                : std::max(m[j].imag(), 0.0) / kPi;
            if (dead[j]) retried = true;
            if (retried) out.flags[lo + j] |= kFlagRetried;
            out.values[lo + j] = nu;
        }

        backward_sweep(seq, z, half, m, dead);
        for (std::size_t j = 0; j < n; ++j) {
            bool retried = false;
            double nu = dead[j] ? m_density_at(seq, grid[lo + j], half, retried)
                                : std::max(m[j].imag(), 0.0) / kPi;
            if (retried) out.flags[lo + j] |= kFlagRetried;
            out.gap_hint[lo + j] = std::abs(out.values[lo + j] - nu);
        }
    });
    return out;
}

std::vector<double> default_eps_ladder() {
    std::vector<double> out;
    for (int k = 4; k <= 12; ++k) out.push_back(std::ldexp(1.0, -k));
    return out;
}

namespace {

struct TailFit {
    double slope = 0.0;
    double rms = 0.0;
};

// Least-squares slope of value vs ln(1/eps) over the smallest (up to) five
// ladder rungs; rms is the fit residual.
TailFit fit_tail(std::span<const double> eps_desc, std::span<const double> values) {
    const std::size_t n = eps_desc.size();
    const std::size_t k = std::min<std::size_t>(5, n);
    if (k < 2) return {};
    const std::size_t start = n - k;
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = start; i < n; ++i) {
        sx += -std::log(eps_desc[i]);
        sy += values[i];
    }
    const double mx = sx / static_cast<double>(k);
    const double my = sy / static_cast<double>(k);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = start; i < n; ++i) {
        double dx = -std::log(eps_desc[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (values[i] - my);
    }
    TailFit fit;
    fit.slope = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = start; i < n; ++i) {
        double r = values[i] - my - fit.slope * (-std::log(eps_desc[i]) - mx);
        ss += r * r;
    }
    fit.rms = std::sqrt(ss / static_cast<double>(k));
    return fit;
}

EdgeVerdict slope_verdict(double slope, double noise) {
    if (slope >= kDivergenceSlope && slope >= 2.0 * noise) return EdgeVerdict::diverges;
    if (slope <= kConvergenceSlope) return EdgeVerdict::converges;
    return EdgeVerdict::borderline;
}

}  // namespace

SzegoValue szego_integral(const DensityEstimate& density, SzegoKind kind,
                          std::span<const double> eps_ladder) {
    check_grid(density.grid);
    const std::size_t n = density.grid.size();
    if (n < 2) throw std::domain_error("quadrature needs at least two grid points");
    if (density.values.size() != n)
        throw std::domain_error("density values and grid sizes disagree");

    std::vector<double> ladder(eps_ladder.begin(), eps_ladder.end());
    if (ladder.empty()) ladder = default_eps_ladder();
    for (double e : ladder)
        if (!(e > 0.0 && e < 2.0))
            throw std::domain_error("epsilon ladder rungs must lie in (0, 2)");
    std::sort(ladder.begin(), ladder.end(), std::greater<>());
    ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());

    // Reindex in increasing angle (reverse of increasing x); precompute cell
    // widths bounded by the neighbors' midpoints and the log integrand.
    std::vector<double> theta(n), width(n), integrand(n);
    for (std::size_t i = 0; i < n; ++i)
        theta[i] = std::acos(density.grid[n - 1 - i] / 2.0);
    for (std::size_t i = 0; i < n; ++i) {
        double lb = (i == 0) ? std::max(0.0, theta[0] - 0.5 * (theta[1] - theta[0]))
                             : 0.5 * (theta[i - 1] + theta[i]);
        double ub = (i + 1 == n)
                        ? std::min(kPi, theta[n - 1] + 0.5 * (theta[n - 1] - theta[n - 2]))
                        : 0.5 * (theta[i] + theta[i + 1]);
        width[i] = ub - lb;
        if (width[i] > kMaxCellWidth)
            throw std::domain_error("density grid too coarse for the angle quadrature");
    }

    SzegoValue out;
    out.kind = kind;
    const double theta_min_window = std::acos(1.0 - ladder.back() / 2.0);
    for (std::size_t i = 0; i < n; ++i) {
        double nu = density.values[n - 1 - i];
        bool clamped = !(nu > kDensityFloor);
        if (clamped && theta[i] >= theta_min_window && theta[i] <= kPi - theta_min_window)
            ++out.clamped_points;
        double safe = clamped ? kDensityFloor : nu;
        integrand[i] = std::log(std::sin(theta[i]) / (kPi * safe));
    }

    auto kind_weight = [kind](double th) {
        switch (kind) {
            case SzegoKind::Z:
                return 1.0 / (2.0 * kPi);
            case SzegoKind::Z1_plus:
                return (1.0 + std::cos(th)) / (2.0 * kPi);
            case SzegoKind::Z1_minus:
                return (1.0 - std::cos(th)) / (2.0 * kPi);
            case SzegoKind::Z2_minus: {
                double s = std::sin(th);
                return s * s / kPi;
            }
        }
        return 0.0;
    };

    const std::size_t rungs = ladder.size();
    std::vector<double> totals(rungs), plus_half(rungs), minus_half(rungs);
    for (std::size_t r = 0; r < rungs; ++r) {
        const double th_lo = std::acos(1.0 - ladder[r] / 2.0);
        const double th_hi = kPi - th_lo;
        KahanSum plus, minus;
        for (std::size_t i = 0; i < n; ++i) {
            if (theta[i] < th_lo || theta[i] > th_hi) continue;
            double term = integrand[i] * kind_weight(theta[i]) * width[i];
            if (theta[i] <= kPi / 2.0)
                plus.add(term);
            else
                minus.add(term);
        }
        plus_half[r] = plus.value();
        minus_half[r] = minus.value();
        totals[r] = plus.value() + minus.value();
    }

    out.epsilon = ladder.back();
    out.ladder_eps = ladder;
    out.ladder_values = totals;

    TailFit total_fit = fit_tail(ladder, totals);
    TailFit plus_fit = fit_tail(ladder, plus_half);
    TailFit minus_fit = fit_tail(ladder, minus_half);
    out.slope = total_fit.slope;
    out.slope_plus = plus_fit.slope;
    out.slope_minus = minus_fit.slope;
    out.noise_plus = std::max(plus_fit.rms, 1e-4);
    out.noise_minus = std::max(minus_fit.rms, 1e-4);
    out.at_plus2 = slope_verdict(out.slope_plus, out.noise_plus);
    out.at_minus2 = slope_verdict(out.slope_minus, out.noise_minus);
    out.diverged =
        out.at_plus2 == EdgeVerdict::diverges || out.at_minus2 == EdgeVerdict::diverges;

    // Convergent case: the window defect is linear in the cutoff angle, so two
    // rungs extrapolate it away.  Anything else reports the raw finest rung.
    if (!out.diverged && out.at_plus2 == EdgeVerdict::converges &&
        out.at_minus2 == EdgeVerdict::converges && rungs >= 2) {
        const double th1 = std::acos(1.0 - ladder[rungs - 1] / 2.0);
        const double th2 = std::acos(1.0 - ladder[rungs - 2] / 2.0);
        const double v1 = totals[rungs - 1];
        const double v2 = totals[rungs - 2];
        out.value = v1 + (v1 - v2) * th1 / (th2 - th1);
    } else {
        out.value = totals[rungs - 1];
    }
    return out;
}

EdgeClassification divergence_classify(const CoefficientSequence& seq,
                                       const ClassifyConfig& config) {
    std::vector<double> grid = theta_grid(config.grid_count);
    DensityEstimate density = density_via_m(seq, grid, config.depth);
    SzegoValue zp = szego_integral(density, SzegoKind::Z1_plus, config.eps_ladder);
    SzegoValue zm = szego_integral(density, SzegoKind::Z1_minus, config.eps_ladder);
    EdgeClassification out;
    out.at_plus2 = zp.at_plus2;
    out.slope_plus = zp.slope_plus;
    out.at_minus2 = zm.at_minus2;
    out.slope_minus = zm.slope_minus;
    return out;
}

EnvelopeIntegralScan truncated_log_integrals(const CoefficientSequence& seq, long n_max,
                                             int u_points) {
    if (n_max < 1) throw std::domain_error("scan horizon must be >= 1");
    if (u_points < 8) throw std::domain_error("scan needs at least 8 quadrature points");

    const double h = std::sqrt(2.0) / static_cast<double>(u_points);
    std::vector<double> u(static_cast<std::size_t>(u_points));
    for (int i = 0; i < u_points; ++i) u[static_cast<std::size_t>(i)] = (i + 0.5) * h;

    std::vector<PolynomialState> upper, lower;  // x = 2 - u^2 and x = u^2 - 2
    upper.reserve(u.size());
    lower.reserve(u.size());
    for (double ui : u) {
        upper.push_back(initial_state(seq, 2.0 - ui * ui));
        lower.push_back(initial_state(seq, ui * ui - 2.0));
    }

    EnvelopeIntegralScan out;
    long next_sample = 1;
    double a_prev = 0.0;
    CoefficientPair c1 = coeffs_at(seq, 1);
    CoefficientPair c2 = coeffs_at(seq, 2);
    for (long lev = 1; lev <= n_max; ++lev) {
        CoefficientPair c3 = coeffs_at(seq, lev + 2);
        for (auto& state : upper) state = advance(state, c1, c2, c3, a_prev);
        for (auto& state : lower) state = advance(state, c1, c2, c3, a_prev);
        a_prev = c1.a;
        c1 = c2;
        c2 = c3;

        // I_lev integrates from u = 1/lev: skip cells left of the cutoff.
        const double cut = 1.0 / static_cast<double>(lev);
        std::size_t start =
            static_cast<std::size_t>(std::max(0.0, std::ceil(cut / h - 0.5)));
        while (start < u.size() && u[start] < cut) ++start;
        KahanSum sum;
        for (std::size_t i = start; i < u.size(); ++i) {
            if (upper[i].t > 1.0) sum.add(std::log(upper[i].t));
            if (lower[i].t > 1.0) sum.add(std::log(lower[i].t));
        }
        const double value = 2.0 * h * sum.value();
        if (value > out.max_value) {
            out.max_value = value;
            out.argmax = lev;
        }
        if (lev == next_sample || lev == n_max) {
            out.sample_n.push_back(lev);
            out.sample_value.push_back(value);
            next_sample = (lev < 64) ? lev + 1
                                     : std::max(lev + 1, static_cast<long>(
                                                             static_cast<double>(lev) * 1.25));
        }
    }
    return out;
}

}  // namespace szegolab
