#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "szegolab/measure.hpp"

using namespace szegolab;

namespace {

constexpr double kPi = std::numbers::pi;

double free_density(double x) { return std::sqrt(4.0 - x * x) / (2.0 * kPi); }

CoefficientSequence rank_one(double b1) {
    return with_overrides(free_sequence(), {{1, {1.0, b1}}});
}

}  // namespace

TEST_CASE("angle grid is increasing, interior, and symmetric") {
    std::vector<double> grid = theta_grid(101);
    REQUIRE(grid.size() == 101);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
    for (double x : grid) CHECK(std::abs(x) < 2.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(grid[i] == doctest::Approx(-grid[grid.size() - 1 - i]).epsilon(1e-13));
}

TEST_CASE("envelope route reproduces the free density exactly") {
    std::vector<double> grid = theta_grid(101);
    DensityEstimate est = density_via_T(free_sequence(), grid, 10000);
    REQUIRE(est.values.size() == grid.size());
    CHECK(est.variation_ok);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(est.values[i] == doctest::Approx(free_density(grid[i])).epsilon(1e-12));
        CHECK(est.gap_hint[i] == 0.0);
        CHECK(est.flags[i] == 0);
    }
}

TEST_CASE("envelope route flags points where the envelope turns negative") {
    // a diagonal jump drives T_1 negative at x = -1/2:
    // S_1 = 1 + 3x = -1/2, T_1 = S_1 + (1/2)*3*x^2 = -1/8
    CoefficientSequence seq = with_overrides(free_sequence(), {{2, {1.0, 3.0}}});
    std::vector<double> grid{-0.5};
    DensityEstimate est = density_via_T(seq, grid, 1);
    CHECK(std::isnan(est.values[0]));
    CHECK(est.flags[0] != 0);
}

TEST_CASE("envelope route reports unsettled coefficient variation") {
    // slowest admissible decay: the variation tail over [depth/2, depth]
    // is ~ ln 2 / depth^{1/2}... still large at tiny depths
    DensityEstimate est = density_via_T(coulomb_sequence(1.0, 0.0, 0.5), theta_grid(11), 20);
    CHECK_FALSE(est.variation_ok);
    DensityEstimate deep = density_via_T(coulomb_sequence(1.0, 0.0), theta_grid(11), 100000);
    CHECK(deep.variation_ok);
}

TEST_CASE("resolvent route is exact on the free matrix at depth one") {
    std::vector<double> grid = theta_grid(101);
    DensityEstimate est = density_via_m(free_sequence(), grid, 1);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(est.values[i] == doctest::Approx(free_density(grid[i])).epsilon(1e-13));
}

TEST_CASE("resolvent route matches the one-step closed form for a diagonal bump") {
    // with b_1 = 2 the continued fraction at x = 0 closes to 1/(2 - i),
    // whose imaginary part is 1/5
    std::vector<double> grid{0.0};
    DensityEstimate est = density_via_m(rank_one(2.0), grid, 10);
    CHECK(est.values[0] == doctest::Approx(1.0 / (5.0 * kPi)).epsilon(1e-14));
}

TEST_CASE("resolvent route is stable under depth doubling") {
    std::vector<double> grid{1.0};
    DensityEstimate d16 = density_via_m(coulomb_sequence(0.0, 1.0), grid, 1L << 16);
    DensityEstimate d17 = density_via_m(coulomb_sequence(0.0, 1.0), grid, 1L << 17);
    CHECK(std::abs(d17.values[0] - d16.values[0]) / d16.values[0] < 1e-4);
    CHECK(d16.gap_hint[0] < 1e-4);
}

TEST_CASE("the two density routes agree on an admissible family") {
    std::vector<double> grid{0.0};
    DensityEstimate t = density_via_T(coulomb_sequence(1.0, 0.0), grid, 100000);
    DensityEstimate m = density_via_m(coulomb_sequence(1.0, 0.0), grid, 1L << 16);
    CHECK(std::abs(t.values[0] - m.values[0]) / m.values[0] < 1e-3);
}

TEST_CASE("log integrals of the free matrix all vanish") {
    DensityEstimate est = density_via_m(free_sequence(), theta_grid(2048), 1);
    for (SzegoKind kind :
         {SzegoKind::Z, SzegoKind::Z1_plus, SzegoKind::Z1_minus, SzegoKind::Z2_minus}) {
        SzegoValue v = szego_integral(est, kind);
        CHECK(std::abs(v.value) <= 1e-8);
        CHECK_FALSE(v.diverged);
        CHECK(v.at_plus2 == EdgeVerdict::converges);
        CHECK(v.at_minus2 == EdgeVerdict::converges);
        CHECK(v.clamped_points == 0);
        CHECK(v.ladder_eps.size() == v.ladder_values.size());
        CHECK(v.ladder_eps.size() >= 2);
    }
}

TEST_CASE("log integrals recover the rank-one closed forms") {
    double ln2 = std::log(2.0);
    DensityEstimate est = density_via_m(rank_one(2.0), theta_grid(2048), 1L << 16);
    SzegoValue z = szego_integral(est, SzegoKind::Z);
    CHECK_FALSE(z.diverged);
    CHECK(z.value == doctest::Approx(ln2).epsilon(2e-3));
    SzegoValue z1p = szego_integral(est, SzegoKind::Z1_plus);
    CHECK(z1p.value == doctest::Approx(ln2 - 0.25).epsilon(3e-3));
    // the two one-sided integrals average to the plain one
    SzegoValue z1m = szego_integral(est, SzegoKind::Z1_minus);
    CHECK(0.5 * (z1p.value + z1m.value) == doctest::Approx(z.value).epsilon(1e-10));
}

TEST_CASE("quadrature refuses grids that under-resolve the angle") {
    DensityEstimate est = density_via_m(free_sequence(), theta_grid(32), 1);
    CHECK_THROWS_AS(szego_integral(est, SzegoKind::Z), std::domain_error);
}

TEST_CASE("density floor clamping is counted") {
    DensityEstimate est;
    est.grid = theta_grid(2048);
    est.values.assign(est.grid.size(), 1e-310);
    est.gap_hint.assign(est.grid.size(), 0.0);
    est.flags.assign(est.grid.size(), 0);
    est.depth = 1;
    SzegoValue v = szego_integral(est, SzegoKind::Z);
    CHECK(v.clamped_points > 1000);
    CHECK(std::isfinite(v.value));
    CHECK(v.value > 100.0);  // ln of the clamped ratio is huge
}

TEST_CASE("diagonal reflection swaps the two edges") {
    DensityEstimate plus = density_via_m(coulomb_sequence(0.6, 0.9), theta_grid(2048), 1L << 16);
    DensityEstimate minus =
        density_via_m(coulomb_sequence(0.6, -0.9), theta_grid(2048), 1L << 16);
    SzegoValue z_plus = szego_integral(plus, SzegoKind::Z);
    SzegoValue z_minus = szego_integral(minus, SzegoKind::Z);
    CHECK(std::abs(z_plus.value - z_minus.value) < 1e-8);
    SzegoValue z1p = szego_integral(plus, SzegoKind::Z1_plus);
    SzegoValue z1m = szego_integral(minus, SzegoKind::Z1_minus);
    CHECK(std::abs(z1p.value - z1m.value) < 1e-8);
}

TEST_CASE("edge classification separates the known regimes") {
    EdgeClassification both = divergence_classify(coulomb_sequence(1.0, 1.5));
    CHECK(both.at_plus2 == EdgeVerdict::converges);
    CHECK(both.at_minus2 == EdgeVerdict::converges);

    EdgeClassification plus_only = divergence_classify(coulomb_sequence(0.2, 1.0));
    CHECK(plus_only.at_plus2 == EdgeVerdict::converges);
    CHECK(plus_only.at_minus2 == EdgeVerdict::diverges);
    CHECK(plus_only.slope_minus >= kDivergenceSlope);

    EdgeClassification minus_only = divergence_classify(coulomb_sequence(0.2, -1.0));
    CHECK(minus_only.at_plus2 == EdgeVerdict::diverges);
    CHECK(minus_only.at_minus2 == EdgeVerdict::converges);

    EdgeClassification neither = divergence_classify(coulomb_sequence(-0.8, 0.3));
    CHECK(neither.at_plus2 == EdgeVerdict::diverges);
    CHECK(neither.at_minus2 == EdgeVerdict::diverges);
}

TEST_CASE("truncated positive-part envelope integrals stay bounded") {
    EnvelopeIntegralScan scan = truncated_log_integrals(coulomb_sequence(1.0, 1.5), 2000);
    CHECK(scan.argmax == 3);
    CHECK(scan.max_value == doctest::Approx(4.339).epsilon(5e-3));
    REQUIRE(scan.sample_n.size() == scan.sample_value.size());
    REQUIRE(scan.sample_n.size() > 10);
    for (std::size_t i = 1; i < scan.sample_n.size(); ++i)
        CHECK(scan.sample_n[i] > scan.sample_n[i - 1]);
    for (double v : scan.sample_value) CHECK(v <= scan.max_value);
}
