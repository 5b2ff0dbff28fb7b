#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "szegolab/sumrules.hpp"

using namespace szegolab;

namespace {

CoefficientSequence rank_one(double b1) {
    return with_overrides(free_sequence(), {{1, {1.0, b1}}});
}

const double kLn2 = std::log(2.0);

}  // namespace

TEST_CASE("free step rule is identically zero") {
    SumRuleReport report = step_sum_rule(free_sequence(), 3, 100);
    CHECK(report.coeff_term == 0.0);
    CHECK(report.eig_term == 0.0);
    CHECK(std::abs(report.lhs) < 1e-8);
    CHECK(std::abs(report.rhs_tail) < 1e-8);
    CHECK(std::abs(report.residual) < 1e-8);
    CHECK_FALSE(report.lhs_diverged);
    CHECK_FALSE(report.rhs_diverged);
    CHECK(report.marginal_count == 0);
}

TEST_CASE("rank-one step rule closes to the logarithmic weight") {
    SumRuleReport report = step_sum_rule(rank_one(2.0), 1, 2000);
    CHECK(report.coeff_term == 0.0);  // a_1 = 1 exactly
    CHECK(report.eig_term == doctest::Approx(kLn2).epsilon(1e-9));
    CHECK(report.lhs == doctest::Approx(kLn2).epsilon(2e-3));
    CHECK(std::abs(report.rhs_tail) < 1e-3);
    CHECK(std::abs(report.residual) < 1e-3);
}

TEST_CASE("coulomb step rule closes within its budget") {
    SumRuleReport report = step_sum_rule(coulomb_sequence(1.0, 1.0), 5, 4000);
    CHECK_FALSE(report.lhs_diverged);
    CHECK_FALSE(report.rhs_diverged);
    CHECK(std::abs(report.residual) < 5e-3);
    CHECK(report.error_budget > 0.0);
    CHECK(std::isfinite(report.error_budget));
}

TEST_CASE("step eigenvalue term is nonnegative up to the noise floor") {
    for (auto [alpha, beta, n, N] : {std::tuple{1.0, 1.0, 5, 4000},
                                     {0.5, 0.5, 2, 2000},
                                     {0.3, -0.3, 4, 2000}}) {
        SumRuleReport report = step_sum_rule(coulomb_sequence(alpha, beta), n, N);
        CHECK(report.eig_term >= -std::max(1e-9, report.eig_noise));
    }
}

TEST_CASE("one-sided rank-one rule matches the closed forms") {
    SumRuleReport report = one_sided_step_rule(rank_one(2.0), Side::plus, 1, 2000);
    CHECK(report.kind == RuleKind::z1_plus_step);
    CHECK(report.coeff_term == -1.0);  // -(ln 1 + 2/2)
    CHECK(report.eig_term == doctest::Approx(kLn2 + 0.75).epsilon(1e-9));
    CHECK(report.lhs == doctest::Approx(kLn2 - 0.25).epsilon(4e-3));
    CHECK(std::abs(report.residual) < 2e-3);
}

TEST_CASE("one-sided free rule is identically zero") {
    SumRuleReport report = one_sided_step_rule(free_sequence(), Side::minus, 2, 100);
    CHECK(report.coeff_term == 0.0);
    CHECK(report.eig_term == 0.0);
    CHECK(std::abs(report.residual) < 1e-8);
}

TEST_CASE("diagonal reflection swaps the one-sided rules") {
    SumRuleReport plus = one_sided_step_rule(coulomb_sequence(0.6, 0.9), Side::plus, 3, 2000);
    SumRuleReport minus =
        one_sided_step_rule(coulomb_sequence(0.6, -0.9), Side::minus, 3, 2000);
    CHECK(plus.lhs == doctest::Approx(minus.lhs).epsilon(1e-7));
    CHECK(plus.coeff_term == doctest::Approx(minus.coeff_term).epsilon(1e-12));
    CHECK(plus.eig_term == doctest::Approx(minus.eig_term).epsilon(1e-7));
    CHECK(std::abs(plus.residual) < 5e-3);
    CHECK(std::abs(minus.residual) < 5e-3);
}

TEST_CASE("step preconditions are enforced") {
    CHECK_THROWS_AS(step_sum_rule(free_sequence(), 0, 100), std::domain_error);
    CHECK_THROWS_AS(step_sum_rule(free_sequence(), 25, 100), std::domain_error);
    CHECK_THROWS_AS(one_sided_step_rule(free_sequence(), Side::plus, 30, 100),
                    std::domain_error);
}

TEST_CASE("coefficient partial sums telescope for the pure off-diagonal family") {
    // product of (1 + 1/n) up to N is N + 1, so the partial sum is -ln(N + 1)
    CoefficientVsEigenvalueScan scan = a0_e0(coulomb_sequence(1.0, 0.0), 1000);
    REQUIRE(scan.a0_partial.size() == 1000);
    CHECK(scan.a0_partial.back() == doctest::Approx(-std::log(1001.0)).epsilon(1e-12));
    CHECK(scan.a0_partial.front() == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    // beta = 0 keeps the spectrum symmetric, and bound states do exist
    CHECK(scan.bound_states_above == scan.bound_states_below);
    CHECK(scan.bound_states_above > 0);
    CHECK(scan.e0 > 0.0);
}

TEST_CASE("free coefficient scan is all zero") {
    CoefficientVsEigenvalueScan scan = a0_e0(free_sequence(), 50);
    for (double v : scan.a0_partial) CHECK(v == 0.0);
    CHECK(scan.e0 == 0.0);
    CHECK(scan.bound_states_above == 0);
    CHECK(scan.bound_states_below == 0);
}

TEST_CASE("coefficient scan refuses tiny horizons") {
    CHECK_THROWS_AS(a0_e0(free_sequence(), 5), std::domain_error);
}
