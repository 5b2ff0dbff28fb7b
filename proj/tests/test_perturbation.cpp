#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "szegolab/perturbation.hpp"
#include "szegolab/spectrum.hpp"

using namespace szegolab;

TEST_CASE("pair ratio window widens with the spacing") {
    CHECK(ratio_window_max(2) == 13.0);
    CHECK(ratio_window_max(3) == 33.0);
    CHECK(ratio_window_max(4) == 61.0);
}

TEST_CASE("pair moves enforce the ratio window") {
    PerturbationSpec ok{PerturbationKind::a_pair, 100, 1e-3, 1e-3, 2};
    CHECK_NOTHROW(validate(ok));
    PerturbationSpec wide{PerturbationKind::a_pair, 100, 1e-3, 1e-3 / 20.0, 2};
    CHECK_THROWS_AS(validate(wide), std::invalid_argument);
    PerturbationSpec narrow{PerturbationKind::a_pair, 100, 1e-3 / 20.0, 1e-3, 2};
    CHECK_THROWS_AS(validate(narrow), std::invalid_argument);
    // the k = 3 window admits ratio 20
    PerturbationSpec spaced{PerturbationKind::a_pair, 100, 1e-3, 1e-3 / 20.0, 3};
    CHECK_NOTHROW(validate(spaced));
    CHECK(remark_based(spaced));
    CHECK_FALSE(remark_based(ok));
    // degenerate: both zero passes, one zero does not
    PerturbationSpec zeros{PerturbationKind::a_pair, 100, 0.0, 0.0, 2};
    CHECK_NOTHROW(validate(zeros));
    PerturbationSpec half_zero{PerturbationKind::a_pair, 100, 1e-3, 0.0, 2};
    CHECK_THROWS_AS(validate(half_zero), std::invalid_argument);
    PerturbationSpec tight{PerturbationKind::a_pair, 100, 1e-3, 1e-3, 1};
    CHECK_THROWS_AS(validate(tight), std::invalid_argument);
}

TEST_CASE("other shapes enforce their sign and window constraints") {
    CHECK_THROWS_AS(validate({PerturbationKind::a_run, 50, -1e-3, 0.0, 3}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate({PerturbationKind::a_run, 50, 1e-3, 0.0, 1}),
                    std::invalid_argument);
    CHECK_NOTHROW(validate({PerturbationKind::a_run, 50, 1e-3, 0.0, 4}));
    CHECK_THROWS_AS(validate({PerturbationKind::a_pair_b, 50, 1e-3, 6e-4, 2}),
                    std::invalid_argument);
    CHECK_NOTHROW(validate({PerturbationKind::a_pair_b, 50, 1e-3, 5e-4, 2}));
    CHECK_NOTHROW(validate({PerturbationKind::a_pair_b, 50, 1e-3, -5e-4, 2}));
    CHECK_THROWS_AS(validate({PerturbationKind::a_single, 50, -1e-3, 0.0, 2}),
                    std::invalid_argument);
    CHECK_NOTHROW(validate({PerturbationKind::b_single, 50, 0.0, -1e-3, 2}));
}

TEST_CASE("zero-strength moves leave the sequence untouched") {
    CoefficientSequence seq = coulomb_sequence(0.5, 0.2);
    CoefficientSequence moved =
        apply_perturbation(seq, {PerturbationKind::a_run, 50, 0.0, 0.0, 3});
    for (long n = 48; n <= 56; ++n) {
        CHECK(coeffs_at(moved, n).a == coeffs_at(seq, n).a);
        CHECK(coeffs_at(moved, n).b == coeffs_at(seq, n).b);
    }
}

TEST_CASE("each shape touches exactly its advertised entries") {
    CoefficientSequence seq = coulomb_sequence(0.5, 0.0);

    CoefficientSequence pair =
        apply_perturbation(seq, {PerturbationKind::a_pair, 100, 1e-3, 1e-3, 2});
    CHECK(coeffs_at(pair, 100).a ==
          doctest::Approx(coeffs_at(seq, 100).a - 1e-3).epsilon(1e-14));
    CHECK(coeffs_at(pair, 102).a ==
          doctest::Approx(coeffs_at(seq, 102).a - 1e-3).epsilon(1e-14));
    CHECK(coeffs_at(pair, 101).a == coeffs_at(seq, 101).a);
    CHECK(coeffs_at(pair, 100).b == coeffs_at(seq, 100).b);

    CoefficientSequence pair_b =
        apply_perturbation(seq, {PerturbationKind::a_pair_b, 80, 1e-3, 5e-4, 2});
    CHECK(coeffs_at(pair_b, 80).b == doctest::Approx(5e-4).epsilon(1e-14));
    CHECK(coeffs_at(pair_b, 80).a ==
          doctest::Approx(coeffs_at(seq, 80).a - 1e-3).epsilon(1e-14));
    CHECK(coeffs_at(pair_b, 82).a ==
          doctest::Approx(coeffs_at(seq, 82).a - 1e-3).epsilon(1e-14));
    CHECK(coeffs_at(pair_b, 81).a == coeffs_at(seq, 81).a);

    CoefficientSequence run =
        apply_perturbation(seq, {PerturbationKind::a_run, 60, 2e-4, 0.0, 3});
    for (long n = 60; n <= 63; ++n)
        CHECK(coeffs_at(run, n).a ==
              doctest::Approx(coeffs_at(seq, n).a - 2e-4).epsilon(1e-14));
    CHECK(coeffs_at(run, 59).a == coeffs_at(seq, 59).a);
    CHECK(coeffs_at(run, 64).a == coeffs_at(seq, 64).a);
}

TEST_CASE("moving by the full strength recovers the one-shot application") {
    CoefficientSequence seq = coulomb_sequence(0.7, 0.4);
    for (PerturbationSpec spec :
         {PerturbationSpec{PerturbationKind::a_pair, 40, 1e-3, 5e-4, 2},
          PerturbationSpec{PerturbationKind::a_pair_b, 44, 1e-3, -4e-4, 2},
          PerturbationSpec{PerturbationKind::b_single, 48, 0.0, -2e-4, 2}}) {
        CoefficientSequence one_shot = apply_perturbation(seq, spec);
        CoefficientSequence walked = apply_direction(seq, spec, full_strength(spec));
        for (long n = 38; n <= 50; ++n) {
            CHECK(coeffs_at(walked, n).a ==
                  doctest::Approx(coeffs_at(one_shot, n).a).epsilon(1e-14));
            CHECK(coeffs_at(walked, n).b ==
                  doctest::Approx(coeffs_at(one_shot, n).b).epsilon(1e-14));
        }
    }
}

TEST_CASE("eigenvalue velocity matches a centered finite difference") {
    CoefficientSequence seq = coulomb_sequence(1.0, 1.0);
    const int N = 1000;
    TruncatedJacobi J = truncate(seq, N);
    const double h = 1e-6;
    for (auto [spec, j, side] : {
             std::tuple{PerturbationSpec{PerturbationKind::a_single, 30, 1e-3, 0.0, 2}, 1,
                        Side::plus},
             {PerturbationSpec{PerturbationKind::b_single, 12, 0.0, -1e-3, 2}, 2,
              Side::plus},
             {PerturbationSpec{PerturbationKind::a_pair, 20, 1e-3, 5e-4, 2}, 1,
              Side::minus},
             {PerturbationSpec{PerturbationKind::a_pair_b, 15, 1e-3, 4e-4, 2}, 3,
              Side::plus},
             {PerturbationSpec{PerturbationKind::a_run, 25, 1e-3, 0.0, 3}, 2, Side::minus},
         }) {
        double velocity = dE_dt(J, spec, j, side);
        auto rank_energy = [&](double t) {
            EigenvalueSet set = eigenvalues_outside(truncate(apply_direction(seq, spec, t), N));
            const std::vector<double>& list = side == Side::plus ? set.above : set.below;
            REQUIRE(static_cast<int>(list.size()) >= j);
            return list[static_cast<std::size_t>(j - 1)];
        };
        double fd = (rank_energy(h) - rank_energy(-h)) / (2.0 * h);
        CHECK(std::abs(velocity - fd) < 1e-6);
    }
}

TEST_CASE("velocity queries for absent eigenvalues are refused") {
    TruncatedJacobi J = truncate(free_sequence(), 500);
    CHECK_THROWS_AS(dE_dt(J, {PerturbationKind::a_single, 10, 1e-3, 0.0, 2}, 1, Side::plus),
                    std::out_of_range);
}

TEST_CASE("audit of the zero move is a clean pass") {
    CoefficientSequence seq = coulomb_sequence(1.0, 1.0);
    std::vector<PerturbationSpec> stages{{PerturbationKind::a_single, 300, 0.0, 0.0, 2}};
    MinorationAudit audit = minoration_audit(seq, stages, 0.01, 2000);
    CHECK(audit.verdict);
    CHECK(audit.hypothesis_ok);
    CHECK_FALSE(audit.remark_based);
    CHECK(audit.new_states == 0);
    REQUIRE(audit.stage_verdicts.size() == 1);
    CHECK(audit.stage_verdicts[0] == 1);
    for (const auto& pair : audit.tracked_above) CHECK(pair.before == pair.after);
    for (const auto& pair : audit.tracked_below) CHECK(pair.before == pair.after);
}

TEST_CASE("deep small moves never push tracked states outward") {
    CoefficientSequence seq = coulomb_sequence(0.8, 0.6);
    for (PerturbationSpec spec :
         {PerturbationSpec{PerturbationKind::a_pair, 250, 1e-3, 1e-3, 2},
          PerturbationSpec{PerturbationKind::a_run, 220, 5e-4, 0.0, 4},
          PerturbationSpec{PerturbationKind::a_pair_b, 300, 1e-3, 2.5e-4, 2}}) {
        std::vector<PerturbationSpec> stages{spec};
        MinorationAudit audit = minoration_audit(seq, stages, 0.01, 4000);
        CHECK(audit.verdict);
        CHECK(audit.hypothesis_ok);
        CHECK(audit.new_states == 0);
    }
}

TEST_CASE("shallow sites break the smallness hypothesis, not the verdict machinery") {
    CoefficientSequence seq = coulomb_sequence(1.0, 1.0);
    std::vector<PerturbationSpec> stages{{PerturbationKind::a_single, 10, 1e-4, 0.0, 2}};
    MinorationAudit audit = minoration_audit(seq, stages, 0.01, 2000);
    CHECK_FALSE(audit.hypothesis_ok);  // |a_10 - 1| = 0.1 is far above delta
    CHECK(audit.stage_verdicts.size() == 1);
}

TEST_CASE("asymptotic phase classification covers every region and line") {
    CHECK(askey_classify(1.0, 1.5) == PhaseClass::szego_both);
    CHECK(askey_classify(0.0, 0.0) == PhaseClass::szego_both);
    CHECK(askey_classify(0.2, 1.0) == PhaseClass::szego_plus2_only);
    CHECK(askey_classify(0.2, -1.0) == PhaseClass::szego_minus2_only);
    CHECK(askey_classify(-0.8, 0.3) == PhaseClass::szego_neither);
    CHECK(askey_classify(-0.8, -0.3) == PhaseClass::szego_neither);
    // critical lines: kept for alpha >= 0, open otherwise
    CHECK(askey_classify(1.0, 2.0) == PhaseClass::szego_both);
    CHECK(askey_classify(1.0, -2.0) == PhaseClass::szego_both);
    CHECK(askey_classify(-0.5, -1.0) == PhaseClass::borderline_open);
    CHECK(askey_classify(-0.5, 1.0) == PhaseClass::borderline_open);
}

TEST_CASE("staged removal of seeded errors audits clean") {
    CoefficientSequence base = coulomb_sequence_with_error(1.0, 1.0, 1.0, 0.3, 1.0, 77);
    CoefficientSequence target = coulomb_sequence(1.0, 1.0);
    StagedAuditResult run = staged_error_audit(base, target, 0.3, 1.0, 0.01, 4000, 200, 40);
    CHECK(run.stages.size() == 80);  // b-fix then a-fix per site
    CHECK(run.audit.verdict);
    CHECK(run.audit.hypothesis_ok);
    CHECK(run.audit.stage_verdicts.size() == 80);
    // the head below the start site was taken from the target
    CHECK(coeffs_at(run.start, 100).a == coeffs_at(target, 100).a);
    CHECK(coeffs_at(run.start, 199).b == coeffs_at(target, 199).b);
    // repaired sites land on the target
    for (long site = 200; site < 240; ++site) {
        CHECK(coeffs_at(run.final, site).a ==
              doctest::Approx(coeffs_at(target, site).a).epsilon(1e-12));
        CHECK(coeffs_at(run.final, site).b ==
              doctest::Approx(coeffs_at(target, site).b).epsilon(1e-12));
    }
    // beyond the repaired range the lifted matrix still sits above the target
    CHECK(coeffs_at(run.final, 300).a > coeffs_at(target, 300).a);
    CHECK(run.z_samples.empty());
}
