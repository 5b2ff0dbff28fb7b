#include "szegolab/serialize.hpp"

#include <cstdio>
#include <stdexcept>

namespace szegolab {

using nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

const char* seq_kind_name(SeqKind kind) {
    switch (kind) {
        case SeqKind::free_laplacian:
            return "free";
        case SeqKind::coulomb:
            return "coulomb";
        case SeqKind::table:
            return "table";
        case SeqKind::transformed:
            return "transformed";
    }
    return "?";
}

ordered_json doubles(const std::vector<double>& v) {
    return ordered_json(v);
}

}  // namespace

ordered_json sequence_to_json(const CoefficientSequence& seq) {
    if (seq.kind == SeqKind::transformed)
        throw std::invalid_argument(
            "transformed sequences have no wire format; serialize the base instead");
    ordered_json out;
    out["kind"] = seq_kind_name(seq.kind);
    out["alpha"] = seq.alpha;
    out["beta"] = seq.beta;
    out["gamma"] = seq.gamma;
    out["error_amp"] = seq.error_amp;
    out["error_exp"] = seq.error_exp;
    out["error_seed"] = seq.error_seed;
    ordered_json table = ordered_json::array();
    for (const auto& [n, v] : seq.table) {
        ordered_json row;
        row["n"] = n;
        row["a"] = v.a;
        row["b"] = v.b;
        table.push_back(std::move(row));
    }
    out["table"] = std::move(table);
    return out;
}

CoefficientSequence sequence_from_json(const ordered_json& j) {
    std::string kind = j.value("kind", std::string("free"));
    CoefficientSequence seq;
    if (kind == "free") {
        seq = free_sequence();
    } else if (kind == "coulomb") {
        double alpha = j.value("alpha", 0.0);
        double beta = j.value("beta", 0.0);
        double gamma = j.value("gamma", 1.0);
        double amp = j.value("error_amp", 0.0);
        double exp = j.value("error_exp", 1.0);
        std::uint64_t seed = j.value("error_seed", std::uint64_t{0});
        if (amp != 0.0) {
            seq = coulomb_sequence_with_error(alpha, beta, gamma, amp, exp, seed);
        } else {
            seq = coulomb_sequence(alpha, beta, gamma);
            seq.error_exp = exp;
            seq.error_seed = seed;
        }
    } else if (kind == "table") {
        seq = table_sequence({});
    } else {
        throw std::invalid_argument("unknown sequence kind \"" + kind + "\"");
    }
    if (j.contains("table")) {
        for (const auto& row : j.at("table")) {
            long n = row.at("n").get<long>();
            seq.table[n] = {row.at("a").get<double>(), row.at("b").get<double>()};
        }
    }
    return seq;
}

ordered_json eigenvalues_to_json(const EigenvalueSet& set) {
    ordered_json out;
    out["size"] = set.size;
    out["strip"] = set.strip;
    out["tolerance"] = set.tolerance;
    out["marginal_width"] = set.marginal_width;
    out["above"] = doubles(set.above);
    out["below"] = doubles(set.below);
    out["betas_above"] = doubles(set.betas_above);
    out["betas_below"] = doubles(set.betas_below);
    out["marginal"] = doubles(set.marginal);
    out["pad_above"] = doubles(set.pad_above);
    out["pad_below"] = doubles(set.pad_below);
    return out;
}

namespace {

const char* szego_kind_name(SzegoKind kind) {
    switch (kind) {
        case SzegoKind::Z:
            return "Z";
        case SzegoKind::Z1_plus:
            return "Z1_plus";
        case SzegoKind::Z1_minus:
            return "Z1_minus";
        case SzegoKind::Z2_minus:
            return "Z2_minus";
    }
    return "?";
}

// {+2, -2, both, none} tag for the pair of edge verdicts.
const char* diverged_edge_tag(const SzegoValue& value) {
    bool plus = value.at_plus2 == EdgeVerdict::diverges;
    bool minus = value.at_minus2 == EdgeVerdict::diverges;
    if (plus && minus) return "both";
    if (plus) return "+2";
    if (minus) return "-2";
    return "none";
}

}  // namespace

ordered_json szego_to_json(const SzegoValue& value) {
    ordered_json out;
    out["kind"] = szego_kind_name(value.kind);
    out["value"] = value.value;
    out["epsilon"] = value.epsilon;
    out["diverged"] = value.diverged;
    out["diverged_edge"] = diverged_edge_tag(value);
    out["at_plus2"] = edge_verdict_name(value.at_plus2);
    out["at_minus2"] = edge_verdict_name(value.at_minus2);
    out["slope"] = value.slope;
    out["slope_plus"] = value.slope_plus;
    out["slope_minus"] = value.slope_minus;
    out["noise_plus"] = value.noise_plus;
    out["noise_minus"] = value.noise_minus;
    out["clamped_points"] = value.clamped_points;
    out["ladder_eps"] = doubles(value.ladder_eps);
    out["ladder_values"] = doubles(value.ladder_values);
    return out;
}

namespace {

const char* rule_kind_name(RuleKind kind) {
    switch (kind) {
        case RuleKind::z_step:
            return "Z_step";
        case RuleKind::z1_plus_step:
            return "Z1_plus_step";
        case RuleKind::z1_minus_step:
            return "Z1_minus_step";
    }
    return "?";
}

}  // namespace

ordered_json sumrule_to_json(const SumRuleReport& report) {
    ordered_json out;
    out["kind"] = rule_kind_name(report.kind);
    out["n"] = report.n;
    out["N"] = report.N;
    out["lhs"] = report.lhs;
    out["coeff_term"] = report.coeff_term;
    out["eig_term"] = report.eig_term;
    out["rhs_tail"] = report.rhs_tail;
    if (report.lhs_diverged || report.rhs_diverged)
        out["residual"] = nullptr;
    else
        out["residual"] = report.residual;
    out["marginal_count"] = report.marginal_count;
    out["lhs_diverged"] = report.lhs_diverged;
    out["rhs_diverged"] = report.rhs_diverged;
    out["lhs_at_plus2"] = edge_verdict_name(report.lhs_plus2);
    out["lhs_at_minus2"] = edge_verdict_name(report.lhs_minus2);
    out["error_budget"] = report.error_budget;
    out["eig_noise"] = report.eig_noise;
    return out;
}

ordered_json audit_to_json(const MinorationAudit& audit) {
    ordered_json out;
    out["delta"] = audit.delta;
    out["verdict"] = audit.verdict;
    out["hypothesis_ok"] = audit.hypothesis_ok;
    out["remark_based"] = audit.remark_based;
    out["new_states"] = audit.new_states;
    ordered_json stages = ordered_json::array();
    for (std::uint8_t v : audit.stage_verdicts) stages.push_back(v != 0);
    out["stage_verdicts"] = std::move(stages);
    auto pairs = [](const std::vector<MinorationAudit::TrackedPair>& list) {
        ordered_json arr = ordered_json::array();
        for (const auto& p : list) {
            ordered_json row;
            row["before"] = p.before;
            row["after"] = p.after;
            arr.push_back(std::move(row));
        }
        return arr;
    };
    out["tracked_above"] = pairs(audit.tracked_above);
    out["tracked_below"] = pairs(audit.tracked_below);
    return out;
}

std::string density_to_csv(const DensityEstimate& density) {
    std::string out = "x,nu_prime,gap_hint\n";
    for (std::size_t i = 0; i < density.grid.size(); ++i) {
        out += format_double(density.grid[i]);
        out += ',';
        out += format_double(density.values[i]);
        out += ',';
        out += format_double(density.gap_hint[i]);
        out += '\n';
    }
    return out;
}

const char* phase_class_name(PhaseClass c) {
    switch (c) {
        case PhaseClass::szego_both:
            return "szego_both";
        case PhaseClass::szego_plus2_only:
            return "szego_plus2_only";
        case PhaseClass::szego_minus2_only:
            return "szego_minus2_only";
        case PhaseClass::szego_neither:
            return "szego_neither";
        case PhaseClass::borderline_open:
            return "borderline_open";
    }
    return "?";
}

const char* edge_verdict_name(EdgeVerdict v) {
    switch (v) {
        case EdgeVerdict::converges:
            return "converges";
        case EdgeVerdict::diverges:
            return "diverges";
        case EdgeVerdict::borderline:
            return "borderline";
    }
    return "?";
}

const char* perturbation_kind_name(PerturbationKind k) {
    switch (k) {
        case PerturbationKind::a_pair:
            return "a-pair";
        case PerturbationKind::a_run:
            return "a-run";
        case PerturbationKind::a_pair_b:
            return "a-pair-b";
        case PerturbationKind::a_single:
            return "a-single";
        case PerturbationKind::b_single:
            return "b-single";
    }
    return "?";
}

PerturbationKind perturbation_kind_from_name(const std::string& name) {
    if (name == "a-pair") return PerturbationKind::a_pair;
    if (name == "a-run") return PerturbationKind::a_run;
    if (name == "a-pair-b") return PerturbationKind::a_pair_b;
    if (name == "a-single") return PerturbationKind::a_single;
    if (name == "b-single") return PerturbationKind::b_single;
    throw std::invalid_argument("unknown perturbation kind \"" + name + "\"");
}

}  // namespace szegolab
