// Command-line surface: density reports, sum-rule verification, perturbation
// audits, and the (alpha, beta) phase scan.  Outputs are deterministic for a
// fixed config: identical inputs give byte-identical files.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "szegolab/coefficients.hpp"
#include "szegolab/common.hpp"
#include "szegolab/measure.hpp"
#include "szegolab/perturbation.hpp"
#include "szegolab/serialize.hpp"
#include "szegolab/spectrum.hpp"
#include "szegolab/sumrules.hpp"

namespace {

using nlohmann::ordered_json;
using namespace szegolab;

// --config is honored before CLI11 runs so its values can seed flag defaults;
// flags given on the command line then override them.
ordered_json preload_config(int argc, char** argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) {
            path = argv[i + 1];
            break;
        }
        if (arg.rfind("--config=", 0) == 0) {
            path = arg.substr(9);
            break;
        }
    }
    if (path.empty()) return ordered_json::object();
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot read config file " << path << "\n";
        std::exit(2);
    }
    try {
        return ordered_json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "config file " << path << " is not valid JSON: " << e.what() << "\n";
        std::exit(2);
    }
}

struct SequenceFlags {
    std::string kind;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 1.0;
    double error_amp = 0.0;
    double error_exp = 1.0;
    std::uint64_t error_seed = 0;
    std::vector<std::string> overrides;  // "n:a:b"

    CLI::Option* kind_opt = nullptr;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* beta_opt = nullptr;
    CLI::Option* gamma_opt = nullptr;
    CLI::Option* amp_opt = nullptr;
    CLI::Option* exp_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
};

void add_sequence_flags(CLI::App* cmd, SequenceFlags& f) {
    f.kind_opt = cmd->add_option("--kind", f.kind, "sequence kind: free | coulomb | table");
    f.alpha_opt = cmd->add_option("--alpha", f.alpha, "off-diagonal amplitude");
    f.beta_opt = cmd->add_option("--beta", f.beta, "diagonal amplitude");
    f.gamma_opt = cmd->add_option("--gamma", f.gamma, "decay exponent in (0, 1]");
    f.amp_opt = cmd->add_option("--error-amp", f.error_amp, "seeded error amplitude");
    f.exp_opt = cmd->add_option("--error-exp", f.error_exp, "seeded error extra decay");
    f.seed_opt = cmd->add_option("--error-seed", f.error_seed, "seed for the error terms");
    cmd->add_option("--override", f.overrides,
                    "table override n:a:b (repeatable), e.g. --override 1:1:2");
}

CoefficientSequence build_sequence(const SequenceFlags& f, const ordered_json& cfg) {
    ordered_json sj =
        cfg.contains("sequence") ? cfg.at("sequence") : ordered_json::object();
    bool family_flag = f.alpha_opt->count() || f.beta_opt->count() || f.gamma_opt->count() ||
                       f.amp_opt->count();
    if (f.kind_opt->count())
        sj["kind"] = f.kind;
    else if (!sj.contains("kind"))
        sj["kind"] = family_flag ? "coulomb" : "free";
    if (f.alpha_opt->count()) sj["alpha"] = f.alpha;
    if (f.beta_opt->count()) sj["beta"] = f.beta;
    if (f.gamma_opt->count()) sj["gamma"] = f.gamma;
    if (f.amp_opt->count()) sj["error_amp"] = f.error_amp;
    if (f.exp_opt->count()) sj["error_exp"] = f.error_exp;
    if (f.seed_opt->count()) sj["error_seed"] = f.error_seed;
    if (!f.overrides.empty() && !sj.contains("table")) sj["table"] = ordered_json::array();
    for (const std::string& text : f.overrides) {
        long n = 0;
        double a = 0.0, b = 0.0;
        char sep1 = 0, sep2 = 0;
        std::istringstream stream(text);
        if (!(stream >> n >> sep1 >> a >> sep2 >> b) || sep1 != ':' || sep2 != ':')
            throw CLI::ValidationError("--override", "expected n:a:b, got \"" + text + "\"");
        ordered_json row;
        row["n"] = n;
        row["a"] = a;
        row["b"] = b;
        sj["table"].push_back(std::move(row));
    }
    return sequence_from_json(sj);
}

void apply_threads(int threads) {
    if (threads > 0) setenv("SZEGO_LAB_THREADS", std::to_string(threads).c_str(), 1);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("short write to " + path);
}

std::string dump_json(const ordered_json& j) { return j.dump(2) + "\n"; }

// Shared quadrature knobs with config-file defaults.
template <typename T>
T cfg_value(const ordered_json& cfg, const char* key, T fallback) {
    return cfg.value(key, fallback);
}

const char* phase_from_edges(EdgeVerdict plus, EdgeVerdict minus) {
    if (plus == EdgeVerdict::borderline || minus == EdgeVerdict::borderline)
        return "borderline";
    bool p = plus == EdgeVerdict::converges;
    bool m = minus == EdgeVerdict::converges;
    if (p && m) return "szego_both";
    if (p) return "szego_plus2_only";
    if (m) return "szego_minus2_only";
    return "szego_neither";
}

}  // namespace

int main(int argc, char** argv) {
    ordered_json cfg = preload_config(argc, argv);
    int rc = 0;

    CLI::App app{"numerical laboratory for Szego-type integrals of Coulomb-family "
                 "Jacobi matrices"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file; flags override its values");
    int threads = cfg_value(cfg, "threads", 0);
    app.add_option("--threads", threads, "cap the worker pool (also: SZEGO_LAB_THREADS)");

    // ---------------------------------------------------------------- density
    auto* density = app.add_subcommand(
        "density", "estimate the a.c. density by the envelope and resolvent routes");
    SequenceFlags density_seq;
    add_sequence_flags(density, density_seq);
    int d_grid = cfg_value(cfg, "grid", 101);
    long d_depth_t = cfg_value(cfg, "depth_t", 100000L);
    long d_depth_m = cfg_value(cfg, "depth_m", 65536L);
    std::string d_out = cfg_value(cfg, "out", std::string("density.csv"));
    std::string d_plot = cfg_value(cfg, "plot", std::string("density.dat"));
    density->add_option("--grid", d_grid, "number of interior grid points");
    density->add_option("--depth-t", d_depth_t, "envelope recursion depth");
    density->add_option("--depth-m", d_depth_m, "continued-fraction depth");
    density->add_option("--out", d_out, "CSV output path");
    density->add_option("--plot", d_plot, "plot-ready data file path");
    density->callback([&] {
        apply_threads(threads);
        CoefficientSequence seq = build_sequence(density_seq, cfg);
        std::vector<double> grid = theta_grid(d_grid);
        DensityEstimate via_t = density_via_T(seq, grid, d_depth_t);
        DensityEstimate via_m = density_via_m(seq, grid, d_depth_m);

        std::string csv = "x,nu_prime_via_T,nu_prime_via_m,gap_hint_via_T,gap_hint_via_m\n";
        std::string plot = "# x nu_prime_via_T nu_prime_via_m\n";
        int disagreements = 0;
        int absent = 0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            csv += format_double(grid[i]);
            csv += ',';
            csv += format_double(via_t.values[i]);
            csv += ',';
            csv += format_double(via_m.values[i]);
            csv += ',';
            csv += format_double(via_t.gap_hint[i]);
            csv += ',';
            csv += format_double(via_m.gap_hint[i]);
            csv += '\n';
            plot += format_double(grid[i]);
            plot += ' ';
            plot += format_double(via_t.values[i]);
            plot += ' ';
            plot += format_double(via_m.values[i]);
            plot += '\n';
            if (std::isnan(via_t.values[i])) {
                ++absent;
                continue;
            }
            double diff = std::abs(via_t.values[i] - via_m.values[i]);
            double rel = diff / std::max(std::abs(via_m.values[i]), 1e-300);
            bool ok = rel <= 1e-3 || diff <= 3.0 * (via_t.gap_hint[i] + via_m.gap_hint[i]);
            if (!ok) ++disagreements;
        }
        write_file(d_out, csv);
        write_file(d_plot, plot);
        std::cout << "density: " << grid.size() << " points, " << disagreements
                  << " cross-method disagreements, " << absent << " absent"
                  << (via_t.variation_ok ? "" : ", variation tail not settled") << "\n";
        if (disagreements > 0) rc = 1;
    });

    // ---------------------------------------------------------------- sumrule
    auto* sumrule =
        app.add_subcommand("sumrule", "verify a step-by-step sum rule numerically");
    SequenceFlags sumrule_seq;
    add_sequence_flags(sumrule, sumrule_seq);
    std::string s_rule = cfg_value(cfg, "rule", std::string("z"));
    int s_n = cfg_value(cfg, "n", 1);
    int s_N = cfg_value(cfg, "N", 2000);
    int s_grid = cfg_value(cfg, "grid", 2048);
    long s_depth_m = cfg_value(cfg, "depth_m", 65536L);
    double s_eig_tol = cfg_value(cfg, "eig_tol", 1e-12);
    double s_budget = cfg_value(cfg, "budget", 5e-3);
    std::string s_out = cfg_value(cfg, "out", std::string("sumrule.json"));
    sumrule->add_option("--rule", s_rule, "z | z1-plus | z1-minus");
    sumrule->add_option("--n", s_n, "rows stripped by the step");
    sumrule->add_option("--N", s_N, "truncation size for both spectra");
    sumrule->add_option("--grid", s_grid, "quadrature grid points");
    sumrule->add_option("--depth-m", s_depth_m, "continued-fraction depth");
    sumrule->add_option("--eig-tol", s_eig_tol, "eigenvalue bisection tolerance");
    sumrule->add_option("--budget", s_budget, "largest residual that passes");
    sumrule->add_option("--out", s_out, "JSON report path");
    sumrule->callback([&] {
        apply_threads(threads);
        CoefficientSequence seq = build_sequence(sumrule_seq, cfg);
        SumRuleConfig config;
        config.grid_count = s_grid;
        config.m_depth = s_depth_m;
        config.eig_tol = s_eig_tol;
        SumRuleReport report;
        if (s_rule == "z")
            report = step_sum_rule(seq, s_n, s_N, config);
        else if (s_rule == "z1-plus")
            report = one_sided_step_rule(seq, Side::plus, s_n, s_N, config);
        else if (s_rule == "z1-minus")
            report = one_sided_step_rule(seq, Side::minus, s_n, s_N, config);
        else
            throw CLI::ValidationError("--rule", "expected z, z1-plus or z1-minus");
        write_file(s_out, dump_json(sumrule_to_json(report)));
        bool pass;
        if (report.lhs_diverged || report.rhs_diverged) {
            pass = report.lhs_diverged == report.rhs_diverged;
            std::cout << "sumrule: diverged flags " << (pass ? "agree" : "DISAGREE")
                      << " (lhs " << report.lhs_diverged << ", rhs " << report.rhs_diverged
                      << ")\n";
        } else {
            pass = std::abs(report.residual) <= s_budget;
            std::cout << "sumrule: residual " << format_double(report.residual)
                      << (pass ? " within " : " EXCEEDS ") << format_double(s_budget)
                      << "\n";
        }
        if (!pass) rc = 1;
    });

    // ---------------------------------------------------------------- perturb
    auto* perturb = app.add_subcommand(
        "perturb", "first-order derivative checks and minoration audits");
    SequenceFlags perturb_seq;
    add_sequence_flags(perturb, perturb_seq);
    std::string p_kind = cfg_value(cfg, "perturbation", std::string("a-pair"));
    long p_site = cfg_value(cfg, "site", 300L);
    double p_c = cfg_value(cfg, "c", 1e-3);
    double p_d = cfg_value(cfg, "d", 1e-3);
    int p_k = cfg_value(cfg, "k", 2);
    std::string p_side = cfg_value(cfg, "side", std::string("plus"));
    int p_rank = cfg_value(cfg, "rank", 1);
    int p_N = cfg_value(cfg, "N", 2000);
    double p_fd = cfg_value(cfg, "fd_step", 1e-6);
    double p_budget = cfg_value(cfg, "budget", 1e-6);
    double p_delta = cfg_value(cfg, "delta", 0.01);
    double p_eig_tol = cfg_value(cfg, "eig_tol", 1e-12);
    bool p_audit = false;
    bool p_staged = false;
    double p_amp = cfg_value(cfg, "amp", -1.0);
    double p_eps = cfg_value(cfg, "eps", 1.0);
    long p_start = cfg_value(cfg, "start_site", 200L);
    int p_sites = cfg_value(cfg, "sites", 20);
    std::string p_out = cfg_value(cfg, "out", std::string("perturb.json"));
    perturb->add_option("--perturbation", p_kind,
                        "a-pair | a-run | a-pair-b | a-single | b-single");
    perturb->add_option("--site", p_site, "first touched coefficient index");
    perturb->add_option("--c", p_c, "decrease amount");
    perturb->add_option("--d", p_d, "second amount (pair partner or diagonal move)");
    perturb->add_option("--k", p_k, "pair spacing / run extent");
    perturb->add_option("--side", p_side, "plus | minus (derivative check)");
    perturb->add_option("--rank", p_rank, "eigenvalue rank (derivative check)");
    perturb->add_option("--N", p_N, "truncation size");
    perturb->add_option("--fd-step", p_fd, "centered difference step");
    perturb->add_option("--budget", p_budget, "largest |velocity - fd| that passes");
    perturb->add_flag("--audit", p_audit, "run the minoration audit instead");
    perturb->add_option("--delta", p_delta, "audit window half-width");
    perturb->add_option("--eig-tol", p_eig_tol, "eigenvalue bisection tolerance");
    perturb->add_flag("--staged", p_staged, "run the staged error-removal audit");
    perturb->add_option("--amp", p_amp, "staged: rigorous error bound (default: error amp)");
    perturb->add_option("--eps", p_eps, "staged: extra decay exponent of the margin");
    perturb->add_option("--start-site", p_start, "staged: first repaired site");
    perturb->add_option("--sites", p_sites, "staged: number of repaired sites");
    perturb->add_option("--out", p_out, "JSON report path");
    perturb->callback([&] {
        apply_threads(threads);
        CoefficientSequence seq = build_sequence(perturb_seq, cfg);
        ordered_json out;
        bool pass = false;
        if (p_staged) {
            CoefficientSequence target = seq;
            target.error_amp = 0.0;
            double amp = p_amp >= 0.0 ? p_amp : seq.error_amp;
            StagedAuditResult run = staged_error_audit(seq, target, amp, p_eps, p_delta,
                                                       p_N, p_start, p_sites);
            out["mode"] = "staged";
            out["site_count"] = p_sites;
            out["stage_count"] = run.stages.size();
            out["audit"] = audit_to_json(run.audit);
            pass = run.audit.verdict && run.audit.hypothesis_ok;
            std::cout << "perturb: staged audit over " << p_sites << " sites ("
                      << run.stages.size() << " stages) "
                      << (pass ? "passed" : "FAILED") << "\n";
        } else if (p_audit) {
            PerturbationSpec spec{perturbation_kind_from_name(p_kind), p_site, p_c, p_d,
                                  p_k};
            std::vector<PerturbationSpec> stages{spec};
            MinorationAudit audit = minoration_audit(seq, stages, p_delta, p_N, p_eig_tol);
            out["mode"] = "audit";
            out["audit"] = audit_to_json(audit);
            pass = audit.verdict;
            std::cout << "perturb: audit verdict " << (pass ? "true" : "FALSE")
                      << (audit.hypothesis_ok ? "" : " (hypothesis violated)") << "\n";
        } else {
            PerturbationSpec spec{perturbation_kind_from_name(p_kind), p_site, p_c, p_d,
                                  p_k};
            validate(spec);
            Side side = p_side == "minus" ? Side::minus : Side::plus;
            TruncatedJacobi J = truncate(seq, p_N);
            double velocity = dE_dt(J, spec, p_rank, side);
            auto rank_energy = [&](const CoefficientSequence& s) {
                EigenvalueSet set = eigenvalues_outside(truncate(s, p_N), 0.0, p_eig_tol);
                const std::vector<double>& list =
                    side == Side::plus ? set.above : set.below;
                if (static_cast<std::size_t>(p_rank) > list.size())
                    throw std::out_of_range("eigenvalue rank vanished under the move");
                return list[static_cast<std::size_t>(p_rank - 1)];
            };
            double fd = (rank_energy(apply_direction(seq, spec, p_fd)) -
                         rank_energy(apply_direction(seq, spec, -p_fd))) /
                        (2.0 * p_fd);
            out["mode"] = "derivative";
            out["velocity"] = velocity;
            out["finite_difference"] = fd;
            out["difference"] = velocity - fd;
            pass = std::abs(velocity - fd) <= p_budget;
            std::cout << "perturb: velocity " << format_double(velocity) << " vs fd "
                      << format_double(fd) << (pass ? " agree" : " DISAGREE") << "\n";
        }
        write_file(p_out, dump_json(out));
        if (!pass) rc = 1;
    });

    // ------------------------------------------------------------------ phase
    auto* phase =
        app.add_subcommand("phase", "scan the (alpha, beta) plane and classify edges");
    double ph_amin = cfg_value(cfg, "alpha_min", -1.0);
    double ph_amax = cfg_value(cfg, "alpha_max", 1.0);
    int ph_asteps = cfg_value(cfg, "alpha_steps", 9);
    double ph_bmin = cfg_value(cfg, "beta_min", -1.0);
    double ph_bmax = cfg_value(cfg, "beta_max", 1.0);
    int ph_bsteps = cfg_value(cfg, "beta_steps", 9);
    double ph_gamma = cfg_value(cfg, "gamma", 1.0);
    int ph_grid = cfg_value(cfg, "grid", 2048);
    long ph_depth = cfg_value(cfg, "depth_m", 65536L);
    std::string ph_out = cfg_value(cfg, "out", std::string("phase.csv"));
    phase->add_option("--alpha-min", ph_amin);
    phase->add_option("--alpha-max", ph_amax);
    phase->add_option("--alpha-steps", ph_asteps);
    phase->add_option("--beta-min", ph_bmin);
    phase->add_option("--beta-max", ph_bmax);
    phase->add_option("--beta-steps", ph_bsteps);
    phase->add_option("--gamma", ph_gamma, "decay exponent for every cell");
    phase->add_option("--grid", ph_grid, "quadrature grid points");
    phase->add_option("--depth-m", ph_depth, "continued-fraction depth");
    phase->add_option("--out", ph_out, "CSV output path");
    phase->callback([&] {
        apply_threads(threads);
        if (ph_asteps < 1 || ph_bsteps < 1)
            throw CLI::ValidationError("--alpha-steps", "steps must be >= 1");
        auto axis = [](double lo, double hi, int steps) {
            std::vector<double> out;
            for (int i = 0; i < steps; ++i)
                out.push_back(steps == 1 ? lo
                                         : lo + (hi - lo) * static_cast<double>(i) /
                                                    static_cast<double>(steps - 1));
            return out;
        };
        std::vector<double> alphas = axis(ph_amin, ph_amax, ph_asteps);
        std::vector<double> betas = axis(ph_bmin, ph_bmax, ph_bsteps);
        double step = ph_asteps > 1 ? (ph_amax - ph_amin) / (ph_asteps - 1)
                                    : (ph_bmax - ph_bmin) / std::max(ph_bsteps - 1, 1);

        struct Cell {
            PhaseClass predicted;
            EdgeClassification measured;
            bool excluded;
        };
        std::vector<Cell> cells(alphas.size() * betas.size());
        ClassifyConfig config;
        config.grid_count = ph_grid;
        config.depth = ph_depth;
        parallel_for(cells.size(), [&](std::size_t idx) {
            double alpha = alphas[idx / betas.size()];
            double beta = betas[idx % betas.size()];
            CoefficientSequence seq = coulomb_sequence(alpha, beta, ph_gamma);
            // Keep the matrix well defined when alpha drives a_1 near zero;
            // a single-entry change never moves the asymptotic class.
            if (1.0 + alpha < 0.5) seq = with_overrides(seq, {{1, {0.5, beta}}});
            Cell cell;
            cell.predicted = askey_classify(alpha, beta);
            cell.measured = divergence_classify(seq, config);
            double dist = std::min(std::abs(2.0 * alpha - beta),
                                   std::abs(2.0 * alpha + beta)) /
                          std::sqrt(5.0);
            cell.excluded = dist < step;
            cells[idx] = cell;
        });

        std::string csv =
            "alpha,beta,predicted,measured,at_plus2,at_minus2,slope_plus,slope_minus,"
            "excluded\n";
        int included = 0, matched = 0;
        for (std::size_t idx = 0; idx < cells.size(); ++idx) {
            const Cell& cell = cells[idx];
            const char* measured =
                phase_from_edges(cell.measured.at_plus2, cell.measured.at_minus2);
            csv += format_double(alphas[idx / betas.size()]);
            csv += ',';
            csv += format_double(betas[idx % betas.size()]);
            csv += ',';
            csv += phase_class_name(cell.predicted);
            csv += ',';
            csv += measured;
            csv += ',';
            csv += edge_verdict_name(cell.measured.at_plus2);
            csv += ',';
            csv += edge_verdict_name(cell.measured.at_minus2);
            csv += ',';
            csv += format_double(cell.measured.slope_plus);
            csv += ',';
            csv += format_double(cell.measured.slope_minus);
            csv += ',';
            csv += cell.excluded ? '1' : '0';
            csv += '\n';
            if (!cell.excluded) {
                ++included;
                if (measured == std::string(phase_class_name(cell.predicted))) ++matched;
            }
        }
        write_file(ph_out, csv);
        double pct = included ? 100.0 * matched / included : 100.0;
        std::cout << "phase: " << matched << "/" << included
                  << " included cells match predictions ("
                  << (cells.size() - static_cast<std::size_t>(included))
                  << " excluded near the critical lines), " << pct << "%\n";
        if (matched != included) rc = 1;
    });

    // ----------------------------------------------------------------- report
    auto* report = app.add_subcommand(
        "report", "one-stop JSON summary: admissibility, density, integrals, spectrum");
    SequenceFlags report_seq;
    add_sequence_flags(report, report_seq);
    int r_N = cfg_value(cfg, "N", 2000);
    long r_horizon = cfg_value(cfg, "horizon", 4000L);
    int r_grid = cfg_value(cfg, "grid", 2048);
    long r_depth_m = cfg_value(cfg, "depth_m", 65536L);
    std::string r_out = cfg_value(cfg, "out", std::string("report.json"));
    report->add_option("--N", r_N, "truncation size for the spectrum census");
    report->add_option("--horizon", r_horizon, "admissibility horizon");
    report->add_option("--grid", r_grid, "quadrature grid points");
    report->add_option("--depth-m", r_depth_m, "continued-fraction depth");
    report->add_option("--out", r_out, "JSON output path");
    report->callback([&] {
        apply_threads(threads);
        CoefficientSequence seq = build_sequence(report_seq, cfg);
        ordered_json out;
        out["sequence"] = sequence_to_json(seq);

        AdmissibilityReport adm = admissibility(seq, r_horizon);
        ordered_json aj;
        aj["is_admissible_finite"] = adm.is_admissible_finite;
        aj["horizon"] = adm.horizon;
        aj["floor_index"] = adm.floor_index;
        aj["first_violation"] = adm.first_violation;
        aj["weighted_sum"] = adm.weighted_sum;
        if (adm.tail_estimate)
            aj["tail_estimate"] = *adm.tail_estimate;
        else
            aj["tail_estimate"] = nullptr;
        out["admissibility"] = std::move(aj);

        std::vector<double> grid = theta_grid(r_grid);
        DensityEstimate density = density_via_m(seq, grid, r_depth_m);
        ordered_json integrals;
        bool invariants_ok = true;
        for (SzegoKind kind : {SzegoKind::Z, SzegoKind::Z1_plus, SzegoKind::Z1_minus,
                               SzegoKind::Z2_minus}) {
            SzegoValue value = szego_integral(density, kind);
            if (kind == SzegoKind::Z && !value.diverged &&
                value.value < -0.5 * std::log(2.0) - 1e-6)
                invariants_ok = false;
            if (kind == SzegoKind::Z2_minus && !value.diverged && value.value < -1e-6)
                invariants_ok = false;
            integrals[szego_to_json(value)["kind"].get<std::string>()] =
                szego_to_json(value);
        }
        out["szego"] = std::move(integrals);

        EdgeClassification cls = divergence_classify(seq, {r_grid, r_depth_m, {}});
        ordered_json cj;
        cj["at_plus2"] = edge_verdict_name(cls.at_plus2);
        cj["at_minus2"] = edge_verdict_name(cls.at_minus2);
        cj["slope_plus"] = cls.slope_plus;
        cj["slope_minus"] = cls.slope_minus;
        out["classification"] = std::move(cj);

        out["eigenvalues"] = eigenvalues_to_json(eigenvalues_outside(truncate(seq, r_N)));
        write_file(r_out, dump_json(out));
        std::cout << "report: written to " << r_out
                  << (invariants_ok ? "" : "; LOWER-BOUND INVARIANT VIOLATED") << "\n";
        if (!invariants_ok) rc = 1;
    });

    // Let app-level options (--config, --threads) appear after the subcommand
    // name as well.
    for (CLI::App* sub : {density, sumrule, perturb, phase, report}) sub->fallthrough();

    try {
        CLI11_PARSE(app, argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "szegolab: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
