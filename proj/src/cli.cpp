#include "qdm/cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "qdm/disjunction.hpp"
#include "qdm/errors.hpp"
#include "qdm/experiment.hpp"
#include "qdm/kolmogorov.hpp"
#include "qdm/report.hpp"
#include "qdm/scenarios.hpp"
#include "qdm/solver.hpp"

namespace qdm::cli {

namespace {

struct Common {
    std::string format = "table";
    std::string out_path;
};

void add_common(CLI::App *cmd, Common &c) {
    cmd->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    cmd->add_option("--out", c.out_path, "Write the report to this file instead of stdout");
}

void add_fit_options(CLI::App *cmd, FitOptions &o) {
    cmd->add_option("--seed", o.seed, "Multistart seed")->capture_default_str();
    cmd->add_option("--starts", o.starts, "Number of starts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--tol", o.tol, "Residual and orthogonality tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

std::string pattern_text(const PreferencePattern &p) {
    std::string s;
    for (const auto &req : p.pairs) {
        if (!s.empty()) {
            s += " and ";
        }
        s += req.winner == Winner::First ? req.first + ">" + req.second
                                         : req.second + ">" + req.first;
    }
    return s;
}

Report check_classical(const std::string &path) {
    const ExperimentSpec spec = parse_experiment(path);
    const StateManifold m = spec.manifold();
    const UtilityFunction u = spec.utility();

    Report r;
    r.command = "check-classical";
    r.inputs.emplace_back("spec", path);
    r.inputs.emplace_back("name", spec.name);

    PreferencePattern pattern;
    for (const auto &o : spec.observations) {
        if (o.rate_first == 0.5) {
            r.info("no majority: " + o.first + " vs " + o.second, o.rate_first,
                   "left out of the pattern");
            continue;
        }
        pattern.pairs.push_back(
            {o.first, o.second, o.rate_first > 0.5 ? Winner::First : Winner::Second});
    }
    const ClassicalReport cls = classical_pattern_feasible(m, spec.acts, u, pattern);
    std::string note = "method " + cls.method;
    if (cls.certificate) {
        note += "; common factor " + cls.certificate->expression;
    }
    r.flag("classical feasible: " + pattern_text(pattern), cls.feasible, note);
    if (cls.witness) {
        const auto labels = m.family().labels();
        for (std::size_t i = 0; i < labels.size(); ++i) {
            r.info("witness p_" + labels[i], cls.witness->prior[i]);
        }
        const auto margins = classical_margins(m, spec.acts, u, pattern, *cls.witness);
        for (std::size_t k = 0; k < margins.size(); ++k) {
            auto &row = r.info("witness margin " + std::to_string(k + 1), margins[k]);
            row.pass = margins[k] > kStrictMargin;
        }
        r.gaps = cls.witness->gaps;
    }
    return r;
}

Report fit_command(const std::string &path, const FitOptions &options) {
    const ExperimentSpec spec = parse_experiment(path);
    const FitProblem problem =
        make_choice_fit_problem(spec.manifold(), spec.acts, spec.utility(), spec.observations,
                                spec.orthogonal_slots, options);
    const FitResult res = fit(problem);
    const CandidateReport rep = verify_candidate(res.states, res.gaps, problem);

    Report r;
    r.command = "fit";
    r.inputs.emplace_back("spec", path);
    r.inputs.emplace_back("name", spec.name);
    r.inputs.emplace_back("seed", static_cast<double>(options.seed));
    r.inputs.emplace_back("starts", static_cast<double>(options.starts));
    r.inputs.emplace_back("tol", options.tol);

    r.flag("converged", res.converged,
           "start " + std::to_string(res.best_start) + ", " + std::to_string(res.iterations) +
               " iterations");
    for (const auto &t : rep.targets) {
        r.compare("target " + t.slot + " " + t.label, t.value, t.target, options.tol);
    }
    r.bound("residual norm", rep.residual_norm, options.tol);
    for (const auto &p : rep.pairs) {
        r.bound("overlap " + p.first + "," + p.second, p.overlap, options.tol);
    }
    r.bound("manifold violation", rep.max_manifold_violation, kManifoldTolerance);
    for (const auto &[slot, v] : res.states) {
        r.add_state(slot, v);
    }
    r.gaps = res.gaps;
    return r;
}

Report disjunction_command(const DisjunctionData &d) {
    Report r;
    r.command = "disjunction";
    r.inputs.emplace_back("p_a", d.mu_a);
    r.inputs.emplace_back("p_b", d.mu_b);
    r.inputs.emplace_back("p_or", d.mu_a_or_b);
    d.validate();

    const auto tp = total_probability_feasible(d.mu_a, d.mu_b, d.mu_a_or_b);
    std::optional<DisjunctionModel> built;
    try {
        built = build_disjunction_model(d);
    } catch (const NoQuantumRepresentation &e) {
        r.flag("quantum representation", false, e.what());
        r.info("classical total probability feasible", tp.feasible ? 1 : 0);
        return r;
    }
    const DisjunctionModel &model = *built;
    r.flag("quantum representation", true);
    auto &beta = r.info("beta_deg", rad_to_deg(model.beta));
    if (model.beta_arbitrary) {
        beta.note = "arbitrary, set to 0";
    }
    r.info("gamma_deg", rad_to_deg(model.gamma));
    r.info("a", model.a_coeff);
    r.info("b", model.b_coeff);
    r.info("interference", interference_term(model), "Re<A|M|B>");
    r.compare("predicted_disjunction", predicted_disjunction(model), d.mu_a_or_b, 1e-9);
    r.bound("orthogonality A,B", std::abs(inner(model.vector_a, model.vector_b)), 1e-9);
    r.info("classical total probability feasible", tp.feasible ? 1 : 0,
           "interval [" + format_number(tp.lo) + ", " + format_number(tp.hi) + "]");
    r.add_state("A", model.vector_a);
    r.add_state("B", model.vector_b);
    return r;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Quantum decision models: disjunction effect, Ellsberg and Machina paradoxes",
                 "qdm"};
    app.require_subcommand(1);

    Common common;
    FitOptions fit_options;
    VerifyOptions verify_options;
    DisjunctionData data;
    std::string spec_path;
    std::string scenario_name;

    auto *cc = app.add_subcommand("check-classical", "Classical consistency of the majority pattern");
    cc->add_option("spec", spec_path, "Experiment JSON")->required();
    add_common(cc, common);

    auto *ft = app.add_subcommand("fit", "Fit orthogonal states and utility gaps");
    ft->add_option("spec", spec_path, "Experiment JSON")->required();
    add_fit_options(ft, fit_options);
    add_common(ft, common);

    auto *dj = app.add_subcommand("disjunction", "Build the three-dimensional disjunction model");
    dj->add_option("--p-a", data.mu_a, "P(yes | A)")->required();
    dj->add_option("--p-b", data.mu_b, "P(yes | B)")->required();
    dj->add_option("--p-or", data.mu_a_or_b, "P(yes | A or B)")->required();
    add_common(dj, common);

    auto *sc = app.add_subcommand("scenario", "Verify a built-in dataset");
    sc->add_option("name", scenario_name, "Scenario name")
        ->required()
        ->check(CLI::IsMember(builtin_names()));
    sc->add_option("--published-tol", verify_options.published_tol,
                   "Tolerance for targets of published states")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    add_fit_options(sc, verify_options.fit);
    add_common(sc, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitInput;
    }

    Report report;
    try {
        if (*cc) {
            report = check_classical(spec_path);
        } else if (*ft) {
            report = fit_command(spec_path, fit_options);
        } else if (*dj) {
            report = disjunction_command(data);
        } else {
            report = verify(scenario_name, verify_options);
        }
    } catch (const ParseError &e) {
        err << "error: " << spec_path << ":" << e.line() << ":" << e.column() << ": " << e.what()
            << "\n";
        return kExitInput;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    const std::string text = common.format == "json" ? to_json(report) : to_table(report);
    if (common.out_path.empty()) {
        out << text;
    } else {
        std::ofstream file(common.out_path, std::ios::binary | std::ios::trunc);
        file << text;
        if (!file) {
            err << "error: cannot write '" << common.out_path << "'\n";
            return kExitInput;
        }
    }
    return report.all_pass() ? kExitOk : kExitFailed;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    std::vector<const char *> argv{"qdm"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace qdm::cli
