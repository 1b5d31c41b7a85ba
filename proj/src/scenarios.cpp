#include "qdm/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qdm/errors.hpp"
#include "qdm/kolmogorov.hpp"

namespace qdm {

int RawCounts::choosing(const std::string &act) const {
    int n = 0;
    for (const auto &p : patterns) {
        if (p.first == act || p.second == act) {
            n += p.count;
        }
    }
    return n;
}

int RawCounts::matching(const std::vector<std::pair<std::string, std::string>> &which) const {
    int n = 0;
    for (const auto &p : patterns) {
        for (const auto &[a, b] : which) {
            if (p.first == a && p.second == b) {
                n += p.count;
            }
        }
    }
    return n;
}

const Act &ActTable::act(const std::string &label) const {
    for (const auto &a : acts) {
        if (a.label == label) {
            return a;
        }
    }
    throw UnknownEvent("no act '" + label + "'");
}

namespace {

constexpr double kNormTolerance = 0.01;
constexpr double kSymmetryTolerance = 1e-12;

Act make_act(const std::string &label, const std::vector<std::string> &events,
             const std::vector<double> &payoffs) {
    Act a{label, {}};
    for (std::size_t i = 0; i < events.size(); ++i) {
        a.payoffs[events[i]] = payoffs[i];
    }
    return a;
}

StateVector published(std::initializer_list<std::pair<double, double>> polar_deg) {
    return StateVector::from_polar_deg(polar_deg, NormTolerance::Published);
}

Scenario ellsberg3() {
    const std::vector<std::string> ev{"R", "Y", "B"};
    StateManifold m(SpectralFamily::elementary(ev), {{{"R"}, 1.0 / 3.0}, {{"Y", "B"}, 2.0 / 3.0}});
    ActTable t{std::move(m),
               {make_act("f1", ev, {100, 0, 0}), make_act("f2", ev, {0, 0, 100}),
                make_act("f3", ev, {100, 100, 0}), make_act("f4", ev, {0, 100, 100})},
               UtilityFunction({{0.0, 0.0}}, {{"du", 0.0, 100.0}}),
               {{"f1", "f2", 0.68}, {"f4", "f3", 0.69}},
               RawCounts{{{"f1", "f4", 34}, {"f2", "f3", 12}, {"f2", "f4", 7}, {"f1", "f3", 6}},
                         57},
               0.78,
               {},
               {{"du", 2.4}}};
    const double r3 = 1.0 / std::sqrt(3.0);
    const double r23 = std::sqrt(2.0 / 3.0);
    t.named_states.emplace("p0", StateVector({r3, r3, r3}));
    t.named_states.emplace("p_RY", StateVector({r3, r23, 0.0}));
    t.named_states.emplace("p_RB", StateVector({r3, 0.0, r23}));
    t.named_states.emplace("w1", published({{r3, 0.0}, {0.787, 28.0}, {0.216, 9.3}}));
    t.named_states.emplace("w2", published({{r3, 0.0}, {0.206, 208.0}, {0.790, 189.3}}));
    return {"ellsberg3", std::move(t), std::nullopt};
}

ActTable machina_base(std::vector<Act> acts, UtilityFunction u,
                      std::vector<ObservedChoice> observed, RawCounts counts, double inversion) {
    const std::vector<std::string> ev{"R", "Y", "B", "G"};
    StateManifold m(SpectralFamily::elementary(ev), {{{"R", "Y"}, 0.5}, {{"B", "G"}, 0.5}});
    ActTable t{std::move(m), std::move(acts), std::move(u), std::move(observed),
               std::move(counts), inversion, {}, {{"du", 1.636}}};
    const double h = std::sqrt(0.5);
    t.named_states.emplace("p_YG", StateVector({0.0, h, 0.0, h}));
    t.named_states.emplace("p_RB", StateVector({h, 0.0, h, 0.0}));
    return t;
}

Scenario machina_lower() {
    const std::vector<std::string> ev{"R", "Y", "B", "G"};
    ActTable t = machina_base(
        {make_act("f1", ev, {0, 50, 25, 25}), make_act("f2", ev, {0, 25, 50, 25}),
         make_act("f3", ev, {25, 50, 25, 0}), make_act("f4", ev, {25, 25, 50, 0})},
        UtilityFunction({{0.0, 0.0}, {25.0, 1.0}}, {{"du", 25.0, 50.0}}),
        {{"f1", "f2", 0.59}, {"f4", "f3", 0.63}},
        RawCounts{{{"f1", "f3", 11}, {"f1", "f4", 44}, {"f2", "f4", 15}, {"f2", "f3", 24}}, 94},
        0.72);
    t.named_states.emplace("w1", published({{0.0, 0.0}, {0.71, 1.6}, {0.38, 1.0}, {0.60, 185.2}}));
    t.named_states.emplace("w2",
                           published({{0.71, 0.7}, {0.05, 191.8}, {0.62, 2.9}, {0.34, 7.4}}));
    return {"machina-lower", std::move(t), std::nullopt};
}

Scenario machina_upper() {
    const std::vector<std::string> ev{"R", "Y", "B", "G"};
    ActTable t = machina_base(
        {make_act("f1", ev, {50, 50, 25, 75}), make_act("f2", ev, {50, 25, 50, 75}),
         make_act("f3", ev, {75, 50, 25, 50}), make_act("f4", ev, {75, 25, 50, 50})},
        UtilityFunction({{25.0, 0.0}}, {{"du", 25.0, 50.0}, {"du_hi", 50.0, 75.0}}),
        {{"f1", "f2", 0.59}, {"f4", "f3", 0.56}},
        RawCounts{{{"f1", "f3", 8}, {"f1", "f4", 47}, {"f2", "f4", 6}, {"f2", "f3", 33}}, 94},
        0.85);
    t.named_states.emplace("w1",
                           published({{0.02, 0.3}, {0.71, 11.6}, {0.38, 1.3}, {0.60, 196.5}}));
    t.named_states.emplace("w2", published({{0.71, 0.7}, {0.0, 0.0}, {0.59, 1.7}, {0.39, 16.9}}));
    return {"machina-upper", std::move(t), std::nullopt};
}

Scenario hawaii() {
    return {"hawaii", std::nullopt,
            PublishedDisjunction{{0.54, 0.57, 0.32}, 121.90, {0.73, 0.0, 0.68},
                                 {0.61, 0.45, -0.66}}};
}

Scenario two_stage_gamble() {
    return {"two-stage-gamble", std::nullopt,
            PublishedDisjunction{{0.69, 0.59, 0.36}, 141.76, {0.83, 0.0, 0.56},
                                 {0.43, 0.64, -0.64}}};
}

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

/// Expected utility of an act as a linear form in the free gaps.
LinearForm expected_form(const StateVector &v, const Act &act, const UtilityFunction &u,
                         const SpectralFamily &family) {
    const OperatorForm op = act_operator_form(act, u, family);
    LinearForm total;
    for (std::size_t i = 0; i < v.dimension(); ++i) {
        LinearForm term = op.entries[i];
        const double p = std::norm(v[i]);
        term.constant *= p;
        for (auto &[name, c] : term.coeffs) {
            c *= p;
        }
        total += term;
    }
    return total;
}

double max_abs(const LinearForm &f) {
    double m = std::abs(f.constant);
    for (const auto &[name, c] : f.coeffs) {
        m = std::max(m, std::abs(c));
    }
    return m;
}

PreferencePattern pattern_from(const std::vector<ObservedChoice> &observed, bool flip_last) {
    PreferencePattern p;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        const auto &o = observed[k];
        bool first_wins = o.rate_first > 0.5;
        if (flip_last && k + 1 == observed.size()) {
            first_wins = !first_wins;
        }
        p.pairs.push_back({o.first, o.second, first_wins ? Winner::First : Winner::Second});
    }
    return p;
}

std::string describe(const PreferencePattern &p) {
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

void verify_table(const Scenario &sc, const VerifyOptions &opt, Report &r) {
    const ActTable &t = *sc.table;
    const double overlap_tol = sc.name == "ellsberg3" ? 0.01 : 0.02;

    const PreferencePattern majority = pattern_from(t.observed, false);
    const ClassicalReport cls = classical_pattern_feasible(t.manifold, t.acts, t.utility, majority);
    r.flag("classical infeasible: " + describe(majority), !cls.feasible,
           cls.certificate ? "common factor " + cls.certificate->expression : cls.method);

    if (sc.name == "ellsberg3") {
        const PreferencePattern consistent = pattern_from(t.observed, true);
        const ClassicalReport alt =
            classical_pattern_feasible(t.manifold, t.acts, t.utility, consistent);
        double least = -1.0;
        if (alt.witness) {
            const auto margins =
                classical_margins(t.manifold, t.acts, t.utility, consistent, *alt.witness);
            least = *std::min_element(margins.begin(), margins.end());
        }
        auto &row = r.info("classical feasible: " + describe(consistent), least,
                           "smallest margin at the witness");
        row.pass = alt.feasible && least > kStrictMargin;
    }

    for (const auto &[name, v] : t.named_states) {
        r.bound("norm: " + name, v.norm_squared() - 1.0, kNormTolerance);
        r.bound("manifold: " + name, t.manifold.violation(v), kNormTolerance);
    }

    FitProblem problem =
        make_choice_fit_problem(t.manifold, t.acts, t.utility, t.observed, true, opt.fit);
    std::map<std::string, double> published_fit_gaps;
    for (const auto &g : problem.free_gaps) {
        published_fit_gaps[g.name] = t.published_gaps.at(g.name);
    }
    std::map<std::string, StateVector> published_states;
    for (const auto &slot : problem.slots) {
        published_states.emplace(slot, t.named_states.at(slot));
    }
    const CandidateReport published = verify_candidate(published_states, published_fit_gaps, problem);
    for (const auto &p : published.pairs) {
        r.bound("published overlap: " + p.first + "," + p.second, p.overlap, overlap_tol);
    }
    for (const auto &c : published.targets) {
        std::string gaps;
        for (const auto &[name, value] : published_fit_gaps) {
            gaps += (gaps.empty() ? "" : ", ") + name + " = " + format_number(value);
        }
        r.compare("published target: " + c.slot + " " + c.label, c.value, c.target, opt.published_tol,
                  gaps);
    }

    if (t.named_states.count("p_YG") != 0 && t.named_states.count("p_RB") != 0) {
        const StateVector &yg = t.named_states.at("p_YG");
        const StateVector &rb = t.named_states.at("p_RB");
        const auto &fam = t.family();
        const std::pair<const char *, const char *> sym[] = {{"f1", "f4"}, {"f2", "f3"}};
        for (const auto &[a, b] : sym) {
            const LinearForm diff = expected_form(yg, t.act(a), t.utility, fam) -
                                    expected_form(rb, t.act(b), t.utility, fam);
            r.bound(std::string("symmetry: W_YG(") + a + ") = W_RB(" + b + ")", max_abs(diff),
                    kSymmetryTolerance);
        }
    }

    for (const auto &a : t.acts) {
        r.info("unambiguous: " + a.label, is_unambiguous_act(a, t.utility, t.manifold) ? 1 : 0);
    }

    const FitResult fitted = fit(problem);
    r.flag("fit converged", fitted.converged,
           "start " + std::to_string(fitted.best_start) + " of " +
               std::to_string(fitted.starts_used));
    r.bound("fit residual norm", fitted.residual_norm, opt.fit.tol);
    r.bound("fit orthogonality", fitted.orthogonality, opt.fit.tol);
    r.bound("fit manifold violation", fitted.manifold_violation, kManifoldTolerance);
    for (const auto &[name, value] : fitted.gaps) {
        auto &row = r.info("fit gap: " + name, value, "positive and finite");
        row.pass = std::isfinite(value) && value > 0.0;
    }
    for (const auto &[slot, v] : fitted.states) {
        r.add_state(slot, v);
    }
    r.gaps = fitted.gaps;

    if (t.raw_counts) {
        const RawCounts &c = *t.raw_counts;
        int sum = 0;
        for (const auto &p : c.patterns) {
            sum += p.count;
        }
        if (sum == c.total) {
            r.compare("counts: sum of patterns", sum, c.total, 0.0);
        } else {
            auto &row = r.info("counts: sum of patterns", sum, "differs from the stated total");
            row.expected = c.total;
        }
        std::vector<std::pair<std::string, std::string>> inversion;
        const auto &req = majority.pairs;
        if (req.size() == 2) {
            auto win = [](const PreferencePattern::Requirement &q) {
                return q.winner == Winner::First ? q.first : q.second;
            };
            auto lose = [](const PreferencePattern::Requirement &q) {
                return q.winner == Winner::First ? q.second : q.first;
            };
            inversion = {{win(req[0]), win(req[1])}, {lose(req[0]), lose(req[1])}};
        }
        std::vector<int> denominators{c.total};
        if (sum != c.total) {
            denominators.push_back(sum);
        }
        for (const int d : denominators) {
            const std::string over = d == c.total ? "" : " (over pattern sum)";
            auto ratio_row = [&](const std::string &check, int n, double stated) {
                const double ratio = static_cast<double>(n) / d;
                const std::string frac = std::to_string(n) + "/" + std::to_string(d);
                if (std::abs(ratio - stated) <= 0.005) {
                    r.compare(check + over, ratio, stated, 0.005, frac);
                } else {
                    auto &row = r.info(check + over, ratio, frac + " differs from the stated value");
                    row.expected = stated;
                }
            };
            for (const auto &o : t.observed) {
                ratio_row("counts: share " + o.first + " over " + o.second, c.choosing(o.first),
                          o.rate_first);
            }
            ratio_row("counts: inversion share", c.matching(inversion), t.stated_inversion);
        }
    }
}

void verify_disjunction(const PublishedDisjunction &pub, Report &r) {
    const DisjunctionModel model = build_disjunction_model(pub.data);
    r.compare("beta_deg", rad_to_deg(model.beta), pub.beta_deg, 0.05);
    r.info("gamma_deg", rad_to_deg(model.gamma));

    auto components = [&](const std::string &name, const StateVector &v,
                          const std::vector<double> &printed, double global_deg) {
        for (std::size_t i = 0; i < printed.size(); ++i) {
            const std::string idx = name + "[" + std::to_string(i) + "]";
            r.compare(idx + " modulus", std::abs(v[i]), std::abs(printed[i]), 0.01,
                      "printed " + fixed(printed[i], 2));
            if (printed[i] == 0.0) {
                continue;
            }
            const double want = deg_to_rad(global_deg + (printed[i] < 0 ? 180.0 : 0.0));
            r.bound(idx + " phase_deg offset", rad_to_deg(phase_difference(std::arg(v[i]), want)),
                    0.05);
        }
    };
    components("A", model.vector_a, pub.vector_a, 0.0);
    components("B", model.vector_b, pub.vector_b, pub.beta_deg);

    r.bound("orthogonality A,B", std::abs(inner(model.vector_a, model.vector_b)), 1e-9);
    r.info("interference", interference_term(model), "Re<A|M|B>");
    r.bound("interference closed form - direct",
            interference_closed_form(model) - interference_direct(model), 1e-9);
    r.compare("reconstruction", predicted_disjunction(model), pub.data.mu_a_or_b, 1e-9);

    const auto tp =
        total_probability_feasible(pub.data.mu_a, pub.data.mu_b, pub.data.mu_a_or_b);
    r.flag("classical total probability infeasible", !tp.feasible,
           format_number(tp.p_total) + " outside [" + format_number(tp.lo) + ", " +
               format_number(tp.hi) + "]");

    r.add_state("A", model.vector_a);
    r.add_state("B", model.vector_b);
}

} // namespace

std::vector<std::string> builtin_names() {
    return {"ellsberg3", "machina-lower", "machina-upper", "hawaii", "two-stage-gamble"};
}

Scenario builtin(const std::string &name) {
    if (name == "ellsberg3") {
        return ellsberg3();
    }
    if (name == "machina-lower") {
        return machina_lower();
    }
    if (name == "machina-upper") {
        return machina_upper();
    }
    if (name == "hawaii") {
        return hawaii();
    }
    if (name == "two-stage-gamble") {
        return two_stage_gamble();
    }
    throw UnknownScenario("unknown scenario '" + name + "'");
}

Report verify(const std::string &name, const VerifyOptions &options) {
    const Scenario sc = builtin(name);
    Report r;
    r.command = "scenario";
    r.inputs.emplace_back("name", name);
    if (sc.table) {
        r.inputs.emplace_back("published_tol", options.published_tol);
        r.inputs.emplace_back("seed", static_cast<double>(options.fit.seed));
        r.inputs.emplace_back("starts", static_cast<double>(options.fit.starts));
        r.inputs.emplace_back("tol", options.fit.tol);
        verify_table(sc, options, r);
    } else {
        verify_disjunction(*sc.disjunction, r);
    }
    return r;
}

} // namespace qdm
