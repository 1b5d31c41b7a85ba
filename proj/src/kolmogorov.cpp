#include "qdm/kolmogorov.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "qdm/errors.hpp"

namespace qdm {

namespace {

constexpr double kCollinearTolerance = 1e-12;
constexpr double kMaxGridPoints = 5e7;

const Act &find_act(const std::vector<Act> &acts, const std::string &label) {
    for (const auto &a : acts) {
        if (a.label == label) {
            return a;
        }
    }
    throw MalformedPattern("pattern references unknown act '" + label + "'");
}

/// Per requirement, per event: u(winner payoff) - u(loser payoff).
std::vector<std::vector<LinearForm>> margin_forms(const StateManifold &m,
                                                  const std::vector<Act> &acts,
                                                  const UtilityFunction &u,
                                                  const PreferencePattern &pattern) {
    if (pattern.pairs.empty()) {
        throw MalformedPattern("pattern has no requirements");
    }
    const auto &family = m.family();
    std::vector<std::vector<LinearForm>> out;
    for (const auto &req : pattern.pairs) {
        const Act &first = find_act(acts, req.first);
        const Act &second = find_act(acts, req.second);
        const Act &win = req.winner == Winner::First ? first : second;
        const Act &lose = req.winner == Winner::First ? second : first;
        std::vector<LinearForm> row(family.size());
        for (std::size_t e = 0; e < family.size(); ++e) {
            const auto &label = family.event(e).label;
            const double xw = win.payoff(label);
            const double xl = lose.payoff(label);
            if (xw == xl) {
                continue;
            }
            auto fw = u.form(xw);
            auto fl = u.form(xl);
            if (!fw || !fl) {
                throw UnresolvedUtility("payoff outside the utility support in act '" +
                                        win.label + "' or '" + lose.label + "'");
            }
            row[e] = *fw - *fl;
        }
        out.push_back(std::move(row));
    }
    return out;
}

/// Linear form in the prior if the margin is (single gap) x (form), else nullopt.
std::optional<std::vector<double>> factor_margin(const std::vector<LinearForm> &row) {
    std::set<std::string> gaps;
    bool constants = false;
    for (const auto &f : row) {
        for (const auto &[name, c] : f.coeffs) {
            if (c != 0.0) {
                gaps.insert(name);
            }
        }
        constants = constants || f.constant != 0.0;
    }
    std::vector<double> coeffs(row.size(), 0.0);
    if (gaps.empty()) {
        for (std::size_t e = 0; e < row.size(); ++e) {
            coeffs[e] = row[e].constant;
        }
        return coeffs;
    }
    if (gaps.size() > 1 || constants) {
        return std::nullopt;
    }
    const std::string &g = *gaps.begin();
    for (std::size_t e = 0; e < row.size(); ++e) {
        auto it = row[e].coeffs.find(g);
        coeffs[e] = it == row[e].coeffs.end() ? 0.0 : it->second;
    }
    return coeffs;
}

double max_abs(const std::vector<double> &v) {
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

/// c > 0 with a = c * b, c < 0 likewise, or 0 when not collinear.
double collinearity(const std::vector<double> &a, const std::vector<double> &b) {
    const double na = max_abs(a);
    const double nb = max_abs(b);
    if (na == 0.0 || nb == 0.0) {
        return 0.0;
    }
    std::size_t pivot = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (std::abs(b[i]) > std::abs(b[pivot])) {
            pivot = i;
        }
    }
    const double c = a[pivot] / b[pivot];
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i] - c * b[i]) > kCollinearTolerance * na) {
            return 0.0;
        }
    }
    return c;
}

std::vector<std::string> referenced_gaps(const std::vector<std::vector<LinearForm>> &forms) {
    std::set<std::string> names;
    for (const auto &row : forms) {
        for (const auto &f : row) {
            for (const auto &[name, c] : f.coeffs) {
                if (c != 0.0) {
                    names.insert(name);
                }
            }
        }
    }
    return {names.begin(), names.end()};
}

InfeasibilityCertificate make_certificate(std::vector<double> coeffs, const StateManifold &m) {
    const double scale = max_abs(coeffs);
    if (scale > 0.0) {
        // Leading coefficient of magnitude one keeps the rendering readable.
        double lead = 0.0;
        for (double c : coeffs) {
            if (c != 0.0) {
                lead = std::abs(c);
                break;
            }
        }
        for (auto &c : coeffs) {
            c /= lead;
        }
    }
    auto expr = format_linear_form(coeffs, m.family().labels());
    return {std::move(coeffs), std::move(expr)};
}

double composition_count(std::size_t parts, std::size_t n) {
    // binomial(n + parts - 1, parts - 1)
    double c = 1.0;
    for (std::size_t i = 1; i < parts; ++i) {
        c = c * static_cast<double>(n + i) / static_cast<double>(i);
    }
    return c;
}

} // namespace

TotalProbabilityCheck total_probability_feasible(double p_given_w, double p_given_l,
                                                 double p_total) {
    for (double p : {p_given_w, p_given_l, p_total}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InvalidProbability("probability " + std::to_string(p) +
                                     " is outside [0, 1]");
        }
    }
    TotalProbabilityCheck out;
    out.p_given_w = p_given_w;
    out.p_given_l = p_given_l;
    out.p_total = p_total;
    out.lo = std::min(p_given_w, p_given_l);
    out.hi = std::max(p_given_w, p_given_l);
    out.feasible = p_total >= out.lo && p_total <= out.hi;
    return out;
}

std::string format_linear_form(const std::vector<double> &coefficients,
                               const std::vector<std::string> &labels) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        const double c = coefficients[i];
        if (c == 0.0) {
            continue;
        }
        const double mag = std::abs(c);
        if (first) {
            if (c < 0.0) {
                os << '-';
            }
        } else {
            os << (c < 0.0 ? " - " : " + ");
        }
        if (mag != 1.0) {
            os << mag << '*';
        }
        os << "p_" << labels.at(i);
        first = false;
    }
    if (first) {
        os << '0';
    }
    return os.str();
}

std::vector<double> classical_margins(const StateManifold &m, const std::vector<Act> &acts,
                                      const UtilityFunction &u,
                                      const PreferencePattern &pattern,
                                      const ClassicalWitness &point) {
    const auto forms = margin_forms(m, acts, u, pattern);
    if (point.prior.size() != m.family().size()) {
        throw DimensionMismatch("prior length does not match the number of events");
    }
    std::vector<double> out;
    for (const auto &row : forms) {
        double s = 0.0;
        for (std::size_t e = 0; e < row.size(); ++e) {
            if (point.prior[e] != 0.0) {
                s += point.prior[e] * row[e].evaluate(point.gaps);
            }
        }
        out.push_back(s);
    }
    return out;
}

ClassicalReport grid_pattern_feasible(const StateManifold &m, const std::vector<Act> &acts,
                                      const UtilityFunction &u,
                                      const PreferencePattern &pattern, double step) {
    if (!(step > 0.0 && step <= 1.0)) {
        throw InvalidArgument("grid step must lie in (0, 1]");
    }
    const auto forms = margin_forms(m, acts, u, pattern);
    const auto gaps = referenced_gaps(forms);
    const auto &family = m.family();
    const std::size_t n_events = family.size();
    const auto n = static_cast<std::size_t>(std::llround(1.0 / step));

    double points = 1.0;
    for (const auto &b : m.blocks()) {
        points *= composition_count(b.events.size(), n);
    }
    if (gaps.size() > 1) {
        points *= std::pow(13.0, static_cast<double>(gaps.size() - 1));
    }
    if (points > kMaxGridPoints) {
        throw InvalidArgument("classical grid search too large; use a coarser step");
    }

    std::vector<std::vector<std::size_t>> block_events;
    for (const auto &b : m.blocks()) {
        std::vector<std::size_t> ev;
        for (const auto &label : b.events) {
            ev.push_back(family.index_of(label));
        }
        block_events.push_back(std::move(ev));
    }

    const std::size_t K = forms.size();
    ClassicalReport report;
    report.method = "grid";

    std::vector<int> exponents(gaps.empty() ? 0 : gaps.size() - 1, -6);
    for (;;) {
        std::map<std::string, double> gap_values;
        for (std::size_t g = 0; g < gaps.size(); ++g) {
            gap_values[gaps[g]] = g == 0 ? 1.0 : std::ldexp(1.0, exponents[g - 1]);
        }
        // coefficient[k][e] for this gap assignment
        std::vector<std::vector<double>> coef(K, std::vector<double>(n_events, 0.0));
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t e = 0; e < n_events; ++e) {
                coef[k][e] = forms[k][e].evaluate(gap_values);
            }
        }

        std::vector<double> prior(n_events, 0.0);
        std::vector<double> partial(K, 0.0);
        std::function<bool(std::size_t)> visit_block;
        // Enumerates compositions of n over the events of block j (lexicographic).
        std::function<bool(std::size_t, std::size_t, std::size_t)> visit_event =
            [&](std::size_t j, std::size_t pos, std::size_t remaining) -> bool {
            const auto &ev = block_events[j];
            const double mass = m.blocks()[j].mass;
            const bool last = pos + 1 == ev.size();
            const std::size_t lo = last ? remaining : 0;
            for (std::size_t c = lo; c <= remaining; ++c) {
                const double p = mass * static_cast<double>(c) / static_cast<double>(n);
                prior[ev[pos]] = p;
                for (std::size_t k = 0; k < K; ++k) {
                    partial[k] += p * coef[k][ev[pos]];
                }
                const bool found = last ? visit_block(j + 1)
                                        : visit_event(j, pos + 1, remaining - c);
                for (std::size_t k = 0; k < K; ++k) {
                    partial[k] -= p * coef[k][ev[pos]];
                }
                if (found) {
                    return true;
                }
            }
            return false;
        };
        visit_block = [&](std::size_t j) -> bool {
            if (j == block_events.size()) {
                return std::all_of(partial.begin(), partial.end(),
                                   [](double x) { return x > kStrictMargin; });
            }
            return visit_event(j, 0, n);
        };

        if (visit_block(0)) {
            report.feasible = true;
            report.witness = ClassicalWitness{prior, gap_values};
            return report;
        }

        std::size_t g = 0;
        while (g < exponents.size() && ++exponents[g] > 6) {
            exponents[g] = -6;
            ++g;
        }
        if (g == exponents.size()) {
            break;
        }
    }
    report.feasible = false;
    return report;
}

ClassicalReport classical_pattern_feasible(const StateManifold &m,
                                           const std::vector<Act> &acts,
                                           const UtilityFunction &u,
                                           const PreferencePattern &pattern) {
    const auto forms = margin_forms(m, acts, u, pattern);

    std::vector<std::vector<double>> linear;
    for (const auto &row : forms) {
        auto f = factor_margin(row);
        if (!f) {
            return grid_pattern_feasible(m, acts, u, pattern);
        }
        linear.push_back(std::move(*f));
    }

    ClassicalReport report;
    report.method = "sign-analysis";

    for (const auto &l : linear) {
        if (max_abs(l) == 0.0) {
            report.feasible = false;
            report.certificate = make_certificate(l, m);
            return report;
        }
    }
    for (std::size_t j = 0; j < linear.size(); ++j) {
        for (std::size_t k = j + 1; k < linear.size(); ++k) {
            if (collinearity(linear[k], linear[j]) < 0.0) {
                report.feasible = false;
                report.certificate = make_certificate(linear[j], m);
                return report;
            }
        }
    }

    bool all_aligned = true;
    for (std::size_t k = 1; k < linear.size(); ++k) {
        all_aligned = all_aligned && collinearity(linear[k], linear[0]) > 0.0;
    }
    if (!all_aligned) {
        return grid_pattern_feasible(m, acts, u, pattern);
    }

    // One direction: maximize the form over the product of block simplices by
    // placing each block's mass on its largest coefficient.
    const auto &family = m.family();
    std::vector<double> prior(family.size(), 0.0);
    double best = 0.0;
    for (const auto &block : m.blocks()) {
        std::size_t arg = family.index_of(block.events.front());
        for (const auto &label : block.events) {
            const auto e = family.index_of(label);
            if (linear[0][e] > linear[0][arg] ||
                (linear[0][e] == linear[0][arg] && e < arg)) {
                arg = e;
            }
        }
        prior[arg] += block.mass;
        best += block.mass * linear[0][arg];
    }
    if (best <= kStrictMargin) {
        report.feasible = false;
        report.certificate = make_certificate(linear[0], m);
        return report;
    }
    ClassicalWitness witness{prior, {}};
    for (const auto &g : referenced_gaps(forms)) {
        witness.gaps[g] = 1.0;
    }
    const auto margins = classical_margins(m, acts, u, pattern, witness);
    if (!std::all_of(margins.begin(), margins.end(),
                     [](double x) { return x > kStrictMargin; })) {
        return grid_pattern_feasible(m, acts, u, pattern);
    }
    report.feasible = true;
    report.witness = std::move(witness);
    return report;
}

} // namespace qdm
