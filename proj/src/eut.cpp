#include "qdm/eut.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "qdm/errors.hpp"

namespace qdm {

namespace {

std::string fmt_payoff(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

void erase_zeros(LinearForm &f) {
    for (auto it = f.coeffs.begin(); it != f.coeffs.end();) {
        it = it->second == 0.0 ? f.coeffs.erase(it) : std::next(it);
    }
}

} // namespace

double Act::payoff(const std::string &event) const {
    auto it = payoffs.find(event);
    if (it == payoffs.end()) {
        throw MissingPayoff("act '" + label + "' has no payoff for event '" + event + "'");
    }
    return it->second;
}

bool LinearForm::is_constant() const {
    return std::all_of(coeffs.begin(), coeffs.end(),
                       [](const auto &kv) { return kv.second == 0.0; });
}

double LinearForm::evaluate(const std::map<std::string, double> &gaps) const {
    double s = constant;
    for (const auto &[name, c] : coeffs) {
        if (c == 0.0) {
            continue;
        }
        auto it = gaps.find(name);
        if (it == gaps.end()) {
            throw UnresolvedUtility("no value supplied for utility gap '" + name + "'");
        }
        s += c * it->second;
    }
    return s;
}

LinearForm &LinearForm::operator+=(const LinearForm &other) {
    constant += other.constant;
    for (const auto &[name, c] : other.coeffs) {
        coeffs[name] += c;
    }
    erase_zeros(*this);
    return *this;
}

LinearForm &LinearForm::operator-=(const LinearForm &other) {
    constant -= other.constant;
    for (const auto &[name, c] : other.coeffs) {
        coeffs[name] -= c;
    }
    erase_zeros(*this);
    return *this;
}

UtilityFunction::UtilityFunction(std::map<double, double> anchors, std::vector<FreeGap> gaps)
    : anchors_(std::move(anchors)), gaps_(std::move(gaps)) {
    double prev = -INFINITY;
    for (const auto &[x, ux] : anchors_) {
        if (!std::isfinite(x) || !std::isfinite(ux)) {
            throw ValidationError("utility anchors must be finite");
        }
        if (!(ux > prev)) {
            throw ValidationError("utility anchors must be strictly increasing in payoff");
        }
        prev = ux;
        forms_[x] = LinearForm{ux, {}};
    }
    std::set<std::string> names;
    for (const auto &g : gaps_) {
        if (g.name.empty()) {
            throw ValidationError("utility gap needs a name");
        }
        if (!names.insert(g.name).second) {
            throw ValidationError("duplicate utility gap '" + g.name + "'");
        }
        if (!(g.lower < g.upper)) {
            throw ValidationError("utility gap '" + g.name +
                                  "' must run from a lower to a higher payoff");
        }
    }

    std::vector<bool> placed(gaps_.size(), false);
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t k = 0; k < gaps_.size(); ++k) {
            if (placed[k]) {
                continue;
            }
            const auto &g = gaps_[k];
            const bool lo = forms_.count(g.lower) > 0;
            const bool hi = forms_.count(g.upper) > 0;
            if (lo && hi) {
                throw ValidationError("utility gap '" + g.name +
                                      "' links two payoffs that are already determined");
            }
            if (lo || hi) {
                LinearForm step{0.0, {{g.name, 1.0}}};
                if (lo) {
                    LinearForm f = forms_[g.lower];
                    f += step;
                    forms_[g.upper] = f;
                } else {
                    LinearForm f = forms_[g.upper];
                    f -= step;
                    forms_[g.lower] = f;
                }
                placed[k] = true;
                progress = true;
            }
        }
    }
    for (std::size_t k = 0; k < gaps_.size(); ++k) {
        if (!placed[k]) {
            throw ValidationError("utility gap '" + gaps_[k].name +
                                  "' is not connected to any anchored payoff");
        }
    }
}

std::vector<std::string> UtilityFunction::gap_names() const {
    std::vector<std::string> out;
    for (const auto &g : gaps_) {
        out.push_back(g.name);
    }
    return out;
}

bool UtilityFunction::has_gap(const std::string &name) const {
    return std::any_of(gaps_.begin(), gaps_.end(),
                       [&](const FreeGap &g) { return g.name == name; });
}

std::optional<LinearForm> UtilityFunction::form(double payoff) const {
    auto it = forms_.find(payoff);
    if (it == forms_.end()) {
        return std::nullopt;
    }
    return it->second;
}

double UtilityFunction::value(double payoff) const {
    auto f = form(payoff);
    if (!f) {
        throw UnresolvedUtility("payoff " + fmt_payoff(payoff) +
                                " is outside the utility support");
    }
    if (!f->is_constant()) {
        throw UnresolvedUtility("utility of payoff " + fmt_payoff(payoff) +
                                " depends on an unresolved gap");
    }
    return f->constant;
}

UtilityFunction UtilityFunction::resolve(const std::map<std::string, double> &gap_values) const {
    for (const auto &[name, v] : gap_values) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ValidationError("utility gap '" + name + "' must be positive and finite");
        }
    }
    std::map<double, double> anchors;
    std::vector<FreeGap> remaining;
    for (const auto &[x, f] : forms_) {
        const bool known = std::all_of(f.coeffs.begin(), f.coeffs.end(), [&](const auto &kv) {
            return gap_values.count(kv.first) > 0;
        });
        if (known) {
            anchors[x] = f.evaluate(gap_values);
        }
    }
    for (const auto &g : gaps_) {
        if (gap_values.count(g.name) == 0) {
            remaining.push_back(g);
        }
    }
    return UtilityFunction(std::move(anchors), std::move(remaining));
}

UtilityFunction UtilityFunction::affine(double alpha, double beta) const {
    if (!(alpha > 0.0)) {
        throw InvalidArgument("affine utility transform needs alpha > 0");
    }
    if (!gaps_.empty()) {
        throw UnresolvedUtility("affine transform of a utility with free gaps");
    }
    std::map<double, double> out;
    for (const auto &[x, ux] : anchors_) {
        out[x] = alpha * ux + beta;
    }
    return UtilityFunction(std::move(out));
}

std::vector<double> UtilityFunction::support() const {
    std::vector<double> out;
    for (const auto &kv : forms_) {
        out.push_back(kv.first);
    }
    return out;
}

DiagonalOperator OperatorForm::evaluate(const std::map<std::string, double> &gaps) const {
    std::vector<double> e;
    e.reserve(entries.size());
    for (const auto &f : entries) {
        e.push_back(f.evaluate(gaps));
    }
    return DiagonalOperator(std::move(e));
}

std::vector<std::string> OperatorForm::gap_names() const {
    std::set<std::string> names;
    for (const auto &f : entries) {
        for (const auto &[name, c] : f.coeffs) {
            if (c != 0.0) {
                names.insert(name);
            }
        }
    }
    return {names.begin(), names.end()};
}

OperatorForm act_operator_form(const Act &act, const UtilityFunction &u,
                               const SpectralFamily &family) {
    OperatorForm out;
    out.entries.resize(family.dimension());
    for (const auto &event : family.events()) {
        const double x = act.payoff(event.label);
        auto f = u.form(x);
        if (!f) {
            throw UnresolvedUtility("payoff " + fmt_payoff(x) + " of act '" + act.label +
                                    "' is outside the utility support");
        }
        for (auto i : event.projector.indices()) {
            out.entries[i] = *f;
        }
    }
    return out;
}

OperatorForm act_difference_form(const Act &a, const Act &b, const UtilityFunction &u,
                                 const SpectralFamily &family) {
    OperatorForm out;
    out.entries.resize(family.dimension());
    for (const auto &event : family.events()) {
        const double xa = a.payoff(event.label);
        const double xb = b.payoff(event.label);
        LinearForm d;
        if (xa != xb) {
            auto fa = u.form(xa);
            auto fb = u.form(xb);
            if (!fa || !fb) {
                throw UnresolvedUtility("payoff " + fmt_payoff(fa ? xb : xa) +
                                        " is outside the utility support");
            }
            d = *fa - *fb;
        }
        for (auto i : event.projector.indices()) {
            out.entries[i] = d;
        }
    }
    return out;
}

DiagonalOperator act_operator(const Act &act, const UtilityFunction &u,
                              const SpectralFamily &family) {
    std::vector<double> e(family.dimension(), 0.0);
    for (const auto &event : family.events()) {
        const double ux = u.value(act.payoff(event.label));
        for (auto i : event.projector.indices()) {
            e[i] = ux;
        }
    }
    return DiagonalOperator(std::move(e));
}

double expected_utility(const StateVector &v, const Act &act, const UtilityFunction &u,
                        const SpectralFamily &family) {
    return expectation(v, act_operator(act, u, family));
}

const char *to_string(Verdict v) {
    switch (v) {
    case Verdict::FirstStrict:
        return "first";
    case Verdict::SecondStrict:
        return "second";
    case Verdict::Indifferent:
        break;
    }
    return "indifferent";
}

Preference prefer(const StateVector &v, const Act &a, const Act &b,
                  const UtilityFunction &u, const SpectralFamily &family, double tol) {
    const double margin =
        expected_utility(v, a, u, family) - expected_utility(v, b, u, family);
    Verdict verdict = Verdict::Indifferent;
    if (margin > tol) {
        verdict = Verdict::FirstStrict;
    } else if (margin < -tol) {
        verdict = Verdict::SecondStrict;
    }
    return {verdict, margin};
}

StateManifold::StateManifold(SpectralFamily family, std::vector<AmbiguityBlock> blocks)
    : family_(std::move(family)), blocks_(std::move(blocks)),
      block_of_event_(family_.size(), static_cast<std::size_t>(-1)) {
    if (blocks_.empty()) {
        throw ValidationError("a manifold needs at least one block");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        const auto &b = blocks_[j];
        if (b.events.empty()) {
            throw ValidationError("block " + std::to_string(j) + " has no events");
        }
        if (!(b.mass >= 0.0 && b.mass <= 1.0)) {
            throw ValidationError("block masses must lie in [0, 1]");
        }
        total += b.mass;
        for (const auto &label : b.events) {
            if (!family_.has(label)) {
                throw ValidationError("block " + std::to_string(j) +
                                      " references unknown event '" + label + "'");
            }
            const auto k = family_.index_of(label);
            if (block_of_event_[k] != static_cast<std::size_t>(-1)) {
                throw ValidationError("blocks must partition the events: '" + label +
                                      "' appears twice");
            }
            block_of_event_[k] = j;
        }
    }
    for (std::size_t k = 0; k < family_.size(); ++k) {
        if (block_of_event_[k] == static_cast<std::size_t>(-1)) {
            throw ValidationError("blocks must partition the events: '" +
                                  family_.event(k).label + "' is not covered");
        }
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError("block masses must sum to 1");
    }
}

std::size_t StateManifold::block_of(const std::string &event) const {
    return block_of_event_[family_.index_of(event)];
}

std::vector<std::size_t> StateManifold::block_basis(std::size_t j) const {
    std::vector<std::size_t> out;
    for (const auto &label : blocks_.at(j).events) {
        const auto &idx = family_.projector(label).indices();
        out.insert(out.end(), idx.begin(), idx.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

double StateManifold::violation(const StateVector &v) const {
    if (v.dimension() != dimension()) {
        throw DimensionMismatch("state and manifold dimensions differ");
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < blocks_.size(); ++j) {
        double s = 0.0;
        for (auto i : block_basis(j)) {
            s += std::norm(v[i]);
        }
        worst = std::max(worst, std::abs(s - blocks_[j].mass));
    }
    return worst;
}

StateVector random_manifold_state(const StateManifold &m, std::mt19937_64 &rng) {
    std::vector<Complex> amps(m.dimension());
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    for (std::size_t j = 0; j < m.blocks().size(); ++j) {
        const auto basis = m.block_basis(j);
        std::vector<double> w(basis.size());
        double total = 0.0;
        for (auto &x : w) {
            x = expo(rng);
            total += x;
        }
        for (std::size_t k = 0; k < basis.size(); ++k) {
            const double share = m.blocks()[j].mass * w[k] / total;
            amps[basis[k]] = std::polar(std::sqrt(share), phase(rng));
        }
    }
    return StateVector(std::move(amps));
}

bool is_unambiguous_event(const std::string &event, const StateManifold &m) {
    const auto &block = m.blocks()[m.block_of(event)];
    return block.events.size() == 1 || block.mass == 0.0;
}

bool is_unambiguous_act(const Act &act, const UtilityFunction &u, const StateManifold &m) {
    const OperatorForm f = act_operator_form(act, u, m.family());
    for (std::size_t j = 0; j < m.blocks().size(); ++j) {
        if (m.blocks()[j].mass == 0.0) {
            continue;
        }
        const auto basis = m.block_basis(j);
        for (std::size_t k = 1; k < basis.size(); ++k) {
            if (!(f.entries[basis[k]] == f.entries[basis[0]])) {
                return false;
            }
        }
    }
    return true;
}

} // namespace qdm
