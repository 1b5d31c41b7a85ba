#include "qdm/experiment.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "qdm/errors.hpp"

namespace qdm {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string &what, const std::string &where) {
    throw ValidationError(what + " (at " + (where.empty() ? "/" : where) + ")");
}

const Json &field(const Json &obj, const std::string &key, const std::string &where) {
    if (!obj.is_object() || !obj.contains(key)) {
        fail("missing field '" + key + "'", where);
    }
    return obj[key];
}

std::string string_at(const Json &j, const std::string &where) {
    if (!j.is_string()) {
        fail("expected a string", where);
    }
    return j.get<std::string>();
}

double number_at(const Json &j, const std::string &where) {
    if (!j.is_number()) {
        fail("expected a number", where);
    }
    const double x = j.get<double>();
    if (!std::isfinite(x)) {
        fail("expected a finite number", where);
    }
    return x;
}

const Json &array_at(const Json &j, const std::string &where) {
    if (!j.is_array()) {
        fail("expected an array", where);
    }
    return j;
}

double parse_key_number(const std::string &key, const std::string &where) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(key, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used == 0 || used != key.size() || !std::isfinite(x)) {
        fail("payoff key '" + key + "' is not a number", where);
    }
    return x;
}

double parse_mass(const Json &j, const std::string &where) {
    if (j.is_number()) {
        return number_at(j, where);
    }
    if (!j.is_string()) {
        fail("mass must be a number or a \"p/q\" string", where);
    }
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
        fail("mass must be a number or a \"p/q\" string", where);
    }
    const double p = parse_key_number(s.substr(0, slash), where);
    const double q = parse_key_number(s.substr(slash + 1), where);
    if (q == 0.0) {
        fail("mass denominator must be nonzero", where);
    }
    return p / q;
}

std::pair<std::size_t, std::size_t> line_column(const std::string &text, std::size_t offset) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

} // namespace

SpectralFamily ExperimentSpec::family() const { return SpectralFamily::elementary(events); }

StateManifold ExperimentSpec::manifold() const { return StateManifold(family(), blocks); }

UtilityFunction ExperimentSpec::utility() const { return UtilityFunction(anchors, free_gaps); }

ExperimentSpec parse_experiment_text(const std::string &text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, column] = line_column(text, offset);
        throw ParseError("JSON syntax error at line " + std::to_string(line) + ", column " +
                             std::to_string(column),
                         line, column);
    }
    if (!root.is_object()) {
        fail("top level must be an object", "");
    }

    ExperimentSpec spec;
    spec.name = string_at(field(root, "name", ""), "/name");

    const Json &events = array_at(field(root, "events", ""), "/events");
    if (events.empty()) {
        fail("events must be nonempty", "/events");
    }
    std::set<std::string> event_set;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const std::string where = "/events/" + std::to_string(i);
        std::string e = string_at(events[i], where);
        if (e.empty() || !event_set.insert(e).second) {
            fail("event labels must be nonempty and distinct", where);
        }
        spec.events.push_back(std::move(e));
    }

    const Json &blocks = array_at(field(root, "blocks", ""), "/blocks");
    std::set<std::string> covered;
    double total = 0.0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const std::string where = "/blocks/" + std::to_string(b);
        AmbiguityBlock block;
        const Json &members = array_at(field(blocks[b], "events", where), where + "/events");
        if (members.empty()) {
            fail("blocks must be nonempty", where + "/events");
        }
        for (std::size_t k = 0; k < members.size(); ++k) {
            const std::string w = where + "/events/" + std::to_string(k);
            std::string e = string_at(members[k], w);
            if (event_set.count(e) == 0) {
                fail("unknown event '" + e + "'", w);
            }
            if (!covered.insert(e).second) {
                fail("blocks must partition the events: '" + e + "' appears twice", w);
            }
            block.events.push_back(std::move(e));
        }
        block.mass = parse_mass(field(blocks[b], "mass", where), where + "/mass");
        if (block.mass < 0.0 || block.mass > 1.0) {
            fail("block mass must lie in [0, 1]", where + "/mass");
        }
        total += block.mass;
        spec.blocks.push_back(std::move(block));
    }
    if (covered.size() != event_set.size()) {
        fail("blocks must partition the events: some event is in no block", "/blocks");
    }
    if (std::abs(total - 1.0) > 1e-12) {
        fail("block masses must sum to 1", "/blocks");
    }

    const Json &utility = field(root, "utility", "");
    const Json &anchors = field(utility, "anchors", "/utility");
    if (!anchors.is_object() || anchors.empty()) {
        fail("anchors must be a nonempty object", "/utility/anchors");
    }
    for (const auto &[key, value] : anchors.items()) {
        const std::string where = "/utility/anchors/" + key;
        const double payoff = parse_key_number(key, where);
        if (!spec.anchors.emplace(payoff, number_at(value, where)).second) {
            fail("duplicate anchor payoff", where);
        }
    }
    if (utility.contains("free_gaps")) {
        const Json &gaps = array_at(utility["free_gaps"], "/utility/free_gaps");
        for (std::size_t g = 0; g < gaps.size(); ++g) {
            const std::string where = "/utility/free_gaps/" + std::to_string(g);
            UtilityFunction::FreeGap gap;
            gap.name = string_at(field(gaps[g], "name", where), where + "/name");
            const Json &between = array_at(field(gaps[g], "between", where), where + "/between");
            if (between.size() != 2) {
                fail("between must list two payoffs", where + "/between");
            }
            gap.lower = number_at(between[0], where + "/between/0");
            gap.upper = number_at(between[1], where + "/between/1");
            spec.free_gaps.push_back(std::move(gap));
        }
    }
    UtilityFunction u;
    try {
        u = spec.utility();
    } catch (const ValidationError &e) {
        fail(e.what(), "/utility");
    }

    const Json &acts = field(root, "acts", "");
    if (!acts.is_object() || acts.empty()) {
        fail("acts must be a nonempty object", "/acts");
    }
    for (const auto &[label, payoffs] : acts.items()) {
        const std::string where = "/acts/" + label;
        if (!payoffs.is_object()) {
            fail("an act maps events to payoffs", where);
        }
        Act act{label, {}};
        for (const auto &[event, value] : payoffs.items()) {
            if (event_set.count(event) == 0) {
                fail("unknown event '" + event + "'", where + "/" + event);
            }
            const double x = number_at(value, where + "/" + event);
            if (!u.form(x)) {
                fail("utility is undefined at payoff " + std::to_string(x), where + "/" + event);
            }
            act.payoffs[event] = x;
        }
        for (const auto &e : spec.events) {
            if (act.payoffs.count(e) == 0) {
                fail("act has no payoff for event '" + e + "'", where);
            }
        }
        spec.acts.push_back(std::move(act));
    }
    auto has_act = [&](const std::string &label) {
        for (const auto &a : spec.acts) {
            if (a.label == label) {
                return true;
            }
        }
        return false;
    };

    const Json &obs = array_at(field(root, "observations", ""), "/observations");
    for (std::size_t k = 0; k < obs.size(); ++k) {
        const std::string where = "/observations/" + std::to_string(k);
        const Json &pair = array_at(field(obs[k], "pair", where), where + "/pair");
        if (pair.size() != 2) {
            fail("pair must list two acts", where + "/pair");
        }
        ObservedChoice c;
        c.first = string_at(pair[0], where + "/pair/0");
        c.second = string_at(pair[1], where + "/pair/1");
        for (const auto &[label, idx] : {std::pair{c.first, 0}, std::pair{c.second, 1}}) {
            if (!has_act(label)) {
                fail("unknown act '" + label + "'", where + "/pair/" + std::to_string(idx));
            }
        }
        if (c.first == c.second) {
            fail("pair must name two different acts", where + "/pair");
        }
        c.rate_first = number_at(field(obs[k], "rate_first", where), where + "/rate_first");
        if (c.rate_first < 0.0 || c.rate_first > 1.0) {
            fail("rate_first must lie in [0, 1]", where + "/rate_first");
        }
        spec.observations.push_back(std::move(c));
    }

    if (root.contains("orthogonal_slots")) {
        if (!root["orthogonal_slots"].is_boolean()) {
            fail("expected a boolean", "/orthogonal_slots");
        }
        spec.orthogonal_slots = root["orthogonal_slots"].get<bool>();
    }
    return spec;
}

ExperimentSpec parse_experiment(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading '" + path.string() + "'");
    }
    return parse_experiment_text(buf.str());
}

} // namespace qdm
