#include "qdm/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace qdm {

namespace {

using Json = nlohmann::ordered_json;

Json number(double x) {
    if (!std::isfinite(x)) {
        return nullptr;
    }
    const double rounded = std::stod(format_number(x));
    return rounded == 0.0 ? 0.0 : rounded;
}

} // namespace

bool Report::all_pass() const {
    return std::all_of(results.begin(), results.end(), [](const CheckRow &r) { return r.pass; });
}

CheckRow &Report::compare(std::string check, double value, double expected, double tol,
                          std::string note) {
    const bool ok = std::abs(value - expected) <= tol;
    results.push_back({std::move(check), value, expected, tol, ok, std::move(note)});
    return results.back();
}

CheckRow &Report::bound(std::string check, double value, double tol, std::string note) {
    const bool ok = std::abs(value) <= tol;
    results.push_back({std::move(check), value, std::nullopt, tol, ok, std::move(note)});
    return results.back();
}

CheckRow &Report::flag(std::string check, bool ok, std::string note) {
    results.push_back({std::move(check), ok ? 1.0 : 0.0, std::nullopt, std::nullopt, ok,
                       std::move(note)});
    return results.back();
}

CheckRow &Report::info(std::string check, double value, std::string note) {
    results.push_back({std::move(check), value, std::nullopt, std::nullopt, true,
                       std::move(note)});
    return results.back();
}

void Report::add_state(const std::string &slot, const StateVector &v) {
    StateRow row{slot, {}};
    for (std::size_t i = 0; i < v.dimension(); ++i) {
        row.amplitudes.push_back(v.polar(i));
    }
    states.push_back(std::move(row));
}

std::string format_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    if (x == 0.0) {
        return "0";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::string to_json(const Report &r) {
    Json j;
    j["command"] = r.command;
    Json inputs = Json::object();
    for (const auto &[key, value] : r.inputs) {
        if (const auto *d = std::get_if<double>(&value)) {
            inputs[key] = number(*d);
        } else {
            inputs[key] = std::get<std::string>(value);
        }
    }
    j["inputs"] = inputs;
    Json results = Json::array();
    for (const auto &row : r.results) {
        Json e;
        e["check"] = row.check;
        e["value"] = number(row.value);
        if (row.expected) {
            e["expected"] = number(*row.expected);
        }
        e["tolerance"] = row.tolerance ? number(*row.tolerance) : Json(nullptr);
        e["pass"] = row.pass;
        if (!row.note.empty()) {
            e["note"] = row.note;
        }
        results.push_back(std::move(e));
    }
    j["results"] = results;
    Json states = Json::array();
    for (const auto &s : r.states) {
        Json amps = Json::array();
        for (const auto &a : s.amplitudes) {
            amps.push_back({{"modulus", number(a.modulus())}, {"phase_deg", number(a.phase_deg())}});
        }
        states.push_back({{"slot", s.slot}, {"amplitudes", amps}});
    }
    j["states"] = states;
    Json gaps = Json::object();
    for (const auto &[name, value] : r.gaps) {
        gaps[name] = number(value);
    }
    j["gaps"] = gaps;
    return j.dump(2) + "\n";
}

std::string to_table(const Report &r) {
    std::ostringstream out;
    out << r.command;
    for (const auto &[key, value] : r.inputs) {
        out << "  " << key << "=";
        if (const auto *d = std::get_if<double>(&value)) {
            out << format_number(*d);
        } else {
            out << std::get<std::string>(value);
        }
    }
    out << "\n\n";

    std::size_t width = 5;
    for (const auto &row : r.results) {
        width = std::max(width, row.check.size());
    }
    char line[512];
    std::snprintf(line, sizeof line, "%-*s  %-17s  %-17s  %-10s  %s\n", static_cast<int>(width),
                  "check", "value", "expected", "tolerance", "pass");
    out << line;
    for (const auto &row : r.results) {
        std::snprintf(line, sizeof line, "%-*s  %-17s  %-17s  %-10s  %s", static_cast<int>(width),
                      row.check.c_str(), format_number(row.value).c_str(),
                      row.expected ? format_number(*row.expected).c_str() : "-",
                      row.tolerance ? format_number(*row.tolerance).c_str() : "-",
                      row.pass ? "PASS" : "FAIL");
        out << line;
        if (!row.note.empty()) {
            out << "  " << row.note;
        }
        out << "\n";
    }
    for (const auto &s : r.states) {
        out << "\n" << s.slot << " =";
        for (const auto &a : s.amplitudes) {
            out << " " << format_number(a.modulus()) << "@" << format_number(a.phase_deg())
                << "deg";
        }
        out << "\n";
    }
    if (!r.gaps.empty()) {
        out << "\n";
        for (const auto &[name, value] : r.gaps) {
            out << name << " = " << format_number(value) << "\n";
        }
    }
    return out.str();
}

} // namespace qdm
