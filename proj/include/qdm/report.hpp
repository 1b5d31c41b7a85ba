/**
 * @file
 * Check reports shared by scenario verification and the command line,
 * rendered either as an aligned text table or as JSON.
 */
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qdm/hilbert.hpp"

namespace qdm {

struct CheckRow {
    std::string check;
    double value = 0.0;
    std::optional<double> expected;
    std::optional<double> tolerance; ///< none for informational rows
    bool pass = true;
    std::string note;
};

struct StateRow {
    std::string slot;
    std::vector<ComplexAmplitude> amplitudes;
};

using InputValue = std::variant<double, std::string>;

struct Report {
    std::string command;
    std::vector<std::pair<std::string, InputValue>> inputs;
    std::vector<CheckRow> results;
    std::vector<StateRow> states;
    std::map<std::string, double> gaps;

    bool all_pass() const;

    /// Row with value compared to expected: pass iff |value - expected| <= tol.
    CheckRow &compare(std::string check, double value, double expected, double tol,
                      std::string note = {});
    /// Row with value bounded above: pass iff |value| <= tol.
    CheckRow &bound(std::string check, double value, double tol, std::string note = {});
    CheckRow &flag(std::string check, bool ok, std::string note = {});
    CheckRow &info(std::string check, double value, std::string note = {});
    void add_state(const std::string &slot, const StateVector &v);
};

/// "%.10g"; non-finite values become "null" in JSON and "nan"/"inf" in tables.
std::string format_number(double x);

/// Byte-stable JSON, two-space indent, trailing newline.
std::string to_json(const Report &r);

std::string to_table(const Report &r);

} // namespace qdm
