/**
 * @file
 * Experiment files: JSON descriptions of an act table, its utility and the
 * observed choice rates.
 *
 * @code{.json}
 * {
 *   "name": "ellsberg3",
 *   "events": ["R", "Y", "B"],
 *   "blocks": [{"events": ["R"], "mass": "1/3"}, {"events": ["Y", "B"], "mass": "2/3"}],
 *   "acts": {"f1": {"R": 100, "Y": 0, "B": 0}, ...},
 *   "utility": {"anchors": {"0": 0}, "free_gaps": [{"name": "du", "between": [0, 100]}]},
 *   "observations": [{"pair": ["f1", "f2"], "rate_first": 0.68}, ...],
 *   "orthogonal_slots": true
 * }
 * @endcode
 *
 * Block masses are numbers or "p/q" strings.
 */
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qdm/eut.hpp"

namespace qdm {

struct ExperimentSpec {
    std::string name;
    std::vector<std::string> events;
    std::vector<AmbiguityBlock> blocks;
    std::vector<Act> acts; ///< file order
    std::map<double, double> anchors;
    std::vector<UtilityFunction::FreeGap> free_gaps;
    std::vector<ObservedChoice> observations;
    bool orthogonal_slots = true;

    SpectralFamily family() const;
    StateManifold manifold() const;
    UtilityFunction utility() const;
};

/// Throws IoError, ParseError or ValidationError. Validation messages name
/// the violated invariant and end with its JSON pointer, e.g. " (at /blocks)".
ExperimentSpec parse_experiment(const std::filesystem::path &path);

/// Same as parse_experiment on in-memory text.
ExperimentSpec parse_experiment_text(const std::string &text);

} // namespace qdm
