/**
 * @file
 * Built-in datasets: the Ellsberg three-color and Machina four-color act
 * tables with their published states, and the Hawaii and two-stage gamble
 * disjunction data. Constants are stored as printed.
 */
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdm/disjunction.hpp"
#include "qdm/eut.hpp"
#include "qdm/report.hpp"
#include "qdm/solver.hpp"

namespace qdm {

/// Participants choosing `first` in the first pair and `second` in the second.
struct PatternCount {
    std::string first;
    std::string second;
    int count = 0;
};

struct RawCounts {
    std::vector<PatternCount> patterns;
    int total = 0;

    /// Participants whose pattern contains the act.
    int choosing(const std::string &act) const;
    /// Sum over patterns equal to one of the listed (first, second) pairs.
    int matching(const std::vector<std::pair<std::string, std::string>> &which) const;
};

struct ActTable {
    StateManifold manifold;
    std::vector<Act> acts;
    UtilityFunction utility;
    std::vector<ObservedChoice> observed;
    std::optional<RawCounts> raw_counts;
    double stated_inversion = 0.0; ///< share with the majority inversion pattern
    std::map<std::string, StateVector> named_states;
    std::map<std::string, double> published_gaps;

    const SpectralFamily &family() const { return manifold.family(); }
    const Act &act(const std::string &label) const;
};

/// Printed construction of a disjunction dataset.
struct PublishedDisjunction {
    DisjunctionData data;
    double beta_deg = 0.0;
    std::vector<double> vector_a; ///< signed real components as printed
    std::vector<double> vector_b; ///< signed, before the factor e^{i beta}
};

struct Scenario {
    std::string name;
    std::optional<ActTable> table;
    std::optional<PublishedDisjunction> disjunction;
};

std::vector<std::string> builtin_names();

/// Throws UnknownScenario.
Scenario builtin(const std::string &name);

struct VerifyOptions {
    /// Tolerance for targets computed from published states.
    double published_tol = 0.02;
    FitOptions fit;
};

/**
 * Classical infeasibility, published-state checks, a fresh fit and count
 * consistency for act tables; the construction and its printed values for
 * disjunction data. Throws UnknownScenario.
 */
Report verify(const std::string &name, const VerifyOptions &options = {});

} // namespace qdm
