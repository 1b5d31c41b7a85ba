/**
 * @file
 * Classical (single-prior) feasibility checks: the law of total probability
 * and consistency of strict preference patterns with subjective expected
 * utility under block-constrained priors.
 */
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdm/eut.hpp"

namespace qdm {

struct TotalProbabilityCheck {
    double p_given_w = 0.0;
    double p_given_l = 0.0;
    double p_total = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool feasible = false;
};

/// Feasible iff some mu(W) in [0, 1] gives
/// p_total = mu(W) p_given_w + (1 - mu(W)) p_given_l. Throws InvalidProbability.
TotalProbabilityCheck total_probability_feasible(double p_given_w, double p_given_l,
                                                 double p_total);

enum class Winner { First, Second };

/// Every requirement asks for a strict preference between two acts.
struct PreferencePattern {
    struct Requirement {
        std::string first;
        std::string second;
        Winner winner = Winner::First;
    };
    std::vector<Requirement> pairs;
};

inline constexpr double kStrictMargin = 1e-9;

struct ClassicalWitness {
    std::vector<double> prior; ///< per event, family order
    std::map<std::string, double> gaps;
};

/// The common linear factor that makes the pattern contradictory.
struct InfeasibilityCertificate {
    std::vector<double> coefficients; ///< per event, family order
    std::string expression;           ///< e.g. "p_R - p_B"
};

struct ClassicalReport {
    bool feasible = false;
    std::string method; ///< "sign-analysis" or "grid"
    std::optional<ClassicalWitness> witness;
    std::optional<InfeasibilityCertificate> certificate;
};

/**
 * @brief Decides whether one classical prior (nonnegative event masses with
 * the manifold's block totals) and positive utility gaps satisfy every strict
 * requirement with margin > 1e-9.
 *
 * When every margin factors as (one gap) x (linear form in the prior), the
 * verdict comes from the linear forms directly; otherwise falls back to
 * grid_pattern_feasible. Throws MalformedPattern for unknown acts.
 */
ClassicalReport classical_pattern_feasible(const StateManifold &m,
                                           const std::vector<Act> &acts,
                                           const UtilityFunction &u,
                                           const PreferencePattern &pattern);

/// Brute force over block simplices (given step) crossed with gap ratios
/// 2^k, -6 <= k <= 6. First witness in lexicographic grid order wins.
ClassicalReport grid_pattern_feasible(const StateManifold &m, const std::vector<Act> &acts,
                                      const UtilityFunction &u,
                                      const PreferencePattern &pattern, double step = 1e-3);

/// Margins W(winner) - W(loser) under a classical prior and gap values.
std::vector<double> classical_margins(const StateManifold &m, const std::vector<Act> &acts,
                                      const UtilityFunction &u,
                                      const PreferencePattern &pattern,
                                      const ClassicalWitness &point);

/// "p_R - p_B" style rendering of per-event coefficients.
std::string format_linear_form(const std::vector<double> &coefficients,
                               const std::vector<std::string> &labels);

} // namespace qdm
