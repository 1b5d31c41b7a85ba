/**
 * @file
 * State-dependent expected utility over a finite set of events.
 *
 * An act maps event labels to monetary payoffs. A utility function maps
 * payoffs to utilities; some utility differences may be left as named,
 * positive unknowns ("free gaps") that are later estimated by the solver.
 * Together with a spectral family, an act and a utility induce a diagonal
 * Hermitian operator whose expectation is the expected utility in a state.
 */
#pragma once

#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qdm/hilbert.hpp"

namespace qdm {

struct Act {
    std::string label;
    std::map<std::string, double> payoffs;

    /// Throws MissingPayoff.
    double payoff(const std::string &event) const;
};

/// Share of participants preferring `first` over `second`.
struct ObservedChoice {
    std::string first;
    std::string second;
    double rate_first = 0.0;
    friend bool operator==(const ObservedChoice &, const ObservedChoice &) = default;
};

/// constant + sum_g coeffs[g] * g, with g ranging over free gap names.
struct LinearForm {
    double constant = 0.0;
    std::map<std::string, double> coeffs;

    bool is_constant() const;
    double evaluate(const std::map<std::string, double> &gaps) const;

    LinearForm &operator+=(const LinearForm &other);
    LinearForm &operator-=(const LinearForm &other);
    friend LinearForm operator-(LinearForm a, const LinearForm &b) { return a -= b; }
    friend bool operator==(const LinearForm &, const LinearForm &) = default;
};

class UtilityFunction {
  public:
    /// u(upper) - u(lower) = name, with name > 0.
    struct FreeGap {
        std::string name;
        double lower = 0.0;
        double upper = 0.0;
        friend bool operator==(const FreeGap &, const FreeGap &) = default;
    };

    UtilityFunction() = default;

    /**
     * Throws ValidationError when anchors are not strictly increasing, a gap
     * has lower >= upper, a gap pins a payoff twice, or a gap component has
     * no anchor.
     */
    UtilityFunction(std::map<double, double> anchors, std::vector<FreeGap> gaps = {});

    const std::map<double, double> &anchors() const noexcept { return anchors_; }
    const std::vector<FreeGap> &free_gaps() const noexcept { return gaps_; }
    std::vector<std::string> gap_names() const;
    bool has_gap(const std::string &name) const;

    /// Utility of a payoff as a linear form in the gaps; nullopt if undefined.
    std::optional<LinearForm> form(double payoff) const;

    /// Numeric utility; throws UnresolvedUtility if it involves a free gap or
    /// the payoff is outside the support.
    double value(double payoff) const;

    /// Substitutes known gaps; throws ValidationError when the result is not
    /// strictly increasing or a value is not positive.
    UtilityFunction resolve(const std::map<std::string, double> &gap_values) const;

    /// alpha * u + beta with alpha > 0; only for fully numeric utilities.
    UtilityFunction affine(double alpha, double beta) const;

    /// Payoffs with a defined utility form, ascending.
    std::vector<double> support() const;

  private:
    std::map<double, double> anchors_;
    std::vector<FreeGap> gaps_;
    std::map<double, LinearForm> forms_;
};

/// Diagonal operator whose entries are linear forms in the free gaps.
struct OperatorForm {
    std::vector<LinearForm> entries;

    DiagonalOperator evaluate(const std::map<std::string, double> &gaps) const;
    std::vector<std::string> gap_names() const;
};

/// Per-basis-index utility forms of an act. Throws MissingPayoff or
/// UnresolvedUtility.
OperatorForm act_operator_form(const Act &act, const UtilityFunction &u,
                               const SpectralFamily &family);

/// F_a - F_b. Entries are exactly zero where both acts pay the same.
OperatorForm act_difference_form(const Act &a, const Act &b, const UtilityFunction &u,
                                 const SpectralFamily &family);

/// F = sum_i u(x_i) P_i. Throws UnresolvedUtility when a payoff's utility
/// depends on a free gap, MissingPayoff when an event lacks a payoff.
DiagonalOperator act_operator(const Act &act, const UtilityFunction &u,
                              const SpectralFamily &family);

double expected_utility(const StateVector &v, const Act &act, const UtilityFunction &u,
                        const SpectralFamily &family);

enum class Verdict { FirstStrict, SecondStrict, Indifferent };

const char *to_string(Verdict v);

struct Preference {
    Verdict verdict = Verdict::Indifferent;
    double margin = 0.0;
};

inline constexpr double kDefaultPreferenceTolerance = 1e-9;

Preference prefer(const StateVector &v, const Act &a, const Act &b,
                  const UtilityFunction &u, const SpectralFamily &family,
                  double tol = kDefaultPreferenceTolerance);

/// Events whose total probability is fixed at `mass`.
struct AmbiguityBlock {
    std::vector<std::string> events;
    double mass = 0.0;
};

/// States whose block probabilities are pinned; the split inside a block is free.
class StateManifold {
  public:
    /// Throws ValidationError unless blocks partition the event labels and
    /// masses lie in [0, 1] and sum to 1 (1e-12).
    StateManifold(SpectralFamily family, std::vector<AmbiguityBlock> blocks);

    const SpectralFamily &family() const noexcept { return family_; }
    const std::vector<AmbiguityBlock> &blocks() const noexcept { return blocks_; }
    std::size_t dimension() const noexcept { return family_.dimension(); }

    /// Throws UnknownEvent.
    std::size_t block_of(const std::string &event) const;

    /// Basis indices covered by block j, ascending.
    std::vector<std::size_t> block_basis(std::size_t j) const;

    /// max_j |sum_{i in block j} |v_i|^2 - mass_j|.
    double violation(const StateVector &v) const;

  private:
    SpectralFamily family_;
    std::vector<AmbiguityBlock> blocks_;
    std::vector<std::size_t> block_of_event_;
};

/// Flat-Dirichlet split of each block's mass over its basis vectors,
/// phases uniform on [0, 2*pi).
StateVector random_manifold_state(const StateManifold &m, std::mt19937_64 &rng);

/// The event's probability is the same for every state on the manifold.
bool is_unambiguous_event(const std::string &event, const StateManifold &m);

/// The act's expected utility is the same for every state on the manifold:
/// utility forms are equal across each block of positive mass.
bool is_unambiguous_act(const Act &act, const UtilityFunction &u, const StateManifold &m);

} // namespace qdm
