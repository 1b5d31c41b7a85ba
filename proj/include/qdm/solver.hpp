/**
 * @file
 * Fits states on a StateManifold, plus positive utility gaps, to observed
 * expectation targets with optional pairwise orthogonality.
 *
 * The search runs Levenberg-Marquardt from many seeded starting points over
 * an unconstrained chart of the manifold (hyperspherical angles for the
 * moduli within each block, one phase per basis vector, log-gaps).
 * Orthogonality enters as a weighted residual whose weight is raised when a
 * start stalls on it.
 */
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qdm/eut.hpp"

namespace qdm {

/**
 * @brief Coordinates for the states of a manifold.
 *
 * Within a block of mass m over k basis vectors the squared moduli are given
 * by k - 1 stick-breaking fractions in [0, 1] scaled to m. Every basis vector
 * carries a phase except the lowest index of the first block, whose phase is
 * pinned to 0 to remove the global phase.
 */
class ManifoldChart {
  public:
    explicit ManifoldChart(const StateManifold &m);

    std::size_t modulus_coordinates() const noexcept { return stick_count_; }
    std::size_t phase_coordinates() const noexcept { return phase_index_.size(); }
    std::size_t dimension() const noexcept { return stick_count_ + phase_index_.size(); }
    std::size_t state_dimension() const noexcept { return n_; }
    std::size_t pinned_index() const noexcept { return pinned_; }

    /// coords = stick fractions (block order) followed by phases in radians.
    StateVector decode(std::span<const double> coords) const;

    /**
     * Angular form used by the solver: a stick fraction t is sin^2(z).
     * Writes the amplitudes and, if requested, d amplitude_i / d coord_c
     * into an n x dimension() matrix.
     */
    void amplitudes(std::span<const double> angular, std::vector<Complex> &out,
                    Eigen::MatrixXcd *jacobian = nullptr) const;

    /// Angular coordinates equivalent to the given chart coordinates.
    std::vector<double> to_angular(std::span<const double> coords) const;

  private:
    struct Block {
        double mass;
        std::vector<std::size_t> basis;
        std::size_t first_stick; // offset into the coordinate vector
    };

    std::size_t n_ = 0;
    std::size_t stick_count_ = 0;
    std::size_t pinned_ = 0;
    std::vector<Block> blocks_;
    std::vector<std::size_t> phase_index_; // basis index of each phase coordinate
};

struct FitTarget {
    std::string slot;
    std::string label; ///< e.g. "f1-f2"
    OperatorForm op;
    double value = 0.0;
};

struct FitGap {
    std::string name;
    std::optional<double> initial;
};

struct FitOptions {
    double tol = 1e-8;
    std::size_t starts = 32;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 10000;
    double penalty = 1e3;
    double max_penalty = 1e9;
    /// 0 picks the hardware concurrency. Results do not depend on it.
    unsigned threads = 0;
};

inline constexpr double kManifoldTolerance = 1e-10;

struct FitProblem {
    StateManifold manifold;
    std::vector<std::string> slots;
    std::vector<FitTarget> targets;
    std::vector<std::pair<std::string, std::string>> orthogonal_pairs;
    std::vector<FitGap> free_gaps;
    FitOptions options;

    /// Throws MalformedProblem.
    void validate() const;
};

struct FitResult {
    std::map<std::string, StateVector> states;
    std::map<std::string, double> gaps;
    std::vector<double> target_residuals;
    double residual_norm = 0.0;        ///< Euclidean norm of target residuals
    double orthogonality = 0.0;        ///< max |<a|b>| over orthogonal pairs
    double manifold_violation = 0.0;   ///< max block-mass error over states
    double constraint_violation = 0.0; ///< max of the two above
    std::size_t starts_used = 0;
    std::size_t iterations = 0; ///< of the selected start
    std::size_t best_start = 0;
    double penalty_weight = 0.0;
    bool converged = false;
};

/// Residuals and Jacobian of the fitting objective over the flat parameter
/// vector [slot 0 angular coords, slot 1 ..., log gaps].
class FitObjective {
  public:
    explicit FitObjective(const FitProblem &problem);

    std::size_t parameter_count() const noexcept { return params_; }
    std::size_t residual_count() const noexcept { return residuals_; }
    const ManifoldChart &chart() const noexcept { return chart_; }
    const std::vector<std::string> &gap_names() const noexcept { return gap_names_; }

    /// Target residuals first, then sqrt(weight) * (Re, Im) of each overlap.
    void evaluate(const Eigen::VectorXd &x, double weight, Eigen::VectorXd &r,
                  Eigen::MatrixXd *jacobian = nullptr) const;

    std::map<std::string, StateVector> decode_states(const Eigen::VectorXd &x) const;
    std::map<std::string, double> decode_gaps(const Eigen::VectorXd &x) const;

  private:
    const FitProblem &problem_;
    ManifoldChart chart_;
    std::vector<std::string> gap_names_;
    std::vector<std::size_t> target_slot_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
    // per target, per basis index: constant and per-gap coefficients
    std::vector<std::vector<double>> target_const_;
    std::vector<std::vector<std::vector<double>>> target_gap_coef_;
    std::size_t params_ = 0;
    std::size_t residuals_ = 0;
};

/// Multistart Levenberg-Marquardt. Deterministic for a fixed seed; never
/// throws for numeric trouble (converged = false instead).
FitResult fit(const FitProblem &problem);

struct TargetCheck {
    std::string slot;
    std::string label;
    double value = 0.0;
    double target = 0.0;
    double residual = 0.0; ///< value - target
};

struct PairCheck {
    std::string first;
    std::string second;
    double overlap = 0.0; ///< |<first|second>|
};

struct StateCheck {
    std::string slot;
    double norm_deviation = 0.0; ///< |<v|v> - 1|
    double manifold_violation = 0.0;
    NormTolerance tolerance_class = NormTolerance::Internal;
};

struct CandidateReport {
    std::vector<TargetCheck> targets;
    std::vector<PairCheck> pairs;
    std::vector<StateCheck> states;
    double residual_norm = 0.0;
    double max_residual = 0.0;
    double max_overlap = 0.0;
    double max_norm_deviation = 0.0;
    double max_manifold_violation = 0.0;
};

/// Pure evaluation of given states and gaps against a problem.
CandidateReport verify_candidate(const std::map<std::string, StateVector> &states,
                                 const std::map<std::string, double> &gaps,
                                 const FitProblem &problem);

/// One slot per observation ("w1", "w2", ...) with target
/// <w_k| F_first - F_second |w_k> = rate_first; every gap the targets touch
/// becomes a free gap.
FitProblem make_choice_fit_problem(const StateManifold &m, const std::vector<Act> &acts,
                                   const UtilityFunction &u,
                                   const std::vector<ObservedChoice> &observations,
                                   bool orthogonal_slots, FitOptions options = {});

} // namespace qdm
