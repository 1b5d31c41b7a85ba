/**
 * @file
 * Closed-form C^3 model of the disjunction effect. Two orthogonal conceptual
 * states |A> and |B>, a decision projector M, and the superposition
 * (|A> + |B>)/sqrt(2) whose probability deviates from the mean of the
 * marginals by the interference term Re<A|M|B>.
 */
#pragma once

#include "qdm/hilbert.hpp"

namespace qdm {

/// Observed "yes" probabilities in the A, B and "A or B" situations.
struct DisjunctionData {
    double mu_a = 0.0;
    double mu_b = 0.0;
    double mu_a_or_b = 0.0;

    /// Throws InvalidProbability when any entry is outside [0, 1].
    void validate() const;
};

struct DisjunctionModel {
    DisjunctionData data;
    StateVector vector_a;
    StateVector vector_b;
    EventProjector projector_m;
    double beta = 0.0;  ///< interference angle, radians
    double gamma = 0.0; ///< 0 or pi
    double a_coeff = 0.0;
    double b_coeff = 0.0;
    /// Set when a or b equals 1 and beta carries no information.
    bool beta_arbitrary = false;
};

/**
 * @brief Builds |A>, |B>, M and beta from three observed probabilities.
 *
 * Case mu_a + mu_b <= 1 uses a = 1 - mu_a, b = 1 - mu_b, gamma = pi and M onto
 * (0,0,1); otherwise a = mu_a, b = mu_b, gamma = 0 and M onto the first two
 * basis vectors. Throws NoQuantumRepresentation when the arccos argument
 * leaves [-1, 1], or when a degenerate branch cannot reproduce mu_a_or_b.
 */
DisjunctionModel build_disjunction_model(const DisjunctionData &data);

/// The argument of arccos for beta; NaN when a or b equals 1.
double disjunction_cos_beta(const DisjunctionData &data);

/// Re<A|M|B> via sqrt((1-a)(1-b)) cos(beta).
double interference_closed_form(const DisjunctionModel &model);

/// Re<A|M|B> by explicit complex arithmetic on the stored vectors.
double interference_direct(const DisjunctionModel &model);

/// Closed form, after checking it against the direct computation (1e-9).
double interference_term(const DisjunctionModel &model);

/// (1/2)(<A| + <B|) M (|A> + |B>) by direct complex arithmetic.
double predicted_disjunction(const DisjunctionModel &model);

} // namespace qdm
