#include "qdm/disjunction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qdm/errors.hpp"

namespace qdm {

namespace {

constexpr double kArgumentSlack = 1e-12;
constexpr double kDegenerateTolerance = 1e-9;

struct Branch {
    double a;
    double b;
    double gamma;
    bool upper; // mu_a + mu_b > 1
};

Branch select_branch(const DisjunctionData &d) {
    if (d.mu_a + d.mu_b <= 1.0) {
        return {1.0 - d.mu_a, 1.0 - d.mu_b, kPi, false};
    }
    return {d.mu_a, d.mu_b, 0.0, true};
}

double clamp_unit(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

} // namespace

void DisjunctionData::validate() const {
    for (double p : {mu_a, mu_b, mu_a_or_b}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw InvalidProbability("probability " + std::to_string(p) +
                                     " is outside [0, 1]");
        }
    }
}

double disjunction_cos_beta(const DisjunctionData &data) {
    const Branch br = select_branch(data);
    if (br.a == 1.0 || br.b == 1.0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return (2.0 * data.mu_a_or_b - data.mu_a - data.mu_b) /
           (2.0 * std::sqrt((1.0 - br.a) * (1.0 - br.b)));
}

DisjunctionModel build_disjunction_model(const DisjunctionData &data) {
    data.validate();
    const Branch br = select_branch(data);
    const double a = br.a;
    const double b = br.b;

    double beta = 0.0;
    bool arbitrary = false;
    if (a == 1.0 || b == 1.0) {
        // Interference vanishes, so the disjunction must equal the mean.
        arbitrary = true;
        const double mean = 0.5 * (data.mu_a + data.mu_b);
        if (std::abs(data.mu_a_or_b - mean) > kDegenerateTolerance) {
            throw NoQuantumRepresentation(
                "interference vanishes for these marginals; mu(A or B) must be " +
                std::to_string(mean));
        }
    } else {
        double c = disjunction_cos_beta(data);
        if (!(std::abs(c) <= 1.0 + kArgumentSlack)) {
            throw NoQuantumRepresentation("arccos argument " + std::to_string(c) +
                                          " is outside [-1, 1]");
        }
        c = c > 1.0 ? 1.0 : (c < -1.0 ? -1.0 : c);
        beta = std::acos(c);
    }

    std::vector<Complex> va{std::sqrt(a), 0.0, std::sqrt(clamp_unit(1.0 - a))};

    std::vector<Complex> vb;
    if (a != 0.0) {
        const Complex phase = std::polar(1.0, beta + br.gamma);
        vb = {phase * std::sqrt(clamp_unit((1.0 - a) * (1.0 - b) / a)),
              phase * std::sqrt(clamp_unit((a + b - 1.0) / a)),
              -phase * std::sqrt(clamp_unit(1.0 - b))};
    } else {
        vb = {0.0, std::polar(1.0, beta), 0.0};
    }

    EventProjector m = br.upper ? EventProjector(3, {0, 1}) : EventProjector(3, {2});

    return DisjunctionModel{data,
                            StateVector(std::move(va)),
                            StateVector(std::move(vb)),
                            std::move(m),
                            beta,
                            br.gamma,
                            a,
                            b,
                            arbitrary};
}

double interference_closed_form(const DisjunctionModel &model) {
    return std::sqrt(clamp_unit((1.0 - model.a_coeff) * (1.0 - model.b_coeff))) *
           std::cos(model.beta);
}

double interference_direct(const DisjunctionModel &model) {
    Complex s{0.0, 0.0};
    for (auto i : model.projector_m.indices()) {
        s += std::conj(model.vector_a[i]) * model.vector_b[i];
    }
    return s.real();
}

double interference_term(const DisjunctionModel &model) {
    const double closed = interference_closed_form(model);
    const double direct = interference_direct(model);
    if (std::abs(closed - direct) > 1e-9) {
        throw std::logic_error("interference closed form disagrees with direct value");
    }
    return closed;
}

double predicted_disjunction(const DisjunctionModel &model) {
    double s = 0.0;
    for (auto i : model.projector_m.indices()) {
        s += std::norm(model.vector_a[i] + model.vector_b[i]);
    }
    return 0.5 * s;
}

} // namespace qdm
