#include "qdm/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdm/errors.hpp"

namespace qdm {

namespace {

void require_same_dimension(std::size_t a, std::size_t b, const char *what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": dimension " +
                                std::to_string(a) + " vs " + std::to_string(b));
    }
}

} // namespace

double deg_to_rad(double degrees) { return degrees * kPi / 180.0; }
double rad_to_deg(double radians) { return radians * 180.0 / kPi; }

double wrap_phase(double radians) {
    double r = std::fmod(radians, 2.0 * kPi);
    if (r < 0.0) {
        r += 2.0 * kPi;
    }
    // fmod of a tiny negative value can land exactly on 2*pi after the shift
    if (r >= 2.0 * kPi) {
        r = 0.0;
    }
    return r;
}

double phase_difference(double a, double b) {
    double d = wrap_phase(a - b);
    return d > kPi ? d - 2.0 * kPi : d;
}

ComplexAmplitude::ComplexAmplitude(double modulus, double phase_rad)
    : modulus_(modulus), phase_(wrap_phase(phase_rad)) {
    if (!(modulus >= 0.0) || !std::isfinite(modulus) || !std::isfinite(phase_rad)) {
        throw InvalidArgument("amplitude modulus must be finite and nonnegative");
    }
}

ComplexAmplitude ComplexAmplitude::from_degrees(double modulus, double phase_deg) {
    return {modulus, deg_to_rad(phase_deg)};
}

ComplexAmplitude ComplexAmplitude::from_complex(Complex z) {
    const double m = std::abs(z);
    return {m, m == 0.0 ? 0.0 : std::arg(z)};
}

double norm_tolerance(NormTolerance cls) {
    return cls == NormTolerance::Internal ? 1e-9 : 1e-2;
}

StateVector::StateVector(std::vector<Complex> amplitudes, NormTolerance tolerance)
    : amplitudes_(std::move(amplitudes)), tolerance_(tolerance) {
    if (amplitudes_.empty()) {
        throw InvalidArgument("state vector must have positive dimension");
    }
    const double n2 = norm_squared();
    if (!std::isfinite(n2) || std::abs(n2 - 1.0) > norm_tolerance(tolerance_)) {
        throw NotNormalized("state vector squared norm " + std::to_string(n2) +
                            " is not within tolerance of 1");
    }
}

StateVector StateVector::from_polar(std::span<const ComplexAmplitude> amplitudes,
                                    NormTolerance tolerance) {
    std::vector<Complex> z;
    z.reserve(amplitudes.size());
    for (const auto &a : amplitudes) {
        z.push_back(a.to_complex());
    }
    return StateVector(std::move(z), tolerance);
}

StateVector
StateVector::from_polar_deg(std::initializer_list<std::pair<double, double>> amplitudes,
                            NormTolerance tolerance) {
    std::vector<ComplexAmplitude> polar;
    polar.reserve(amplitudes.size());
    for (const auto &[modulus, phase] : amplitudes) {
        polar.push_back(ComplexAmplitude::from_degrees(modulus, phase));
    }
    return from_polar(polar, tolerance);
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto &z : amplitudes_) {
        s += std::norm(z);
    }
    return s;
}

StateVector StateVector::with_global_phase(double phi) const {
    const Complex factor = std::polar(1.0, phi);
    std::vector<Complex> z(amplitudes_);
    for (auto &a : z) {
        a *= factor;
    }
    return StateVector(std::move(z), tolerance_);
}

StateVector normalize(std::span<const Complex> raw) {
    double n2 = 0.0;
    for (const auto &z : raw) {
        n2 += std::norm(z);
    }
    if (raw.empty() || n2 == 0.0) {
        throw ZeroVector("cannot normalize a zero vector");
    }
    const double inv = 1.0 / std::sqrt(n2);
    std::vector<Complex> out(raw.begin(), raw.end());
    for (auto &z : out) {
        z *= inv;
    }
    return StateVector(std::move(out));
}

EventProjector::EventProjector(std::size_t dimension, std::vector<std::size_t> indices)
    : dimension_(dimension), indices_(std::move(indices)) {
    if (dimension_ == 0) {
        throw InvalidArgument("projector dimension must be positive");
    }
    if (indices_.empty()) {
        throw InvalidArgument("projector index set must be nonempty");
    }
    std::sort(indices_.begin(), indices_.end());
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
        throw InvalidArgument("projector indices must be distinct");
    }
    if (indices_.back() >= dimension_) {
        throw InvalidArgument("projector index out of range");
    }
}

bool EventProjector::contains(std::size_t index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

SpectralFamily::SpectralFamily(std::size_t dimension, std::vector<Event> events)
    : dimension_(dimension), events_(std::move(events)),
      owner_(dimension, static_cast<std::size_t>(-1)) {
    if (events_.empty()) {
        throw InvalidArgument("spectral family needs at least one event");
    }
    for (std::size_t k = 0; k < events_.size(); ++k) {
        const auto &e = events_[k];
        if (e.projector.dimension() != dimension_) {
            throw DimensionMismatch("event '" + e.label + "' has wrong dimension");
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (events_[j].label == e.label) {
                throw InvalidArgument("duplicate event label '" + e.label + "'");
            }
        }
        for (auto i : e.projector.indices()) {
            if (owner_[i] != static_cast<std::size_t>(-1)) {
                throw InvalidArgument("events '" + events_[owner_[i]].label +
                                      "' and '" + e.label + "' overlap");
            }
            owner_[i] = k;
        }
    }
    for (std::size_t i = 0; i < dimension_; ++i) {
        if (owner_[i] == static_cast<std::size_t>(-1)) {
            throw InvalidArgument("events do not cover basis vector " +
                                  std::to_string(i));
        }
    }
}

SpectralFamily SpectralFamily::elementary(const std::vector<std::string> &labels) {
    std::vector<Event> events;
    events.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        events.push_back({labels[i], EventProjector(labels.size(), {i})});
    }
    return SpectralFamily(labels.size(), std::move(events));
}

std::size_t SpectralFamily::index_of(const std::string &label) const {
    for (std::size_t k = 0; k < events_.size(); ++k) {
        if (events_[k].label == label) {
            return k;
        }
    }
    throw UnknownEvent("unknown event '" + label + "'");
}

bool SpectralFamily::has(const std::string &label) const {
    return std::any_of(events_.begin(), events_.end(),
                       [&](const Event &e) { return e.label == label; });
}

std::vector<std::string> SpectralFamily::labels() const {
    std::vector<std::string> out;
    out.reserve(events_.size());
    for (const auto &e : events_) {
        out.push_back(e.label);
    }
    return out;
}

std::size_t SpectralFamily::event_of_basis(std::size_t basis_index) const {
    return owner_.at(basis_index);
}

DiagonalOperator::DiagonalOperator(std::vector<double> eigenvalues)
    : eigenvalues_(std::move(eigenvalues)) {
    if (eigenvalues_.empty()) {
        throw InvalidArgument("operator dimension must be positive");
    }
}

DiagonalOperator operator+(const DiagonalOperator &a, const DiagonalOperator &b) {
    require_same_dimension(a.dimension(), b.dimension(), "operator sum");
    std::vector<double> e(a.eigenvalues_);
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] += b.eigenvalues_[i];
    }
    return DiagonalOperator(std::move(e));
}

DiagonalOperator operator-(const DiagonalOperator &a, const DiagonalOperator &b) {
    return a + (-1.0) * b;
}

DiagonalOperator operator*(double s, const DiagonalOperator &a) {
    std::vector<double> e(a.eigenvalues_);
    for (auto &x : e) {
        x *= s;
    }
    return DiagonalOperator(std::move(e));
}

Complex inner(const StateVector &u, const StateVector &v) {
    require_same_dimension(u.dimension(), v.dimension(), "inner");
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < u.dimension(); ++i) {
        s += std::conj(u[i]) * v[i];
    }
    return s;
}

double born(const StateVector &v, const EventProjector &event) {
    require_same_dimension(v.dimension(), event.dimension(), "born");
    double p = 0.0;
    for (auto i : event.indices()) {
        p += std::norm(v[i]);
    }
    return p;
}

StateVector collapse(const StateVector &v, const EventProjector &event) {
    const double p = born(v, event);
    if (p <= 1e-12) {
        throw ZeroProbabilityEvent("event has zero probability in this state");
    }
    std::vector<Complex> out(v.dimension(), Complex{0.0, 0.0});
    const double inv = 1.0 / std::sqrt(p);
    for (auto i : event.indices()) {
        out[i] = v[i] * inv;
    }
    return StateVector(std::move(out));
}

double expectation(const StateVector &v, const DiagonalOperator &op) {
    require_same_dimension(v.dimension(), op.dimension(), "expectation");
    double s = 0.0;
    for (std::size_t i = 0; i < v.dimension(); ++i) {
        s += op[i] * std::norm(v[i]);
    }
    return s;
}

} // namespace qdm
