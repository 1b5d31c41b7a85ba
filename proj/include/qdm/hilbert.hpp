/**
 * @file
 * Finite-dimensional complex Hilbert-space kernel: state vectors, canonical
 * basis projectors, Born-rule probabilities, collapse and expectations of
 * diagonal (Hermitian) operators.
 */
#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qdm {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

double deg_to_rad(double degrees);
double rad_to_deg(double radians);

/// Wraps an angle into [0, 2*pi).
double wrap_phase(double radians);

/// Signed difference a - b wrapped into (-pi, pi].
double phase_difference(double a, double b);

/**
 * @brief Polar form of a complex amplitude.
 *
 * Modulus is nonnegative; the phase is kept in radians and normalized to
 * [0, 2*pi). Degrees are only used at I/O boundaries.
 */
class ComplexAmplitude {
  public:
    ComplexAmplitude() = default;
    ComplexAmplitude(double modulus, double phase_rad);

    static ComplexAmplitude from_degrees(double modulus, double phase_deg);
    static ComplexAmplitude from_complex(Complex z);

    double modulus() const noexcept { return modulus_; }
    double phase() const noexcept { return phase_; }
    double phase_deg() const { return rad_to_deg(phase_); }
    Complex to_complex() const { return std::polar(modulus_, phase_); }

  private:
    double modulus_ = 0.0;
    double phase_ = 0.0;
};

/// Tolerance class for the unit-norm invariant of a StateVector.
enum class NormTolerance {
    Internal,  ///< |<v|v> - 1| <= 1e-9
    Published, ///< |<v|v> - 1| <= 1e-2, for vectors transcribed at printed precision
};

double norm_tolerance(NormTolerance cls);

class StateVector {
  public:
    /// Throws NotNormalized if the squared norm is outside the tolerance class.
    explicit StateVector(std::vector<Complex> amplitudes,
                         NormTolerance tolerance = NormTolerance::Internal);

    static StateVector from_polar(std::span<const ComplexAmplitude> amplitudes,
                                  NormTolerance tolerance = NormTolerance::Internal);

    /// (modulus, phase in degrees) pairs.
    static StateVector
    from_polar_deg(std::initializer_list<std::pair<double, double>> amplitudes,
                   NormTolerance tolerance = NormTolerance::Internal);

    std::size_t dimension() const noexcept { return amplitudes_.size(); }
    const Complex &operator[](std::size_t i) const { return amplitudes_[i]; }
    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    ComplexAmplitude polar(std::size_t i) const {
        return ComplexAmplitude::from_complex(amplitudes_[i]);
    }
    double norm_squared() const;
    NormTolerance tolerance_class() const noexcept { return tolerance_; }

    /// Multiplies every amplitude by exp(i*phi).
    StateVector with_global_phase(double phi) const;

  private:
    std::vector<Complex> amplitudes_;
    NormTolerance tolerance_;
};

/// Rescales to unit norm, phases untouched. Throws ZeroVector.
StateVector normalize(std::span<const Complex> raw);

/// Projector onto the span of a set of canonical basis vectors.
class EventProjector {
  public:
    EventProjector(std::size_t dimension, std::vector<std::size_t> indices);

    std::size_t dimension() const noexcept { return dimension_; }
    /// Sorted ascending.
    const std::vector<std::size_t> &indices() const noexcept { return indices_; }
    bool contains(std::size_t index) const;

  private:
    std::size_t dimension_;
    std::vector<std::size_t> indices_;
};

/// Labelled projectors that are pairwise disjoint and sum to the identity.
class SpectralFamily {
  public:
    struct Event {
        std::string label;
        EventProjector projector;
    };

    SpectralFamily(std::size_t dimension, std::vector<Event> events);

    /// One event per basis vector, in order.
    static SpectralFamily elementary(const std::vector<std::string> &labels);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t size() const noexcept { return events_.size(); }
    const std::vector<Event> &events() const noexcept { return events_; }
    const Event &event(std::size_t k) const { return events_.at(k); }

    /// Throws UnknownEvent.
    std::size_t index_of(const std::string &label) const;
    bool has(const std::string &label) const;
    const EventProjector &projector(const std::string &label) const {
        return events_[index_of(label)].projector;
    }
    std::vector<std::string> labels() const;

    /// Event index owning a basis index.
    std::size_t event_of_basis(std::size_t basis_index) const;

  private:
    std::size_t dimension_;
    std::vector<Event> events_;
    std::vector<std::size_t> owner_;
};

/// Real diagonal operator in the canonical basis.
class DiagonalOperator {
  public:
    explicit DiagonalOperator(std::vector<double> eigenvalues);

    std::size_t dimension() const noexcept { return eigenvalues_.size(); }
    const std::vector<double> &eigenvalues() const noexcept { return eigenvalues_; }
    double operator[](std::size_t i) const { return eigenvalues_[i]; }

    friend DiagonalOperator operator+(const DiagonalOperator &a,
                                      const DiagonalOperator &b);
    friend DiagonalOperator operator-(const DiagonalOperator &a,
                                      const DiagonalOperator &b);
    friend DiagonalOperator operator*(double s, const DiagonalOperator &a);

  private:
    std::vector<double> eigenvalues_;
};

/// Sum of conj(u_i) * v_i.
Complex inner(const StateVector &u, const StateVector &v);

double born(const StateVector &v, const EventProjector &event);

/// Projects onto the event and renormalizes. Throws ZeroProbabilityEvent when
/// born(v, event) <= 1e-12.
StateVector collapse(const StateVector &v, const EventProjector &event);

double expectation(const StateVector &v, const DiagonalOperator &op);

} // namespace qdm
