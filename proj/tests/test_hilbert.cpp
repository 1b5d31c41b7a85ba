#include <cmath>
#include <random>

#include "doctest.h"
#include "qdm/errors.hpp"
#include "qdm/hilbert.hpp"

using namespace qdm;
using doctest::Approx;

namespace {

const double kR3 = 1.0 / std::sqrt(3.0);

StateVector random_state(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<Complex> raw(n);
    for (auto &z : raw) {
        z = {g(rng), g(rng)};
    }
    return normalize(raw);
}

StateVector ellsberg_w1() {
    return StateVector::from_polar_deg({{kR3, 0.0}, {0.787, 28.0}, {0.216, 9.3}},
                                       NormTolerance::Published);
}

StateVector ellsberg_w2() {
    return StateVector::from_polar_deg({{kR3, 0.0}, {0.206, 208.0}, {0.790, 189.3}},
                                       NormTolerance::Published);
}

} // namespace

TEST_CASE("angles and amplitudes") {
    CHECK(deg_to_rad(180.0) == Approx(kPi));
    CHECK(rad_to_deg(kPi / 2) == Approx(90.0));
    CHECK(wrap_phase(-kPi / 2) == Approx(3 * kPi / 2));
    CHECK(wrap_phase(2 * kPi) == Approx(0.0));
    CHECK(phase_difference(0.1, 2 * kPi - 0.1) == Approx(0.2));

    const auto a = ComplexAmplitude::from_degrees(0.5, -90.0);
    CHECK(a.modulus() == 0.5);
    CHECK(a.phase_deg() == Approx(270.0));
    CHECK(a.to_complex().imag() == Approx(-0.5));
    CHECK_THROWS_AS(ComplexAmplitude(-1.0, 0.0), InvalidArgument);
    const auto b = ComplexAmplitude::from_complex({0.0, -2.0});
    CHECK(b.modulus() == Approx(2.0));
    CHECK(b.phase() == Approx(3 * kPi / 2));
}

TEST_CASE("state vector norm classes") {
    CHECK_NOTHROW(StateVector({1.0, 0.0}));
    CHECK_THROWS_AS(StateVector({1.0, 0.1}), NotNormalized);
    CHECK_NOTHROW(StateVector({1.0, 0.05}, NormTolerance::Published));
    CHECK_THROWS_AS(StateVector({1.0, 0.2}, NormTolerance::Published), NotNormalized);
    CHECK(ellsberg_w1().tolerance_class() == NormTolerance::Published);
    CHECK(norm_tolerance(NormTolerance::Internal) == 1e-9);
    CHECK(norm_tolerance(NormTolerance::Published) == 1e-2);
}

TEST_CASE("inner product") {
    const StateVector x({1.0, 0.0, 0.0});
    const StateVector y({0.0, 1.0, 0.0});
    CHECK(std::abs(inner(x, y)) == 0.0);
    CHECK(inner(x, x).real() == Approx(1.0));
    CHECK(std::abs(inner(ellsberg_w1(), ellsberg_w2())) <= 0.01);
    CHECK_THROWS_AS(inner(x, StateVector({1.0, 0.0})), DimensionMismatch);

    std::mt19937_64 rng(7);
    for (int k = 0; k < 100; ++k) {
        const auto u = random_state(4, rng);
        const auto v = random_state(4, rng);
        const Complex uv = inner(u, v);
        const Complex vu = inner(v, u);
        CHECK(std::abs(uv - std::conj(vu)) <= 1e-15);
        CHECK(inner(u, u).real() == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("inner product of the published Ellsberg pair by hand") {
    // conj(w1) . w2 component by component, amplitudes written out in degrees
    auto c = [](double m, double d) { return std::polar(m, d * kPi / 180.0); };
    const Complex sum = std::conj(c(kR3, 0)) * c(kR3, 0) +
                        std::conj(c(0.787, 28.0)) * c(0.206, 208.0) +
                        std::conj(c(0.216, 9.3)) * c(0.790, 189.3);
    CHECK(std::abs(inner(ellsberg_w1(), ellsberg_w2()) - sum) <= 1e-15);
    CHECK(std::abs(sum) == Approx(0.000571).epsilon(0.01));
}

TEST_CASE("normalize") {
    const auto v = normalize(std::vector<Complex>{1.0, 1.0, 1.0});
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(v[i].real() == Approx(kR3));
    }
    const Complex e = std::polar(1.0, 0.7);
    const auto w = normalize(std::vector<Complex>{0.0, e, 0.0});
    CHECK(std::abs(w[1] - e) <= 1e-15);
    const auto t = normalize(std::vector<Complex>{3.0, 4.0});
    CHECK(t[0].real() == Approx(0.6));
    CHECK(t[1].real() == Approx(0.8));
    CHECK(std::abs(t.norm_squared() - 1.0) <= 1e-12);
    CHECK_THROWS_AS(normalize(std::vector<Complex>{0.0, 0.0}), ZeroVector);
}

TEST_CASE("projectors and spectral families") {
    CHECK_THROWS_AS(EventProjector(3, {}), InvalidArgument);
    CHECK_THROWS_AS(EventProjector(3, {3}), InvalidArgument);
    CHECK_THROWS_AS(EventProjector(3, {1, 1}), InvalidArgument);
    const EventProjector p(3, {2, 0});
    CHECK(p.indices() == std::vector<std::size_t>{0, 2});
    CHECK(p.contains(2));
    CHECK_FALSE(p.contains(1));

    const auto fam = SpectralFamily::elementary({"R", "Y", "B"});
    CHECK(fam.size() == 3);
    CHECK(fam.index_of("B") == 2);
    CHECK_THROWS_AS(fam.index_of("G"), UnknownEvent);
    CHECK(fam.event_of_basis(1) == 1);

    CHECK_THROWS_AS(SpectralFamily(3, {{"a", EventProjector(3, {0, 1})},
                                       {"b", EventProjector(3, {1, 2})}}),
                    InvalidArgument);
    CHECK_THROWS_AS(SpectralFamily(3, {{"a", EventProjector(3, {0})},
                                       {"b", EventProjector(3, {1})}}),
                    InvalidArgument);
    const SpectralFamily coarse(3, {{"R", EventProjector(3, {0})},
                                    {"YB", EventProjector(3, {1, 2})}});
    CHECK(coarse.event_of_basis(2) == 1);
}

TEST_CASE("born rule") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const EventProjector er(3, {0});
    for (int k = 0; k < 50; ++k) {
        const double t = u01(rng);
        const StateVector v({kR3, std::polar(std::sqrt(2.0 / 3.0 * t), 6.0 * u01(rng)),
                             std::polar(std::sqrt(2.0 / 3.0 * (1.0 - t)), 6.0 * u01(rng))});
        CHECK(born(v, er) == Approx(1.0 / 3.0).epsilon(1e-12));
    }
    CHECK(born(StateVector({0.0, 1.0, 0.0}), EventProjector(3, {1})) == 1.0);
    CHECK(born(ellsberg_w1(), EventProjector(3, {1})) == Approx(0.787 * 0.787));
    CHECK_THROWS_AS(born(ellsberg_w1(), EventProjector(4, {1})), DimensionMismatch);
}

TEST_CASE("born additivity over spectral families") {
    std::mt19937_64 rng(3);
    const SpectralFamily fams[] = {
        SpectralFamily::elementary({"a", "b", "c", "d"}),
        SpectralFamily(4, {{"x", EventProjector(4, {0, 3})}, {"y", EventProjector(4, {1, 2})}}),
        SpectralFamily(4, {{"all", EventProjector(4, {0, 1, 2, 3})}}),
    };
    for (int k = 0; k < 200; ++k) {
        const auto v = random_state(4, rng);
        for (const auto &f : fams) {
            double total = 0.0;
            for (const auto &e : f.events()) {
                const double p = born(v, e.projector);
                CHECK(p >= 0.0);
                CHECK(p <= 1.0 + 1e-15);
                total += p;
            }
            CHECK(std::abs(total - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("collapse") {
    const double theta = 0.9;
    const StateVector v({kR3, std::polar(std::sqrt(2.0 / 3.0), theta), 0.0});
    const auto c = collapse(v, EventProjector(3, {1}));
    CHECK(std::abs(c[1] - std::polar(1.0, theta)) <= 1e-12);
    CHECK(std::abs(c[0]) == 0.0);

    const auto v0 = normalize(std::vector<Complex>{1.0, 1.0, 1.0});
    const auto yb = collapse(v0, EventProjector(3, {1, 2}));
    CHECK(std::abs(yb[0]) == 0.0);
    CHECK(yb[1].real() == Approx(std::sqrt(0.5)));
    CHECK(yb[2].real() == Approx(std::sqrt(0.5)));
    CHECK(born(yb, EventProjector(3, {1, 2})) == Approx(1.0));

    CHECK_THROWS_AS(collapse(StateVector({1.0, 0.0, 0.0}), EventProjector(3, {2})),
                    ZeroProbabilityEvent);

    std::mt19937_64 rng(5);
    const EventProjector e(4, {1, 3});
    for (int k = 0; k < 100; ++k) {
        const auto w = random_state(4, rng);
        const auto once = collapse(w, e);
        const auto twice = collapse(once, e);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(std::abs(once[i] - twice[i]) <= 1e-12);
        }
    }
}

TEST_CASE("global phase does not change probabilities") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
    const auto v = random_state(3, rng);
    const EventProjector e(3, {0, 2});
    const double p = born(v, e);
    for (int k = 0; k < 100; ++k) {
        CHECK(std::abs(born(v.with_global_phase(phase(rng)), e) - p) <= 1e-12);
    }
}

TEST_CASE("expectation") {
    std::mt19937_64 rng(17);
    const auto v = random_state(3, rng);
    CHECK(expectation(v, DiagonalOperator({1.0, 1.0, 1.0})) == Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(expectation(v, DiagonalOperator({1.0, 1.0})), DimensionMismatch);

    // an Ellsberg manifold state under F1 with u(0) = 0 and u(100) = 3
    const StateVector m({kR3, std::polar(0.5, 1.0), std::polar(std::sqrt(2.0 / 3.0 - 0.25), 2.0)});
    CHECK(expectation(m, DiagonalOperator({3.0, 0.0, 0.0})) == Approx(1.0));

    const double du = 2.3776;
    CHECK(expectation(ellsberg_w1(), DiagonalOperator({du, 0.0, -du})) ==
          Approx(0.68).epsilon(0.01 / 0.68));
}

TEST_CASE("expectation is linear and matches the dense matrix product") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> coef(-10.0, 10.0);
    for (std::size_t n = 1; n <= 4; ++n) {
        for (int k = 0; k < 50; ++k) {
            const auto v = random_state(n, rng);
            std::vector<double> d1(n), d2(n);
            for (std::size_t i = 0; i < n; ++i) {
                d1[i] = coef(rng);
                d2[i] = coef(rng);
            }
            const DiagonalOperator D1(d1), D2(d2);
            const double a = coef(rng), b = coef(rng);
            const double lhs = expectation(v, a * D1 + b * D2);
            const double rhs = a * expectation(v, D1) + b * expectation(v, D2);
            CHECK(std::abs(lhs - rhs) <= 1e-12);

            // <v| D |v> with D as a full complex matrix
            std::vector<std::vector<Complex>> dense(n, std::vector<Complex>(n, 0.0));
            for (std::size_t i = 0; i < n; ++i) {
                dense[i][i] = d1[i];
            }
            Complex acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                Complex row = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    row += dense[i][j] * v[j];
                }
                acc += std::conj(v[i]) * row;
            }
            CHECK(std::abs(acc.imag()) <= 1e-12);
            CHECK(std::abs(acc.real() - expectation(v, D1)) <= 1e-12);
        }
    }
}
