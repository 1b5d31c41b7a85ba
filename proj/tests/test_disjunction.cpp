#include <cmath>
#include <random>

#include "doctest.h"
#include "qdm/disjunction.hpp"
#include "qdm/errors.hpp"

using namespace qdm;
using doctest::Approx;

TEST_CASE("Hawaii construction") {
    const auto m = build_disjunction_model({0.54, 0.57, 0.32});
    CHECK(std::abs(rad_to_deg(m.beta) - 121.90) <= 0.05);
    CHECK(m.gamma == 0.0);
    CHECK(m.projector_m.indices() == std::vector<std::size_t>{0, 1});
    const double a[] = {0.73, 0.0, 0.68};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(m.vector_a[i].real() - a[i]) <= 0.01);
        CHECK(m.vector_a[i].imag() == 0.0);
    }
    CHECK(m.vector_a[0].real() == Approx(std::sqrt(0.54)));
    CHECK(m.vector_a[2].real() == Approx(std::sqrt(0.46)));

    // printed e^{i 121.90 deg}(0.61, 0.45, -0.66)
    const double b[] = {0.61, 0.45, -0.66};
    const Complex unit = std::polar(1.0, deg_to_rad(121.90));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(std::abs(m.vector_b[i]) - std::abs(b[i])) <= 0.01);
        CHECK(std::abs(m.vector_b[i] - b[i] * unit) <= 0.01);
    }
    CHECK(std::abs(predicted_disjunction(m) - 0.32) <= 1e-9);
    CHECK(interference_term(m) == Approx(0.32 - (0.54 + 0.57) / 2).epsilon(1e-9));
    CHECK(std::abs(interference_term(m) + 0.235) <= 0.001);
}

TEST_CASE("two-stage gamble construction") {
    const auto m = build_disjunction_model({0.69, 0.59, 0.36});
    CHECK(std::abs(rad_to_deg(m.beta) - 141.76) <= 0.05);
    const double a[] = {0.83, 0.0, 0.56};
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(m.vector_a[i].real() - a[i]) <= 0.01);
    }
    const double b[] = {0.43, 0.64, -0.64};
    const Complex unit = std::polar(1.0, deg_to_rad(141.76));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(m.vector_b[i] - b[i] * unit) <= 0.01);
    }
    CHECK(std::abs(predicted_disjunction(m) - 0.36) <= 1e-9);
    CHECK(std::abs(interference_term(m) + 0.28) <= 0.001);
}

TEST_CASE("no interference at beta = 90 degrees") {
    const auto m = build_disjunction_model({0.5, 0.5, 0.5});
    CHECK(rad_to_deg(m.beta) == Approx(90.0));
    CHECK(m.gamma == Approx(kPi));
    CHECK(m.projector_m.indices() == std::vector<std::size_t>{2});
    CHECK(std::abs(interference_term(m)) <= 1e-12);
    CHECK(predicted_disjunction(m) == Approx(0.5));
}

TEST_CASE("cos beta by hand") {
    // a = b = 0.9: (0 - 1.8) / (2 sqrt(0.01)) = -9
    CHECK(disjunction_cos_beta({0.9, 0.9, 0.0}) == Approx(-9.0));
    CHECK_THROWS_AS(build_disjunction_model({0.9, 0.9, 0.0}), NoQuantumRepresentation);
    // case (i): a = 0.7, b = 0.6, (2*0.2 - 0.7) / (2 sqrt(0.3*0.4))
    CHECK(disjunction_cos_beta({0.3, 0.4, 0.2}) ==
          Approx((0.4 - 0.7) / (2.0 * std::sqrt(0.3 * 0.4))));
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(build_disjunction_model({1.2, 0.5, 0.5}), InvalidProbability);
    CHECK_THROWS_AS(build_disjunction_model({0.5, -0.1, 0.5}), InvalidProbability);
    CHECK_THROWS_AS(build_disjunction_model({0.5, 0.5, std::nan("")}), InvalidProbability);
}

TEST_CASE("boundary mu_a + mu_b = 1 uses the first case") {
    const auto m = build_disjunction_model({0.4, 0.6, 0.5});
    CHECK(m.gamma == Approx(kPi));
    CHECK(m.a_coeff == Approx(0.6));
    CHECK(m.b_coeff == Approx(0.4));
    CHECK(std::abs(predicted_disjunction(m) - 0.5) <= 1e-9);
}

TEST_CASE("degenerate branches") {
    SUBCASE("a = 1 leaves beta arbitrary") {
        const auto m = build_disjunction_model({1.0, 0.3, 0.65});
        CHECK(m.beta_arbitrary);
        CHECK(m.beta == 0.0);
        CHECK(std::abs(predicted_disjunction(m) - 0.65) <= 1e-9);
        CHECK(std::abs(inner(m.vector_a, m.vector_b)) <= 1e-9);
        CHECK_THROWS_AS(build_disjunction_model({1.0, 0.3, 0.2}), NoQuantumRepresentation);
    }
    SUBCASE("a = 0 uses e^{i beta}(0, 1, 0)") {
        const auto m = build_disjunction_model({1.0, 0.0, 0.5});
        CHECK(m.a_coeff == 0.0);
        CHECK(std::abs(m.vector_b[1]) == Approx(1.0));
        CHECK(std::abs(predicted_disjunction(m) - 0.5) <= 1e-9);
    }
}

TEST_CASE("round trip over random data") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int built = 0;
    while (built < 1000) {
        const double pa = u01(rng);
        const double pb = u01(rng);
        const bool low = pa + pb <= 1.0;
        const double a = low ? 1.0 - pa : pa;
        const double b = low ? 1.0 - pb : pb;
        const double half = std::sqrt((1.0 - a) * (1.0 - b));
        // mu_or = (pa + pb)/2 + half * c with c in [-1, 1], kept inside [0, 1]
        const double c = 2.0 * u01(rng) - 1.0;
        const double por = (pa + pb) / 2.0 + half * c;
        if (por < 0.0 || por > 1.0) {
            continue;
        }
        ++built;
        const DisjunctionData d{pa, pb, por};
        const auto m = build_disjunction_model(d);
        CHECK(std::abs(predicted_disjunction(m) - por) <= 1e-9);
        CHECK(std::abs(inner(m.vector_a, m.vector_b)) <= 1e-9);
        CHECK(std::abs(m.vector_a.norm_squared() - 1.0) <= 1e-9);
        CHECK(std::abs(m.vector_b.norm_squared() - 1.0) <= 1e-9);
        CHECK(std::abs(born(m.vector_a, m.projector_m) - pa) <= 1e-9);
        CHECK(std::abs(born(m.vector_b, m.projector_m) - pb) <= 1e-9);
        CHECK(std::abs(interference_closed_form(m) - interference_direct(m)) <= 1e-9);
    }
}
