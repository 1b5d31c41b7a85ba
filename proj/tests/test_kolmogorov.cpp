#include <cmath>

#include "doctest.h"
#include "qdm/errors.hpp"
#include "qdm/kolmogorov.hpp"
#include "qdm/scenarios.hpp"

using namespace qdm;
using doctest::Approx;

namespace {

PreferencePattern pattern(Winner first, Winner second) {
    return {{{"f1", "f2", first}, {"f4", "f3", second}}};
}

} // namespace

TEST_CASE("total probability") {
    const auto g = total_probability_feasible(0.69, 0.59, 0.36);
    CHECK_FALSE(g.feasible);
    CHECK(g.lo == 0.59);
    CHECK(g.hi == 0.69);
    const auto h = total_probability_feasible(0.54, 0.57, 0.32);
    CHECK_FALSE(h.feasible);
    CHECK(h.lo == 0.54);
    CHECK(h.hi == 0.57);
    CHECK(total_probability_feasible(0.5, 0.5, 0.5).feasible);
    CHECK(total_probability_feasible(0.2, 0.8, 0.8).feasible);
    CHECK_THROWS_AS(total_probability_feasible(0.2, 1.8, 0.5), InvalidProbability);
}

TEST_CASE("widening the interval never removes feasibility") {
    for (int i = 0; i <= 20; ++i) {
        for (int j = 0; j <= 20; ++j) {
            for (int t = 0; t <= 20; ++t) {
                const double a = i / 20.0, b = j / 20.0, p = t / 20.0;
                if (!total_probability_feasible(a, b, p).feasible) {
                    continue;
                }
                const double lo = std::min(a, b), hi = std::max(a, b);
                CHECK(total_probability_feasible(std::max(0.0, lo - 0.1), hi, p).feasible);
                CHECK(total_probability_feasible(lo, std::min(1.0, hi + 0.1), p).feasible);
            }
        }
    }
}

TEST_CASE("linear form rendering") {
    CHECK(format_linear_form({1, 0, -1}, {"R", "Y", "B"}) == "p_R - p_B");
    CHECK(format_linear_form({0, -1, 1, 0}, {"R", "Y", "B", "G"}) == "-p_Y + p_B");
    CHECK(format_linear_form({2, 0.5}, {"a", "b"}) == "2*p_a + 0.5*p_b");
}

TEST_CASE("Ellsberg patterns") {
    const auto t = *builtin("ellsberg3").table;
    const auto bad = classical_pattern_feasible(t.manifold, t.acts, t.utility,
                                                pattern(Winner::First, Winner::First));
    CHECK_FALSE(bad.feasible);
    CHECK(bad.method == "sign-analysis");
    REQUIRE(bad.certificate);
    CHECK(bad.certificate->expression == "p_R - p_B");

    const auto good = classical_pattern_feasible(t.manifold, t.acts, t.utility,
                                                 pattern(Winner::First, Winner::Second));
    CHECK(good.feasible);
    REQUIRE(good.witness);
    CHECK(good.witness->prior[0] == Approx(1.0 / 3.0));
    CHECK(good.witness->prior[1] == Approx(2.0 / 3.0));
    CHECK(good.witness->prior[2] == 0.0);
    const auto margins = classical_margins(t.manifold, t.acts, t.utility,
                                           pattern(Winner::First, Winner::Second), *good.witness);
    for (double x : margins) {
        CHECK(x > kStrictMargin);
    }
    // by hand: du (p_R - p_B) for both margins with du = 1
    CHECK(margins[0] == Approx(1.0 / 3.0));
    CHECK(margins[1] == Approx(1.0 / 3.0));

    CHECK_THROWS_AS(classical_pattern_feasible(t.manifold, t.acts, t.utility,
                                               {{{"f1", "f9", Winner::First}}}),
                    MalformedPattern);
}

TEST_CASE("Machina patterns") {
    for (const char *name : {"machina-lower", "machina-upper"}) {
        CAPTURE(name);
        const auto t = *builtin(name).table;
        const auto r = classical_pattern_feasible(t.manifold, t.acts, t.utility,
                                                  pattern(Winner::First, Winner::First));
        CHECK_FALSE(r.feasible);
        REQUIRE(r.certificate);
        CHECK(r.certificate->expression == "p_Y - p_B");
        const auto ok = classical_pattern_feasible(t.manifold, t.acts, t.utility,
                                                   pattern(Winner::First, Winner::Second));
        CHECK(ok.feasible);
    }
}

TEST_CASE("grid search agrees with sign analysis") {
    for (const char *name : {"ellsberg3", "machina-lower", "machina-upper"}) {
        for (Winner a : {Winner::First, Winner::Second}) {
            for (Winner b : {Winner::First, Winner::Second}) {
                CAPTURE(name);
                const auto t = *builtin(name).table;
                const auto p = pattern(a, b);
                const auto fast = classical_pattern_feasible(t.manifold, t.acts, t.utility, p);
                const auto grid = grid_pattern_feasible(t.manifold, t.acts, t.utility, p);
                CHECK(grid.method == "grid");
                CHECK(fast.feasible == grid.feasible);
                if (grid.witness) {
                    for (double x : classical_margins(t.manifold, t.acts, t.utility, p,
                                                      *grid.witness)) {
                        CHECK(x > kStrictMargin);
                    }
                }
            }
        }
    }
}

TEST_CASE("patterns without a common factor fall back to the grid") {
    const std::vector<std::string> ev{"R", "Y", "B"};
    const StateManifold m(SpectralFamily::elementary(ev), {{{"R", "Y", "B"}, 1.0}});
    const std::vector<Act> acts{{"a", {{"R", 10}, {"Y", 0}, {"B", 0}}},
                                {"b", {{"R", 0}, {"Y", 10}, {"B", 0}}},
                                {"c", {{"R", 0}, {"Y", 0}, {"B", 10}}}};
    const UtilityFunction u({{0.0, 0.0}}, {{"g", 0.0, 10.0}});
    const PreferencePattern cyclic{{{"a", "b", Winner::First},
                                    {"b", "c", Winner::First},
                                    {"c", "a", Winner::First}}};
    const auto r = classical_pattern_feasible(m, acts, u, cyclic);
    CHECK(r.method == "grid");
    CHECK_FALSE(r.feasible);
    const PreferencePattern chain{{{"a", "b", Winner::First}, {"b", "c", Winner::First}}};
    const auto s = classical_pattern_feasible(m, acts, u, chain);
    CHECK(s.method == "grid");
    REQUIRE(s.feasible);
    for (double x : classical_margins(m, acts, u, chain, *s.witness)) {
        CHECK(x > kStrictMargin);
    }
}
