#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "qdm/errors.hpp"
#include "qdm/experiment.hpp"
#include "qdm/scenarios.hpp"

using namespace qdm;

namespace {

const std::string kData = QDM_DATA_DIR;

std::string read(const std::string &path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string replace(std::string s, const std::string &from, const std::string &to) {
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

void check_validation(const std::string &text, const std::string &fragment) {
    CAPTURE(fragment);
    CHECK_THROWS_WITH_AS(parse_experiment_text(text), doctest::Contains(fragment.c_str()),
                         ValidationError);
}

} // namespace

TEST_CASE("bundled fixtures match the built-in scenarios") {
    for (const char *name : {"ellsberg3", "machina-lower", "machina-upper"}) {
        CAPTURE(name);
        const ExperimentSpec spec = parse_experiment(kData + "/" + name + ".json");
        const ActTable t = *builtin(name).table;
        CHECK(spec.name == name);
        CHECK(spec.events == t.family().labels());
        REQUIRE(spec.blocks.size() == t.manifold.blocks().size());
        for (std::size_t j = 0; j < spec.blocks.size(); ++j) {
            CHECK(spec.blocks[j].events == t.manifold.blocks()[j].events);
            CHECK(std::abs(spec.blocks[j].mass - t.manifold.blocks()[j].mass) <= 1e-15);
        }
        REQUIRE(spec.acts.size() == t.acts.size());
        for (std::size_t k = 0; k < spec.acts.size(); ++k) {
            CHECK(spec.acts[k].label == t.acts[k].label);
            CHECK(spec.acts[k].payoffs == t.acts[k].payoffs);
        }
        const UtilityFunction u = spec.utility();
        CHECK(u.anchors() == t.utility.anchors());
        CHECK(u.free_gaps() == t.utility.free_gaps());
        CHECK(spec.observations == t.observed);
        CHECK(spec.orthogonal_slots);
    }
}

TEST_CASE("file errors") {
    CHECK_THROWS_AS(parse_experiment(kData + "/does-not-exist.json"), IoError);
    try {
        parse_experiment_text("{\n  \"name\": \"x\",\n  \"events\": [\"R\",, ]\n}");
        FAIL("expected a parse error");
    } catch (const ParseError &e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 18);
    }
    CHECK_THROWS_AS(parse_experiment_text(""), ParseError);
}

TEST_CASE("validation errors name the invariant and location") {
    const std::string good = read(kData + "/ellsberg3.json");
    CHECK_NOTHROW(parse_experiment_text(good));

    check_validation(replace(good, "\"mass\": \"2/3\"", "\"mass\": 0.5666666666666667"),
                     "block masses must sum to 1 (at /blocks)");
    check_validation(replace(good, "\"rate_first\": 0.68", "\"rate_first\": 1.2"),
                     "rate_first must lie in [0, 1] (at /observations/0/rate_first)");
    check_validation(replace(good, "{\"events\": [\"R\"], \"mass\": \"1/3\"},", ""),
                     "some event is in no block");
    check_validation(replace(good, "[\"Y\", \"B\"]", "[\"Y\", \"R\"]"), "appears twice");
    check_validation(replace(good, "\"f1\": {\"R\": 100, \"Y\": 0, \"B\": 0}",
                             "\"f1\": {\"R\": 100, \"Y\": 0}"),
                     "act has no payoff for event 'B' (at /acts/f1)");
    check_validation(replace(good, "\"f1\": {\"R\": 100", "\"f1\": {\"Z\": 1, \"R\": 100"),
                     "unknown event 'Z' (at /acts/f1/Z)");
    check_validation(replace(good, "\"Y\": 0, \"B\": 0}", "\"Y\": 50, \"B\": 0}"),
                     "utility is undefined at payoff 50");
    check_validation(replace(good, "[\"f1\", \"f2\"]", "[\"f1\", \"f9\"]"), "unknown act 'f9'");
    check_validation(replace(good, "\"anchors\": {\"0\": 0}", "\"anchors\": {\"0\": 0, \"100\": 3}"),
                     "(at /utility)");
    check_validation(replace(good, "\"name\": \"ellsberg3\",", ""), "missing field 'name'");
    check_validation(replace(good, "\"mass\": \"1/3\"", "\"mass\": \"1/0\""), "denominator");
    check_validation(replace(good, "\"orthogonal_slots\": true", "\"orthogonal_slots\": 1"),
                     "expected a boolean (at /orthogonal_slots)");
    check_validation("[1, 2]", "top level must be an object");
}
