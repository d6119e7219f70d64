#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "qlbn/scenario.hpp"
#include "test_support.hpp"

using namespace qlbn;

TEST_CASE("built-in prisoner's dilemma scenario") {
  const auto s = prisoners_dilemma();
  CHECK(validate_scenario(s).empty());
  CHECK(s.network == qlbn::testing::pd_network());
  CHECK(s.decision == "P2");

  const auto model = resolve(s);
  CHECK(model.operators == qlbn::testing::pd_operators());
  CHECK(model.rule == qlbn::testing::pd_rule());
  CHECK(model.phases == qlbn::testing::pd_phases(2.8057, 2.8057));
}

TEST_CASE("bundled scenario file matches the built-in") {
  const auto path =
      std::filesystem::path(QLBN_SOURCE_DIR) / "scenarios/prisoners_dilemma.json";
  CHECK(load_scenario(path) == prisoners_dilemma());
}

TEST_CASE("serialize then parse is lossless") {
  auto s = prisoners_dilemma();
  CHECK(parse_scenario(serialize_scenario(s)) == s);

  s.evidence = {{"P1", "Coop"}};
  s.phases = PhaseSpec{PhaseSpec::Mode::PerState, {0.1, 1.0 / 3.0, 2.0, 1e-17},
                       "", {}};
  CHECK(parse_scenario(serialize_scenario(s)) == s);
}

TEST_CASE("round trip over random networks") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 50; ++i) {
    Scenario s;
    s.network = qlbn::testing::random_network(rng, 4);
    s.decision = s.network.variables.back().name;
    const auto joint = enumerate_joint(s.network);
    s.phases = PhaseSpec{PhaseSpec::Mode::PerState,
                         qlbn::testing::random_phases(rng, joint.size()), "",
                         {}};
    REQUIRE(validate_scenario(s).empty());
    CHECK(parse_scenario(serialize_scenario(s)) == s);
  }
}

TEST_CASE("parse diagnostics") {
  SUBCASE("empty") {
    CHECK_THROWS_WITH_AS(parse_scenario("  \n"), "empty scenario",
                         ScenarioParseError);
  }
  SUBCASE("syntax error carries line and column") {
    try {
      parse_scenario("{\n  \"variables\": [,]\n}");
      FAIL("expected ScenarioParseError");
    } catch (const ScenarioParseError &e) {
      CHECK(e.location() == "line 2, column 17");
    }
  }
  SUBCASE("schema error carries a pointer") {
    std::string text(prisoners_dilemma_json());
    text.replace(text.find("0.97"), 4, "\"x\"");
    try {
      parse_scenario(text);
      FAIL("expected ScenarioParseError");
    } catch (const ScenarioParseError &e) {
      CHECK(e.location() == "/cpts/1/rows/0/probs/0");
    }
  }
  SUBCASE("missing field") {
    CHECK_THROWS_WITH_AS(parse_scenario(R"({"variables": [], "cpts": []})"),
                         "/: missing field \"decision\"", ScenarioParseError);
  }
  SUBCASE("unknown phase mode") {
    std::string text(prisoners_dilemma_json());
    text.replace(text.find("per-outcome"), 11, "sideways");
    CHECK_THROWS_AS(parse_scenario(text), ScenarioParseError);
  }
}

TEST_CASE("scenario validation catches bad cross references") {
  auto s = prisoners_dilemma();
  SUBCASE("row sum") {
    s.network.tables[1].rows[0].probs = {0.6, 0.5};
    const auto report = validate_scenario(s);
    REQUIRE(report.size() == 1);
    CHECK(report[0].rule == "row-sum");
    CHECK(report[0].subject.find("row 0") != std::string::npos);
  }
  SUBCASE("decision") {
    s.decision = "P3";
    CHECK_FALSE(validate_scenario(s).empty());
  }
  SUBCASE("payoff on the wrong action") {
    s.utilities[0].payoffs[0].assignment["P2"] = "Coop";
    CHECK_FALSE(validate_scenario(s).empty());
  }
  SUBCASE("incomplete payoff") {
    s.utilities[0].payoffs[0].assignment.clear();
    CHECK_FALSE(validate_scenario(s).empty());
  }
  SUBCASE("missing angle") {
    s.phases->angles.erase("Coop");
    CHECK_FALSE(validate_scenario(s).empty());
  }
  SUBCASE("per-state length") {
    s.phases = PhaseSpec{PhaseSpec::Mode::PerState, {0.0, 1.0}, "", {}};
    CHECK_FALSE(validate_scenario(s).empty());
  }
  SUBCASE("evidence") {
    s.evidence = {{"P1", "Maybe"}};
    CHECK_FALSE(validate_scenario(s).empty());
  }
}

TEST_CASE("resolve applies evidence before the lift") {
  auto s = prisoners_dilemma();
  s.evidence = {{"P1", "Def"}};
  const auto model = resolve(s);
  CHECK(model.joint.probability(0) == doctest::Approx(0.97).epsilon(1e-12));
  CHECK(model.joint.probability(2) == 0.0);
}

TEST_CASE("resolve without phases uses zero interference") {
  auto s = prisoners_dilemma();
  s.phases.reset();
  const auto model = resolve(s);
  const auto family =
      quantum_marginal_family(model.joint, model.phases, "P2");
  CHECK(std::abs(family.at("Def").probability - 0.905) <= 1e-12);
}

TEST_CASE("unspecified actions get a zero operator") {
  auto s = prisoners_dilemma();
  s.utilities.pop_back();
  const auto model = resolve(s);
  REQUIRE(model.operators.size() == 2);
  CHECK(model.operators[1] == UtilityOperator{"Coop", {0, 0, 0, 0}});
}

TEST_CASE("unreadable file") {
  CHECK_THROWS_AS(load_scenario("/nonexistent/dir/scenario.json"),
                  ScenarioIoError);
}
