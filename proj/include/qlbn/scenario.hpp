#ifndef QLBN_SCENARIO_HPP_
#define QLBN_SCENARIO_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qlbn/belief_network.hpp"
#include "qlbn/influence_diagram.hpp"
#include "qlbn/quantum_engine.hpp"

namespace qlbn {

// Scenario files are JSON documents:
//
//   {
//     "variables": [{"name": "P1", "states": ["Def", "Coop"]}, ...],
//     "cpts": [{"child": "P2", "parents": ["P1"],
//               "rows": [{"given": ["Def"], "probs": [0.97, 0.03]}, ...]}],
//     "decision": "P2",
//     "utilities": [{"action": "Def",
//                    "payoffs": [{"assignment": {"P1": "Def"}, "value": 30}]}],
//     "phases": {"mode": "per-outcome", "variable": "P2",
//                "angles": {"Def": 2.8057, "Coop": 2.8057}},
//     "evidence": {"P1": "Def"}
//   }
//
// Payoff assignments name every variable except, optionally, the decision
// variable (implied by the action). Unlisted basis states pay 0. "phases" may
// instead be {"mode": "per-state", "theta": [...]} with one angle per basis
// state. "phases" and "evidence" are optional.

struct PayoffEntry {
  PartialAssignment assignment;
  double value = 0.0;

  bool operator==(const PayoffEntry &) const = default;
};

struct ActionPayoffs {
  std::string action;
  std::vector<PayoffEntry> payoffs;

  bool operator==(const ActionPayoffs &) const = default;
};

struct PhaseSpec {
  enum class Mode { PerState, PerOutcome };
  Mode mode = Mode::PerOutcome;
  std::vector<double> theta;                          // PerState
  std::string variable;                               // PerOutcome
  std::map<std::string, double, std::less<>> angles;  // PerOutcome

  bool operator==(const PhaseSpec &) const = default;
};

struct Scenario {
  BeliefNetwork network;
  std::string decision;
  std::vector<ActionPayoffs> utilities;
  std::optional<PhaseSpec> phases;
  PartialAssignment evidence;

  bool operator==(const Scenario &) const = default;
};

// Malformed document. `location` is "line L, column C" for syntax errors and
// a JSON pointer such as "/cpts/1/rows/0/probs" for schema errors.
class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(std::string location, const std::string &message);
  const std::string &location() const noexcept { return location_; }

 private:
  std::string location_;
};

class ScenarioIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural parse only; network invariants are left to validate_scenario().
Scenario parse_scenario(std::string_view text);

// Throws ScenarioIoError when the file cannot be read.
std::string read_file(const std::filesystem::path &path);

// Network invariants plus cross references of decision, payoffs, phases and
// evidence.
ValidationReport validate_scenario(const Scenario &scenario);

// read + parse + validate; throws InvalidNetworkError on a non-empty report.
Scenario load_scenario(const std::filesystem::path &path);

std::string serialize_scenario(const Scenario &scenario);

// Resolved, ready-to-evaluate form of a valid scenario.
struct DecisionModel {
  JointDistribution joint;  // after evidence
  DecisionRule rule;
  std::vector<UtilityOperator> operators;  // one per action, rule order
  PhaseAssignment phases;
};

// Evidence is applied classically before the quantum lift. Without a "phases"
// entry the zero-interference assignment over the decision variable is used.
DecisionModel resolve(const Scenario &scenario);

// Dense operators over `basis` (which must be the scenario's joint).
std::vector<UtilityOperator> utility_operators(const Scenario &scenario,
                                               const JointDistribution &basis);

PhaseAssignment phase_assignment(const PhaseSpec &spec,
                                 const JointDistribution &basis);

// Two-player prisoner's dilemma: uniform prior over P1, P2 defects with 0.97
// after a known defection and 0.84 after known cooperation, payoffs 30/25/85/36,
// shared per-outcome angle 2.8057.
std::string_view prisoners_dilemma_json();
Scenario prisoners_dilemma();

}  // namespace qlbn

#endif  // QLBN_SCENARIO_HPP_
