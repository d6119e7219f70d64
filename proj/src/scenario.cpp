#include "qlbn/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace qlbn {

using nlohmann::json;

ScenarioParseError::ScenarioParseError(std::string location,
                                       const std::string &message)
    : std::runtime_error(location.empty() ? message
                                          : location + ": " + message),
      location_(std::move(location)) {}

namespace {

constexpr std::string_view kPrisonersDilemma = R"({
  "variables": [
    {"name": "P1", "states": ["Def", "Coop"]},
    {"name": "P2", "states": ["Def", "Coop"]}
  ],
  "cpts": [
    {"child": "P1", "parents": [],
     "rows": [{"given": [], "probs": [0.5, 0.5]}]},
    {"child": "P2", "parents": ["P1"],
     "rows": [{"given": ["Def"], "probs": [0.97, 0.03]},
              {"given": ["Coop"], "probs": [0.84, 0.16]}]}
  ],
  "decision": "P2",
  "utilities": [
    {"action": "Def",
     "payoffs": [{"assignment": {"P1": "Def"}, "value": 30},
                 {"assignment": {"P1": "Coop"}, "value": 85}]},
    {"action": "Coop",
     "payoffs": [{"assignment": {"P1": "Def"}, "value": 25},
                 {"assignment": {"P1": "Coop"}, "value": 36}]}
  ],
  "phases": {"mode": "per-outcome", "variable": "P2",
             "angles": {"Def": 2.8057, "Coop": 2.8057}}
}
)";

// Schema reader that remembers where it is for error messages.
class Reader {
 public:
  Reader(const json &node, std::string path)
      : node_(node), path_(std::move(path)) {}

  const json &node() const { return node_; }
  const std::string &path() const { return path_; }

  [[noreturn]] void fail(const std::string &message) const {
    throw ScenarioParseError(path_.empty() ? "/" : path_, message);
  }

  Reader field(const char *key) const {
    expect_object();
    auto it = node_.find(key);
    if (it == node_.end()) fail(fmt::format("missing field \"{}\"", key));
    return Reader(*it, path_ + "/" + key);
  }

  std::optional<Reader> optional_field(const char *key) const {
    expect_object();
    auto it = node_.find(key);
    if (it == node_.end() || it->is_null()) return std::nullopt;
    return Reader(*it, path_ + "/" + key);
  }

  std::vector<Reader> items() const {
    if (!node_.is_array()) fail("expected an array");
    std::vector<Reader> out;
    for (std::size_t i = 0; i < node_.size(); ++i) {
      out.emplace_back(node_[i], fmt::format("{}/{}", path_, i));
    }
    return out;
  }

  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    return node_.get<double>();
  }

  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (const auto &item : items()) out.push_back(item.string());
    return out;
  }

  std::vector<double> numbers() const {
    std::vector<double> out;
    for (const auto &item : items()) out.push_back(item.number());
    return out;
  }

  PartialAssignment assignment() const {
    expect_object();
    PartialAssignment out;
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      out.emplace(it.key(), Reader(*it, path_ + "/" + it.key()).string());
    }
    return out;
  }

  void expect_object() const {
    if (!node_.is_object()) fail("expected an object");
  }

 private:
  const json &node_;
  std::string path_;
};

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return fmt::format("line {}, column {}", line, column);
}

PhaseSpec read_phases(const Reader &r) {
  PhaseSpec spec;
  const auto mode = r.field("mode");
  const auto name = mode.string();
  if (name == "per-state") {
    spec.mode = PhaseSpec::Mode::PerState;
    spec.theta = r.field("theta").numbers();
  } else if (name == "per-outcome") {
    spec.mode = PhaseSpec::Mode::PerOutcome;
    spec.variable = r.field("variable").string();
    const auto angles = r.field("angles");
    angles.expect_object();
    for (auto it = angles.node().begin(); it != angles.node().end(); ++it) {
      spec.angles.emplace(
          it.key(), Reader(*it, angles.path() + "/" + it.key()).number());
    }
  } else {
    mode.fail("mode must be \"per-state\" or \"per-outcome\"");
  }
  return spec;
}

json write_assignment(const PartialAssignment &a) {
  json out = json::object();
  for (const auto &[k, v] : a) out[k] = v;
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  const bool blank = std::all_of(text.begin(), text.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c));
  });
  if (blank) throw ScenarioParseError("", "empty scenario");

  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error &e) {
    throw ScenarioParseError(line_column(text, e.byte), "syntax error");
  }

  const Reader root(doc, "");
  root.expect_object();
  Scenario s;
  for (const auto &v : root.field("variables").items()) {
    s.network.variables.push_back(
        Variable{v.field("name").string(), v.field("states").strings()});
  }
  for (const auto &t : root.field("cpts").items()) {
    ConditionalTable table;
    table.child = t.field("child").string();
    if (auto parents = t.optional_field("parents")) {
      table.parents = parents->strings();
    }
    for (const auto &row : t.field("rows").items()) {
      TableRow r;
      if (auto given = row.optional_field("given")) r.given = given->strings();
      r.probs = row.field("probs").numbers();
      table.rows.push_back(std::move(r));
    }
    s.network.tables.push_back(std::move(table));
  }
  s.decision = root.field("decision").string();
  if (auto utilities = root.optional_field("utilities")) {
    for (const auto &u : utilities->items()) {
      ActionPayoffs ap;
      ap.action = u.field("action").string();
      for (const auto &p : u.field("payoffs").items()) {
        ap.payoffs.push_back(
            PayoffEntry{p.field("assignment").assignment(),
                        p.field("value").number()});
      }
      s.utilities.push_back(std::move(ap));
    }
  }
  if (auto phases = root.optional_field("phases")) {
    s.phases = read_phases(*phases);
  }
  if (auto evidence = root.optional_field("evidence")) {
    s.evidence = evidence->assignment();
  }
  return s;
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioIoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ScenarioIoError("error while reading " + path.string());
  return buf.str();
}

namespace {

bool is_state(const Variable &v, std::string_view s) {
  return std::find(v.states.begin(), v.states.end(), s) != v.states.end();
}

void check_assignment(const BeliefNetwork &net, const PartialAssignment &a,
                      const std::string &subject, ValidationReport &report) {
  for (const auto &[name, state] : a) {
    const Variable *v = net.find_variable(name);
    if (!v) {
      report.push_back({subject, "unknown-variable", name + " is not declared"});
    } else if (!is_state(*v, state)) {
      report.push_back(
          {subject, "unknown-state", state + " is not a state of " + name});
    }
  }
}

}  // namespace

ValidationReport validate_scenario(const Scenario &scenario) {
  auto report = validate(scenario.network);
  const auto &net = scenario.network;

  const Variable *decision = net.find_variable(scenario.decision);
  if (!decision) {
    report.push_back({"decision", "unknown-variable",
                      scenario.decision + " is not declared"});
  }

  std::set<std::string, std::less<>> actions;
  for (const auto &ap : scenario.utilities) {
    const std::string subject = "utilities " + ap.action;
    if (decision && !is_state(*decision, ap.action)) {
      report.push_back({subject, "unknown-action",
                        ap.action + " is not a state of " + scenario.decision});
    }
    if (!actions.insert(ap.action).second) {
      report.push_back({subject, "duplicate-action", "action listed twice"});
    }
    std::set<PartialAssignment, std::less<>> seen;
    for (const auto &entry : ap.payoffs) {
      if (!std::isfinite(entry.value)) {
        report.push_back({subject, "range", "payoff must be finite"});
      }
      check_assignment(net, entry.assignment, subject, report);
      auto it = entry.assignment.find(scenario.decision);
      if (it != entry.assignment.end() && it->second != ap.action) {
        report.push_back({subject, "inconsistent-payoff",
                          "payoff assigns " + scenario.decision + "=" +
                              it->second});
      }
      for (const auto &var : net.variables) {
        if (var.name != scenario.decision &&
            !entry.assignment.contains(var.name)) {
          report.push_back({subject, "incomplete-payoff",
                            "payoff does not fix " + var.name});
        }
      }
      auto full = entry.assignment;
      full[scenario.decision] = ap.action;
      if (!seen.insert(full).second) {
        report.push_back(
            {subject, "duplicate-payoff", "basis state paid twice"});
      }
    }
  }

  if (scenario.phases) {
    const auto &ph = *scenario.phases;
    if (ph.mode == PhaseSpec::Mode::PerState) {
      std::size_t basis = 1;
      for (const auto &var : net.variables) basis *= var.states.size();
      if (ph.theta.size() != basis) {
        report.push_back({"phases", "phase-length",
                          fmt::format("{} phases for {} basis states",
                                      ph.theta.size(), basis)});
      }
      for (double t : ph.theta) {
        if (!std::isfinite(t)) {
          report.push_back({"phases", "range", "phases must be finite"});
          break;
        }
      }
    } else {
      const Variable *v = net.find_variable(ph.variable);
      if (!v) {
        report.push_back({"phases", "unknown-variable",
                          ph.variable + " is not declared"});
      } else {
        for (const auto &[state, angle] : ph.angles) {
          if (!is_state(*v, state)) {
            report.push_back({"phases", "unknown-state",
                              state + " is not a state of " + ph.variable});
          }
          if (!std::isfinite(angle)) {
            report.push_back({"phases", "range", "angles must be finite"});
          }
        }
        for (const auto &state : v->states) {
          if (!ph.angles.contains(state)) {
            report.push_back(
                {"phases", "missing-angle", "no angle for " + state});
          }
        }
      }
    }
  }
  check_assignment(net, scenario.evidence, "evidence", report);
  return report;
}

Scenario load_scenario(const std::filesystem::path &path) {
  auto scenario = parse_scenario(read_file(path));
  auto report = validate_scenario(scenario);
  if (!report.empty()) throw InvalidNetworkError(std::move(report));
  return scenario;
}

std::string serialize_scenario(const Scenario &s) {
  json doc = json::object();
  json vars = json::array();
  for (const auto &v : s.network.variables) {
    vars.push_back({{"name", v.name}, {"states", v.states}});
  }
  doc["variables"] = std::move(vars);

  json cpts = json::array();
  for (const auto &t : s.network.tables) {
    json rows = json::array();
    for (const auto &r : t.rows) {
      rows.push_back({{"given", r.given}, {"probs", r.probs}});
    }
    cpts.push_back(
        {{"child", t.child}, {"parents", t.parents}, {"rows", std::move(rows)}});
  }
  doc["cpts"] = std::move(cpts);
  doc["decision"] = s.decision;

  json utilities = json::array();
  for (const auto &ap : s.utilities) {
    json payoffs = json::array();
    for (const auto &e : ap.payoffs) {
      payoffs.push_back(
          {{"assignment", write_assignment(e.assignment)}, {"value", e.value}});
    }
    utilities.push_back({{"action", ap.action}, {"payoffs", std::move(payoffs)}});
  }
  doc["utilities"] = std::move(utilities);

  if (s.phases) {
    const auto &ph = *s.phases;
    if (ph.mode == PhaseSpec::Mode::PerState) {
      doc["phases"] = {{"mode", "per-state"}, {"theta", ph.theta}};
    } else {
      json angles = json::object();
      for (const auto &[k, v] : ph.angles) angles[k] = v;
      doc["phases"] = {{"mode", "per-outcome"},
                       {"variable", ph.variable},
                       {"angles", std::move(angles)}};
    }
  }
  if (!s.evidence.empty()) doc["evidence"] = write_assignment(s.evidence);
  return doc.dump(2) + "\n";
}

std::vector<UtilityOperator> utility_operators(const Scenario &scenario,
                                               const JointDistribution &basis) {
  const auto rule = make_rule(basis, scenario.decision);
  std::vector<UtilityOperator> ops;
  for (const auto &action : rule.actions) {
    std::vector<std::pair<std::size_t, double>> payoffs;
    auto it = std::find_if(
        scenario.utilities.begin(), scenario.utilities.end(),
        [&](const ActionPayoffs &ap) { return ap.action == action; });
    if (it != scenario.utilities.end()) {
      for (const auto &entry : it->payoffs) {
        auto full = entry.assignment;
        full[scenario.decision] = action;
        const auto states = basis.consistent_states(full);
        if (states.size() != 1) {
          throw std::invalid_argument("payoff does not pin one basis state");
        }
        payoffs.emplace_back(states.front(), entry.value);
      }
    }
    ops.push_back(make_utility_operator(basis, rule, action, payoffs));
  }
  return ops;
}

PhaseAssignment phase_assignment(const PhaseSpec &spec,
                                 const JointDistribution &basis) {
  if (spec.mode == PhaseSpec::Mode::PerState) return PhaseAssignment(spec.theta);
  const auto v = basis.variable_index(spec.variable);
  std::vector<double> angles;
  for (const auto &state : basis.variables()[v].states) {
    auto it = spec.angles.find(state);
    if (it == spec.angles.end()) {
      throw std::invalid_argument("no angle for " + state);
    }
    angles.push_back(it->second);
  }
  return per_outcome_phases(basis, spec.variable, angles);
}

DecisionModel resolve(const Scenario &scenario) {
  const auto prior = enumerate_joint(scenario.network);
  auto joint = condition(prior, scenario.evidence);
  auto rule = make_rule(joint, scenario.decision);
  auto ops = utility_operators(scenario, joint);
  auto phases = scenario.phases
                    ? phase_assignment(*scenario.phases, joint)
                    : zero_interference_phases(joint, scenario.decision);
  return DecisionModel{std::move(joint), std::move(rule), std::move(ops),
                       std::move(phases)};
}

std::string_view prisoners_dilemma_json() { return kPrisonersDilemma; }

Scenario prisoners_dilemma() { return parse_scenario(kPrisonersDilemma); }

}  // namespace qlbn
