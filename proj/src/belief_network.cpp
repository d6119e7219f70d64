#include "qlbn/belief_network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

namespace qlbn {

std::string format_report(const ValidationReport &report) {
  std::string out;
  for (const auto &v : report) {
    out += fmt::format("{}: [{}] {}\n", v.subject, v.rule, v.message);
  }
  return out;
}

InvalidNetworkError::InvalidNetworkError(ValidationReport report)
    : std::runtime_error("invalid network:\n" + format_report(report)),
      report_(std::move(report)) {}

UnreachableTargetError::UnreachableTargetError(double target, double min,
                                               double max)
    : std::runtime_error(fmt::format(
          "target {:.6f} unreachable; attainable interval [{:.6f}, {:.6f}]",
          target, min, max)),
      min_(min),
      max_(max) {}

const Variable *BeliefNetwork::find_variable(std::string_view name) const {
  for (const auto &v : variables) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

const ConditionalTable *BeliefNetwork::find_table(
    std::string_view child) const {
  for (const auto &t : tables) {
    if (t.child == child) return &t;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// JointDistribution

JointDistribution::JointDistribution(std::vector<Variable> variables,
                                     std::vector<double> probabilities)
    : variables_(std::move(variables)),
      probabilities_(std::move(probabilities)) {
  strides_.assign(variables_.size(), 1);
  std::size_t expected = 1;
  for (std::size_t v = variables_.size(); v-- > 0;) {
    strides_[v] = expected;
    if (variables_[v].states.empty()) {
      throw std::invalid_argument("variable without states: " +
                                  variables_[v].name);
    }
    expected *= variables_[v].states.size();
  }
  if (probabilities_.size() != expected) {
    throw std::invalid_argument(
        fmt::format("joint has {} entries, basis has {} states",
                    probabilities_.size(), expected));
  }
  double total = 0.0;
  for (double p : probabilities_) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("joint entries must be finite and >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kProbabilityTolerance) {
    throw std::invalid_argument(
        fmt::format("joint sums to {:.12g}, expected 1", total));
  }
}

std::size_t JointDistribution::state_of(std::size_t index,
                                        std::size_t variable) const {
  return (index / strides_[variable]) % variables_[variable].states.size();
}

std::vector<std::size_t> JointDistribution::assignment(
    std::size_t index) const {
  std::vector<std::size_t> out(variables_.size());
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    out[v] = state_of(index, v);
  }
  return out;
}

std::size_t JointDistribution::variable_index(std::string_view name) const {
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (variables_[v].name == name) return v;
  }
  throw std::invalid_argument("unknown variable: " + std::string(name));
}

std::size_t JointDistribution::state_index(std::size_t variable,
                                           std::string_view label) const {
  const auto &states = variables_.at(variable).states;
  auto it = std::find(states.begin(), states.end(), label);
  if (it == states.end()) {
    throw std::invalid_argument(fmt::format("unknown state {} of variable {}",
                                            label, variables_[variable].name));
  }
  return static_cast<std::size_t>(it - states.begin());
}

std::vector<std::uint8_t> JointDistribution::mask(
    const PartialAssignment &query) const {
  std::vector<std::pair<std::size_t, std::size_t>> resolved;
  for (const auto &[name, label] : query) {
    const auto v = variable_index(name);
    resolved.emplace_back(v, state_index(v, label));
  }
  std::vector<std::uint8_t> out(size(), 1);
  for (std::size_t i = 0; i < size(); ++i) {
    for (const auto &[v, s] : resolved) {
      if (state_of(i, v) != s) {
        out[i] = 0;
        break;
      }
    }
  }
  return out;
}

std::vector<std::size_t> JointDistribution::consistent_states(
    const PartialAssignment &query) const {
  const auto m = mask(query);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) out.push_back(i);
  }
  return out;
}

std::string JointDistribution::label(std::size_t index) const {
  std::string out = "(";
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (v) out += ',';
    out += variables_[v].states[state_of(index, v)];
  }
  return out + ")";
}

// ---------------------------------------------------------------------------
// validate

namespace {

void check_variables(const BeliefNetwork &net, ValidationReport &report) {
  std::set<std::string, std::less<>> seen;
  for (const auto &var : net.variables) {
    if (var.name.empty()) {
      report.push_back({"<unnamed>", "name", "variable name is empty"});
    } else if (!seen.insert(var.name).second) {
      report.push_back(
          {var.name, "duplicate-variable", "variable declared twice"});
    }
    if (var.states.size() < 2) {
      report.push_back({var.name, "arity",
                        fmt::format("needs at least 2 states, has {}",
                                    var.states.size())});
    }
    std::set<std::string, std::less<>> labels;
    for (const auto &s : var.states) {
      if (s.empty()) {
        report.push_back({var.name, "state-label", "empty state label"});
      } else if (!labels.insert(s).second) {
        report.push_back(
            {var.name, "duplicate-state", "state '" + s + "' repeated"});
      }
    }
  }
}

std::string join(const std::vector<std::string> &parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ',';
    out += parts[i];
  }
  return out;
}

void check_table(const BeliefNetwork &net, const ConditionalTable &table,
                 ValidationReport &report) {
  const std::string subject = "table " + table.child;
  const Variable *child = net.find_variable(table.child);
  if (!child) {
    report.push_back({subject, "unknown-child",
                      "table for undeclared variable " + table.child});
  }

  bool parents_ok = true;
  std::set<std::string, std::less<>> seen_parents;
  std::vector<const Variable *> parents;
  for (const auto &name : table.parents) {
    const Variable *p = net.find_variable(name);
    if (!p) {
      report.push_back(
          {subject, "unknown-parent", "parent " + name + " is not declared"});
      parents_ok = false;
    } else if (!seen_parents.insert(name).second) {
      report.push_back(
          {subject, "duplicate-parent", "parent " + name + " listed twice"});
      parents_ok = false;
    }
    parents.push_back(p);
  }

  std::set<std::vector<std::string>> seen_rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto &row = table.rows[r];
    const std::string where = fmt::format("{} row {} ({})", subject, r,
                                          join(row.given));
    bool row_ok = true;
    if (row.given.size() != table.parents.size()) {
      report.push_back({where, "row-shape",
                        fmt::format("row gives {} parent states, table has {} "
                                    "parents",
                                    row.given.size(), table.parents.size())});
      row_ok = false;
    } else if (parents_ok) {
      for (std::size_t k = 0; k < row.given.size(); ++k) {
        const auto &states = parents[k]->states;
        if (std::find(states.begin(), states.end(), row.given[k]) ==
            states.end()) {
          report.push_back({where, "unknown-state",
                            fmt::format("{} is not a state of {}",
                                        row.given[k], table.parents[k])});
          row_ok = false;
        }
      }
    }
    if (row_ok && !seen_rows.insert(row.given).second) {
      report.push_back({where, "duplicate-row", "parent combination repeated"});
    }

    if (child && row.probs.size() != child->states.size()) {
      report.push_back({where, "row-shape",
                        fmt::format("{} probabilities for {} child states",
                                    row.probs.size(), child->states.size())});
      continue;
    }
    bool in_range = true;
    double sum = 0.0;
    for (double p : row.probs) {
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) in_range = false;
      sum += p;
    }
    if (!in_range) {
      report.push_back(
          {where, "range", "probabilities must be finite and in [0, 1]"});
    } else if (std::abs(sum - 1.0) > kProbabilityTolerance) {
      report.push_back(
          {where, "row-sum", fmt::format("row sums to {:.12g}", sum)});
    }
  }

  // Coverage only makes sense once the parents resolve.
  if (!parents_ok) return;
  std::size_t combos = 1;
  for (const auto *p : parents) combos *= p->states.size();
  if (combos > kMaxBasisSize) return;
  std::vector<std::size_t> counter(parents.size(), 0);
  for (std::size_t c = 0; c < combos; ++c) {
    std::vector<std::string> given;
    std::size_t rem = c;
    for (std::size_t k = parents.size(); k-- > 0;) {
      counter[k] = rem % parents[k]->states.size();
      rem /= parents[k]->states.size();
    }
    for (std::size_t k = 0; k < parents.size(); ++k) {
      given.push_back(parents[k]->states[counter[k]]);
    }
    if (!seen_rows.contains(given)) {
      report.push_back({subject, "missing-row",
                        "no row for parent states (" + join(given) + ")"});
    }
  }
}

void check_acyclic(const BeliefNetwork &net, ValidationReport &report) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < net.variables.size(); ++v) {
    index.emplace(net.variables[v].name, v);
  }
  const std::size_t n = net.variables.size();
  std::vector<std::vector<std::size_t>> children(n);
  std::vector<std::size_t> indegree(n, 0);
  for (const auto &t : net.tables) {
    auto c = index.find(t.child);
    if (c == index.end()) continue;
    for (const auto &p : t.parents) {
      auto pi = index.find(p);
      if (pi == index.end()) continue;
      children[pi->second].push_back(c->second);
      ++indegree[c->second];
    }
  }
  std::queue<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const auto v = ready.front();
    ready.pop();
    ++visited;
    for (auto c : children[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (visited == n) return;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] > 0) {
      report.push_back({net.variables[v].name, "cycle",
                        "variable lies on or below a directed cycle"});
    }
  }
}

}  // namespace

ValidationReport validate(const BeliefNetwork &network) {
  ValidationReport report;
  if (network.variables.empty()) {
    report.push_back({"network", "empty", "network declares no variables"});
    return report;
  }
  check_variables(network, report);

  std::map<std::string, std::size_t, std::less<>> table_count;
  for (const auto &t : network.tables) ++table_count[t.child];
  for (const auto &var : network.variables) {
    auto it = table_count.find(var.name);
    if (it == table_count.end()) {
      report.push_back({var.name, "missing-table", "no conditional table"});
    } else if (it->second > 1) {
      report.push_back(
          {var.name, "duplicate-table",
           fmt::format("{} conditional tables", it->second)});
    }
  }
  for (const auto &t : network.tables) check_table(network, t, report);
  check_acyclic(network, report);

  // Overflow-safe product of the state counts.
  std::size_t basis = 1;
  for (const auto &var : network.variables) {
    const auto k = std::max<std::size_t>(var.states.size(), 1);
    if (basis > kMaxBasisSize / k) {
      basis = kMaxBasisSize + 1;
      break;
    }
    basis *= k;
  }
  if (basis > kMaxBasisSize) {
    report.push_back({"network", "size",
                      fmt::format("joint exceeds {} basis states",
                                  kMaxBasisSize)});
  }
  return report;
}

// ---------------------------------------------------------------------------
// enumerate_joint

JointDistribution enumerate_joint(const BeliefNetwork &network) {
  auto report = validate(network);
  if (!report.empty()) throw InvalidNetworkError(std::move(report));

  const auto &vars = network.variables;
  const std::size_t n = vars.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < n; ++v) index.emplace(vars[v].name, v);

  // Per variable: parent indices and a dense table keyed by the mixed-radix
  // code of the parent states (first parent most significant).
  struct Compiled {
    std::vector<std::size_t> parents;
    std::vector<std::vector<double>> rows;
  };
  std::vector<Compiled> compiled(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto &table = *network.find_table(vars[v].name);
    auto &c = compiled[v];
    std::size_t combos = 1;
    for (const auto &p : table.parents) {
      c.parents.push_back(index.at(p));
      combos *= vars[c.parents.back()].states.size();
    }
    c.rows.resize(combos);
    for (const auto &row : table.rows) {
      std::size_t code = 0;
      for (std::size_t k = 0; k < row.given.size(); ++k) {
        const auto &states = vars[c.parents[k]].states;
        const auto s = static_cast<std::size_t>(
            std::find(states.begin(), states.end(), row.given[k]) -
            states.begin());
        code = code * states.size() + s;
      }
      c.rows[code] = row.probs;
    }
  }

  std::size_t size = 1;
  for (const auto &var : vars) size *= var.states.size();
  std::vector<double> probs(size);
  std::vector<std::size_t> state(n);
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t rem = i;
    for (std::size_t v = n; v-- > 0;) {
      state[v] = rem % vars[v].states.size();
      rem /= vars[v].states.size();
    }
    double p = 1.0;
    for (std::size_t v = 0; v < n && p != 0.0; ++v) {
      std::size_t code = 0;
      for (auto parent : compiled[v].parents) {
        code = code * vars[parent].states.size() + state[parent];
      }
      p *= compiled[v].rows[code][state[v]];
    }
    probs[i] = p;
  }

  // Row sums are only checked to 1e-9, so renormalize the product.
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (auto &p : probs) p /= total;
  return JointDistribution(vars, std::move(probs));
}

JointDistribution condition(const JointDistribution &joint,
                            const PartialAssignment &evidence) {
  if (evidence.empty()) return joint;
  const auto m = joint.mask(evidence);
  std::vector<double> probs(joint.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (m[i]) {
      probs[i] = joint.probability(i);
      total += probs[i];
    }
  }
  if (total <= 0.0) throw ImpossibleEvidenceError();
  for (auto &p : probs) p /= total;
  return JointDistribution(joint.variables(), std::move(probs));
}

double classical_marginal(const JointDistribution &joint,
                          const PartialAssignment &query) {
  const auto m = joint.mask(query);
  double sum = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    if (m[i]) sum += joint.probability(i);
  }
  return sum;
}

}  // namespace qlbn
