#include "qlbn/influence_diagram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace qlbn {

namespace {

void check_dimensions(const JointDistribution &joint,
                      const UtilityOperator &op) {
  if (op.diagonal.size() != joint.size()) {
    throw std::invalid_argument(
        fmt::format("utility operator for {} has {} entries, basis has {}",
                    op.action, op.diagonal.size(), joint.size()));
  }
}

std::vector<const UtilityOperator *> operators_by_action(
    const std::vector<UtilityOperator> &operators, const DecisionRule &rule) {
  std::vector<const UtilityOperator *> out;
  for (const auto &action : rule.actions) {
    const UtilityOperator *found = nullptr;
    for (const auto &op : operators) {
      if (op.action != action) continue;
      if (found) {
        throw std::invalid_argument("two utility operators for " + action);
      }
      found = &op;
    }
    if (!found) throw std::invalid_argument("no utility operator for " + action);
    out.push_back(found);
  }
  if (out.size() != operators.size()) {
    throw std::invalid_argument("utility operator for an unknown action");
  }
  return out;
}

}  // namespace

DecisionRule make_rule(const JointDistribution &joint,
                       const std::string &decision_variable) {
  const auto v = joint.variable_index(decision_variable);
  return DecisionRule{decision_variable, joint.variables()[v].states};
}

UtilityOperator make_utility_operator(
    const JointDistribution &basis, const DecisionRule &rule,
    const std::string &action,
    const std::vector<std::pair<std::size_t, double>> &payoffs) {
  const auto v = basis.variable_index(rule.decision_variable);
  const auto s = basis.state_index(v, action);
  UtilityOperator op{action, std::vector<double>(basis.size(), 0.0)};
  for (const auto &[index, value] : payoffs) {
    if (index >= basis.size()) {
      throw std::invalid_argument("payoff index outside the basis");
    }
    if (basis.state_of(index, v) != s) {
      throw std::invalid_argument(
          fmt::format("payoff for {} placed on basis state {}", action,
                      basis.label(index)));
    }
    op.diagonal[index] = value;
  }
  return op;
}

double classical_expected_utility(const JointDistribution &joint,
                                  const UtilityOperator &op) {
  check_dimensions(joint, op);
  double eu = 0.0;
  for (std::size_t i = 0; i < joint.size(); ++i) {
    eu += joint.probability(i) * op.diagonal[i];
  }
  return eu;
}

double quantum_expected_utility(const JointDistribution &joint,
                                const PhaseAssignment &phases,
                                const UtilityOperator &op,
                                const DecisionRule &rule) {
  check_dimensions(joint, op);
  const auto states =
      joint.consistent_states({{rule.decision_variable, op.action}});
  double mass = 0.0;
  double weighted = 0.0;
  for (auto i : states) {
    mass += joint.probability(i);
    weighted += joint.probability(i) * op.diagonal[i];
  }
  if (!(mass > 0.0)) throw NoClassicalSupportError(op.action);
  const auto family =
      quantum_marginal_family(joint, phases, rule.decision_variable);
  return family.at(op.action).probability * weighted / mass;
}

double quantum_expected_utility(const DensityMatrix &rho,
                                const JointDistribution &basis,
                                const UtilityOperator &op,
                                const DecisionRule &rule) {
  check_dimensions(basis, op);
  const auto sel =
      selection_operator(basis, {{rule.decision_variable, op.action}});
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd projector = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd utility = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    projector(i, i) = sel.mask[static_cast<std::size_t>(i)];
    utility(i, i) = op.diagonal[static_cast<std::size_t>(i)];
  }
  const Eigen::MatrixXcd projected = projector * rho.entries() * projector;
  const double mass = projected.trace().real();
  if (!(mass > 0.0)) throw NoClassicalSupportError(op.action);
  const auto family =
      quantum_marginal_family(rho, basis, rule.decision_variable);
  const Eigen::MatrixXcd rescaled =
      projected * (family.at(op.action).probability / mass);
  return (rescaled * utility).trace().real();
}

ExpectedUtilityResult pick_action(std::vector<std::string> actions,
                                  std::vector<double> utilities) {
  if (actions.empty() || actions.size() != utilities.size()) {
    throw std::invalid_argument("need one utility per action");
  }
  ExpectedUtilityResult result{std::move(actions), std::move(utilities), 0,
                               0.0};
  const auto &u = result.utilities;
  for (std::size_t a = 1; a < u.size(); ++a) {
    if (u[a] > u[result.chosen]) result.chosen = a;
  }
  if (u.size() > 1) {
    double runner_up = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < u.size(); ++a) {
      if (a != result.chosen) runner_up = std::max(runner_up, u[a]);
    }
    result.margin = u[result.chosen] - runner_up;
  }
  return result;
}

ExpectedUtilityResult meu_decision(const JointDistribution &joint,
                                   const PhaseAssignment &phases,
                                   const std::vector<UtilityOperator> &operators,
                                   const DecisionRule &rule) {
  std::vector<double> utilities;
  for (const auto *op : operators_by_action(operators, rule)) {
    utilities.push_back(quantum_expected_utility(joint, phases, *op, rule));
  }
  return pick_action(rule.actions, std::move(utilities));
}

ExpectedUtilityResult classical_meu_decision(
    const JointDistribution &joint,
    const std::vector<UtilityOperator> &operators, const DecisionRule &rule) {
  std::vector<double> utilities;
  for (const auto *op : operators_by_action(operators, rule)) {
    utilities.push_back(classical_expected_utility(joint, *op));
  }
  return pick_action(rule.actions, std::move(utilities));
}

}  // namespace qlbn
