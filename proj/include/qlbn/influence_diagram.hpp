#ifndef QLBN_INFLUENCE_DIAGRAM_HPP_
#define QLBN_INFLUENCE_DIAGRAM_HPP_

#include <string>
#include <utility>
#include <vector>

#include "qlbn/belief_network.hpp"
#include "qlbn/quantum_engine.hpp"

namespace qlbn {

// Diagonal payoff operator of one action over the joint basis. Entries of
// basis states inconsistent with the action are zero.
struct UtilityOperator {
  std::string action;
  std::vector<double> diagonal;

  bool operator==(const UtilityOperator &) const = default;
};

// The decision variable and its states, which are the available actions.
struct DecisionRule {
  std::string decision_variable;
  std::vector<std::string> actions;

  bool operator==(const DecisionRule &) const = default;
};

// Throws std::invalid_argument for an unknown variable.
DecisionRule make_rule(const JointDistribution &joint,
                       const std::string &decision_variable);

// Builds an operator from (basis state -> payoff) pairs. Throws
// std::invalid_argument if a payoff lands on a state inconsistent with the
// action.
UtilityOperator make_utility_operator(
    const JointDistribution &basis, const DecisionRule &rule,
    const std::string &action,
    const std::vector<std::pair<std::size_t, double>> &payoffs);

struct ExpectedUtilityResult {
  std::vector<std::string> actions;
  std::vector<double> utilities;  // aligned with actions
  std::size_t chosen = 0;
  double margin = 0.0;  // top utility minus runner-up

  const std::string &chosen_action() const { return actions[chosen]; }
};

double classical_expected_utility(const JointDistribution &joint,
                                  const UtilityOperator &op);

// Trace of the action-projected density, rescaled so its trace equals the
// quantum marginal of the action, against the utility operator. For a
// diagonal operator this is Pr_q(a) * sum_{i in a} p_i u_i / sum_{i in a} p_i.
// Throws NoClassicalSupportError when the action has zero classical mass.
double quantum_expected_utility(const JointDistribution &joint,
                                const PhaseAssignment &phases,
                                const UtilityOperator &op,
                                const DecisionRule &rule);

// The same trace evaluated with explicit matrices: trace(P rho P U) scaled by
// Pr_q(a) / trace(P rho P).
double quantum_expected_utility(const DensityMatrix &rho,
                                const JointDistribution &basis,
                                const UtilityOperator &op,
                                const DecisionRule &rule);

// Quantum-like expected utility of every action; argmax with ties broken by
// declaration order. `operators` must hold exactly one operator per action.
ExpectedUtilityResult meu_decision(const JointDistribution &joint,
                                   const PhaseAssignment &phases,
                                   const std::vector<UtilityOperator> &operators,
                                   const DecisionRule &rule);

// Classical counterpart, used as the default decision.
ExpectedUtilityResult classical_meu_decision(
    const JointDistribution &joint,
    const std::vector<UtilityOperator> &operators, const DecisionRule &rule);

// Argmax and margin over already computed utilities.
ExpectedUtilityResult pick_action(std::vector<std::string> actions,
                                  std::vector<double> utilities);

}  // namespace qlbn

#endif  // QLBN_INFLUENCE_DIAGRAM_HPP_
