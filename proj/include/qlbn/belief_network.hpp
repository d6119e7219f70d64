#ifndef QLBN_BELIEF_NETWORK_HPP_
#define QLBN_BELIEF_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qlbn/errors.hpp"

namespace qlbn {

// Absolute tolerance on CPT row sums and on the total mass of a joint.
inline constexpr double kProbabilityTolerance = 1e-9;

// Joints larger than this many basis states (20 binary variables) are refused.
inline constexpr std::size_t kMaxBasisSize = std::size_t{1} << 20;

struct Variable {
  std::string name;
  std::vector<std::string> states;

  bool operator==(const Variable &) const = default;
};

// One row of a conditional table: the parent states (aligned with the table's
// `parents`) and the distribution over the child's states.
struct TableRow {
  std::vector<std::string> given;
  std::vector<double> probs;

  bool operator==(const TableRow &) const = default;
};

struct ConditionalTable {
  std::string child;
  std::vector<std::string> parents;
  std::vector<TableRow> rows;

  bool operator==(const ConditionalTable &) const = default;
};

// A discrete Bayesian network as written by the user. Nothing is checked at
// construction; call validate() or let enumerate_joint() reject it.
struct BeliefNetwork {
  std::vector<Variable> variables;
  std::vector<ConditionalTable> tables;

  const Variable *find_variable(std::string_view name) const;
  const ConditionalTable *find_table(std::string_view child) const;

  bool operator==(const BeliefNetwork &) const = default;
};

// Variable name -> state label. Used for evidence and for queries.
using PartialAssignment = std::map<std::string, std::string, std::less<>>;

// Full joint distribution over the cartesian product of the variables' states.
//
// Basis ordering is lexicographic in variable declaration order with states in
// declared order, so the last variable varies fastest. For the two-player
// network (P1, P2) over {Def, Coop} that gives
//   (Def,Def), (Def,Coop), (Coop,Def), (Coop,Coop).
// Zero-probability states stay in the basis.
class JointDistribution {
 public:
  // Throws std::invalid_argument if the length does not match the product of
  // the state counts, any entry is negative or non-finite, or the total mass
  // is off by more than kProbabilityTolerance.
  JointDistribution(std::vector<Variable> variables,
                    std::vector<double> probabilities);

  const std::vector<Variable> &variables() const { return variables_; }
  std::span<const double> probabilities() const { return probabilities_; }
  double probability(std::size_t index) const { return probabilities_[index]; }
  std::size_t size() const { return probabilities_.size(); }

  // State index of every variable in basis state `index`.
  std::vector<std::size_t> assignment(std::size_t index) const;
  std::size_t state_of(std::size_t index, std::size_t variable) const;

  // Throw std::invalid_argument on unknown names.
  std::size_t variable_index(std::string_view name) const;
  std::size_t state_index(std::size_t variable, std::string_view label) const;

  // 1 where the basis state agrees with every entry of `query`, 0 elsewhere.
  std::vector<std::uint8_t> mask(const PartialAssignment &query) const;

  // Basis indices consistent with `query`, ascending.
  std::vector<std::size_t> consistent_states(
      const PartialAssignment &query) const;

  // "(Def,Coop)"-style label of a basis state.
  std::string label(std::size_t index) const;

  bool operator==(const JointDistribution &) const = default;

 private:
  std::vector<Variable> variables_;
  std::vector<double> probabilities_;
  std::vector<std::size_t> strides_;
};

ValidationReport validate(const BeliefNetwork &network);

// Product of the matching CPT entries for every complete assignment.
// Throws InvalidNetworkError carrying the validation report.
JointDistribution enumerate_joint(const BeliefNetwork &network);

// Zeroes states inconsistent with `evidence` and renormalizes. Throws
// ImpossibleEvidenceError when the evidence has zero probability.
JointDistribution condition(const JointDistribution &joint,
                            const PartialAssignment &evidence);

double classical_marginal(const JointDistribution &joint,
                          const PartialAssignment &query);

}  // namespace qlbn

#endif  // QLBN_BELIEF_NETWORK_HPP_
