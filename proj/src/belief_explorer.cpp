#include "qlbn/belief_explorer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qlbn {

std::string_view to_string(Region region) {
  switch (region) {
    case Region::FullyClassical:
      return "FullyClassical";
    case Region::SubOptimal:
      return "SubOptimal";
    case Region::Irrational:
      return "Irrational";
  }
  return "?";
}

Region classify(std::span<const double> utilities, std::size_t default_action,
                double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  if (default_action >= utilities.size()) {
    throw std::invalid_argument("default action out of range");
  }
  for (double u : utilities) {
    if (!std::isfinite(u)) throw std::invalid_argument("non-finite utility");
  }
  const auto result = pick_action(
      std::vector<std::string>(utilities.size()),
      std::vector<double>(utilities.begin(), utilities.end()));
  if (result.chosen != default_action) return Region::Irrational;
  const double top = std::abs(utilities[result.chosen]);
  const double scale = std::max(top, std::numeric_limits<double>::min());
  return result.margin <= epsilon * scale ? Region::SubOptimal
                                          : Region::FullyClassical;
}

double BeliefGrid::axis(std::size_t k) const {
  return kTwoPi * static_cast<double>(k) / static_cast<double>(resolution);
}

RegionFractions BeliefGrid::fractions() const {
  RegionFractions f;
  if (points.empty()) return f;
  for (const auto &p : points) {
    if (!p.region) {
      f.failed += 1;
      continue;
    }
    switch (*p.region) {
      case Region::FullyClassical:
        f.fully_classical += 1;
        break;
      case Region::SubOptimal:
        f.sub_optimal += 1;
        break;
      case Region::Irrational:
        f.irrational += 1;
        break;
    }
  }
  const auto n = static_cast<double>(points.size());
  f.fully_classical /= n;
  f.sub_optimal /= n;
  f.irrational /= n;
  f.failed /= n;
  return f;
}

BeliefGrid sweep(const JointDistribution &joint,
                 const std::vector<UtilityOperator> &operators,
                 const DecisionRule &rule, std::size_t resolution,
                 double epsilon) {
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  if (rule.actions.size() != 2) {
    throw std::invalid_argument(
        "belief-plane sweeps need a decision variable with exactly 2 states");
  }
  BeliefGrid grid;
  grid.resolution = resolution;
  grid.epsilon = epsilon;
  grid.actions = rule.actions;
  grid.default_action =
      classical_meu_decision(joint, operators, rule).chosen;
  grid.points.resize(resolution * resolution);

  for (std::size_t row = 0; row < resolution; ++row) {
    for (std::size_t col = 0; col < resolution; ++col) {
      auto &point = grid.points[row * resolution + col];
      point.theta_a = grid.axis(row);
      point.theta_b = grid.axis(col);
      try {
        const double angles[] = {point.theta_a, point.theta_b};
        const auto phases =
            per_outcome_phases(joint, rule.decision_variable, angles);
        const auto family =
            quantum_marginal_family(joint, phases, rule.decision_variable);
        for (const auto &r : family.outcomes) {
          point.probabilities.push_back(r.probability);
        }
        const auto meu = meu_decision(joint, phases, operators, rule);
        point.utilities = meu.utilities;
        point.chosen = meu.chosen;
        point.region = classify(meu.utilities, grid.default_action, epsilon);
      } catch (const std::exception &e) {
        point.probabilities.clear();
        point.utilities.clear();
        point.region.reset();
        point.error = e.what();
      }
    }
  }
  return grid;
}

std::vector<CurveSample> probability_curve(const JointDistribution &joint,
                                           std::string_view variable,
                                           std::size_t varied_outcome,
                                           double fixed_other,
                                           std::size_t resolution) {
  if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  const auto v = joint.variable_index(variable);
  const std::size_t outcomes = joint.variables()[v].states.size();
  if (varied_outcome >= outcomes) {
    throw std::invalid_argument("varied outcome out of range");
  }
  std::vector<CurveSample> curve;
  curve.reserve(resolution);
  std::vector<double> angles(outcomes, fixed_other);
  for (std::size_t k = 0; k < resolution; ++k) {
    CurveSample sample;
    sample.theta =
        kTwoPi * static_cast<double>(k) / static_cast<double>(resolution - 1);
    angles[varied_outcome] = sample.theta;
    const auto family = quantum_marginal_family(
        joint, per_outcome_phases(joint, variable, angles), variable);
    for (const auto &r : family.outcomes) {
      sample.probabilities.push_back(r.probability);
    }
    curve.push_back(std::move(sample));
  }
  return curve;
}

}  // namespace qlbn
