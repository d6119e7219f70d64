#ifndef QLBN_BELIEF_EXPLORER_HPP_
#define QLBN_BELIEF_EXPLORER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qlbn/belief_network.hpp"
#include "qlbn/influence_diagram.hpp"

namespace qlbn {

// Relative closeness below which the default action counts as a near tie.
inline constexpr double kDefaultEpsilon = 0.05;

enum class Region { FullyClassical, SubOptimal, Irrational };

std::string_view to_string(Region region);

// Irrational: the argmax differs from the default (classical MEU) action.
// SubOptimal: the default wins, but by at most epsilon * |top utility|.
// FullyClassical: the default wins by more than that.
// Throws std::invalid_argument on non-finite utilities or epsilon <= 0.
Region classify(std::span<const double> utilities, std::size_t default_action,
                double epsilon);

struct BeliefPoint {
  double theta_a = 0.0;
  double theta_b = 0.0;
  std::vector<double> probabilities;  // per action
  std::vector<double> utilities;      // per action
  std::size_t chosen = 0;
  std::optional<Region> region;  // empty when evaluation failed
  std::string error;
};

struct RegionFractions {
  double fully_classical = 0.0;
  double sub_optimal = 0.0;
  double irrational = 0.0;
  double failed = 0.0;
};

// Node-sampled (theta_a, theta_b) plane over [0, 2*pi)^2, row-major with
// theta_a indexing rows.
struct BeliefGrid {
  std::size_t resolution = 0;
  double epsilon = kDefaultEpsilon;
  std::vector<std::string> actions;
  std::size_t default_action = 0;
  std::vector<BeliefPoint> points;

  double axis(std::size_t k) const;
  const BeliefPoint &at(std::size_t row, std::size_t col) const {
    return points[row * resolution + col];
  }
  RegionFractions fractions() const;
};

// Evaluates every node of the belief plane. theta_a and theta_b are the
// per-outcome angles of the first and second action of a binary decision
// variable. Points that fail to evaluate are kept with `error` set. Throws
// std::invalid_argument for resolution < 2 or a non-binary decision.
BeliefGrid sweep(const JointDistribution &joint,
                 const std::vector<UtilityOperator> &operators,
                 const DecisionRule &rule, std::size_t resolution,
                 double epsilon);

struct CurveSample {
  double theta = 0.0;
  std::vector<double> probabilities;  // per state of the variable
};

// Quantum marginals of `variable` as the angle of outcome `varied_outcome`
// runs over [0, 2*pi] inclusive; every other outcome is held at
// `fixed_other`.
std::vector<CurveSample> probability_curve(const JointDistribution &joint,
                                           std::string_view variable,
                                           std::size_t varied_outcome,
                                           double fixed_other,
                                           std::size_t resolution);

}  // namespace qlbn

#endif  // QLBN_BELIEF_EXPLORER_HPP_
