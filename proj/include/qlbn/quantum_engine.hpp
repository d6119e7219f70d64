#ifndef QLBN_QUANTUM_ENGINE_HPP_
#define QLBN_QUANTUM_ENGINE_HPP_

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qlbn/belief_network.hpp"

namespace qlbn {

using Amplitude = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383279;

// Largest basis for which a DensityMatrix may be materialized.
inline constexpr std::size_t kMaxDensitySize = 4096;

// Largest number of query-consistent states for which quantum_marginal_family
// also evaluates the O(k^2) density-matrix path.
inline constexpr std::size_t kDensityCrossCheckLimit = 2048;

// One phase per joint basis state, reduced into [0, 2*pi).
class PhaseAssignment {
 public:
  PhaseAssignment() = default;
  // Throws std::invalid_argument on non-finite entries.
  explicit PhaseAssignment(std::vector<double> theta);

  std::span<const double> theta() const { return theta_; }
  double operator[](std::size_t i) const { return theta_[i]; }
  std::size_t size() const { return theta_.size(); }

  bool operator==(const PhaseAssignment &) const = default;

 private:
  std::vector<double> theta_;
};

// Expands one angle per state of `variable` into per-basis-state phases: the
// first basis state consistent with each outcome carries that outcome's angle
// and every other consistent state carries 0. For a binary outcome pair this
// makes the angle the phase difference seen by the interference term.
PhaseAssignment per_outcome_phases(const JointDistribution &joint,
                                   std::string_view variable,
                                   std::span<const double> angles);

// A phase assignment under which every outcome of `variable` has zero
// interference. Each consistent state is rotated to be orthogonal to the
// running amplitude sum of the states before it, so |sum a_i|^2 = sum p_i.
// With two consistent states this is a pi/2 phase difference.
PhaseAssignment zero_interference_phases(const JointDistribution &joint,
                                         std::string_view variable);

class SuperpositionState {
 public:
  SuperpositionState(std::vector<Variable> variables,
                     std::vector<Amplitude> amplitudes)
      : variables_(std::move(variables)), amplitudes_(std::move(amplitudes)) {}

  const std::vector<Variable> &variables() const { return variables_; }
  std::span<const Amplitude> amplitudes() const { return amplitudes_; }
  std::size_t size() const { return amplitudes_.size(); }
  double norm_squared() const;

 private:
  std::vector<Variable> variables_;
  std::vector<Amplitude> amplitudes_;
};

// amplitude_i = sqrt(p_i) * exp(i * theta_i). Throws std::invalid_argument on
// length mismatch.
SuperpositionState build_superposition(const JointDistribution &joint,
                                       const PhaseAssignment &phases);

// Pure-state density operator rho = S S^dagger.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries)
      : entries_(std::move(entries)) {}

  const Eigen::MatrixXcd &entries() const { return entries_; }
  Amplitude operator()(std::size_t i, std::size_t j) const {
    return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }

  Amplitude trace() const { return entries_.trace(); }
  bool is_hermitian(double tol) const;
  bool is_idempotent(double tol) const;

 private:
  Eigen::MatrixXcd entries_;
};

// Throws std::length_error above kMaxDensitySize basis states.
DensityMatrix density(const SuperpositionState &state);

struct SelectionOperator {
  std::vector<std::uint8_t> mask;
  PartialAssignment query;
};

SelectionOperator selection_operator(const JointDistribution &basis,
                                     const PartialAssignment &query);

// Sum over unordered pairs {i, j} of query-consistent states of
// sqrt(p_i p_j) cos(theta_i - theta_j). The factor 2 of the marginal is not
// included.
double interference_term(const JointDistribution &joint,
                         const PartialAssignment &query,
                         const PhaseAssignment &phases);

// Decomposition of one outcome's quantum-like probability:
//   probability = gamma * |classical_part + 2 * interference_part|.
struct QueryResult {
  std::string state;
  double classical_part = 0.0;
  double interference_part = 0.0;
  double unnormalized = 0.0;
  double gamma = 1.0;
  double probability = 0.0;
  // |sum_{i in s} a_i|^2, when amplitudes were available.
  std::optional<double> amplitude_path;
  // |sum_{i,j in s} rho(i,j)|, when the density path was evaluated.
  std::optional<double> density_path;
};

struct MarginalFamily {
  std::string variable;
  double gamma = 1.0;
  std::vector<QueryResult> outcomes;  // in the variable's state order

  // Throws std::invalid_argument for an unknown state.
  const QueryResult &at(std::string_view state) const;
};

// Quantum-like marginal of every state of `variable`. Throws
// DegenerateInterferenceError when every outcome cancels out.
MarginalFamily quantum_marginal_family(const JointDistribution &joint,
                                       const PhaseAssignment &phases,
                                       std::string_view variable);

// Same quantity read from an explicit density matrix over `basis`.
MarginalFamily quantum_marginal_family(const DensityMatrix &rho,
                                       const JointDistribution &basis,
                                       std::string_view variable);

// Finds the shared per-outcome angle theta in [0, pi] (applied to every state
// of `variable` through per_outcome_phases) whose quantum marginal of
// `target_state` equals `target_probability` within 1e-9. Throws
// UnreachableTargetError with the attainable interval otherwise.
double fit_phase(const JointDistribution &joint, std::string_view variable,
                 std::string_view target_state, double target_probability);

}  // namespace qlbn

#endif  // QLBN_QUANTUM_ENGINE_HPP_
