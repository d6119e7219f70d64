#include "qlbn/quantum_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace qlbn {

namespace {

constexpr double kDegenerateMass = 1e-12;

// Basis indices grouped by the state of variable `v`.
std::vector<std::vector<std::size_t>> group_by_state(
    const JointDistribution &joint, std::size_t v) {
  std::vector<std::vector<std::size_t>> groups(
      joint.variables()[v].states.size());
  for (std::size_t i = 0; i < joint.size(); ++i) {
    groups[joint.state_of(i, v)].push_back(i);
  }
  return groups;
}

void check_phase_length(const JointDistribution &joint,
                        const PhaseAssignment &phases) {
  if (phases.size() != joint.size()) {
    throw std::invalid_argument(
        fmt::format("phase assignment has {} entries, basis has {}",
                    phases.size(), joint.size()));
  }
}

Amplitude amplitude(double p, double theta) {
  return std::polar(std::sqrt(p), theta);
}

MarginalFamily normalize(std::string variable,
                         std::vector<QueryResult> outcomes) {
  double total = 0.0;
  for (const auto &r : outcomes) total += r.unnormalized;
  if (!(total > kDegenerateMass)) throw DegenerateInterferenceError();
  const double gamma = 1.0 / total;
  for (auto &r : outcomes) {
    r.gamma = gamma;
    r.probability = gamma * r.unnormalized;
  }
  return MarginalFamily{std::move(variable), gamma, std::move(outcomes)};
}

}  // namespace

PhaseAssignment::PhaseAssignment(std::vector<double> theta)
    : theta_(std::move(theta)) {
  for (auto &t : theta_) {
    if (!std::isfinite(t)) {
      throw std::invalid_argument("phases must be finite");
    }
    t = std::fmod(t, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
  }
}

PhaseAssignment per_outcome_phases(const JointDistribution &joint,
                                   std::string_view variable,
                                   std::span<const double> angles) {
  const auto v = joint.variable_index(variable);
  const auto groups = group_by_state(joint, v);
  if (angles.size() != groups.size()) {
    throw std::invalid_argument(
        fmt::format("{} angles given for the {} states of {}", angles.size(),
                    groups.size(), variable));
  }
  std::vector<double> theta(joint.size(), 0.0);
  for (std::size_t s = 0; s < groups.size(); ++s) {
    if (!groups[s].empty()) theta[groups[s].front()] = angles[s];
  }
  return PhaseAssignment(std::move(theta));
}

PhaseAssignment zero_interference_phases(const JointDistribution &joint,
                                         std::string_view variable) {
  const auto v = joint.variable_index(variable);
  std::vector<double> theta(joint.size(), 0.0);
  for (const auto &group : group_by_state(joint, v)) {
    Amplitude running{0.0, 0.0};
    for (auto i : group) {
      theta[i] = std::abs(running) > 0.0 ? std::arg(running) + kPi / 2 : 0.0;
      running += amplitude(joint.probability(i), theta[i]);
    }
  }
  return PhaseAssignment(std::move(theta));
}

double SuperpositionState::norm_squared() const {
  double total = 0.0;
  for (const auto &a : amplitudes_) total += std::norm(a);
  return total;
}

SuperpositionState build_superposition(const JointDistribution &joint,
                                       const PhaseAssignment &phases) {
  check_phase_length(joint, phases);
  std::vector<Amplitude> amps(joint.size());
  for (std::size_t i = 0; i < joint.size(); ++i) {
    amps[i] = amplitude(joint.probability(i), phases[i]);
  }
  return SuperpositionState(joint.variables(), std::move(amps));
}

bool DensityMatrix::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool DensityMatrix::is_idempotent(double tol) const {
  return (entries_ * entries_ - entries_).cwiseAbs().maxCoeff() <= tol;
}

DensityMatrix density(const SuperpositionState &state) {
  if (state.size() > kMaxDensitySize) {
    throw std::length_error(
        fmt::format("density matrix limited to {} basis states, got {}",
                    kMaxDensitySize, state.size()));
  }
  const auto n = static_cast<Eigen::Index>(state.size());
  Eigen::VectorXcd s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s(i) = state.amplitudes()[static_cast<std::size_t>(i)];
  }
  return DensityMatrix(s * s.adjoint());
}

SelectionOperator selection_operator(const JointDistribution &basis,
                                     const PartialAssignment &query) {
  return SelectionOperator{basis.mask(query), query};
}

double interference_term(const JointDistribution &joint,
                         const PartialAssignment &query,
                         const PhaseAssignment &phases) {
  check_phase_length(joint, phases);
  // sum_{i<j} sqrt(p_i p_j) cos(theta_i - theta_j)
  //   = (|sum_i a_i|^2 - sum_i |a_i|^2) / 2
  Amplitude sum{0.0, 0.0};
  double classical = 0.0;
  for (auto i : joint.consistent_states(query)) {
    sum += amplitude(joint.probability(i), phases[i]);
    classical += joint.probability(i);
  }
  return (std::norm(sum) - classical) / 2.0;
}

const QueryResult &MarginalFamily::at(std::string_view state) const {
  for (const auto &r : outcomes) {
    if (r.state == state) return r;
  }
  throw std::invalid_argument(
      fmt::format("unknown state {} of variable {}", state, variable));
}

MarginalFamily quantum_marginal_family(const JointDistribution &joint,
                                       const PhaseAssignment &phases,
                                       std::string_view variable) {
  check_phase_length(joint, phases);
  const auto v = joint.variable_index(variable);
  const auto &states = joint.variables()[v].states;
  const auto groups = group_by_state(joint, v);

  std::vector<QueryResult> outcomes;
  outcomes.reserve(groups.size());
  for (std::size_t s = 0; s < groups.size(); ++s) {
    const auto &group = groups[s];
    QueryResult r;
    r.state = states[s];

    std::vector<Amplitude> amps;
    amps.reserve(group.size());
    Amplitude sum{0.0, 0.0};
    for (auto i : group) {
      amps.push_back(amplitude(joint.probability(i), phases[i]));
      sum += amps.back();
      r.classical_part += joint.probability(i);
    }
    r.amplitude_path = std::norm(sum);
    r.interference_part = (*r.amplitude_path - r.classical_part) / 2.0;
    r.unnormalized = std::abs(r.classical_part + 2.0 * r.interference_part);

    if (group.size() <= kDensityCrossCheckLimit) {
      // Masked double sum over rho(i, j) = a_i conj(a_j).
      Amplitude masked{0.0, 0.0};
      for (const auto &ai : amps) {
        for (const auto &aj : amps) masked += ai * std::conj(aj);
      }
      r.density_path = std::abs(masked);
    }
    outcomes.push_back(std::move(r));
  }
  return normalize(std::string(variable), std::move(outcomes));
}

MarginalFamily quantum_marginal_family(const DensityMatrix &rho,
                                       const JointDistribution &basis,
                                       std::string_view variable) {
  if (rho.size() != basis.size()) {
    throw std::invalid_argument("density matrix does not match the basis");
  }
  const auto v = basis.variable_index(variable);
  const auto &states = basis.variables()[v].states;
  const auto groups = group_by_state(basis, v);

  std::vector<QueryResult> outcomes;
  for (std::size_t s = 0; s < groups.size(); ++s) {
    QueryResult r;
    r.state = states[s];
    Amplitude masked{0.0, 0.0};
    double off_diagonal = 0.0;
    for (auto i : groups[s]) {
      for (auto j : groups[s]) {
        masked += rho(i, j);
        if (i == j) {
          r.classical_part += rho(i, i).real();
        } else {
          off_diagonal += rho(i, j).real();
        }
      }
    }
    r.interference_part = off_diagonal / 2.0;
    r.density_path = std::abs(masked);
    r.unnormalized = *r.density_path;
    outcomes.push_back(std::move(r));
  }
  return normalize(std::string(variable), std::move(outcomes));
}

double fit_phase(const JointDistribution &joint, std::string_view variable,
                 std::string_view target_state, double target_probability) {
  if (!(target_probability > 0.0 && target_probability < 1.0)) {
    throw std::invalid_argument("target probability must lie in (0, 1)");
  }
  const auto v = joint.variable_index(variable);
  const std::size_t outcome_count = joint.variables()[v].states.size();
  joint.state_index(v, target_state);

  // Every outcome's unnormalized mass is affine in c = cos(theta), so the
  // target probability is a Mobius function of c and monotone on [-1, 1].
  auto probability_at = [&](double c) {
    const std::vector<double> angles(outcome_count,
                                     std::acos(std::clamp(c, -1.0, 1.0)));
    return quantum_marginal_family(joint,
                                   per_outcome_phases(joint, variable, angles),
                                   variable)
        .at(target_state)
        .probability;
  };
  // Fully destructive endpoints are approached from inside the bracket.
  auto probability_near = [&](double c, double inward) {
    for (double step = 0.0; step <= 1e-6; step = step == 0.0 ? 1e-12 : step * 10) {
      try {
        return probability_at(c + inward * step);
      } catch (const DegenerateInterferenceError &) {
      }
    }
    throw DegenerateInterferenceError();
  };

  double lo = -1.0;
  double hi = 1.0;
  double f_lo = probability_near(lo, +1.0);
  double f_hi = probability_near(hi, -1.0);
  const double env_min = std::min(f_lo, f_hi);
  const double env_max = std::max(f_lo, f_hi);
  constexpr double kTol = 1e-9;
  if (target_probability < env_min - kTol ||
      target_probability > env_max + kTol) {
    throw UnreachableTargetError(target_probability, env_min, env_max);
  }
  if (std::abs(f_lo - target_probability) <= kTol * 1e-3) return std::acos(lo);
  if (std::abs(f_hi - target_probability) <= kTol * 1e-3) return std::acos(hi);

  const bool increasing = f_hi >= f_lo;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = probability_at(mid);
    if (std::abs(f_mid - target_probability) <= kTol * 1e-3) {
      return std::acos(mid);
    }
    if ((f_mid < target_probability) == increasing) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double c = 0.5 * (lo + hi);
  if (std::abs(probability_at(c) - target_probability) > kTol) {
    throw UnreachableTargetError(target_probability, env_min, env_max);
  }
  return std::acos(c);
}

}  // namespace qlbn
