// Fixtures, random generators and brute-force oracles shared by the tests.
// Nothing here calls into the code paths it is used to check.
#ifndef QLBN_TESTS_TEST_SUPPORT_HPP_
#define QLBN_TESTS_TEST_SUPPORT_HPP_

#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "qlbn/belief_network.hpp"
#include "qlbn/influence_diagram.hpp"
#include "qlbn/quantum_engine.hpp"

namespace qlbn::testing {

inline BeliefNetwork pd_network() {
  BeliefNetwork net;
  net.variables = {{"P1", {"Def", "Coop"}}, {"P2", {"Def", "Coop"}}};
  net.tables = {
      {"P1", {}, {{{}, {0.5, 0.5}}}},
      {"P2", {"P1"}, {{{"Def"}, {0.97, 0.03}}, {{"Coop"}, {0.84, 0.16}}}},
  };
  return net;
}

// Payoffs over the basis (Def,Def), (Def,Coop), (Coop,Def), (Coop,Coop).
inline std::vector<UtilityOperator> pd_operators() {
  return {{"Def", {30, 0, 85, 0}}, {"Coop", {0, 25, 0, 36}}};
}

inline DecisionRule pd_rule() { return {"P2", {"Def", "Coop"}}; }

// Binary-outcome phases with the outcome angle on the first consistent state.
inline PhaseAssignment pd_phases(double theta_def, double theta_coop) {
  return PhaseAssignment({theta_def, theta_coop, 0.0, 0.0});
}

// Closed-form Pr_q(P2 = Def) with per-outcome angles, written from the joint
// (0.485, 0.015, 0.420, 0.080) directly.
inline double pd_def_probability(double theta_def, double theta_coop) {
  const double def = 0.905 + 2.0 * std::sqrt(0.485 * 0.420) * std::cos(theta_def);
  const double coop =
      0.095 + 2.0 * std::sqrt(0.015 * 0.080) * std::cos(theta_coop);
  return std::abs(def) / (std::abs(def) + std::abs(coop));
}

struct RandomCase {
  BeliefNetwork network;
  std::vector<double> phases;
};

// Random DAG over 1..max_vars binary variables. Variable i draws each earlier
// variable as a parent with probability 1/2; CPT rows are normalized uniforms.
inline BeliefNetwork random_network(std::mt19937_64 &rng, int max_vars = 4) {
  std::uniform_int_distribution<int> count(1, max_vars);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const int n = count(rng);
  BeliefNetwork net;
  for (int v = 0; v < n; ++v) {
    net.variables.push_back({"X" + std::to_string(v), {"s0", "s1"}});
  }
  for (int v = 0; v < n; ++v) {
    ConditionalTable t;
    t.child = "X" + std::to_string(v);
    for (int p = 0; p < v; ++p) {
      if (coin(rng)) t.parents.push_back("X" + std::to_string(p));
    }
    const std::size_t combos = std::size_t{1} << t.parents.size();
    for (std::size_t c = 0; c < combos; ++c) {
      TableRow row;
      for (std::size_t k = 0; k < t.parents.size(); ++k) {
        const bool bit = (c >> (t.parents.size() - 1 - k)) & 1U;
        row.given.push_back(bit ? "s1" : "s0");
      }
      const double a = unit(rng);
      row.probs = {a, 1.0 - a};
      t.rows.push_back(std::move(row));
    }
    net.tables.push_back(std::move(t));
  }
  return net;
}

inline std::vector<double> random_phases(std::mt19937_64 &rng, std::size_t n) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::vector<double> out(n);
  for (auto &t : out) t = angle(rng);
  return out;
}

// Brute-force joint: walks every assignment (last variable fastest) and
// multiplies CPT entries found by linear search over the rows.
inline std::vector<double> brute_force_joint(const BeliefNetwork &net) {
  const std::size_t n = net.variables.size();
  std::size_t size = 1;
  for (const auto &v : net.variables) size *= v.states.size();
  std::vector<double> out;
  for (std::size_t i = 0; i < size; ++i) {
    std::vector<std::string> state(n);
    std::size_t rem = i;
    for (std::size_t v = n; v-- > 0;) {
      const auto &states = net.variables[v].states;
      state[v] = states[rem % states.size()];
      rem /= states.size();
    }
    auto lookup = [&](const std::string &name) {
      for (std::size_t v = 0; v < n; ++v) {
        if (net.variables[v].name == name) return state[v];
      }
      return std::string();
    };
    double p = 1.0;
    for (std::size_t v = 0; v < n; ++v) {
      const auto &var = net.variables[v];
      for (const auto &t : net.tables) {
        if (t.child != var.name) continue;
        for (const auto &row : t.rows) {
          bool match = true;
          for (std::size_t k = 0; k < t.parents.size(); ++k) {
            if (row.given[k] != lookup(t.parents[k])) match = false;
          }
          if (!match) continue;
          for (std::size_t s = 0; s < var.states.size(); ++s) {
            if (var.states[s] == state[v]) p *= row.probs[s];
          }
        }
      }
    }
    out.push_back(p);
  }
  return out;
}

// Sum over unordered pairs of sqrt(p_i p_j) cos(theta_i - theta_j).
inline double pairwise_interference(const std::vector<double> &p,
                                    const std::vector<double> &theta) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      sum += std::sqrt(p[i] * p[j]) * std::cos(theta[i] - theta[j]);
    }
  }
  return sum;
}

}  // namespace qlbn::testing

#endif  // QLBN_TESTS_TEST_SUPPORT_HPP_
