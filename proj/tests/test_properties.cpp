// Randomized invariants over small networks with random phases.
#include <doctest.h>

#include <cmath>
#include <random>

#include "qlbn/influence_diagram.hpp"
#include "qlbn/quantum_engine.hpp"
#include "test_support.hpp"

using namespace qlbn;
using namespace qlbn::testing;

namespace {

struct Case {
  JointDistribution joint;
  std::string variable;
  PhaseAssignment phases;
};

Case draw(std::mt19937_64 &rng) {
  const auto net = random_network(rng, 4);
  auto joint = enumerate_joint(net);
  std::uniform_int_distribution<std::size_t> pick(0, net.variables.size() - 1);
  auto variable = net.variables[pick(rng)].name;
  auto phases = PhaseAssignment(random_phases(rng, joint.size()));
  return {std::move(joint), std::move(variable), std::move(phases)};
}

// Random payoff operators over the chosen variable's states.
std::vector<UtilityOperator> random_operators(std::mt19937_64 &rng,
                                              const JointDistribution &joint,
                                              const DecisionRule &rule) {
  std::uniform_real_distribution<double> payoff(-50.0, 100.0);
  const auto v = joint.variable_index(rule.decision_variable);
  std::vector<UtilityOperator> ops;
  for (std::size_t a = 0; a < rule.actions.size(); ++a) {
    UtilityOperator op{rule.actions[a], std::vector<double>(joint.size(), 0.0)};
    for (std::size_t i = 0; i < joint.size(); ++i) {
      if (joint.state_of(i, v) == a) op.diagonal[i] = payoff(rng);
    }
    ops.push_back(std::move(op));
  }
  return ops;
}

}  // namespace

TEST_CASE("density matrices are Hermitian, unit-trace and idempotent") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 250; ++trial) {
    const auto c = draw(rng);
    const auto rho = density(build_superposition(c.joint, c.phases));
    CHECK(rho.is_hermitian(1e-12));
    CHECK(std::abs(rho.trace() - Amplitude(1.0)) <= 1e-9);
    CHECK(rho.is_idempotent(1e-9));
  }
}

TEST_CASE("quantum marginal families normalize and both paths agree") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 250; ++trial) {
    const auto c = draw(rng);
    MarginalFamily family;
    try {
      family = quantum_marginal_family(c.joint, c.phases, c.variable);
    } catch (const DegenerateInterferenceError &) {
      continue;
    }
    double total = 0.0;
    for (const auto &r : family.outcomes) {
      total += r.probability;
      CHECK(std::abs(*r.amplitude_path - *r.density_path) <= 1e-12);
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);

    const auto rho = density(build_superposition(c.joint, c.phases));
    const auto from_rho = quantum_marginal_family(rho, c.joint, c.variable);
    for (std::size_t s = 0; s < family.outcomes.size(); ++s) {
      CHECK(std::abs(family.outcomes[s].unnormalized -
                     from_rho.outcomes[s].unnormalized) <= 1e-12);
    }
  }
}

TEST_CASE("interference term matches brute-force pair enumeration") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = draw(rng);
    const PartialAssignment query{
        {c.variable, c.joint.variables()[c.joint.variable_index(c.variable)]
                         .states[trial % 2]}};
    std::vector<double> p;
    std::vector<double> theta;
    const auto m = c.joint.mask(query);
    for (std::size_t i = 0; i < c.joint.size(); ++i) {
      if (!m[i]) continue;
      p.push_back(c.joint.probability(i));
      theta.push_back(c.phases[i]);
    }
    CHECK(std::abs(interference_term(c.joint, query, c.phases) -
                   pairwise_interference(p, theta)) <= 1e-12);
  }
}

TEST_CASE("a global phase shift changes nothing") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> shift(-20.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = draw(rng);
    std::vector<double> shifted(c.phases.theta().begin(), c.phases.theta().end());
    const double delta = shift(rng);
    for (auto &t : shifted) t += delta;
    try {
      const auto a = quantum_marginal_family(c.joint, c.phases, c.variable);
      const auto b =
          quantum_marginal_family(c.joint, PhaseAssignment(shifted), c.variable);
      for (std::size_t s = 0; s < a.outcomes.size(); ++s) {
        CHECK(std::abs(a.outcomes[s].probability - b.outcomes[s].probability) <=
              1e-12);
        CHECK(std::abs(a.outcomes[s].interference_part -
                       b.outcomes[s].interference_part) <= 1e-12);
      }
    } catch (const DegenerateInterferenceError &) {
    }
  }
}

TEST_CASE("zero interference reduces marginals and utilities to classical") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = draw(rng);
    const auto phases = zero_interference_phases(c.joint, c.variable);
    const auto family = quantum_marginal_family(c.joint, phases, c.variable);
    CHECK(std::abs(family.gamma - 1.0) <= 1e-12);
    for (const auto &r : family.outcomes) {
      CHECK(std::abs(r.probability -
                     classical_marginal(c.joint, {{c.variable, r.state}})) <=
            1e-12);
    }
    const auto rule = make_rule(c.joint, c.variable);
    for (const auto &op : random_operators(rng, c.joint, rule)) {
      double eu;
      try {
        eu = quantum_expected_utility(c.joint, phases, op, rule);
      } catch (const NoClassicalSupportError &) {
        continue;
      }
      CHECK(std::abs(eu - classical_expected_utility(c.joint, op)) <= 1e-9);
    }
  }
}

TEST_CASE("pi/2 phase differences collapse binary outcomes") {
  // With two consistent states per outcome every pairwise cosine can vanish.
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> base(0.0, kTwoPi);
  for (int trial = 0; trial < 200; ++trial) {
    BeliefNetwork net;
    do {
      net = random_network(rng, 2);
    } while (net.variables.size() != 2);
    const auto joint = enumerate_joint(net);
    std::vector<double> theta(4);
    // Outcome groups of X1 are {0, 2} and {1, 3}.
    theta[0] = base(rng);
    theta[2] = theta[0] + (trial % 2 ? kPi / 2 : -kPi / 2);
    theta[1] = base(rng);
    theta[3] = theta[1] + 3 * kPi / 2;
    const auto family = quantum_marginal_family(joint, PhaseAssignment(theta), "X1");
    CHECK(std::abs(family.gamma - 1.0) <= 1e-12);
    CHECK(std::abs(family.at("s0").probability -
                   classical_marginal(joint, {{"X1", "s0"}})) <= 1e-12);
  }
}

TEST_CASE("utility per unit probability does not depend on phases") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = draw(rng);
    const auto rule = make_rule(c.joint, c.variable);
    const auto ops = random_operators(rng, c.joint, rule);
    const auto other = PhaseAssignment(random_phases(rng, c.joint.size()));
    try {
      const auto fa = quantum_marginal_family(c.joint, c.phases, c.variable);
      const auto fb = quantum_marginal_family(c.joint, other, c.variable);
      for (std::size_t a = 0; a < ops.size(); ++a) {
        const double pa = fa.outcomes[a].probability;
        const double pb = fb.outcomes[a].probability;
        if (pa < 1e-6 || pb < 1e-6) continue;
        const double ra =
            quantum_expected_utility(c.joint, c.phases, ops[a], rule) / pa;
        const double rb = quantum_expected_utility(c.joint, other, ops[a], rule) / pb;
        CHECK(std::abs(ra - rb) <= 1e-12 * std::max(1.0, std::abs(ra)));
      }
    } catch (const DegenerateInterferenceError &) {
    } catch (const NoClassicalSupportError &) {
    }
  }
}

TEST_CASE("positive scaling of all utilities keeps the argmax") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = draw(rng);
    const auto rule = make_rule(c.joint, c.variable);
    const auto ops = random_operators(rng, c.joint, rule);
    const double k = scale(rng);
    auto scaled = ops;
    for (auto &op : scaled) {
      for (auto &u : op.diagonal) u *= k;
    }
    try {
      const auto a = meu_decision(c.joint, c.phases, ops, rule);
      const auto b = meu_decision(c.joint, c.phases, scaled, rule);
      CHECK(a.chosen == b.chosen);
      for (std::size_t i = 0; i < a.utilities.size(); ++i) {
        CHECK(b.utilities[i] ==
              doctest::Approx(k * a.utilities[i]).epsilon(1e-12));
      }
    } catch (const DegenerateInterferenceError &) {
    } catch (const NoClassicalSupportError &) {
    }
  }
}
