#include "qlbn/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "qlbn/scenario.hpp"

namespace qlbn::cli {

namespace {

// Observed Pr(P2 = Def) in the three information conditions.
constexpr double kObservedKnownDefect = 0.97;
constexpr double kObservedKnownCooperate = 0.84;
constexpr double kObservedUnknown = 0.63;
constexpr double kReproduceTolerance = 0.02;

struct Options {
  std::string scenario;
  std::vector<std::string> theta;
  std::vector<std::string> evidence;
  bool degrees = false;
  std::string query;
  std::string mode = "quantum";
  std::string state;
  double target = 0.0;
  std::size_t resolution = 361;
  double epsilon = kDefaultEpsilon;
  std::string out_path;
  std::string plot_path;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double parse_number(std::string_view text) {
  double value = 0.0;
  const auto *end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw UsageError(fmt::format("not a number: '{}'", text));
  }
  return value;
}

// --theta tokens are either all named (STATE=angle) or all bare. One bare
// value is shared by every outcome; otherwise one value per outcome in
// declaration order.
PhaseSpec theta_override(const std::vector<std::string> &tokens,
                         const Variable &variable, bool degrees) {
  const double scale = degrees ? kPi / 180.0 : 1.0;
  PhaseSpec spec;
  spec.mode = PhaseSpec::Mode::PerOutcome;
  spec.variable = variable.name;
  const bool named = tokens.front().find('=') != std::string::npos;
  for (const auto &t : tokens) {
    if ((t.find('=') != std::string::npos) != named) {
      throw UsageError("--theta values must be all named or all bare");
    }
  }
  if (named) {
    for (const auto &t : tokens) {
      const auto eq = t.find('=');
      const auto state = t.substr(0, eq);
      if (std::find(variable.states.begin(), variable.states.end(), state) ==
          variable.states.end()) {
        throw UsageError(fmt::format("--theta: {} is not a state of {}", state,
                                     variable.name));
      }
      spec.angles[state] = parse_number(t.substr(eq + 1)) * scale;
    }
    for (const auto &state : variable.states) {
      if (!spec.angles.contains(state)) {
        throw UsageError("--theta: no angle for " + state);
      }
    }
  } else if (tokens.size() == 1 || tokens.size() == variable.states.size()) {
    for (std::size_t s = 0; s < variable.states.size(); ++s) {
      const auto &t = tokens.size() == 1 ? tokens.front() : tokens[s];
      spec.angles[variable.states[s]] = parse_number(t) * scale;
    }
  } else {
    throw UsageError(fmt::format("--theta: give 1 or {} values for {}",
                                 variable.states.size(), variable.name));
  }
  return spec;
}

Scenario load(const Options &opts) {
  return opts.scenario.empty() ? prisoners_dilemma()
                               : load_scenario(opts.scenario);
}

// Applies --evidence and --theta to a loaded scenario and revalidates it.
void apply_overrides(Scenario &s, const Options &opts,
                     const std::string &phase_variable) {
  for (const auto &e : opts.evidence) {
    const auto eq = e.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == e.size()) {
      throw UsageError("--evidence expects VAR=STATE, got '" + e + "'");
    }
    s.evidence[e.substr(0, eq)] = e.substr(eq + 1);
  }
  if (!opts.theta.empty()) {
    const Variable *v = s.network.find_variable(phase_variable);
    if (!v) throw UsageError("unknown variable: " + phase_variable);
    s.phases = theta_override(opts.theta, *v, opts.degrees);
  }
  auto report = validate_scenario(s);
  if (!report.empty()) throw InvalidNetworkError(std::move(report));
}

std::string describe(const PartialAssignment &a) {
  if (a.empty()) return "(none)";
  std::string out;
  for (const auto &[k, v] : a) {
    if (!out.empty()) out += ", ";
    out += k + "=" + v;
  }
  return out;
}

void print_phases(std::ostream &out, const JointDistribution &joint,
                  const PhaseAssignment &phases) {
  out << "phases:\n";
  for (std::size_t i = 0; i < joint.size(); ++i) {
    out << fmt::format("  {:<24} p={:.6f}  theta={:.6f}\n", joint.label(i),
                       joint.probability(i), phases[i]);
  }
}

// ---------------------------------------------------------------------------

int cmd_validate(const Options &opts, std::ostream &out) {
  const Scenario s = opts.scenario.empty()
                         ? prisoners_dilemma()
                         : parse_scenario(read_file(opts.scenario));
  const auto report = validate_scenario(s);
  if (report.empty()) {
    out << "ok: " << s.network.variables.size() << " variables, decision "
        << s.decision << "\n";
    return kOk;
  }
  out << report.size() << " violation(s):\n" << format_report(report);
  return kInvalid;
}

int cmd_infer(const Options &opts, std::ostream &out) {
  Scenario s = load(opts);
  const std::string query = opts.query.empty() ? s.decision : opts.query;
  if (!s.network.find_variable(query)) {
    throw UsageError("unknown variable: " + query);
  }
  apply_overrides(s, opts, query);
  const auto joint = condition(enumerate_joint(s.network), s.evidence);

  out << fmt::format("query: {}\nmode: {}\nevidence: {}\n", query, opts.mode,
                     describe(s.evidence));
  out << fmt::format("{:<12}{:>14}{:>14}{:>14}{:>14}{:>14}\n", "state",
                     "classical", "2*interf", "unnormalized", "gamma",
                     "probability");
  if (opts.mode == "classical") {
    const auto &var = joint.variables()[joint.variable_index(query)];
    for (const auto &state : var.states) {
      const double p = classical_marginal(joint, {{query, state}});
      out << fmt::format("{:<12}{:>14.6f}{:>14.6f}{:>14.6f}{:>14.6f}{:>14.6f}\n",
                         state, p, 0.0, p, 1.0, p);
    }
    return kOk;
  }
  const auto phases = s.phases ? phase_assignment(*s.phases, joint)
                               : zero_interference_phases(joint, query);
  const auto family = quantum_marginal_family(joint, phases, query);
  for (const auto &r : family.outcomes) {
    out << fmt::format("{:<12}{:>14.6f}{:>14.6f}{:>14.6f}{:>14.6f}{:>14.6f}\n",
                       r.state, r.classical_part, 2.0 * r.interference_part,
                       r.unnormalized, r.gamma, r.probability);
  }
  print_phases(out, joint, phases);
  return kOk;
}

int cmd_fit(const Options &opts, std::ostream &out) {
  Scenario s = load(opts);
  const std::string query = opts.query.empty() ? s.decision : opts.query;
  apply_overrides(s, opts, query);
  const auto joint = condition(enumerate_joint(s.network), s.evidence);
  const double theta = fit_phase(joint, query, opts.state, opts.target);
  const std::vector<double> angles(
      joint.variables()[joint.variable_index(query)].states.size(), theta);
  const auto family = quantum_marginal_family(
      joint, per_outcome_phases(joint, query, angles), query);
  out << fmt::format("fit {}={} target {:.6f}\n", query, opts.state,
                     opts.target);
  out << fmt::format("classical {:.6f}\n",
                     classical_marginal(joint, {{query, opts.state}}));
  out << fmt::format("attained {:.9f}\n", family.at(opts.state).probability);
  out << fmt::format("theta={:.6f}\n", theta);
  return kOk;
}

int cmd_eu(const Options &opts, std::ostream &out) {
  Scenario s = load(opts);
  apply_overrides(s, opts, s.decision);
  const auto model = resolve(s);
  const auto family =
      quantum_marginal_family(model.joint, model.phases, model.rule.decision_variable);
  const auto meu =
      meu_decision(model.joint, model.phases, model.operators, model.rule);

  out << fmt::format("decision: {}\nevidence: {}\n", s.decision,
                     describe(s.evidence));
  out << fmt::format("{:<12}{:>14}{:>14}{:>14}\n", "action", "prob_q", "eu_q",
                     "eu_classical");
  for (std::size_t a = 0; a < model.rule.actions.size(); ++a) {
    out << fmt::format(
        "{:<12}{:>14.6f}{:>14.6f}{:>14.6f}\n", model.rule.actions[a],
        family.outcomes[a].probability, meu.utilities[a],
        classical_expected_utility(model.joint, model.operators[a]));
  }
  out << fmt::format("chosen={} margin={:.6f}\n", meu.chosen_action(),
                     meu.margin);
  return kOk;
}

void write_text(const std::filesystem::path &path, const std::string &text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ScenarioIoError("cannot write " + path.string());
  file << text;
  file.close();
  if (!file) throw ScenarioIoError("error while writing " + path.string());
}

int cmd_sweep(const Options &opts, std::ostream &out) {
  Scenario s = load(opts);
  apply_overrides(s, opts, s.decision);
  const auto model = resolve(s);
  const auto grid = sweep(model.joint, model.operators, model.rule,
                          opts.resolution, opts.epsilon);
  const std::filesystem::path csv_path(opts.out_path);
  write_text(csv_path, grid_csv(grid));
  if (!opts.plot_path.empty()) {
    const std::filesystem::path script(opts.plot_path);
    auto dir = script.parent_path();
    if (dir.empty()) dir = ".";
    const auto rel = std::filesystem::absolute(csv_path)
                         .lexically_relative(std::filesystem::absolute(dir));
    write_text(script, plot_script(grid, rel.generic_string()));
  }
  const auto f = grid.fractions();
  out << fmt::format(
      "points={} FullyClassical={:.6f} SubOptimal={:.6f} Irrational={:.6f} "
      "failed={:.6f}\n",
      grid.points.size(), f.fully_classical, f.sub_optimal, f.irrational,
      f.failed);
  return kOk;
}

int cmd_reproduce_pd(const Options &opts, std::ostream &out) {
  Scenario s = prisoners_dilemma();
  const bool user_theta = !opts.theta.empty();
  apply_overrides(s, opts, s.decision);
  const auto prior = enumerate_joint(s.network);
  const double fitted = fit_phase(prior, "P2", "Def", kObservedUnknown);

  struct Condition {
    const char *name;
    PartialAssignment evidence;
    double observed;
  };
  const Condition conditions[] = {
      {"Condition 1 (P1 known to defect)", {{"P1", "Def"}},
       kObservedKnownDefect},
      {"Condition 2 (P1 known to cooperate)", {{"P1", "Coop"}},
       kObservedKnownCooperate},
      {"Condition 3 (P1 unknown)", {}, kObservedUnknown},
  };

  out << fmt::format("{:<38}{:>10}{:>11}{:>10}{:>10}  {}\n", "condition",
                     "observed", "classical", "model", "|diff|", "status");
  for (const auto &c : conditions) {
    const auto joint = condition(prior, c.evidence);
    const auto phases = phase_assignment(*s.phases, joint);
    const double model =
        quantum_marginal_family(joint, phases, "P2").at("Def").probability;
    const double classical = classical_marginal(joint, {{"P2", "Def"}});
    const double diff = std::abs(model - c.observed);
    std::string status = diff <= kReproduceTolerance ? "PASS" : "FAIL";
    if (c.evidence.empty() && std::abs(model - classical) <= 1e-6) {
      status += " (classical baseline)";
    }
    out << fmt::format("{:<38}{:>10.6f}{:>11.6f}{:>10.6f}{:>10.6f}  {}\n",
                       c.name, c.observed, classical, model, diff, status);
  }
  const auto &angles = s.phases->angles;
  out << fmt::format("theta Def={:.6f} Coop={:.6f} ({})\n", angles.at("Def"),
                     angles.at("Coop"), user_theta ? "user" : "bundled");
  out << fmt::format("fitted shared theta for {:.2f}: {:.6f}\n",
                     kObservedUnknown, fitted);
  return kOk;
}

}  // namespace

std::string grid_csv(const BeliefGrid &grid) {
  fmt::memory_buffer buf;
  auto out = std::back_inserter(buf);
  fmt::format_to(out, "theta_a,theta_b");
  for (const auto &a : grid.actions) fmt::format_to(out, ",prob_{}", a);
  for (const auto &a : grid.actions) fmt::format_to(out, ",eu_{}", a);
  fmt::format_to(out, ",chosen,region\n");
  for (const auto &p : grid.points) {
    fmt::format_to(out, "{:.6f},{:.6f}", p.theta_a, p.theta_b);
    if (p.region) {
      for (double v : p.probabilities) fmt::format_to(out, ",{:.9f}", v);
      for (double v : p.utilities) fmt::format_to(out, ",{:.9f}", v);
      fmt::format_to(out, ",{},{}\n", grid.actions[p.chosen],
                     to_string(*p.region));
    } else {
      for (std::size_t k = 0; k < 2 * grid.actions.size(); ++k) {
        fmt::format_to(out, ",nan");
      }
      fmt::format_to(out, ",,Error\n");
    }
  }
  return fmt::to_string(buf);
}

std::string plot_script(const BeliefGrid &grid, const std::string &csv_path) {
  const std::size_t n = grid.actions.size();
  const std::size_t region_col = 2 + 2 * n + 2;
  auto stem = std::filesystem::path(csv_path).replace_extension(".png");
  std::string s;
  s += "# Belief-plane sweep: expected utility per action and region map.\n";
  s += "# Run from this script's directory: gnuplot <script>\n";
  s += "set datafile separator \",\"\n";
  s += fmt::format("set terminal pngcairo size {},500\n", 500 * (n + 1));
  s += fmt::format("set output \"{}\"\n", stem.generic_string());
  s += fmt::format("set multiplot layout 1,{}\n", n + 1);
  s += "set xrange [0:2*pi]\nset yrange [0:2*pi]\nset size square\n";
  s += fmt::format("set xlabel \"theta_{}\"\nset ylabel \"theta_{}\"\n",
                   grid.actions[0], grid.actions[1]);
  for (std::size_t a = 0; a < n; ++a) {
    s += fmt::format("set title \"EU {}\"\n", grid.actions[a]);
    s += fmt::format(
        "plot \"{}\" skip 1 using 1:2:{} with image notitle\n", csv_path,
        3 + n + a);
  }
  s += "region(s) = s eq \"FullyClassical\" ? 0 : s eq \"SubOptimal\" ? 1 : "
       "s eq \"Irrational\" ? 2 : NaN\n";
  s += "set title \"region (0 classical, 1 sub-optimal, 2 irrational)\"\n";
  s += "set cbrange [0:2]\n";
  s += fmt::format(
      "plot \"{}\" skip 1 using 1:2:(region(strcol({}))) with image notitle\n",
      csv_path, region_col);
  s += "unset multiplot\n";
  return s;
}

int run(const std::vector<std::string> &args, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Quantum-like Bayesian inference and decision analysis",
               "qlbn"};
  app.require_subcommand(1);
  Options opts;

  auto add_scenario = [&](CLI::App *cmd) {
    cmd->add_option("--scenario", opts.scenario,
                    "Scenario file (default: built-in prisoner's dilemma)");
  };
  auto add_theta = [&](CLI::App *cmd) {
    cmd->add_option("--theta", opts.theta,
                    "Per-outcome angle: one shared value, one per outcome, or "
                    "STATE=angle (repeatable)");
    cmd->add_flag("--degrees", opts.degrees, "Read --theta in degrees");
  };
  auto add_evidence = [&](CLI::App *cmd) {
    cmd->add_option("--evidence", opts.evidence, "VAR=STATE (repeatable)");
  };

  auto *validate_cmd = app.add_subcommand("validate", "Check a scenario file");
  add_scenario(validate_cmd);

  auto *infer_cmd =
      app.add_subcommand("infer", "Classical and quantum-like marginals");
  add_scenario(infer_cmd);
  add_theta(infer_cmd);
  add_evidence(infer_cmd);
  infer_cmd->add_option("--query", opts.query,
                        "Query variable (default: decision variable)");
  infer_cmd->add_option("--mode", opts.mode, "classical or quantum")
      ->check(CLI::IsMember({"classical", "quantum"}));

  auto *fit_cmd = app.add_subcommand(
      "fit", "Fit the shared angle that reproduces a target probability");
  add_scenario(fit_cmd);
  add_evidence(fit_cmd);
  fit_cmd->add_option("--query", opts.query,
                      "Query variable (default: decision variable)");
  fit_cmd->add_option("--state", opts.state, "Target state")->required();
  fit_cmd->add_option("--target", opts.target, "Target probability")
      ->required();

  auto *eu_cmd = app.add_subcommand("eu", "Quantum-like expected utilities");
  add_scenario(eu_cmd);
  add_theta(eu_cmd);
  add_evidence(eu_cmd);

  auto *sweep_cmd =
      app.add_subcommand("sweep", "Classify the belief plane into regions");
  add_scenario(sweep_cmd);
  add_evidence(sweep_cmd);
  sweep_cmd->add_option("--resolution", opts.resolution, "Samples per axis")
      ->check(CLI::Range(std::size_t{2}, std::size_t{4096}));
  sweep_cmd->add_option("--epsilon", opts.epsilon,
                        "Relative margin of the sub-optimal region")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", opts.out_path, "Output CSV")->required();
  sweep_cmd->add_option("--plot-script", opts.plot_path,
                        "Also write a gnuplot script");

  auto *pd_cmd = app.add_subcommand(
      "reproduce-pd", "Compare the bundled model with the observed rates");
  add_theta(pd_cmd);

  std::vector<std::string> argv_storage{"qlbn"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char *> argv;
  for (auto &a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError &e) {
    app.exit(e, out, err);
    return kInvalid;
  }

  try {
    if (*validate_cmd) return cmd_validate(opts, out);
    if (*infer_cmd) return cmd_infer(opts, out);
    if (*fit_cmd) return cmd_fit(opts, out);
    if (*eu_cmd) return cmd_eu(opts, out);
    if (*sweep_cmd) return cmd_sweep(opts, out);
    if (*pd_cmd) return cmd_reproduce_pd(opts, out);
  } catch (const ScenarioIoError &e) {
    err << "error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const ScenarioParseError &e) {
    err << "parse error: " << e.what() << "\n";
    return kInvalid;
  } catch (const InvalidNetworkError &e) {
    err << e.what();
    return kInvalid;
  } catch (const UnreachableTargetError &e) {
    err << "error: " << e.what() << "\n";
    return kUnreachable;
  } catch (const ImpossibleEvidenceError &e) {
    err << "error: " << e.what() << "\n";
    return kUnreachable;
  } catch (const DegenerateInterferenceError &e) {
    err << "error: " << e.what() << "\n";
    return kUnreachable;
  } catch (const NoClassicalSupportError &e) {
    err << "error: " << e.what() << "\n";
    return kUnreachable;
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}

}  // namespace qlbn::cli
