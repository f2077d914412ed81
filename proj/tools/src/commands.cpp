#include "arc_cli/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "arc/error.hpp"
#include "arc/parallel.hpp"
#include "arc/theory.hpp"
#include "arc_cli/checks.hpp"
#include "arc_cli/config.hpp"
#include "arc_cli/simulate.hpp"

namespace arc::cli {

using nlohmann::ordered_json;

namespace {

ordered_json quantity_json(const theory::Quantity& q) {
  if (q.ok()) return q.value;
  return std::string(theory::to_string(q.status));
}

ordered_json tally_json(const ClauseTally& t) {
  return {{"checked", t.checked}, {"violations", t.violations}, {"worst_excess", t.worst_excess}};
}

struct SimulateArgs {
  std::string config;
  std::string out;
  std::size_t threads = 0;
};

int do_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(a.config);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n\n" << config_schema();
    return kExitConfig;
  }
  if (!a.out.empty()) config.output_dir = a.out;
  if (a.threads > 0) config.threads = a.threads;
  config.threads = threads_from_env(config.threads);

  const auto results = simulate_all(config);
  out << write_outputs(config, results);
  return kExitOk;
}

struct CertifyArgs {
  std::string agg = "cwtm+nnm+arc";
  std::size_t n = 5, f = 1, dim = 4, trials = 200, threads = 1;
  std::uint64_t seed = 1;
};

int do_certify(const CertifyArgs& a, std::ostream& out) {
  const AggregatorSpec spec = AggregatorSpec::parse(a.agg);
  const CertifyReport r = certify(spec, a.n, a.f, a.dim, a.trials, a.seed, threads_from_env(a.threads));
  ordered_json j;
  j["aggregator"] = spec.to_string();
  j["n"] = r.n;
  j["f"] = r.f;
  j["dim"] = r.dim;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["kappa_source"] = std::string(to_string(r.certificate.source));
  j["kappa_certified"] = r.bound ? ordered_json(*r.bound) : ordered_json(nullptr);
  j["bound"] = r.bound ? ordered_json(*r.bound) : ordered_json(nullptr);
  j["corollary_bound"] = r.corollary_bound ? ordered_json(*r.corollary_bound) : ordered_json(nullptr);
  j["universal_lower_bound"] = theory::kappa_bounds(a.n, a.f).lower;
  j["kappa_hat"] = std::isinf(r.max_kappa_hat) ? ordered_json("inf") : ordered_json(r.max_kappa_hat);
  j["kappa_hat_is_lower_bound"] = !r.exhaustive;
  j["witness"] = r.witness;
  j["violations"] = r.violations;
  j["corollary_violations"] = r.corollary_violations;
  out << j.dump(2) << '\n';
  return (r.violations || r.corollary_violations) ? kExitViolation : kExitOk;
}

struct TheoryArgs {
  std::optional<std::size_t> n, f;
  std::optional<double> G, T, gamma, kappa;
  double B = 0.0, L = 1.0, delta0 = 1.0, zeta = 0.0, xi = 0.5, xi0 = 0.5, upsilon = 0.5;
};

int do_theory(const TheoryArgs& a, std::ostream& out) {
  ordered_json j;
  j["B"] = a.B;
  j["breakdown_point"] = theory::breakdown_point(a.B);
  if (a.n && a.f) {
    j["n"] = *a.n;
    j["f"] = *a.f;
    j["ratio"] = static_cast<double>(*a.f) / static_cast<double>(*a.n);
    if (a.G) j["lower_bound_error"] = quantity_json(theory::lower_bound_error(*a.n, *a.f, *a.G, a.B));
    if (*a.n > 2 * *a.f) {
      const auto kb = theory::kappa_bounds(*a.n, *a.f);
      j["kappa_bounds"] = {{"lower", kb.lower}, {"nnm_upper", kb.nnm_upper},
                           {"arc_increment", kb.arc_increment}};
      const double kappa = a.kappa.value_or(kb.nnm_upper);
      if (a.G && a.gamma && a.T) {
        j["convergence_bound"] =
            quantity_json(theory::convergence_bound(a.delta0, kappa, a.B, *a.G, *a.gamma, *a.T));
      }
    }
    if (a.G && a.B > 0.0 && *a.G > 0.0) {
      theory::TheoryInputs in;
      in.n = *a.n;
      in.f = *a.f;
      in.G = *a.G;
      in.B = a.B;
      in.L = a.L;
      in.delta0 = a.delta0;
      in.steps = a.T.value_or(1.0);
      in.zeta_init = a.zeta;
      in.xi = a.xi;
      in.xi_o = a.xi0;
      in.upsilon = a.upsilon;
      in.kappa = a.kappa;
      const auto b = theory::arc_bounds(in);
      ordered_json arc;
      arc["kappa"] = b.kappa;
      arc["rho"] = b.rho;
      arc["psi"] = b.psi;
      arc["epsilon_o"] = quantity_json(b.epsilon_o);
      arc["lemma_c1_rhs"] = b.lemma_c1_rhs;
      arc["corollary_c5_rhs"] = b.corollary_c5_rhs;
      arc["improvement_bound_small_init"] = quantity_json(b.thm_c4_part1);
      arc["improvement_bound_general"] = b.thm_c4_part2;
      arc["improvement_interval"] = {{"lower", b.improvement_interval.lower},
                                     {"upper", b.improvement_interval.upper},
                                     {"length", b.improvement_interval.length}};
      arc["xi_from_ratio"] = b.xi_from_ratio;
      arc["xi_for_upsilon"] = b.xi_for_upsilon;
      arc["gamma"] = b.gamma;
      arc["steps_threshold_certified"] = b.steps_threshold_certified;
      arc["steps_threshold_tripled"] = b.steps_threshold_tripled;
      j["arc"] = arc;
    }
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct LemmaArgs {
  std::string which;
  std::string base = "cwtm";
  std::string agg = "cwtm+nnm+arc+wlog";
  std::size_t trials = 1000, steps = 200, seeds = 5, n = 11, f = 1, dim = 10;
  std::uint64_t seed = 1;
};

int do_lemma(const LemmaArgs& a, std::ostream& out) {
  ordered_json j;
  j["which"] = a.which;
  bool violated = false;
  if (a.which == "c3") {
    const AggregatorSpec spec = AggregatorSpec::parse(a.agg);
    std::vector<std::uint64_t> seeds;
    for (std::size_t s = 0; s < a.seeds; ++s) seeds.push_back(a.seed + s);
    const auto entries = growth_sweep(spec, seeds, a.steps, a.n, a.f, a.dim);
    ordered_json runs = ordered_json::array();
    for (const auto& e : entries) {
      violated = violated || !e.report.passed;
      runs.push_back({{"seed", e.seed},
                      {"passed", e.report.passed},
                      {"factor", e.report.factor},
                      {"worst_ratio", e.report.worst_ratio},
                      {"first_violation", e.report.first_violation
                                              ? ordered_json(*e.report.first_violation)
                                              : ordered_json(nullptr)},
                      {"steps_recorded", e.steps_recorded}});
    }
    j["aggregator"] = spec.to_string();
    j["runs"] = runs;
  } else {
    const ClipSweepReport r = clip_sweep(a.trials, a.seed, parse_base_rule(a.base));
    const std::map<std::string, const ClauseTally*> clauses = {
        {"b1", &r.robustness}, {"b2", &r.variance_reduction}, {"b3", &r.bias},
        {"b4", &r.bias_vs_variance}};
    const ClauseTally& chosen = *clauses.at(a.which);
    violated = chosen.violations > 0;
    j["trials"] = r.trials;
    j["base"] = a.base;
    j["result"] = tally_json(chosen);
    ordered_json all;
    for (const auto& [name, t] : clauses) all[name] = tally_json(*t);
    j["all_clauses"] = all;
  }
  j["violated"] = violated;
  out << j.dump(2) << '\n';
  return violated ? kExitViolation : kExitOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust distributed learning with adaptive clipping", "arc-robust"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run (attack x seed) training simulations");
  simulate->add_option("--config", sim.config, "Config file")->required();
  simulate->add_option("--out", sim.out, "Output directory (overrides output.dir)");
  simulate->add_option("--threads", sim.threads, "Worker threads");

  CertifyArgs cert;
  auto* certify_cmd = app.add_subcommand("certify", "Empirical robustness certification");
  certify_cmd->add_option("--agg", cert.agg, "Aggregator spec, e.g. cwtm+nnm+arc")->capture_default_str();
  certify_cmd->add_option("--n", cert.n)->capture_default_str();
  certify_cmd->add_option("--f", cert.f)->capture_default_str();
  certify_cmd->add_option("--dim", cert.dim)->capture_default_str();
  certify_cmd->add_option("--trials", cert.trials)->capture_default_str();
  certify_cmd->add_option("--seed", cert.seed)->capture_default_str();
  certify_cmd->add_option("--threads", cert.threads)->capture_default_str();

  TheoryArgs th;
  auto* theory_cmd = app.add_subcommand("theory", "Closed-form bounds");
  theory_cmd->add_option("--n", th.n);
  theory_cmd->add_option("--f", th.f);
  theory_cmd->add_option("--G", th.G);
  theory_cmd->add_option("--B", th.B)->capture_default_str();
  theory_cmd->add_option("--L", th.L)->capture_default_str();
  theory_cmd->add_option("--delta0", th.delta0)->capture_default_str();
  theory_cmd->add_option("--zeta", th.zeta, "Initial gradient bound")->capture_default_str();
  theory_cmd->add_option("--xi", th.xi)->capture_default_str();
  theory_cmd->add_option("--xi0", th.xi0)->capture_default_str();
  theory_cmd->add_option("--upsilon", th.upsilon)->capture_default_str();
  theory_cmd->add_option("--T", th.T, "Number of steps");
  theory_cmd->add_option("--gamma", th.gamma, "Step size for the convergence bound");
  theory_cmd->add_option("--kappa", th.kappa, "Robustness coefficient (default: certified NNM value)");

  LemmaArgs lem;
  auto* lemma_cmd = app.add_subcommand("lemma-check", "Randomised checks of the clipping and growth bounds");
  lemma_cmd->add_option("--which", lem.which)->required()->check(CLI::IsMember({"b1", "b2", "b3", "b4", "c3"}));
  lemma_cmd->add_option("--base", lem.base, "Base rule for b1")->capture_default_str();
  lemma_cmd->add_option("--agg", lem.agg, "Pipeline for c3")->capture_default_str();
  lemma_cmd->add_option("--trials", lem.trials)->capture_default_str();
  lemma_cmd->add_option("--steps", lem.steps)->capture_default_str();
  lemma_cmd->add_option("--seeds", lem.seeds, "Number of seeds for c3")->capture_default_str();
  lemma_cmd->add_option("--seed", lem.seed)->capture_default_str();
  lemma_cmd->add_option("--n", lem.n)->capture_default_str();
  lemma_cmd->add_option("--f", lem.f)->capture_default_str();
  lemma_cmd->add_option("--dim", lem.dim)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    if (app.got_subcommand(simulate)) err << '\n' << config_schema();
    return kExitConfig;
  }

  try {
    if (*simulate) return do_simulate(sim, out, err);
    if (*certify_cmd) return do_certify(cert, out);
    if (*theory_cmd) return do_theory(th, out);
    if (*lemma_cmd) return do_lemma(lem, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitConfig;
}

}  // namespace arc::cli
