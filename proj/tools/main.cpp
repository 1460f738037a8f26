#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "chemomass/errors.hpp"
#include "commands.hpp"

using namespace chemomass;
using namespace chemomass::cli;

namespace {

// Reads a flat `key = value` file and hands every key to the subcommand being
// run, so config files need no [section] headers. Flags given on the command
// line still win.
class FlatConfig : public CLI::ConfigBase {
 public:
  std::string subcommand;
  std::vector<CLI::ConfigItem> from_config(std::istream& is) const override {
    auto items = CLI::ConfigBase::from_config(is);
    for (auto& item : items)
      if (item.parents.empty() && !subcommand.empty()) item.parents = {subcommand};
    return items;
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "Output directory (default: $CHEMOMASS_OUT, else ./chemomass_out)");
  sub->add_option("--delta", c.delta, "Decay rate delta of w")->capture_default_str();
  sub->add_option("--tau", c.tau, "Time scale tau of w")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial chemotaxis with indirect signal production: solvers, barriers and mass sweeps", "chemomass"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file; keys are the long flag names without dashes");
  app.allow_config_extras(CLI::config_extras_mode::error);
  auto config = std::make_shared<FlatConfig>();
  app.config_formatter(config);

  PrimalOptions primal;
  auto* sp = app.add_subcommand("simulate-primal", "Finite-volume run of (u, v, w) in the unit disk");
  add_common(sp, primal.common);
  sp->add_option("--m", primal.m, "Total mass of u0, e.g. 4pi")->required();
  sp->add_option("--data", primal.data, "concentrated | homogeneous")->capture_default_str();
  sp->add_option("--radius", primal.radius, "Radius of the concentrated data")->capture_default_str();
  sp->add_option("--w-ratio", primal.w_ratio, "w0 = ratio * u0 for concentrated data")->capture_default_str();
  sp->add_option("--n", primal.n, "Radial cells")->capture_default_str();
  sp->add_option("--dt", primal.dt, "Time step")->capture_default_str();
  sp->add_option("--t-end", primal.t_end, "Final time")->capture_default_str();
  sp->add_option("--record-every", primal.record_every, "Diagnostic interval")->capture_default_str();
  sp->add_option("--snapshot-every", primal.snapshot_every, "Profile interval (0: first and last)")->capture_default_str();
  sp->add_option("--energy-p", primal.energy_p, "Exponent of the energy functional")->capture_default_str();

  TransformedOptions tr;
  auto* st = app.add_subcommand("simulate-transformed", "Run of the mass function U(xi, t) with its memory field");
  add_common(st, tr.common);
  st->add_option("--m", tr.m, "Total mass, e.g. 12pi")->required();
  st->add_option("--data", tr.data, "auto (grow-up data above 8 pi delta) | homogeneous")->capture_default_str();
  st->add_option("--eta", tr.eta, "Boundary margin of the grow-up data")->capture_default_str();
  st->add_option("--n", tr.n, "Radial cells of subcritical data")->capture_default_str();
  st->add_option("--n-data", tr.n_data, "Outer radial cells of grow-up data")->capture_default_str();
  st->add_option("--nxi", tr.nxi, "xi cells")->capture_default_str();
  st->add_option("--xi-min", tr.xi_min, "Smallest positive node of the graded grid")->capture_default_str();
  st->add_option("--xi-ratio", tr.xi_ratio, "Growth ratio of the graded grid")->capture_default_str();
  st->add_option("--dt", tr.dt, "Time step")->capture_default_str();
  st->add_option("--t-end", tr.t_end, "Final time")->capture_default_str();
  st->add_option("--record-every", tr.record_every, "Diagnostic interval")->capture_default_str();
  st->add_option("--window", tr.window, "Classifier window")->capture_default_str();
  st->add_option("--snapshot-every", tr.snapshot_every, "Snapshot interval (0: first and last)")->capture_default_str();

  BarrierOptions bar;
  auto* sb = app.add_subcommand("verify-barrier", "Sign certificate of P on the comparison functions");
  add_common(sb, bar.common);
  sb->add_option("--mode", bar.mode, "inner | outer | sub | super")->required();
  sb->add_option("--m", bar.m, "Mass (default 12pi, 4pi for super)");
  sb->add_option("--eta", bar.eta, "Boundary margin")->capture_default_str();
  sb->add_option("--n-data", bar.n_data, "Outer radial cells of the data fixing W0")->capture_default_str();
  sb->add_option("--samples", bar.samples, "Samples per axis")->capture_default_str();
  sb->add_option("--t-max", bar.t_max, "Largest sampled time")->capture_default_str();
  sb->add_option("--slack", bar.slack, "Allowed positive residual")->capture_default_str();
  sb->add_option("--horizon", bar.horizon, "super: length of the run that fixes C")->capture_default_str();

  DataOptions data;
  auto* sd = app.add_subcommand("build-data", "Initial data meeting the grow-up hypotheses");
  add_common(sd, data.common);
  sd->add_option("--m", data.m, "Total mass, above 8 pi delta")->required();
  sd->add_option("--eta", data.eta, "Boundary margin")->capture_default_str();
  sd->add_option("--n-data", data.n_data, "Outer radial cells")->capture_default_str();

  SweepOptions sw;
  auto* ss = app.add_subcommand("sweep-mass", "Classify long runs across a list of masses");
  add_common(ss, sw.common);
  ss->add_option("--masses", sw.masses, "Comma-separated, increasing, e.g. 4pi,6pi,10pi,12pi")->required();
  ss->add_option("--family", sw.family, "concentrated | homogeneous")->capture_default_str();
  ss->add_option("--horizon", sw.horizon, "Run length")->capture_default_str();
  ss->add_option("--dt", sw.dt, "Time step")->capture_default_str();
  ss->add_option("--record-every", sw.record_every, "Diagnostic interval")->capture_default_str();
  ss->add_option("--window", sw.window, "Classifier window")->capture_default_str();
  ss->add_option("--eta", sw.eta, "Boundary margin of grow-up data")->capture_default_str();
  ss->add_option("--n", sw.n, "Radial cells of subcritical data")->capture_default_str();
  ss->add_option("--n-data", sw.n_data, "Outer radial cells of grow-up data")->capture_default_str();
  ss->add_option("--nxi", sw.nxi, "xi cells")->capture_default_str();
  ss->add_option("--xi-min", sw.xi_min, "Smallest positive node of the graded grid")->capture_default_str();
  ss->add_option("--xi-ratio", sw.xi_ratio, "Growth ratio of the graded grid")->capture_default_str();
  ss->add_option("--threads", sw.threads, "Worker threads (0: all cores)")->capture_default_str();
  ss->add_flag("--timing", sw.timing, "Write wall-clock runtimes (the table is then not reproducible)");

  ComparisonOptions cmp;
  auto* sc = app.add_subcommand("check-comparison", "Ordering of the barrier below U and of random ordered pairs");
  add_common(sc, cmp.common);
  sc->add_option("--m", cmp.m, "Mass of the grow-up run")->capture_default_str();
  sc->add_option("--eta", cmp.eta, "Boundary margin")->capture_default_str();
  sc->add_option("--horizon", cmp.horizon, "Run length")->capture_default_str();
  sc->add_option("--pairs", cmp.pairs, "Number of random ordered pairs")->capture_default_str();
  sc->add_option("--pair-m", cmp.pair_m, "Mass of the random pairs")->capture_default_str();
  sc->add_option("--pair-n", cmp.pair_n, "Radial cells of the random pairs")->capture_default_str();
  sc->add_option("--pair-t-end", cmp.pair_t_end, "Run length of the random pairs")->capture_default_str();
  sc->add_option("--seed", cmp.seed, "Seed of the random pairs")->capture_default_str();

  EnergyOptions en;
  auto* se = app.add_subcommand("energy-check", "L^p energy inequality along a primal run");
  add_common(se, en.common);
  se->add_option("--m", en.m, "Total mass, e.g. 4pi")->required();
  se->add_option("--n", en.n, "Radial cells")->capture_default_str();
  se->add_option("--dt", en.dt, "Time step")->capture_default_str();
  se->add_option("--t-end", en.t_end, "Final time")->capture_default_str();
  se->add_option("--record-every", en.record_every, "Diagnostic interval")->capture_default_str();
  se->add_option("--rel-tol", en.rel_tol, "Tolerance relative to the right-hand side")->capture_default_str();
  se->add_option("--min-fraction", en.min_fraction, "Required fraction of records")->capture_default_str();
  se->add_option("--energy-p", en.energy_p, "Exponent p")->capture_default_str();

  for (auto* sub : app.get_subcommands({})) {
    sub->fallthrough();
    for (int i = 1; i < argc; ++i)
      if (sub->get_name() == argv[i]) config->subcommand = sub->get_name();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return validation;
  }

  try {
    if (*sp) return simulate_primal(primal);
    if (*st) return simulate_transformed(tr);
    if (*sb) return verify_barrier(bar);
    if (*sd) return build_data(data);
    if (*ss) return sweep_mass(sw);
    if (*sc) return check_comparison(cmp);
    if (*se) return energy_check(en);
  } catch (const ConstructionError& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return check_failed;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return numerical;
  } catch (const std::invalid_argument& e) {
    // InvalidInput, RegimeError and CompatibilityError
    std::cerr << "invalid input: " << e.what() << '\n';
    return validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io_error;
  }
  return validation;
}
