#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "ddcomb/cli.hpp"

namespace {

using ddcomb::cli::Command;
using ddcomb::cli::RunConfig;

// Flags shared by every subcommand.
void add_common(CLI::App& sub, RunConfig& rc, ddcomb::cli::PhysicalInputs& phys) {
  sub.add_option("--n-sites", rc.n_sites, "number of sites N")->capture_default_str();
  sub.add_option("--p", rc.p, "dimensionless delta strength p")->capture_default_str();
  sub.add_option("--beta", rc.beta_t, "dimensionless delta-prime strength")->capture_default_str();
  sub.add_option("--u", rc.u, "dimensionless wall height")->capture_default_str();
  sub.add_option("--eps-max", rc.eps_max, "top of the energy scan (default: u)");
  sub.add_option("--grid", rc.grid, "band-edge scan grid points")->capture_default_str();
  sub.add_option("--samples-per-gap", rc.samples_per_gap, "root-bracketing samples per gap")->capture_default_str();
  sub.add_option("--out", rc.out, "output file (default: stdout)");
  sub.add_option("--threads", rc.threads, "worker threads (default: COMB_THREADS or hardware)");

  const std::map<std::string, ddcomb::cli::Format> formats{{"csv", ddcomb::cli::Format::Csv},
                                                           {"json", ddcomb::cli::Format::Json}};
  sub.add_option("--format", rc.format, "csv | json")->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  const std::map<std::string, ddcomb::cli::MethodChoice> methods{{"classical", ddcomb::cli::MethodChoice::Classical},
                                                                 {"impedance", ddcomb::cli::MethodChoice::Impedance},
                                                                 {"both", ddcomb::cli::MethodChoice::Both}};
  sub.add_option("--method", rc.method, "classical | impedance | both")
      ->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
  const std::map<std::string, ddcomb::KappaReading> readings{{"cell", ddcomb::KappaReading::Cell},
                                                             {"system", ddcomb::KappaReading::System}};
  sub.add_option("--kappa-reading", rc.reading, "decay ratio in the impedance equation: cell | system")
      ->transform(CLI::CheckedTransformer(readings, CLI::ignore_case));

  auto* g = sub.add_option_group("physical", "SI inputs (replace --p, --beta, --u)");
  g->add_option("--mass", phys.mass, "particle mass [kg]");
  g->add_option("--cell-width", phys.cell_width, "site spacing l [m]");
  g->add_option("--alpha", phys.alpha, "delta strength [J m]");
  g->add_option("--beta-prime", phys.beta, "delta-prime strength [J m^2]");
  g->add_option("--wall", phys.wall, "wall height U [J]");
  g->add_option("--hbar", phys.hbar, "reduced Planck constant [J s]");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bands, surface states and wavefunctions of a finite delta/delta-prime comb"};
  app.set_version_flag("--version", ddcomb::cli::kToolVersion);
  app.require_subcommand(1);

  RunConfig rc;
  ddcomb::cli::PhysicalInputs phys;
  std::map<CLI::App*, Command> commands;

  auto* bands = app.add_subcommand("bands", "allowed bands and gaps up to eps-max");
  auto* surface = app.add_subcommand("surface", "surface-state energies in every gap below u");
  auto* wave = app.add_subcommand("wavefunction", "normalized surface-state wavefunction table");
  auto* sweep = app.add_subcommand("sweep-beta", "surface-state trajectories against the delta-prime strength");
  auto* compare = app.add_subcommand("oracle-compare", "analytic roots against the matching-determinant oracle");
  commands = {{bands, Command::Bands},
              {surface, Command::Surface},
              {wave, Command::Wavefunction},
              {sweep, Command::SweepBeta},
              {compare, Command::OracleCompare}};
  for (auto& [sub, cmd] : commands) add_common(*sub, rc, phys);

  wave->add_option("--state", rc.state_index, "index of the state in (gap, energy) order")->capture_default_str();
  wave->add_option("--x-min", rc.x_min, "first grid point [l]")->capture_default_str();
  wave->add_option("--x-max", rc.x_max, "last grid point [l] (default: L + 3)");
  wave->add_option("--x-points", rc.x_points, "grid points")->capture_default_str();

  sweep->add_option("--beta-min", rc.beta_min)->capture_default_str();
  sweep->add_option("--beta-max", rc.beta_max)->capture_default_str();
  sweep->add_option("--steps", rc.steps, "number of beta points")->capture_default_str();
  sweep->add_option("--gaps", rc.gaps, "gap indices to report")->delimiter(',')->capture_default_str();
  sweep->add_option("--oracle-every", rc.oracle_every, "oracle check every k-th point (0: never)")
      ->capture_default_str();

  compare->add_option("--tol", rc.oracle_tol, "match tolerance in eps")->capture_default_str();
  sweep->add_option("--tol", rc.oracle_tol, "oracle match tolerance in eps")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  for (auto& [sub, cmd] : commands) {
    if (!sub->parsed()) continue;
    rc.command = cmd;
    const bool physical = sub->get_option_group("physical")->count_all() > 0;
    if (physical) rc.physical = phys;
  }
  if (rc.command == Command::OracleCompare && rc.format == ddcomb::cli::Format::Csv &&
      !compare->get_option("--format")->count())
    rc.format = ddcomb::cli::Format::Json;
  return ddcomb::cli::run(rc, std::cout, std::cerr);
}
