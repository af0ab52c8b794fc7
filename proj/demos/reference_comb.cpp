// Walks through the reference comb: bands, surface states from both analytic
// equations and the determinant oracle, and the normalized wavefunction of the
// first state.

#include <cstdio>
#include <cstdlib>
#include <vector>

#include "ddcomb/dispersion.hpp"
#include "ddcomb/surface.hpp"
#include "ddcomb/wavefunction.hpp"

int main(int argc, char** argv) {
  double beta_t = argc > 1 ? std::atof(argv[1]) : 0.2;
  const auto cfg = ddcomb::make_symmetric(3, 1.0, beta_t, 50.0);
  const auto bands = ddcomb::find_bands(cfg, cfg.wall(), 20000);

  std::printf("N = %d, p = %g, beta = %g, u = %g\n", cfg.n_sites, cfg.p, cfg.beta_t, cfg.wall());
  for (std::size_t i = 0; i < bands.gaps.size(); ++i)
    std::printf("gap %zu: (%.10f, %.10f)\n", i + 1, bands.gaps[i].lo, bands.gaps[i].hi);

  for (auto m : {ddcomb::Method::Classical, ddcomb::Method::Impedance, ddcomb::Method::Oracle}) {
    const auto found = ddcomb::find_surface_states(cfg, bands, m);
    std::printf("%-10s", ddcomb::to_string(m));
    for (const auto& s : found.states) std::printf("  [gap %d] %.12f", s.gap_index, s.eps);
    std::printf("\n");
  }

  const auto states = ddcomb::find_surface_states(cfg, bands, ddcomb::Method::Classical).states;
  if (states.empty()) return 0;
  const auto wf = ddcomb::normalized_wavefunction(states.front(), cfg);
  std::printf("\npsi for eps = %.10f (norm %.12f)\n", wf.eps(), wf.norm());
  for (double x = -2.0; x <= wf.width() + 2.0 + 1e-9; x += 0.25) std::printf("%6.2f  % .8f\n", x, wf.value(x));
  return 0;
}
