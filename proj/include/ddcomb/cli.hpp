#pragma once

// Command implementations behind the ddcomb executable. Each command turns a validated
// RunConfig into a Table that is written as CSV or JSON.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "ddcomb/dispersion.hpp"
#include "ddcomb/errors.hpp"
#include "ddcomb/oracle.hpp"
#include "ddcomb/params.hpp"
#include "ddcomb/surface.hpp"
#include "ddcomb/wavefunction.hpp"

namespace ddcomb::cli {

inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2, kExitOracleMismatch = 3 };

/// Thrown when an analytic root has no oracle counterpart (or vice versa).
class OracleMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Bands, Surface, Wavefunction, SweepBeta, OracleCompare };
enum class Format { Csv, Json };
enum class MethodChoice { Classical, Impedance, Both };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::Bands: return "bands";
    case Command::Surface: return "surface";
    case Command::Wavefunction: return "wavefunction";
    case Command::SweepBeta: return "sweep-beta";
    case Command::OracleCompare: return "oracle-compare";
  }
  return "?";
}

/// SI inputs; when present they replace --p/--beta/--u.
struct PhysicalInputs {
  double mass = 0.0;
  double cell_width = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double wall = 0.0;
  double hbar = kHbarSI;
};

struct RunConfig {
  Command command = Command::Bands;
  int n_sites = 3;
  double p = 1.0;
  double beta_t = 0.0;
  double u = 50.0;
  std::optional<PhysicalInputs> physical;

  double eps_max = 0.0;  // 0: use the wall height
  int grid = 20000;
  int samples_per_gap = 2000;
  Format format = Format::Csv;
  std::string out;  // empty: stdout
  MethodChoice method = MethodChoice::Both;
  KappaReading reading = KappaReading::Cell;

  double beta_min = -0.5;
  double beta_max = 0.5;
  int steps = 101;
  std::vector<int> gaps{1, 2};
  int oracle_every = 10;
  double oracle_tol = 1e-6;

  int state_index = 0;
  double x_min = -3.0;
  double x_max = std::numeric_limits<double>::quiet_NaN();  // NaN: L + 3
  int x_points = 801;

  unsigned threads = 0;  // 0: COMB_THREADS or hardware concurrency

  DimensionlessConfig dimensionless(double beta_override = std::numeric_limits<double>::quiet_NaN()) const {
    DimensionlessConfig cfg;
    if (physical) {
      CombConfig phys;
      phys.n_sites = n_sites;
      phys.mass = physical->mass;
      phys.cell_width = physical->cell_width;
      phys.delta_strength = physical->alpha;
      phys.delta_prime_strength = physical->beta;
      phys.wall_left = phys.wall_right = physical->wall;
      cfg = nondimensionalize(phys, physical->hbar);
    } else {
      cfg = DimensionlessConfig{n_sites, p, beta_t, u, u};
    }
    if (!std::isnan(beta_override)) cfg.beta_t = beta_override;
    cfg.validate();
    return cfg;
  }

  double scan_ceiling(const DimensionlessConfig& cfg) const { return eps_max > 0.0 ? eps_max : cfg.wall(); }

  void validate() const {
    const auto cfg = dimensionless();
    if (!(cfg.wall() > 0.0)) throw ValidationError("wall height u must be > 0");
    if (eps_max < 0.0) throw ValidationError("--eps-max must be > 0");
    if (command != Command::Bands && eps_max > cfg.wall()) throw ValidationError("--eps-max must not exceed u");
    if (grid < 100) throw ValidationError("--grid must be >= 100");
    if (samples_per_gap < 10) throw ValidationError("--samples-per-gap must be >= 10");
    if (command == Command::SweepBeta) {
      if (!(beta_min <= beta_max)) throw ValidationError("--beta-min must not exceed --beta-max");
      if (steps < 1) throw ValidationError("--steps must be >= 1");
      for (double b : {beta_min, beta_max})
        DimensionlessConfig{n_sites, cfg.p, b, cfg.u_left, cfg.u_right}.validate();
      if (beta_min < -1.0 && beta_max > -1.0) throw ValidationError("beta range must not straddle -1");
      if (beta_min < 1.0 && beta_max > 1.0) throw ValidationError("beta range must not straddle 1");
      for (int g : gaps)
        if (g < 1) throw ValidationError("--gaps entries must be >= 1");
      if (oracle_every < 0) throw ValidationError("--oracle-every must be >= 0");
    }
    if (command == Command::OracleCompare && n_sites > 20) throw ValidationError("oracle-compare supports N <= 20");
    if (command == Command::Wavefunction) {
      if (x_points < 2) throw ValidationError("--x-points must be >= 2");
      const double hi = std::isnan(x_max) ? cfg.system_width() + 3.0 : x_max;
      if (!(x_min < hi)) throw ValidationError("--x-min must be below --x-max");
      if (state_index < 0) throw ValidationError("--state must be >= 0");
    }
  }
};

// ---------------------------------------------------------------------------
// Tables and writers
// ---------------------------------------------------------------------------

/// Empty cells (monostate) become blank CSV fields and JSON null.
using Cell = std::variant<std::monostate, long long, double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  int exit_code = kExitOk;
};

/// 12 significant digits.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

/// The double that format_number prints, so JSON and CSV carry identical values.
inline double rounded(double v) { return std::isfinite(v) ? std::strtod(format_number(v).c_str(), nullptr) : v; }

inline nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return rounded(v);
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += t.columns[i];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, long long>) out += std::to_string(v);
            else if constexpr (std::is_same_v<V, double>) out += format_number(v);
            else if constexpr (std::is_same_v<V, std::string>) out += v;
          },
          row[i]);
    }
    out += '\n';
  }
  return out;
}

inline std::string to_json(const Table& t) {
  nlohmann::ordered_json doc;
  doc["meta"] = t.meta;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::visit(
          [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, std::monostate>) obj[t.columns[i]] = nullptr;
            else if constexpr (std::is_same_v<V, double>) obj[t.columns[i]] = json_number(v);
            else obj[t.columns[i]] = v;
          },
          row[i]);
    }
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::ordered_json base_meta(const RunConfig& rc, const DimensionlessConfig& cfg) {
  nlohmann::ordered_json meta;
  meta["command"] = to_string(rc.command);
  meta["version"] = kToolVersion;
  nlohmann::ordered_json params;
  params["n_sites"] = cfg.n_sites;
  params["p"] = json_number(cfg.p);
  params["beta_t"] = json_number(cfg.beta_t);
  params["u"] = json_number(cfg.u_left);
  if (rc.physical) {
    nlohmann::ordered_json phys;
    phys["mass"] = json_number(rc.physical->mass);
    phys["cell_width"] = json_number(rc.physical->cell_width);
    phys["alpha"] = json_number(rc.physical->alpha);
    phys["beta"] = json_number(rc.physical->beta);
    phys["wall"] = json_number(rc.physical->wall);
    phys["hbar"] = json_number(rc.physical->hbar);
    params["physical"] = phys;
  }
  meta["parameters"] = params;
  nlohmann::ordered_json grid;
  grid["eps_max"] = json_number(rc.scan_ceiling(cfg));
  grid["grid_points"] = rc.grid;
  grid["samples_per_gap"] = rc.samples_per_gap;
  meta["grid"] = grid;
  return meta;
}

inline std::vector<Method> methods_for(MethodChoice m) {
  switch (m) {
    case MethodChoice::Classical: return {Method::Classical};
    case MethodChoice::Impedance: return {Method::Impedance};
    case MethodChoice::Both: return {Method::Classical, Method::Impedance};
  }
  return {};
}

inline SurfaceSearchOptions search_options(const RunConfig& rc) {
  SurfaceSearchOptions opt;
  opt.samples_per_gap = rc.samples_per_gap;
  opt.reading = rc.reading;
  return opt;
}

inline unsigned thread_count(const RunConfig& rc) {
  if (rc.threads > 0) return rc.threads;
  if (const char* env = std::getenv("COMB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

inline nlohmann::ordered_json notes_json(const std::vector<std::string>& notes) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& n : notes) arr.push_back(n);
  return arr;
}

/// Oracle roots inside the search window of every gap.
inline std::vector<SurfaceState> oracle_states(const DimensionlessConfig& cfg, const BandStructure& bands,
                                               const RunConfig& rc) {
  SurfaceSearchOptions opt = search_options(rc);
  opt.samples_per_gap = std::max(opt.samples_per_gap, 4000);
  return find_surface_states(cfg, bands, Method::Oracle, opt).states;
}

inline std::optional<double> nearest(const std::vector<SurfaceState>& states, double eps, int gap) {
  std::optional<double> best;
  for (const auto& s : states)
    if (s.gap_index == gap && (!best || std::abs(s.eps - eps) < std::abs(*best - eps))) best = s.eps;
  return best;
}

}  // namespace detail

inline Table cmd_bands(const RunConfig& rc) {
  rc.validate();
  const auto cfg = rc.dimensionless();
  const double eps_max = rc.scan_ceiling(cfg);
  const auto bands = find_bands(cfg, eps_max, rc.grid);
  Table t;
  t.columns = {"band_index", "eps_lo", "eps_hi", "xi_lo", "xi_hi"};
  for (std::size_t i = 0; i < bands.bands.size(); ++i) {
    const auto& b = bands.bands[i];
    t.rows.push_back({static_cast<long long>(i + 1), b.lo, b.hi, std::sqrt(b.lo), std::sqrt(b.hi)});
  }
  t.meta = detail::base_meta(rc, cfg);
  auto gaps = nlohmann::ordered_json::array();
  for (const auto& g : bands.gaps) gaps.push_back({json_number(g.lo), json_number(g.hi)});
  t.meta["gaps"] = gaps;
  t.meta["grid_spacing"] = json_number(bands.grid_spacing);
  t.meta["notes"] = detail::notes_json(bands.notes);
  return t;
}

inline Table cmd_surface(const RunConfig& rc) {
  rc.validate();
  const auto cfg = rc.dimensionless();
  const auto bands = find_bands(cfg, rc.scan_ceiling(cfg), rc.grid);
  Table t;
  t.columns = {"gap_index", "eps", "xi", "eps_gap_lo", "eps_gap_hi", "lambda_re", "lambda_im", "method", "residual"};
  std::vector<std::string> notes;
  for (Method m : detail::methods_for(rc.method)) {
    const auto found = find_surface_states(cfg, bands, m, detail::search_options(rc));
    notes.insert(notes.end(), found.notes.begin(), found.notes.end());
    for (const auto& s : found.states) {
      const auto& gap = bands.gap(s.gap_index);
      t.rows.push_back({static_cast<long long>(s.gap_index), s.eps, std::sqrt(s.eps), gap.lo, gap.hi,
                        s.lambda.lambda.real(), s.lambda.lambda.imag(), std::string(to_string(m)), s.residual});
    }
  }
  t.meta = detail::base_meta(rc, cfg);
  t.meta["kappa_reading"] = to_string(rc.reading);
  t.meta["notes"] = detail::notes_json(notes);
  return t;
}

inline Table cmd_wavefunction(const RunConfig& rc) {
  rc.validate();
  const auto cfg = rc.dimensionless();
  const auto bands = find_bands(cfg, rc.scan_ceiling(cfg), rc.grid);
  const Method m = rc.method == MethodChoice::Impedance ? Method::Impedance : Method::Classical;
  const auto found = find_surface_states(cfg, bands, m, detail::search_options(rc));
  if (rc.state_index >= static_cast<int>(found.states.size())) {
    std::ostringstream msg;
    msg << "requested state " << rc.state_index << " but only " << found.states.size() << " surface states exist";
    throw ValidationError(msg.str());
  }
  const auto& state = found.states[static_cast<std::size_t>(rc.state_index)];
  const double hi = std::isnan(rc.x_max) ? cfg.system_width() + 3.0 : rc.x_max;
  std::vector<double> xs(static_cast<std::size_t>(rc.x_points));
  for (int i = 0; i < rc.x_points; ++i)
    xs[static_cast<std::size_t>(i)] = rc.x_min + (hi - rc.x_min) * i / (rc.x_points - 1.0);
  const auto table = evaluate(state, cfg, xs);

  Table t;
  t.columns = {"x", "psi"};
  for (const auto& s : table.samples) t.rows.push_back({s.x, s.psi});
  t.meta = detail::base_meta(rc, cfg);
  nlohmann::ordered_json st;
  st["index"] = rc.state_index;
  st["gap_index"] = state.gap_index;
  st["eps"] = json_number(state.eps);
  st["xi"] = json_number(std::sqrt(state.eps));
  st["method"] = to_string(m);
  st["d_left"] = json_number(table.coefficients.d_left);
  st["d_right"] = json_number(table.coefficients.d_right);
  auto a = nlohmann::ordered_json::array();
  auto b = nlohmann::ordered_json::array();
  for (double v : table.coefficients.a) a.push_back(json_number(v));
  for (double v : table.coefficients.b) b.push_back(json_number(v));
  st["a"] = a;
  st["b"] = b;
  t.meta["state"] = st;
  t.meta["notes"] = detail::notes_json(table.notes);
  return t;
}

/// One beta point of the sweep.
struct SweepPoint {
  double beta_t = 0.0;
  std::vector<std::vector<Cell>> rows;
  bool oracle_checked = false;
  bool oracle_ok = true;
};

inline SweepPoint sweep_point(const RunConfig& rc, double beta_t, bool check_oracle) {
  const auto cfg = rc.dimensionless(beta_t);
  const double u = cfg.wall();
  const auto bands = find_bands(cfg, rc.scan_ceiling(cfg), rc.grid);
  SweepPoint pt;
  pt.beta_t = beta_t;
  pt.oracle_checked = check_oracle;
  std::vector<SurfaceState> oracle;
  if (check_oracle) oracle = detail::oracle_states(cfg, bands, rc);

  for (Method m : detail::methods_for(rc.method)) {
    const auto found = find_surface_states(cfg, bands, m, detail::search_options(rc));
    for (int g : rc.gaps) {
      const bool have_gap = g <= static_cast<int>(bands.gaps.size()) && gap_window(bands.gap(g), u);
      Cell lo, hi;
      if (have_gap) {
        lo = bands.gap(g).lo;
        hi = bands.gap(g).hi;
      }
      bool any = false;
      for (const auto& s : found.states) {
        if (s.gap_index != g) continue;
        any = true;
        Cell check;
        if (check_oracle) {
          const auto near = detail::nearest(oracle, s.eps, g);
          const bool ok = near && std::abs(*near - s.eps) <= rc.oracle_tol;
          pt.oracle_ok = pt.oracle_ok && ok;
          check = std::string(ok ? "pass" : "fail");
        }
        pt.rows.push_back({beta_t, static_cast<long long>(g), s.eps, std::sqrt(s.eps), lo, hi,
                           std::string(to_string(m)), s.residual, check});
      }
      if (!any) {
        pt.rows.push_back({beta_t, static_cast<long long>(g), Cell{}, Cell{}, lo, hi, std::string(to_string(m)),
                           Cell{}, check_oracle ? Cell{std::string("pass")} : Cell{}});
        if (check_oracle) {
          // An oracle root in this gap with no analytic partner is a mismatch.
          for (const auto& o : oracle)
            if (o.gap_index == g) pt.oracle_ok = false;
          if (!pt.oracle_ok) pt.rows.back()[8] = std::string("fail");
        }
      }
    }
  }
  return pt;
}

inline std::vector<double> sweep_betas(const RunConfig& rc) {
  std::vector<double> betas(static_cast<std::size_t>(rc.steps));
  for (int i = 0; i < rc.steps; ++i)
    betas[static_cast<std::size_t>(i)] =
        rc.steps == 1 ? rc.beta_min : rc.beta_min + (rc.beta_max - rc.beta_min) * i / (rc.steps - 1.0);
  return betas;
}

inline Table cmd_sweep_beta(const RunConfig& rc) {
  rc.validate();
  const auto betas = sweep_betas(rc);
  std::vector<SweepPoint> points(betas.size());

  const unsigned workers = std::min<unsigned>(detail::thread_count(rc), static_cast<unsigned>(betas.size()));
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < betas.size(); i += workers) {
        const bool check = rc.oracle_every > 0 && i % static_cast<std::size_t>(rc.oracle_every) == 0;
        points[i] = sweep_point(rc, betas[i], check);
      }
    }));
  }
  for (auto& j : jobs) j.get();

  Table t;
  t.columns = {"beta_t", "gap_index", "eps_state", "xi_state", "eps_gap_lo", "eps_gap_hi", "method", "residual",
               "oracle_check"};
  bool all_ok = true;
  for (auto& pt : points) {
    all_ok = all_ok && pt.oracle_ok;
    for (auto& row : pt.rows) t.rows.push_back(std::move(row));
  }
  const auto cfg = rc.dimensionless();
  t.meta = detail::base_meta(rc, cfg);
  t.meta["parameters"].erase("beta_t");
  nlohmann::ordered_json sweep;
  sweep["beta_min"] = json_number(rc.beta_min);
  sweep["beta_max"] = json_number(rc.beta_max);
  sweep["steps"] = rc.steps;
  sweep["gaps"] = rc.gaps;
  sweep["oracle_every"] = rc.oracle_every;
  sweep["oracle_tol"] = json_number(rc.oracle_tol);
  t.meta["sweep"] = sweep;
  t.meta["kappa_reading"] = to_string(rc.reading);
  t.meta["oracle_ok"] = all_ok;
  if (!all_ok) t.exit_code = kExitOracleMismatch;
  return t;
}

inline Table cmd_oracle_compare(const RunConfig& rc) {
  rc.validate();
  const auto cfg = rc.dimensionless();
  const auto bands = find_bands(cfg, rc.scan_ceiling(cfg), rc.grid);
  const auto oracle = detail::oracle_states(cfg, bands, rc);
  Table t;
  t.columns = {"method", "gap_index", "eps_analytic", "eps_oracle", "abs_diff", "pass"};
  bool ok = true;
  std::vector<bool> oracle_matched(oracle.size(), false);
  for (Method m : detail::methods_for(rc.method)) {
    const auto found = find_surface_states(cfg, bands, m, detail::search_options(rc));
    for (const auto& s : found.states) {
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < oracle.size(); ++i) {
        if (oracle[i].gap_index != s.gap_index) continue;
        if (!best || std::abs(oracle[i].eps - s.eps) < std::abs(oracle[*best].eps - s.eps)) best = i;
      }
      const bool pass = best && std::abs(oracle[*best].eps - s.eps) <= rc.oracle_tol;
      if (pass) oracle_matched[*best] = true;
      ok = ok && pass;
      t.rows.push_back({std::string(to_string(m)), static_cast<long long>(s.gap_index), s.eps,
                        best ? Cell{oracle[*best].eps} : Cell{},
                        best ? Cell{std::abs(oracle[*best].eps - s.eps)} : Cell{}, std::string(pass ? "pass" : "fail")});
    }
  }
  auto unmatched = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    if (oracle_matched[i]) continue;
    ok = false;
    unmatched.push_back({{"gap_index", oracle[i].gap_index}, {"eps_oracle", json_number(oracle[i].eps)}});
  }
  t.meta = detail::base_meta(rc, cfg);
  t.meta["kappa_reading"] = to_string(rc.reading);
  t.meta["tolerance"] = json_number(rc.oracle_tol);
  t.meta["oracle_roots"] = static_cast<long long>(oracle.size());
  t.meta["unmatched_oracle_roots"] = unmatched;
  t.meta["all_pass"] = ok;
  if (!ok) t.exit_code = kExitOracleMismatch;
  return t;
}

inline Table run_command(const RunConfig& rc) {
  switch (rc.command) {
    case Command::Bands: return cmd_bands(rc);
    case Command::Surface: return cmd_surface(rc);
    case Command::Wavefunction: return cmd_wavefunction(rc);
    case Command::SweepBeta: return cmd_sweep_beta(rc);
    case Command::OracleCompare: return cmd_oracle_compare(rc);
  }
  throw ValidationError("unknown command");
}

inline std::string render(const Table& t, Format f) { return f == Format::Json ? to_json(t) : to_csv(t); }

/// Runs the command, writes the output, and returns the process exit code.
inline int run(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  try {
    const auto table = run_command(rc);
    const auto text = render(table, rc.format);
    if (rc.out.empty()) {
      out << text;
    } else {
      std::ofstream file(rc.out, std::ios::binary);
      if (!file) {
        err << "error: cannot open output file " << rc.out << "\n";
        return kExitValidation;
      }
      file << text;
      if (!file) {
        err << "error: failed writing " << rc.out << "\n";
        return kExitValidation;
      }
    }
    if (table.exit_code == kExitOracleMismatch) err << "oracle mismatch: see report\n";
    return table.exit_code;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace ddcomb::cli
