#include "ns1d/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ns1d/errors.hpp"
#include "ns1d/profile_io.hpp"

namespace ns1d {

namespace {

constexpr std::string_view kProfile = "steady evans contour spectrum evolve check";
constexpr std::string_view kSolve = "steady evans contour spectrum evolve check sweep";
constexpr std::string_view kContour = "contour spectrum sweep";

std::string_view trim(std::string_view s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string_view::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

PressureLaw RunConfig::law() const {
  if (pressure_kind != "gamma") throw DomainError("unknown pressure kind '" + pressure_kind + "'");
  return PressureLaw::gamma_law(kappa, gamma);
}

std::vector<ConfigEntry> config_entries(RunConfig& c) {
  return {
      {"flow.nu", "--nu", kSolve, "viscosity", &c.flow.nu},
      {"flow.rho0", "--rho0", kSolve, "prescribed density", &c.flow.rho0},
      {"flow.u0", "--u0", kSolve, "velocity at x = 0", &c.flow.u0},
      {"flow.u1", "--u1", kSolve, "velocity at x = 1", &c.flow.u1},
      {"flow.density_side", "--density-side", kSolve, "left or right", &c.density_side},
      {"pressure.kind", "--pressure", kSolve, "pressure law (gamma)", &c.pressure_kind},
      {"pressure.kappa", "--kappa", kSolve, "P = kappa rho^gamma", &c.kappa},
      {"pressure.gamma", "--gamma", kSolve, "P = kappa rho^gamma", &c.gamma},
      {"steady.nodes", "--nodes", kSolve, "requested profile intervals", &c.nodes},
      {"steady.tol_bc", "--tol-bc", kSolve, "outflow density tolerance", &c.tol_bc},
      {"steady.tol_flux", "--tol-flux", kSolve, "momentum flux tolerance", &c.tol_flux},
      {"profile", "--profile", kProfile, "read the profile from this CSV instead of solving", &c.profile_path},
      {"evans.lambda_re", "--lambda-re", "evans", "Re lambda", &c.lambda_re},
      {"evans.lambda_im", "--lambda-im", "evans", "Im lambda", &c.lambda_im},
      {"evans.steps", "--steps", "evans", "RK4 steps (0: automatic)", &c.evans_steps},
      {"evans.big_factor", "--big-factor", "evans", "lambda_big / nu for the index", &c.big_factor},
      {"contour.M", "--M", kContour, "contour radius", &c.M},
      {"contour.delta", "--delta", "contour spectrum", "straight edge at Re lambda = -delta", &c.delta},
      {"contour.nodes", "--contour-nodes", kContour, "initial contour nodes", &c.contour_nodes},
      {"contour.max_nodes", "--max-nodes", kContour, "refinement cap", &c.max_nodes},
      {"spectrum.box", "--box", "spectrum", "re_lo:re_hi:im_lo:im_hi", &c.box},
      {"spectrum.matrix_N", "--matrix", "contour spectrum", "matrix oracle cells (0: off)", &c.matrix_N},
      {"spectrum.tol_box", "--tol-box", "spectrum", "root box diameter", &c.tol_box},
      {"evolve.eps", "--eps", "evolve", "perturbation amplitude", &c.eps},
      {"evolve.mode", "--mode", "evolve", "bump mode", &c.mode},
      {"evolve.T", "--T", "evolve", "final time", &c.T},
      {"evolve.dt", "--dt", "evolve", "time step (0: CFL 0.25)", &c.dt},
      {"evolve.cells", "--cells", "evolve", "grid cells", &c.cells},
      {"evolve.stride", "--stride", "evolve", "steps between records (0: every 0.02)", &c.stride},
      {"evolve.tail", "--tail", "evolve", "fit window fraction", &c.tail},
      {"evolve.reference", "--reference", "evolve", "baseline or steady", &c.reference},
      {"sweep.nu_range", "--nu-range", "sweep", "lo:hi", &c.nu_range},
      {"sweep.u0_range", "--u0-range", "sweep", "lo:hi", &c.u0_range},
      {"sweep.u1_range", "--u1-range", "sweep", "lo:hi", &c.u1_range},
      {"sweep.rho0_range", "--rho0-range", "sweep", "lo:hi", &c.rho0_range},
      {"sweep.steps", "--steps", "sweep", "log-spaced values per range", &c.steps},
      {"sweep.jobs", "--jobs", "sweep", "worker threads", &c.jobs},
      {"sweep.oracle", "--oracle", "sweep", "matrix oracle cells, comma separated", &c.oracle},
      {"check.delta", "--delta", "check", "weight delta (0: 0.1 min u)", &c.weight_delta},
      {"check.seeds", "--seeds", "check", "random fields for the inequality suite", &c.seeds},
      {"check.cells", "--cells", "check", "cells of the random fields", &c.check_cells},
      {"output.dir", "--output-dir", "steady evans contour spectrum evolve sweep check", "base directory for --out",
       &c.output_dir},
      {"out", "--out", "steady contour spectrum evolve sweep check", "artifact path", &c.out},
      {"verbosity", "--verbosity", "steady evans contour spectrum evolve sweep check", "0, 1 or 2", &c.verbosity},
  };
}

void set_entry(const ConfigEntry& entry, std::string_view value) {
  const std::string key(entry.key);
  auto bad = [&] { return ConfigError("bad value '" + std::string(value) + "' for '" + key + "'", key); };
  std::visit(
      [&](auto* p) {
        using T = std::remove_pointer_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::string>) {
          *p = std::string(value);
        } else if constexpr (std::is_same_v<T, double>) {
          try {
            *p = parse_number(value);
          } catch (const std::invalid_argument&) {
            throw bad();
          }
        } else {
          T v{};
          const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
          if (value.empty() || res.ec != std::errc() || res.ptr != value.data() + value.size()) throw bad();
          *p = v;
        }
      },
      entry.target);
}

void apply_config_text(std::string_view text, RunConfig& config) {
  const auto entries = config_entries(config);
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      std::ostringstream os;
      os << "config line " << lineno << " has no '='";
      throw ConfigError(os.str(), std::string(line));
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const ConfigEntry* match = nullptr;
    for (const auto& e : entries) {
      if (e.key == key) match = &e;
    }
    if (!match) throw ConfigError("unknown config key '" + std::string(key) + "'", std::string(key));
    set_entry(*match, value);
  }
}

void apply_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'", "config");
  std::ostringstream text;
  text << in.rdbuf();
  apply_config_text(text.str(), config);
}

}  // namespace ns1d
