#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ns1d/steady.hpp"

namespace ns1d {

/// Every tunable of the command-line tool. Defaults are the built-in
/// values; a config file overrides them and flags override both.
struct RunConfig {
  FlowParams flow{1.0, 2.0, 1.5, 1.0};
  /// "left" (canonical) or "right": density prescribed at x = 1 with
  /// negative velocities, solved after reflection
  std::string density_side = "left";

  std::string pressure_kind = "gamma";
  double kappa = 1.0;
  double gamma = 1.4;

  std::size_t nodes = 2048;
  double tol_bc = 1e-10;
  double tol_flux = 1e-8;
  std::string profile_path;

  double lambda_re = 0.0;
  double lambda_im = 0.0;
  std::size_t evans_steps = 0;
  double big_factor = 1e4;

  double M = 10.0;
  double delta = 0.0;
  std::size_t contour_nodes = 256;
  std::size_t max_nodes = std::size_t{1} << 14;

  std::string box;
  std::size_t matrix_N = 0;
  double tol_box = 1e-3;

  double eps = 0.01;
  int mode = 1;
  double T = 20.0;
  double dt = 0.0;
  std::size_t cells = 1024;
  std::size_t stride = 0;
  double tail = 0.5;
  std::string reference = "baseline";

  std::string nu_range = "0.1:10";
  std::string u0_range = "1:10";
  std::string u1_range = "1:10";
  std::string rho0_range = "1:10";
  std::size_t steps = 4;
  std::size_t jobs = 1;
  std::string oracle;

  double weight_delta = 0.0;
  std::size_t seeds = 100;
  std::size_t check_cells = 1024;

  std::string out;
  std::string output_dir;
  int verbosity = 0;

  PressureLaw law() const;
};

/// Malformed config text or value; `key` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string key) : std::runtime_error(what), key(std::move(key)) {}
  std::string key;
};

/// One tunable: its config key, its flag, the subcommands that accept the
/// flag (space separated), and where it is stored.
struct ConfigEntry {
  std::string_view key;
  std::string_view flag;
  std::string_view commands;
  std::string_view help;
  std::variant<double*, std::size_t*, int*, std::string*> target;
};

std::vector<ConfigEntry> config_entries(RunConfig& config);

/// Applies `key = value` lines ('#' starts a comment). Throws ConfigError
/// for unknown keys, missing '=' or unparsable values.
void apply_config_text(std::string_view text, RunConfig& config);

/// Reads and applies a config file; ConfigError if it cannot be read.
void apply_config_file(const std::string& path, RunConfig& config);

/// Sets one entry from its textual value.
void set_entry(const ConfigEntry& entry, std::string_view value);

}  // namespace ns1d
