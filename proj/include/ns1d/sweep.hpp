#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ns1d/spectrum.hpp"

namespace ns1d {

/// Closed interval lo:hi with 0 < lo <= hi.
struct Range {
  double lo = 1.0;
  double hi = 1.0;
};

/// Parses "lo:hi". Throws DomainError unless both ends are positive and ordered.
Range parse_range(std::string_view text);

/// `steps` geometrically spaced values from lo to hi (one value when steps == 1).
std::vector<double> log_space(const Range& range, std::size_t steps);

struct SweepOptions {
  Range nu{0.1, 10.0};
  Range u0{1.0, 10.0};
  Range u1{1.0, 10.0};
  Range rho0{1.0, 10.0};
  std::size_t steps = 4;
  std::size_t jobs = 1;
  PressureLaw law = PressureLaw::gamma_law(1.0, 1.4);
  SteadyOptions steady;
  double M = 10.0;
  std::size_t contour_nodes = 256;
  WindingOptions winding;
  /// Matrix oracle grid sizes; empty skips the oracle.
  std::vector<std::size_t> oracle;
};

struct SweepRow {
  FlowParams params;
  double b = 0.0;
  std::size_t intervals = 0;
  std::string slope;
  int winding = 0;
  Verdict verdict = Verdict::Inconclusive;
  double min_abs = 0.0;
  std::size_t nodes = 0;
  /// one entry per oracle size; empty when the oracle was inconclusive
  std::vector<std::optional<int>> oracle;
  std::string note;

  bool oracle_agrees() const;
};

/// Tuples in (nu, rho0, u0, u1) lexicographic order of grid index; rows come
/// back in that order whatever the completion order of the workers. Failures
/// of a single tuple are recorded as Inconclusive rows.
std::vector<SweepRow> run_sweep(const SweepOptions& options);

/// Header `nu,rho0,u0,u1,b,intervals,slope,winding,verdict,min_abs,nodes`,
/// one `oracle_N` column per oracle size, then `note`.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::vector<std::size_t>& oracle);

}  // namespace ns1d
