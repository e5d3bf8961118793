#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "ns1d/steady.hpp"

namespace ns1d {

/// Shortest decimal that reads back to the same double.
std::string format_number(double v);

/// Parses a whole string as a double; throws std::invalid_argument otherwise.
double parse_number(std::string_view s);

/// Node arrays mapped by x -> 1 - x with velocities negated. Applying it
/// twice gives back the input bit for bit.
struct ProfileArrays {
  Eigen::VectorXd x, rho, u, rho_x, u_x;
};
ProfileArrays profile_arrays(const SteadyProfile& profile, Orientation orientation = Orientation::Canonical);

/// One header comment line, then `x,rho,u,rho_x,u_x`, one row per node.
/// Reflected output is written in the original (unnormalized) frame and
/// flagged in the header. Throws DomainError for laws without a textual
/// form (custom laws).
void write_profile_csv(std::ostream& os, const SteadyProfile& profile,
                       Orientation orientation = Orientation::Canonical);

struct LoadedProfile {
  SteadyProfile profile;
  Orientation orientation;
};

/// Reads what write_profile_csv wrote and returns the canonical profile.
/// Throws std::runtime_error with the line number on malformed input.
LoadedProfile read_profile_csv(std::istream& is);

}  // namespace ns1d
