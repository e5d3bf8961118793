#include "ns1d/profile_io.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ns1d/errors.hpp"

namespace ns1d {

namespace {

constexpr std::string_view kMagic = "# ns1d-profile v1";
constexpr std::string_view kColumns = "x,rho,u,rho_x,u_x";

std::runtime_error bad_line(std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << "profile line " << line << ": " << what;
  return std::runtime_error(os.str());
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

ProfileArrays profile_arrays(const SteadyProfile& profile, Orientation orientation) {
  const auto n = static_cast<Eigen::Index>(profile.intervals());
  ProfileArrays a;
  a.x.resize(n + 1);
  for (Eigen::Index i = 0; i <= n; ++i) a.x[i] = profile.x(static_cast<std::size_t>(i));
  if (orientation == Orientation::Canonical) {
    a.rho = profile.rho();
    a.u = profile.u();
    a.rho_x = profile.rho_x();
    a.u_x = profile.u_x();
    return a;
  }
  // x -> 1 - x, u -> -u; the node grid is symmetric so only the order flips
  a.rho = profile.rho().reverse();
  a.u = -profile.u().reverse();
  a.rho_x = -profile.rho_x().reverse();
  a.u_x = profile.u_x().reverse();
  return a;
}

void write_profile_csv(std::ostream& os, const SteadyProfile& profile, Orientation orientation) {
  const GammaLaw* g = profile.law().as_gamma();
  if (!g) throw DomainError("only gamma-law profiles can be written");
  const FlowParams& p = profile.params();
  os << kMagic << " b=" << format_number(profile.b()) << " m=" << format_number(profile.m())
     << " nu=" << format_number(p.nu) << " rho0=" << format_number(p.rho0) << " u0=" << format_number(p.u0)
     << " u1=" << format_number(p.u1) << " kappa=" << format_number(g->kappa)
     << " gamma=" << format_number(g->gamma)
     << " shooting=" << (profile.shooting() == ShootingDirection::Forward ? "forward" : "backward")
     << " orientation=" << (orientation == Orientation::Canonical ? "canonical" : "reflected") << '\n';
  os << kColumns << '\n';
  const ProfileArrays a = profile_arrays(profile, orientation);
  for (Eigen::Index i = 0; i < a.x.size(); ++i) {
    os << format_number(a.x[i]) << ',' << format_number(a.rho[i]) << ',' << format_number(a.u[i]) << ','
       << format_number(a.rho_x[i]) << ',' << format_number(a.u_x[i]) << '\n';
  }
}

LoadedProfile read_profile_csv(std::istream& is) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line) || line.rfind(kMagic, 0) != 0) throw bad_line(lineno, "missing profile header");

  std::map<std::string, std::string, std::less<>> header;
  std::istringstream fields(line.substr(kMagic.size()));
  for (std::string kv; fields >> kv;) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw bad_line(lineno, "header field without '=': " + kv);
    header[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  auto number = [&](const char* key) {
    const auto it = header.find(key);
    if (it == header.end()) throw bad_line(1, std::string("header lacks ") + key);
    try {
      return parse_number(it->second);
    } catch (const std::invalid_argument& e) {
      throw bad_line(1, e.what());
    }
  };
  auto word = [&](const char* key) {
    const auto it = header.find(key);
    if (it == header.end()) throw bad_line(1, std::string("header lacks ") + key);
    return it->second;
  };

  const FlowParams params{number("nu"), number("rho0"), number("u0"), number("u1")};
  const PressureLaw law = PressureLaw::gamma_law(number("kappa"), number("gamma"));
  const double b = number("b");
  const std::string shooting = word("shooting");
  const std::string orient = word("orientation");
  if (shooting != "forward" && shooting != "backward") throw bad_line(1, "unknown shooting direction");
  if (orient != "canonical" && orient != "reflected") throw bad_line(1, "unknown orientation");

  ++lineno;
  if (!std::getline(is, line) || line != kColumns) throw bad_line(lineno, "expected column line");

  std::vector<std::array<double, 5>> rows;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::array<double, 5> r{};
    std::size_t start = 0;
    for (std::size_t c = 0; c < 5; ++c) {
      const auto comma = line.find(',', start);
      const bool last = c == 4;
      if (last != (comma == std::string::npos)) throw bad_line(lineno, "expected 5 columns");
      const auto cell = std::string_view(line).substr(start, last ? std::string::npos : comma - start);
      try {
        r[c] = parse_number(cell);
      } catch (const std::invalid_argument& e) {
        throw bad_line(lineno, e.what());
      }
      start = comma + 1;
    }
    rows.push_back(r);
  }
  if (rows.size() < 3) throw bad_line(lineno, "too few nodes");

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::VectorXd rho(n), u(n), rho_x(n), u_x(n);
  const bool reflected = orient == "reflected";
  const double h = 1.0 / static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (rows[static_cast<std::size_t>(i)][0] != static_cast<double>(i) * h) {
      throw bad_line(static_cast<std::size_t>(i) + 3, "x column is not the uniform grid");
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(reflected ? n - 1 - i : i)];
    rho[i] = r[1];
    u[i] = reflected ? -r[2] : r[2];
    rho_x[i] = reflected ? -r[3] : r[3];
    u_x[i] = r[4];
  }
  return {SteadyProfile(params, law, b, rho, u, rho_x, u_x,
                        shooting == "forward" ? ShootingDirection::Forward : ShootingDirection::Backward),
          reflected ? Orientation::Reflected : Orientation::Canonical};
}

}  // namespace ns1d
