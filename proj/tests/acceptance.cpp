#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ns1d/cli.hpp"
#include "ns1d/diagnostics.hpp"
#include "ns1d/evolve.hpp"
#include "ns1d/spectrum.hpp"
#include "ns1d/sweep.hpp"

using namespace ns1d;
namespace fs = std::filesystem;

namespace {

const PressureLaw kLaw = PressureLaw::gamma_law(1.0, 1.4);
const FlowParams kRising{1.0, 3.0, 2.0, 3.0};
const FlowParams kFalling{1.0, 2.0, 1.5, 1.0};

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

std::string describe(const FlowParams& p) {
  return fmt("(nu=%.4g rho0=%.4g u0=%.4g u1=%.4g)", p.nu, p.rho0, p.u0, p.u1);
}

/// nu log-uniform in [0.1, 10], rho0, u0, u1 log-uniform in [1, 10].
std::vector<FlowParams> random_tuples(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };
  std::vector<FlowParams> out;
  for (std::size_t i = 0; i < count; ++i) {
    const double nu = draw(0.1, 10.0);
    const double rho0 = draw(1.0, 10.0);
    const double u0 = draw(1.0, 10.0);
    const double u1 = draw(1.0, 10.0);
    out.push_back({nu, rho0, u0, u1});
  }
  return out;
}

Outcome steady_states() {
  Outcome o;
  for (const FlowParams& p : {kRising, kFalling}) {
    const Stopwatch clock;
    const SteadyProfile prof = solve_steady(p, kLaw);
    const double seconds = clock.seconds();
    const auto n = static_cast<Eigen::Index>(prof.intervals());
    const double bc = std::abs(prof.rho()[n] - p.outflow_density());
    const double mass = (prof.rho().array() * prof.u().array() - prof.m()).abs().maxCoeff();
    const double momentum = (prof.m() * prof.u().array() + kLaw.eval(prof.rho().array(), 0) -
                             p.nu * prof.u_x().array() - prof.b())
                                .abs()
                                .maxCoeff();
    const bool rising = p.u1 > p.u0;
    const bool signs = rising ? (prof.u_x().array() > 0.0).all() && (prof.rho_x().array() < 0.0).all()
                              : (prof.u_x().array() < 0.0).all() && (prof.rho_x().array() > 0.0).all();
    const bool ok = bc <= 1e-10 && mass <= 1e-8 && momentum <= 1e-8 && signs && seconds < 1.0;
    o.pass = o.pass && ok;
    o.detail += fmt("%s bc %.2g, flux %.2g/%.2g, signs %s, %.3f s; ", describe(p).c_str(), bc, mass, momentum,
                    signs ? "ok" : "WRONG", seconds);
  }
  return o;
}

Outcome amplitude_continuity() {
  Outcome o;
  double previous = INFINITY;
  double constant = 0.0;
  double worst = 0.0;
  for (int k = 1; k <= 10; ++k) {
    const double du = std::ldexp(1.0, -k);
    const SteadyProfile prof = solve_steady({1.0, 2.0, 1.5, 1.5 + du}, kLaw);
    const double amp = std::max(prof.rho_x().cwiseAbs().maxCoeff(), prof.u_x().cwiseAbs().maxCoeff());
    if (k == 1) constant = amp / du;
    o.pass = o.pass && amp < previous && amp <= 4.0 * du * constant;
    worst = std::max(worst, amp / (du * constant));
    previous = amp;
  }
  o.detail = fmt("u1 = 1.5 + 2^-k, k=1..10: amplitude/(|u1-u0| C) at most %.3f, C = %.4g, last %.3g", worst,
                 constant, previous);
  return o;
}

Outcome evans_oracle() {
  Outcome o;
  std::vector<FlowParams> tuples = {kRising, kFalling};
  for (const auto& p : random_tuples(20, 3)) tuples.push_back(p);
  double worst = 0.0;
  std::string where;
  const Stopwatch clock;
  for (const FlowParams& p : tuples) {
    const SteadyProfile prof = solve_steady(p, kLaw);
    const EvansEvaluation quad = evans_at_zero_quadrature(prof);
    const std::size_t steps = std::max<std::size_t>(std::size_t{1} << 20, 4 * prof.intervals());
    const EvansEvaluation shot = evans(0.0, prof, steps);
    const double gap = std::abs(shot.d_scaled * std::exp(shot.log_scale - quad.log_scale) / quad.d_scaled - 1.0);
    if (gap > worst) {
      worst = gap;
      where = describe(p);
    }
    if (!(gap <= 1e-8)) o.pass = false;
  }
  o.detail = fmt("%zu profiles, worst relative gap %.3g at %s, %.1f s", tuples.size(), worst, where.c_str(),
                 clock.seconds());
  return o;
}

Outcome winding_reproduction() {
  Outcome o;
  for (const FlowParams& p : {kFalling, FlowParams{0.1, 2.0, 1.5, 1.0}}) {
    const Stopwatch clock;
    const SteadyProfile prof = solve_steady(p, kLaw);
    const SpectrumReport at10 = winding_number(prof, build_contour(10.0, 0.0));
    const double seconds = clock.seconds();
    const SpectrumReport at20 = winding_number(prof, build_contour(20.0, 0.0));
    const bool ok = at10.verdict == Verdict::SpectrallyStable && at10.winding == 0 &&
                    at20.verdict == Verdict::SpectrallyStable && at20.winding == 0 && seconds < 30.0;
    o.pass = o.pass && ok;
    o.detail += fmt("%s winding %d (M=10, %zu nodes, %.2f s) and %d (M=20); ", describe(p).c_str(), at10.winding,
                    at10.nodes, seconds, at20.winding);
  }
  return o;
}

Outcome stability_indices() {
  Outcome o;
  std::vector<FlowParams> tuples = {{1.0, 2.0, 1.5, 1.5}, kRising, kFalling};
  for (const auto& p : random_tuples(50, 5)) tuples.push_back(p);
  std::size_t plus = 0;
  const Stopwatch clock;
  for (const FlowParams& p : tuples) {
    const StabilityIndex s = stability_index(solve_steady(p, kLaw));
    if (s.index == 1 && s.consistent) {
      ++plus;
    } else {
      o.pass = false;
      o.detail += fmt("index %d (consistent %d) at %s; ", s.index, s.consistent, describe(p).c_str());
    }
  }
  o.detail += fmt("%zu of %zu tuples have index +1, %.1f s", plus, tuples.size(), clock.seconds());
  return o;
}

struct SweepResults {
  std::vector<SweepRow> rows;
  double seconds = 0.0;
  std::vector<std::size_t> oracle{128, 256};
};

SweepResults desk_sweep() {
  SweepOptions opt;
  opt.steps = 4;
  opt.jobs = 4;
  opt.oracle = {128, 256};
  const Stopwatch clock;
  SweepResults r;
  r.rows = run_sweep(opt);
  r.seconds = clock.seconds();
  return r;
}

Outcome sweep_verdicts(const SweepResults& s) {
  Outcome o;
  std::size_t stable = 0;
  for (const auto& row : s.rows) {
    if (row.verdict == Verdict::SpectrallyStable) {
      ++stable;
    } else {
      o.detail += fmt("%s at %s (%s); ", std::string(verdict_label(row.verdict)).c_str(),
                      describe(row.params).c_str(), row.note.c_str());
    }
  }
  o.pass = s.rows.size() == 256 && stable == s.rows.size() && s.seconds < 1800.0;
  o.detail += fmt("%zu of %zu tuples SpectrallyStable, %.1f s with 4 workers", stable, s.rows.size(), s.seconds);
  return o;
}

Outcome sweep_oracle(const SweepResults& s) {
  Outcome o;
  std::size_t agree = 0;
  for (const auto& row : s.rows) {
    if (row.oracle.size() == 2 && row.oracle_agrees()) {
      ++agree;
    } else {
      o.detail += fmt("disagreement at %s; ", describe(row.params).c_str());
    }
  }
  o.pass = s.rows.size() == 256 && agree == s.rows.size();
  o.detail += fmt("matrix oracle at N=128 and N=256 matches the Evans winding on %zu of %zu tuples", agree,
                  s.rows.size());
  return o;
}

Outcome nonlinear_decay() {
  Outcome o;
  const Stopwatch clock;
  const SteadyProfile prof = solve_steady(kFalling, kLaw);
  const Abscissa a = spectral_abscissa(prof);
  PerturbationRun run;
  run.cells = 1024;
  run.epsilon = 0.01;
  run.T = 20.0;
  const auto runs = perturbation_histories(prof, run, {0.01, 0.005});
  const NormHistory& h = runs[0];
  const NormHistory& half = runs[1];
  const auto from = monotone_from(h);
  const DecayFit fit = fit_decay(h);
  double worst = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) worst = std::max(worst, std::abs(h[i].l2 / half[i].l2 / 2.0 - 1.0));
  const double rate = std::abs(a.value);
  const bool decaying = from && *from < run.T / 2 && h.back().l2 < h.front().l2;
  o.pass = a.found && a.conclusive && decaying && fit.theta > 0.0 && fit.residual < 0.05 &&
           std::abs(fit.theta - rate) <= 0.2 * rate && worst <= 0.05;
  o.detail = fmt("theta %.6f vs |abscissa| %.6f (%.2f%%), residual %.3g, monotone from t=%.2f, "
                 "L2 %.3g -> %.3g, half-amplitude deviation %.2f%%, %.1f s",
                 fit.theta, rate, 100.0 * std::abs(fit.theta - rate) / rate, fit.residual, from ? *from : -1.0,
                 h.front().l2, h.back().l2, 100.0 * worst, clock.seconds());
  return o;
}

Outcome inequalities() {
  const InequalitySuite s = inequality_suite(100, 1024);
  Outcome o;
  o.pass = s.holds() && s.fields == 100;
  o.detail = fmt("100 fields at h=1/1024, slack %.6f: failures %zu/%zu/%zu/%zu, max |f|/|f_x| %.3f (bound 2), "
                 "max sup ratio %.3f, largest constant needed %.3g of %.6g",
                 s.slack, s.poincare_failures, s.sup_failures, s.pinned_failures, s.derivative_failures,
                 s.max_poincare_ratio, s.max_sup_ratio, s.max_observed_constant, interpolation_constant());
  return o;
}

void save(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Every subcommand writing into `dir`; stdout of each call is kept next to
/// its artifact. Returns false if a call exits nonzero.
bool artifact_suite(const fs::path& dir, std::string& failures) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string profile = (dir / "profile.csv").string();
  const std::vector<std::pair<std::string, std::vector<std::string>>> calls = {
      {"steady", {"steady", "--nu", "1", "--gamma", "1.4", "--rho0", "2", "--u0", "1.5", "--u1", "1", "--out",
                  "profile.csv"}},
      {"index", {"evans", "--index", "--profile", profile}},
      {"evans", {"evans", "--profile", profile, "--lambda-re", "0.25", "--lambda-im", "4"}},
      {"contour", {"contour", "--profile", profile, "--M", "10", "--verify-radius", "--matrix", "128", "--out",
                   "contour.csv"}},
      {"box", {"spectrum", "--profile", profile, "--box", "0:10:-10:10", "--out", "box.json"}},
      {"abscissa", {"spectrum", "--profile", profile, "--abscissa", "--matrix", "256", "--out", "abscissa.json"}},
      {"evolve", {"evolve", "--profile", profile, "--cells", "256", "--T", "20", "--fit", "--out", "norms.csv"}},
      {"check", {"check", "--profile", profile, "--out", "check.json"}},
      {"sweep", {"sweep", "--steps", "4", "--jobs", "4", "--oracle", "128,256", "--out", "sweep.csv"}},
  };
  bool ok = true;
  for (const auto& [name, args] : calls) {
    std::vector<std::string> full = args;
    full.push_back("--output-dir");
    full.push_back(dir.string());
    std::ostringstream out, err;
    const int code = run(full, out, err);
    save(dir / (name + ".stdout"), out.str());
    if (code != 0) {
      ok = false;
      failures += fmt("%s exited %d: %s; ", name.c_str(), code, err.str().c_str());
    }
  }
  return ok;
}

Outcome determinism(const SweepResults& library_sweep) {
  Outcome o;
  const fs::path base = fs::current_path() / "acceptance_artifacts";
  const Stopwatch clock;
  std::string failures;
  const bool first = artifact_suite(base / "run1", failures);
  const bool second = artifact_suite(base / "run2", failures);
  std::size_t files = 0;
  std::size_t bytes = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::directory_iterator(base / "run1")) {
    const fs::path other = base / "run2" / entry.path().filename();
    const std::string a = slurp(entry.path());
    ++files;
    bytes += a.size();
    if (!fs::exists(other) || a != slurp(other)) differing.push_back(entry.path().filename().string());
  }
  std::ostringstream csv;
  write_sweep_csv(csv, library_sweep.rows, library_sweep.oracle);
  const bool sweep_matches = csv.str() == slurp(base / "run1" / "sweep.csv");
  o.pass = first && second && differing.empty() && files >= 15 && sweep_matches;
  o.detail = fmt("%zu artifacts (%zu bytes) identical across two runs", files - differing.size(), bytes);
  for (const auto& name : differing) o.detail += "; differs: " + name;
  if (!sweep_matches) o.detail += "; sweep CSV differs from the 4-worker library sweep";
  o.detail += fmt(", %.1f s", clock.seconds());
  if (!failures.empty()) o.detail += "; " + failures;
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* what, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("threw: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %d %s: %s: %s\n", id, o.pass ? "PASS" : "FAIL", what, o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "steady states", steady_states);
  report(2, "amplitude continuity", amplitude_continuity);
  report(3, "D(0) against the quadrature oracle", evans_oracle);
  report(4, "winding numbers", winding_reproduction);
  report(5, "stability index", stability_indices);
  SweepResults sweep;
  report(6, "desk-scale sweep", [&] {
    sweep = desk_sweep();
    return sweep_verdicts(sweep);
  });
  report(7, "matrix oracle on the sweep", [&] { return sweep_oracle(sweep); });
  report(8, "nonlinear decay", nonlinear_decay);
  report(9, "interpolation inequalities", inequalities);
  report(10, "determinism", [&] { return determinism(sweep); });
  return failed == 0 ? 0 : 1;
}
