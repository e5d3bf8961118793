#include "ns1d/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include "ns1d/errors.hpp"
#include "ns1d/profile_io.hpp"

namespace ns1d {

Range parse_range(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw DomainError("range '" + std::string(text) + "' is not lo:hi");
  Range r;
  try {
    r.lo = parse_number(text.substr(0, colon));
    r.hi = parse_number(text.substr(colon + 1));
  } catch (const std::invalid_argument&) {
    throw DomainError("range '" + std::string(text) + "' is not lo:hi");
  }
  if (!(r.lo > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi)) {
    throw DomainError("range '" + std::string(text) + "' must satisfy 0 < lo <= hi");
  }
  return r;
}

std::vector<double> log_space(const Range& range, std::size_t steps) {
  if (steps == 0) throw DomainError("sweep needs at least one step");
  if (steps == 1) return {range.lo};
  std::vector<double> v(steps);
  const double a = std::log(range.lo);
  const double span = std::log(range.hi) - a;
  for (std::size_t i = 0; i < steps; ++i) {
    v[i] = std::exp(a + span * static_cast<double>(i) / static_cast<double>(steps - 1));
  }
  v.front() = range.lo;
  v.back() = range.hi;
  return v;
}

bool SweepRow::oracle_agrees() const {
  for (const auto& w : oracle) {
    if (!w || *w != winding) return false;
  }
  return true;
}

namespace {

SweepRow run_tuple(const FlowParams& p, const SweepOptions& o) {
  SweepRow row;
  row.params = p;
  try {
    const SteadyProfile prof = solve_steady(p, o.law, o.steady);
    row.b = prof.b();
    row.intervals = prof.intervals();
    row.slope = std::string(slope_label(classify(prof, o.steady.tol_flux)));
    const Contour contour = build_contour(o.M, 0.0, o.contour_nodes);
    SpectrumOptions so;
    so.winding = o.winding;
    const SpectrumReport rep = winding_number(prof, contour, so);
    row.winding = rep.winding;
    row.verdict = rep.verdict;
    row.min_abs = rep.min_abs_on_contour;
    row.nodes = rep.nodes;
    row.note = rep.note;
    for (const std::size_t N : o.oracle) {
      const WindingResult m = matrix_winding_oracle(prof, contour, N, o.winding);
      row.oracle.push_back(m.conclusive ? std::optional<int>(m.winding) : std::nullopt);
    }
  } catch (const std::exception& e) {
    row.verdict = Verdict::Inconclusive;
    row.note = e.what();
    row.oracle.assign(o.oracle.size(), std::nullopt);
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepOptions& o) {
  const auto nus = log_space(o.nu, o.steps);
  const auto rhos = log_space(o.rho0, o.steps);
  const auto u0s = log_space(o.u0, o.steps);
  const auto u1s = log_space(o.u1, o.steps);
  std::vector<FlowParams> tuples;
  for (double nu : nus)
    for (double rho0 : rhos)
      for (double u0 : u0s)
        for (double u1 : u1s) tuples.push_back({nu, rho0, u0, u1});

  std::vector<SweepRow> rows(tuples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tuples.size(); i = next++) rows[i] = run_tuple(tuples[i], o);
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(o.jobs, tuples.size()));
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::vector<std::size_t>& oracle) {
  os << "nu,rho0,u0,u1,b,intervals,slope,winding,verdict,min_abs,nodes";
  for (const std::size_t N : oracle) os << ",oracle_" << N;
  os << ",note\n";
  for (const auto& r : rows) {
    os << format_number(r.params.nu) << ',' << format_number(r.params.rho0) << ','
       << format_number(r.params.u0) << ',' << format_number(r.params.u1) << ',' << format_number(r.b) << ','
       << r.intervals << ',' << r.slope << ',' << r.winding << ',' << verdict_label(r.verdict) << ','
       << format_number(r.min_abs) << ',' << r.nodes;
    for (const auto& w : r.oracle) {
      os << ',';
      if (w) os << *w;
    }
    std::string note = r.note;
    for (char& c : note) {
      if (c == ',' || c == '\n') c = ';';
    }
    os << ',' << note << '\n';
  }
}

}  // namespace ns1d
