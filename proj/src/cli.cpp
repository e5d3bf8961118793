#include "ns1d/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <thread>

#include "ns1d/config.hpp"
#include "ns1d/diagnostics.hpp"
#include "ns1d/errors.hpp"
#include "ns1d/evolve.hpp"
#include "ns1d/profile_io.hpp"
#include "ns1d/spectrum.hpp"
#include "ns1d/sweep.hpp"

namespace ns1d {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string config;
  bool index = false;
  bool verify_radius = false;
  bool locate = false;
  bool abscissa = false;
  bool fit = false;
  bool cond2 = false;
  bool weights = false;
  bool inequalities = false;
};

struct Command {
  const char* name;
  const char* help;
};

constexpr Command kCommands[] = {
    {"steady", "solve the steady boundary-value problem and write the profile CSV"},
    {"evans", "evaluate the Evans function at one lambda, or the stability index"},
    {"contour", "Evans function along the semicircular contour, with its winding number"},
    {"spectrum", "stability verdict, root location in a box, spectral abscissa"},
    {"evolve", "perturb the steady state, run the time-dependent solver, record norms"},
    {"sweep", "stability verdicts over a log-spaced parameter grid"},
    {"check", "pressure-law condition, weight functions and the interpolation inequalities"},
};

bool in_scope(std::string_view commands, std::string_view name) {
  while (!commands.empty()) {
    const auto sp = commands.find(' ');
    if (commands.substr(0, sp) == name) return true;
    if (sp == std::string_view::npos) break;
    commands.remove_prefix(sp + 1);
  }
  return false;
}

std::string prescan_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  return path;
}

Json header(std::string_view command) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  return j;
}

Json params_json(const FlowParams& p) {
  return Json{{"nu", p.nu}, {"rho0", p.rho0}, {"u0", p.u0}, {"u1", p.u1}};
}

Json root_json(const Root& r) {
  return Json{{"re", r.lambda.real()}, {"im", r.lambda.imag()}, {"residual", r.residual},
              {"multiplicity", r.multiplicity}};
}

Json optional_json(const std::optional<std::size_t>& v) { return v ? Json(*v) : Json(nullptr); }

SteadyOptions steady_options(const RunConfig& c) {
  SteadyOptions o;
  o.intervals = c.nodes;
  o.tol_bc = c.tol_bc;
  o.tol_flux = c.tol_flux;
  return o;
}

WindingOptions winding_options(const RunConfig& c) {
  WindingOptions w;
  w.max_nodes = c.max_nodes;
  return w;
}

LoadedProfile obtain_profile(const RunConfig& c) {
  if (!c.profile_path.empty()) {
    std::ifstream in(c.profile_path, std::ios::binary);
    if (!in) throw UsageError("cannot read profile '" + c.profile_path + "'");
    try {
      return read_profile_csv(in);
    } catch (const std::exception& e) {
      throw UsageError(c.profile_path + ": " + e.what());
    }
  }
  RawBoundaryData raw;
  if (c.density_side == "left") {
    raw.density_side = RawBoundaryData::DensitySide::Left;
  } else if (c.density_side == "right") {
    raw.density_side = RawBoundaryData::DensitySide::Right;
  } else {
    throw UsageError("density side must be 'left' or 'right', not '" + c.density_side + "'");
  }
  raw.rho = c.flow.rho0;
  raw.u_left = c.flow.u0;
  raw.u_right = c.flow.u1;
  raw.nu = c.flow.nu;
  const NormalizedBc bc = normalize_bc(raw);
  return {solve_steady(bc.params, c.law(), steady_options(c)), bc.orientation};
}

Json profile_json(const SteadyProfile& p, Orientation o) {
  Json j;
  j["params"] = params_json(p.params());
  j["orientation"] = o == Orientation::Canonical ? "canonical" : "reflected";
  j["b"] = p.b();
  j["m"] = p.m();
  j["intervals"] = p.intervals();
  j["shooting"] = p.shooting() == ShootingDirection::Forward ? "forward" : "backward";
  return j;
}

std::filesystem::path output_path(const RunConfig& c) {
  std::filesystem::path p(c.out);
  if (p.is_relative()) {
    std::string base = c.output_dir;
    if (base.empty()) {
      if (const char* env = std::getenv("NS1D_OUTPUT_DIR")) base = env;
    }
    if (!base.empty()) p = std::filesystem::path(base) / p;
  }
  return p;
}

void emit(const RunConfig& c, const std::string& artifact, const std::optional<Json>& summary, std::ostream& out,
          std::ostream& err) {
  if (c.out.empty()) {
    out << artifact;
    if (summary) err << summary->dump(2) << '\n';
    return;
  }
  const auto path = output_path(c);
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot write '" + path.string() + "'");
  file << artifact;
  if (!file.flush()) throw UsageError("failed writing '" + path.string() + "'");
  if (summary) out << summary->dump(2) << '\n';
}

Box parse_box(const std::string& text) {
  double v[4];
  std::string_view rest(text);
  for (int k = 0; k < 4; ++k) {
    const auto colon = rest.find(':');
    if ((k < 3) == (colon == std::string_view::npos)) throw UsageError("box '" + text + "' is not a:b:c:d");
    try {
      v[k] = parse_number(rest.substr(0, colon));
    } catch (const std::invalid_argument&) {
      throw UsageError("box '" + text + "' is not a:b:c:d");
    }
    if (k < 3) rest.remove_prefix(colon + 1);
  }
  if (!(v[0] < v[1]) || !(v[2] < v[3])) throw UsageError("box '" + text + "' is empty");
  return {v[0], v[1], v[2], v[3]};
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    std::size_t n = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), n);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size() || n < 4) {
      throw UsageError("oracle sizes '" + text + "' are not a comma-separated list of integers >= 4");
    }
    sizes.push_back(n);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return sizes;
}

int cmd_steady(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const LoadedProfile loaded = obtain_profile(c);
  const SteadyProfile& p = loaded.profile;
  std::ostringstream csv;
  write_profile_csv(csv, p, loaded.orientation);

  const double m = p.m();
  const Eigen::Index n = p.rho().size() - 1;
  const Eigen::ArrayXd flux = m * p.u().array() + p.law().eval(p.rho().array(), 0) -
                              p.params().nu * p.u_x().array() - p.b();
  Json j = header("steady");
  j.update(profile_json(p, loaded.orientation));
  j["slope"] = slope_label(classify(p, c.tol_flux));
  j["bc_residual"] = std::abs(p.rho()[n] - p.params().outflow_density());
  j["flux_residual"] = flux.abs().maxCoeff();
  emit(c, csv.str(), j, out, err);
  return 0;
}

int cmd_evans(const RunConfig& c, const Flags& f, std::ostream& out, std::ostream& err) {
  const LoadedProfile loaded = obtain_profile(c);
  if (f.index) {
    const StabilityIndex s = stability_index(loaded.profile, c.big_factor);
    out << "index,sign_at_zero,sign_at_infinity\n"
        << s.index << ',' << s.sign_at_zero << ',' << s.sign_at_infinity << '\n';
    if (!s.consistent) {
      err << "ns1d evans: sign of Re D is not settled near lambda_big = " << format_number(s.lambda_big) << '\n';
      return 1;
    }
    if (s.index < 0) err << "ns1d evans: stability index -1, an odd number of nonstable eigenvalues\n";
    return 0;
  }
  const EvansEvaluation e = evans({c.lambda_re, c.lambda_im}, loaded.profile, c.evans_steps);
  out << "re,im,log_scale\n"
      << format_number(e.d_scaled.real()) << ',' << format_number(e.d_scaled.imag()) << ','
      << format_number(e.log_scale) << '\n';
  return 0;
}

int cmd_contour(const RunConfig& c, const Flags& f, std::ostream& out, std::ostream& err) {
  const LoadedProfile loaded = obtain_profile(c);
  const SteadyProfile& p = loaded.profile;
  SpectrumOptions so;
  so.winding = winding_options(c);
  const Contour contour = build_contour(c.M, c.delta, c.contour_nodes);
  const SpectrumReport rep = winding_number(p, contour, so);

  std::ostringstream csv;
  csv << "lambda_re,lambda_im,D_re_scaled,D_im_scaled,log_scale\n";
  for (const auto& v : rep.detail.values) {
    csv << format_number(v.lambda.real()) << ',' << format_number(v.lambda.imag()) << ','
        << format_number(v.d_scaled.real()) << ',' << format_number(v.d_scaled.imag()) << ','
        << format_number(v.log_scale) << '\n';
  }

  Json j = header("contour");
  j["profile"] = profile_json(p, loaded.orientation);
  j["M"] = c.M;
  j["delta"] = c.delta;
  j["nodes"] = rep.nodes;
  j["winding"] = rep.winding;
  j["total_arg"] = rep.detail.total_arg;
  j["min_abs_on_contour"] = rep.min_abs_on_contour;
  j["verdict"] = verdict_label(rep.verdict);
  j["note"] = rep.note;
  bool ok = rep.verdict != Verdict::Inconclusive;
  if (f.verify_radius) {
    const SpectrumReport big = winding_number(p, build_contour(2.0 * c.M, c.delta, c.contour_nodes), so);
    const bool agrees = big.verdict != Verdict::Inconclusive && big.winding == rep.winding;
    j["radius_check"] = Json{{"M", 2.0 * c.M}, {"winding", big.winding}, {"verdict", verdict_label(big.verdict)},
                             {"agrees", agrees}};
    ok = ok && agrees;
  }
  if (c.matrix_N > 0) {
    const WindingResult m = matrix_winding_oracle(p, contour, c.matrix_N, so.winding);
    const bool agrees = m.conclusive && m.winding == rep.winding;
    j["matrix_oracle"] = Json{{"N", c.matrix_N}, {"winding", m.winding}, {"conclusive", m.conclusive},
                              {"agrees", agrees}};
    ok = ok && agrees;
  }
  emit(c, csv.str(), j, out, err);
  return ok ? 0 : 1;
}

int cmd_spectrum(const RunConfig& c, const Flags& f, std::ostream& out, std::ostream& err) {
  const LoadedProfile loaded = obtain_profile(c);
  const SteadyProfile& p = loaded.profile;
  LocateOptions lo;
  lo.tol_box = c.tol_box;
  lo.winding = winding_options(c);

  Json j = header("spectrum");
  j["profile"] = profile_json(p, loaded.orientation);
  bool ok = true;
  if (f.locate || !c.box.empty()) {
    const Box box = c.box.empty() ? Box{-c.delta, c.M, -c.M, c.M} : parse_box(c.box);
    const LocateResult r = locate_roots(p, box, lo);
    Verdict v = Verdict::SpectrallyStable;
    Json roots = Json::array();
    for (const auto& root : r.roots) {
      roots.push_back(root_json(root));
      if (root.lambda.real() >= 0.0) v = Verdict::NonstableEigenvalues;
    }
    if (!r.conclusive) v = Verdict::Inconclusive;
    j["box"] = Json{{"re_lo", box.re_lo}, {"re_hi", box.re_hi}, {"im_lo", box.im_lo}, {"im_hi", box.im_hi}};
    j["winding"] = r.winding;
    j["roots"] = roots;
    j["verdict"] = verdict_label(v);
    j["note"] = r.note;
    ok = v != Verdict::Inconclusive;
  } else {
    SpectrumOptions so;
    so.winding = lo.winding;
    const Contour contour = build_contour(c.M, c.delta, c.contour_nodes);
    const SpectrumReport rep = winding_number(p, contour, so);
    Json roots = Json::array();
    if (rep.verdict == Verdict::NonstableEigenvalues) {
      for (const auto& root : locate_roots(p, Box{-c.delta, c.M, -c.M, c.M}, lo).roots) {
        if (std::abs(root.lambda) < c.M) roots.push_back(root_json(root));
      }
    }
    j["M"] = c.M;
    j["delta"] = c.delta;
    j["winding"] = rep.winding;
    j["roots"] = roots;
    j["verdict"] = verdict_label(rep.verdict);
    j["nodes"] = rep.nodes;
    j["min_abs_on_contour"] = rep.min_abs_on_contour;
    j["note"] = rep.note;
    ok = rep.verdict != Verdict::Inconclusive;
    if (c.matrix_N > 0) {
      const WindingResult m = matrix_winding_oracle(p, contour, c.matrix_N, so.winding);
      const bool agrees = m.conclusive && m.winding == rep.winding;
      j["matrix_oracle"] = Json{{"N", c.matrix_N}, {"winding", m.winding}, {"conclusive", m.conclusive},
                                {"agrees", agrees}};
      ok = ok && agrees;
    }
  }
  if (f.abscissa) {
    AbscissaOptions ao;
    ao.M = c.M;
    ao.contour_nodes = c.contour_nodes;
    ao.locate = lo;
    const Abscissa a = spectral_abscissa(p, ao);
    Json roots = Json::array();
    for (const auto& root : a.roots) roots.push_back(root_json(root));
    j["abscissa"] = Json{{"value", a.value}, {"found", a.found},     {"conclusive", a.conclusive},
                         {"roots", roots},   {"note", a.note}};
    ok = ok && a.conclusive;
  }
  emit(c, j.dump(2) + "\n", std::nullopt, out, err);
  return ok ? 0 : 1;
}

int cmd_evolve(const RunConfig& c, const Flags& f, std::ostream& out, std::ostream& err) {
  const LoadedProfile loaded = obtain_profile(c);
  const SteadyProfile& p = loaded.profile;
  PerturbationRun run;
  run.cells = c.cells;
  run.epsilon = c.eps;
  run.mode = c.mode;
  run.T = c.T;
  run.dt = c.dt;
  run.stride = c.stride;
  NormHistory h;
  if (c.reference == "baseline") {
    h = perturbation_history(p, run);
  } else if (c.reference == "steady") {
    const double dt = run_dt(p, run);
    h = evolve(perturb(p, run.epsilon, run.mode, run.cells), p, run.T, dt, run_stride(run, dt));
  } else {
    throw UsageError("reference must be 'baseline' or 'steady', not '" + c.reference + "'");
  }
  std::ostringstream csv;
  csv << "t,l2,h1,h2h3\n";
  for (const auto& s : h) {
    csv << format_number(s.t) << ',' << format_number(s.l2) << ',' << format_number(s.h1) << ','
        << format_number(s.h2h3) << '\n';
  }
  if (!f.fit) {
    emit(c, csv.str(), std::nullopt, out, err);
    return 0;
  }
  Json j = header("evolve");
  j["profile"] = profile_json(p, loaded.orientation);
  j["epsilon"] = run.epsilon;
  j["mode"] = run.mode;
  j["cells"] = run.cells;
  j["T"] = run.T;
  j["reference"] = c.reference;
  const auto from = monotone_from(h);
  j["monotone_from"] = from ? Json(*from) : Json(nullptr);
  int code = 0;
  try {
    const DecayFit fit = fit_decay(h, c.tail);
    j["fit"] = Json{{"theta", fit.theta},     {"c", fit.c},             {"t_begin", fit.t_begin},
                    {"t_end", fit.t_end},     {"samples", fit.samples}, {"residual", fit.residual}};
  } catch (const std::exception& e) {
    j["fit"] = nullptr;
    j["note"] = e.what();
    code = 1;
  }
  emit(c, csv.str(), j, out, err);
  return code;
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  SweepOptions o;
  o.nu = parse_range(c.nu_range);
  o.u0 = parse_range(c.u0_range);
  o.u1 = parse_range(c.u1_range);
  o.rho0 = parse_range(c.rho0_range);
  o.steps = c.steps;
  o.jobs = c.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : c.jobs;
  o.law = c.law();
  o.steady = steady_options(c);
  o.M = c.M;
  o.contour_nodes = c.contour_nodes;
  o.winding = winding_options(c);
  o.oracle = parse_sizes(c.oracle);
  if (o.steps == 0) throw UsageError("sweep needs at least one step per range");

  const auto rows = run_sweep(o);
  std::ostringstream csv;
  write_sweep_csv(csv, rows, o.oracle);

  std::size_t stable = 0, nonstable = 0, inconclusive = 0, disagreements = 0;
  for (const auto& r : rows) {
    stable += r.verdict == Verdict::SpectrallyStable;
    nonstable += r.verdict == Verdict::NonstableEigenvalues;
    inconclusive += r.verdict == Verdict::Inconclusive;
    disagreements += !r.oracle_agrees();
  }
  Json j = header("sweep");
  j["tuples"] = rows.size();
  j["steps"] = o.steps;
  j["oracle"] = o.oracle;
  j["verdicts"] = Json{{"SpectrallyStable", stable}, {"NonstableEigenvalues", nonstable},
                       {"Inconclusive", inconclusive}};
  j["oracle_disagreements"] = disagreements;
  emit(c, csv.str(), j, out, err);
  return inconclusive == 0 && disagreements == 0 ? 0 : 1;
}

int cmd_check(const RunConfig& c, const Flags& f, std::ostream& out, std::ostream& err) {
  const bool all = !(f.cond2 || f.weights || f.inequalities);
  Json j = header("check");
  if (all || f.cond2 || f.weights) {
    const LoadedProfile loaded = obtain_profile(c);
    const SteadyProfile& p = loaded.profile;
    j["profile"] = profile_json(p, loaded.orientation);
    j["profile"]["slope"] = slope_label(classify(p, c.tol_flux));
    if (all || f.cond2) {
      const Cond2Report r = cond2_check(p, p.law());
      j["cond2"] = Json{{"status", cond2_label(r.status)},
                        {"node", optional_json(r.node)},
                        {"x", r.node ? Json(p.x(*r.node)) : Json(nullptr)},
                        {"clause", r.clause},
                        {"rho_x_bound", "applied to rho_x itself, not |rho_x|"}};
    }
    if (all || f.weights) {
      const double delta = c.weight_delta > 0.0 ? c.weight_delta : default_weight_delta(p);
      const WeightPair w = weight_functions(p, p.law(), delta);
      j["weights"] = Json{{"delta", w.delta},
                          {"phi_positive", w.phi_positive},
                          {"quantity_negative", w.quantity_negative},
                          {"failure_node", optional_json(w.failure_node)},
                          {"phi1_min", w.phi1.minCoeff()},
                          {"phi1_max", w.phi1.maxCoeff()},
                          {"phi2_min", w.phi2.minCoeff()},
                          {"phi2_max", w.phi2.maxCoeff()},
                          {"quantity_max", w.quantity.maxCoeff()}};
    }
  }
  if (all || f.inequalities) {
    const InequalitySuite s = inequality_suite(c.seeds, c.check_cells);
    j["inequalities"] = Json{{"fields", s.fields},
                             {"intervals", s.intervals},
                             {"slack", s.slack},
                             {"poincare_failures", s.poincare_failures},
                             {"sup_failures", s.sup_failures},
                             {"pinned_failures", s.pinned_failures},
                             {"derivative_failures", s.derivative_failures},
                             {"max_poincare_ratio", s.max_poincare_ratio},
                             {"max_sup_ratio", s.max_sup_ratio},
                             {"max_observed_constant", s.max_observed_constant},
                             {"interpolation_constant", interpolation_constant()},
                             {"holds", s.holds()},
                             {"first_failure", s.first_failure ? Json(*s.first_failure) : Json(nullptr)}};
  }
  emit(c, j.dump(2) + "\n", std::nullopt, out, err);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  Flags flags;
  CLI::App app{"Steady states of 1D isentropic compressible Navier-Stokes flow and their stability", "ns1d"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_option("--config", flags.config, "key = value file applied before the flags");

  const auto entries = config_entries(cfg);
  for (const Command& cmd : kCommands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    for (const ConfigEntry& e : entries) {
      if (!in_scope(e.commands, cmd.name)) continue;
      std::visit([&](auto* target) { sub->add_option(std::string(e.flag), *target, std::string(e.help)); },
                 e.target);
    }
    const std::string_view name = cmd.name;
    if (name == "evans") sub->add_flag("--index", flags.index, "print the stability index instead");
    if (name == "contour") sub->add_flag("--verify-radius", flags.verify_radius, "repeat with 2M and compare");
    if (name == "spectrum") {
      sub->add_flag("--locate", flags.locate, "locate the zeros inside --box");
      sub->add_flag("--abscissa", flags.abscissa, "rightmost eigenvalue");
    }
    if (name == "evolve") sub->add_flag("--fit", flags.fit, "fit an exponential decay rate");
    if (name == "check") {
      sub->add_flag("--cond2", flags.cond2, "condition on the pressure law and profile");
      sub->add_flag("--weights", flags.weights, "weight functions phi1, phi2");
      sub->add_flag("--inequalities", flags.inequalities, "Poincare and interpolation inequalities on random fields");
    }
  }

  try {
    const std::string config_path = prescan_config(args);
    if (!config_path.empty()) apply_config_file(config_path, cfg);
  } catch (const ConfigError& e) {
    err << "ns1d: " << e.what() << '\n';
    return 2;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  std::string name;
  for (const Command& cmd : kCommands) {
    if (app.got_subcommand(cmd.name)) name = cmd.name;
  }
  try {
    if (cfg.verbosity > 0) err << "ns1d " << name << '\n';
    if (name == "steady") return cmd_steady(cfg, out, err);
    if (name == "evans") return cmd_evans(cfg, flags, out, err);
    if (name == "contour") return cmd_contour(cfg, flags, out, err);
    if (name == "spectrum") return cmd_spectrum(cfg, flags, out, err);
    if (name == "evolve") return cmd_evolve(cfg, flags, out, err);
    if (name == "sweep") return cmd_sweep(cfg, out, err);
    return cmd_check(cfg, flags, out, err);
  } catch (const UsageError& e) {
    err << "ns1d " << name << ": " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "ns1d " << name << ": " << e.what() << '\n';
    return 2;
  } catch (const UnsupportedBoundary& e) {
    err << "ns1d " << name << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "ns1d " << name << ": " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ns1d
