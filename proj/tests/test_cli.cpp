#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "ns1d/cli.hpp"
#include "ns1d/config.hpp"
#include "ns1d/sweep.hpp"

using namespace ns1d;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

const fs::path& scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("ns1d_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

const std::vector<std::string> kFalling = {"--nu", "1", "--gamma", "1.4", "--rho0", "2", "--u0", "1.5", "--u1", "1"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

}  // namespace

TEST_CASE("steady writes the profile and a summary") {
  const auto r = call(with({"steady"}, kFalling));
  CHECK(r.code == 0);
  CHECK(r.out.rfind("# ns1d-profile v1 ", 0) == 0);
  CHECK(r.out.find("\nx,rho,u,rho_x,u_x\n") != std::string::npos);
  const auto summary = nlohmann::json::parse(r.err);
  CHECK(summary["schema_version"] == kSchemaVersion);
  CHECK(summary["bc_residual"].get<double>() <= 1e-10);
  CHECK(summary["flux_residual"].get<double>() <= 1e-8);
}

TEST_CASE("output paths") {
  const fs::path dir = scratch() / "env";
  ::setenv("NS1D_OUTPUT_DIR", dir.c_str(), 1);
  const auto a = call(with({"steady", "--out", "p.csv"}, kFalling));
  CHECK(a.code == 0);
  CHECK(fs::exists(dir / "p.csv"));
  CHECK(nlohmann::json::parse(a.out)["command"] == "steady");

  const fs::path other = scratch() / "flag";
  CHECK(call(with({"steady", "--out", "p.csv", "--output-dir", other.string()}, kFalling)).code == 0);
  CHECK(fs::exists(other / "p.csv"));

  const fs::path absolute = scratch() / "abs.csv";
  CHECK(call(with({"steady", "--out", absolute.string()}, kFalling)).code == 0);
  CHECK(fs::exists(absolute));
  ::unsetenv("NS1D_OUTPUT_DIR");
  CHECK(slurp(dir / "p.csv") == slurp(absolute));
}

TEST_CASE("config precedence") {
  const fs::path cfg = scratch() / "run.cfg";
  write_file(cfg, "# flow\nflow.nu = 0.5\nflow.rho0=3  # inline\n\nsteady.nodes = 64\n");
  auto nu_of = [](const Result& r) { return nlohmann::json::parse(r.err)["params"]["nu"].get<double>(); };

  const auto from_file = call({"steady", "--config", cfg.string()});
  CHECK(from_file.code == 0);
  CHECK(nu_of(from_file) == 0.5);
  CHECK(nlohmann::json::parse(from_file.err)["params"]["rho0"] == 3.0);

  const auto flag_wins = call({"steady", "--config", cfg.string(), "--nu", "0.25"});
  CHECK(nu_of(flag_wins) == 0.25);
  const auto flag_first = call({"steady", "--nu", "0.25", "--config=" + cfg.string()});
  CHECK(nu_of(flag_first) == 0.25);

  CHECK(nu_of(call({"steady"})) == 1.0);

  RunConfig direct;
  apply_config_text("contour.M = 20\nsweep.jobs=3\nevolve.reference = steady\n", direct);
  CHECK(direct.M == 20.0);
  CHECK(direct.jobs == 3);
  CHECK(direct.reference == "steady");
}

TEST_CASE("config errors name the key") {
  RunConfig c;
  try {
    apply_config_text("flow.nu = 1\nflow.viscosity = 2\n", c);
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key == "flow.viscosity");
  }
  try {
    apply_config_text("steady.nodes = many\n", c);
    FAIL("bad value accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key == "steady.nodes");
  }
  CHECK_THROWS_AS(apply_config_text("flow.nu 1\n", c), ConfigError);
  CHECK_THROWS_AS(apply_config_text("evolve.mode = 1.5\n", c), ConfigError);

  const fs::path cfg = scratch() / "bad.cfg";
  write_file(cfg, "flow.nu = 1\nflow.viscosity = 2\n");
  const auto r = call({"steady", "--config", cfg.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("flow.viscosity") != std::string::npos);
  CHECK(call({"steady", "--config", (scratch() / "missing.cfg").string()}).code == 2);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(call({}).code == 2);
  CHECK(call({"plot"}).code == 2);
  CHECK(call({"steady", "--frobnicate"}).code == 2);
  CHECK(call({"steady", "--nu", "abc"}).code == 2);
  CHECK(call({"steady", "--nu", "-1"}).code == 2);
  CHECK(call({"steady", "--u0", "1", "--u1", "-1"}).code == 2);
  CHECK(call({"steady", "--density-side", "middle"}).code == 2);
  CHECK(call({"evans", "--profile", (scratch() / "nope.csv").string()}).code == 2);
  CHECK(call({"spectrum", "--box", "1:0:-1:1"}).code == 2);
  CHECK(call({"sweep", "--nu-range", "10:1"}).code == 2);
  CHECK(call({"sweep", "--oracle", "128,x"}).code == 2);
  CHECK(call({"evolve", "--reference", "other"}).code == 2);
  CHECK(call({"steady", "--help"}).code == 0);

  const fs::path junk = scratch() / "junk.csv";
  write_file(junk, "x,rho\n1,2\n");
  const auto r = call({"evans", "--profile", junk.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("line 1") != std::string::npos);
}

TEST_CASE("contour and spectrum on the expansive profile") {
  const auto c = call(with({"contour", "--M", "10", "--verify-radius"}, kFalling));
  CHECK(c.code == 0);
  CHECK(c.out.rfind("lambda_re,lambda_im,D_re_scaled,D_im_scaled,log_scale\n", 0) == 0);
  const auto summary = nlohmann::json::parse(c.err);
  CHECK(summary["winding"] == 0);
  CHECK(summary["verdict"] == "SpectrallyStable");
  CHECK(summary["radius_check"]["agrees"] == true);
  CHECK(std::count(c.out.begin(), c.out.end(), '\n') == summary["nodes"].get<int>() + 1);

  const auto s = call(with({"spectrum", "--box", "0:10:-10:10"}, kFalling));
  CHECK(s.code == 0);
  const auto report = nlohmann::json::parse(s.out);
  CHECK(report["roots"].empty());
  CHECK(report["verdict"] == "SpectrallyStable");
  CHECK(report["schema_version"] == kSchemaVersion);

  const auto left = nlohmann::json::parse(call(with({"spectrum", "--box", "-1:-0.5:-0.5:0.5"}, kFalling)).out);
  REQUIRE(left["roots"].size() == 1);
  CHECK(left["roots"][0]["re"].get<double>() == doctest::Approx(-0.924111).epsilon(1e-5));
}

TEST_CASE("evans values and index") {
  const auto v = call(with({"evans", "--lambda-re", "0.5", "--lambda-im", "1"}, kFalling));
  CHECK(v.code == 0);
  CHECK(v.out.rfind("re,im,log_scale\n", 0) == 0);
  const auto i = call(with({"evans", "--index"}, kFalling));
  CHECK(i.code == 0);
  CHECK(i.out == "index,sign_at_zero,sign_at_infinity\n1,1,1\n");
}

TEST_CASE("profiles read back give identical downstream output") {
  const fs::path prof = scratch() / "falling.csv";
  REQUIRE(call(with({"steady", "--out", prof.string()}, kFalling)).code == 0);
  const auto direct = call(with({"contour", "--matrix", "64"}, kFalling));
  const auto loaded = call({"contour", "--matrix", "64", "--profile", prof.string()});
  CHECK(direct.code == 0);
  CHECK(direct.out == loaded.out);
  CHECK(direct.err == loaded.err);
  CHECK(call(with({"evans", "--lambda-im", "3"}, kFalling)).out ==
        call({"evans", "--lambda-im", "3", "--profile", prof.string()}).out);
}

TEST_CASE("density prescribed on the right") {
  const auto r = call({"steady", "--density-side", "right", "--nu", "1", "--rho0", "2", "--u0", "-1", "--u1", "-1.5"});
  CHECK(r.code == 0);
  CHECK(r.out.find("orientation=reflected") != std::string::npos);
  CHECK(nlohmann::json::parse(r.err)["orientation"] == "reflected");
  const auto last_row = r.out.substr(r.out.rfind('\n', r.out.size() - 2) + 1);
  CHECK(last_row.rfind("1,2,-1.5,", 0) == 0);

  const fs::path prof = scratch() / "right.csv";
  write_file(prof, r.out);
  CHECK(call({"evans", "--index", "--profile", prof.string()}).out ==
        call(with({"evans", "--index"}, kFalling)).out);
  CHECK(call({"steady", "--density-side", "right", "--u0", "1", "--u1", "1.5"}).code == 2);
}

TEST_CASE("evolve norms and fit") {
  const auto r = call(with({"evolve", "--cells", "128", "--T", "10", "--fit"}, kFalling));
  CHECK(r.code == 0);
  CHECK(r.out.rfind("t,l2,h1,h2h3\n0,", 0) == 0);
  const auto fit = nlohmann::json::parse(r.err);
  CHECK(fit["fit"]["theta"].get<double>() > 0.0);
  CHECK(fit["fit"]["residual"].get<double>() < 0.05);

  const auto plain = call(with({"evolve", "--cells", "64", "--T", "1"}, kFalling));
  CHECK(plain.code == 0);
  CHECK(plain.err.empty());
  const auto steady_ref = call(with({"evolve", "--cells", "64", "--T", "1", "--reference", "steady"}, kFalling));
  CHECK(steady_ref.code == 0);
  CHECK(steady_ref.out != plain.out);
  CHECK(call(with({"evolve", "--cells", "64", "--eps", "0.5"}, kFalling)).code == 2);
}

TEST_CASE("check report") {
  const auto r = call(with({"check", "--cond2", "--weights", "--delta", "0.1"}, kFalling));
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["weights"]["delta"] == 0.1);
  CHECK(j["cond2"]["status"].is_string());
  CHECK(!j.contains("inequalities"));
  const auto all = nlohmann::json::parse(call({"check", "--seeds", "5", "--cells", "256"}).out);
  CHECK(all["inequalities"]["holds"] == true);
  CHECK(all.contains("cond2"));
}

TEST_CASE("sweep ranges") {
  CHECK(parse_range("0.1:10").lo == 0.1);
  CHECK_THROWS(parse_range("0:1"));
  CHECK_THROWS(parse_range("2:1"));
  CHECK_THROWS(parse_range("1-2"));
  const auto v = log_space({0.1, 10.0}, 3);
  CHECK(v.front() == 0.1);
  CHECK(v[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v.back() == 10.0);
  CHECK(log_space({2.0, 5.0}, 1) == std::vector<double>{2.0});
}

TEST_CASE("sweep rows do not depend on the worker count") {
  const std::vector<std::string> args = {"sweep", "--nu-range", "0.5:5", "--u0-range", "1:4", "--u1-range", "1:4",
                                         "--rho0-range", "1:3", "--steps", "2", "--oracle", "64"};
  const auto one = call(with(args, {"--jobs", "1"}));
  const auto three = call(with(args, {"--jobs", "3"}));
  CHECK(one.code == 0);
  CHECK(one.out == three.out);
  CHECK(one.err == three.err);
  CHECK(std::count(one.out.begin(), one.out.end(), '\n') == 17);
  CHECK(one.out.rfind("nu,rho0,u0,u1,b,intervals,slope,winding,verdict,min_abs,nodes,oracle_64,note\n", 0) == 0);
}
