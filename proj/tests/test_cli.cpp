#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ogr/cli.hpp"
#include "ogr/error.hpp"

using namespace ogr;
namespace fs = std::filesystem;
using io::json;

namespace {

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("OGR_TEST_TMP");
  fs::path base = env ? fs::path(env) : fs::temp_directory_path() / "ogr_cli_test";
  fs::path p = base / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Run {
  int code;
  std::string out, err;
};

Run ogr_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json summary_of(const Run& r) {
  // the summary is the last JSON document on stdout
  const auto pos = r.out.find('{');
  REQUIRE(pos != std::string::npos);
  return json::parse(r.out.substr(pos));
}

}  // namespace

TEST_CASE("young-check on the cubic") {
  const auto dir = scratch("young");
  const auto r = ogr_run({"young-check", "--family", "power", "--p", "3", "--output-dir", dir.string()});
  CHECK(r.code == 0);
  const auto s = summary_of(r);
  CHECK(s["delta"].get<double>() == doctest::Approx(2.0));
  CHECK(s["g0"].get<double>() == doctest::Approx(2.0));
  CHECK(s["doubling"]["ok"].get<bool>());
  CHECK(s["verdict"] == "PASS");
  const std::string stem = "young-check-" + s["hash"].get<std::string>();
  CHECK(fs::exists(dir / (stem + "-summary.json")));
  const std::string csv = slurp(dir / (stem + "-trace.csv"));
  CHECK(csv.rfind("t,g,G,inverse_G_error,complementary\n", 0) == 0);
}

TEST_CASE("identical configs give byte-identical outputs") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  auto args = [](const fs::path& d) {
    return std::vector<std::string>{"iterate", "--h", "0.03125", "--seed", "4", "--output-dir", d.string()};
  };
  const auto ra = ogr_run(args(a));
  const auto rb = ogr_run(args(b));
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  // output_dir is part of the config, so compare the traces by content
  std::vector<std::string> ca, cb;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() == ".csv") ca.push_back(slurp(e.path()));
  }
  for (const auto& e : fs::directory_iterator(b)) {
    if (e.path().extension() == ".csv") cb.push_back(slurp(e.path()));
  }
  CHECK(ca == cb);
  CHECK_FALSE(ca.empty());

  // the same output_dir twice: every file identical
  const auto rc = ogr_run(args(a));
  CHECK(rc.out == ra.out);
}

TEST_CASE("dry run prints the plan and writes nothing") {
  const auto dir = scratch("dry");
  for (const auto& cmd : cli::commands()) {
    std::vector<std::string> args{cmd, "--dry-run", "--output-dir", dir.string()};
    if (cmd == "solve") {
      args.push_back("--problem");
      args.push_back("data/annulus_p3.json");
    }
    const auto r = ogr_run(args);
    CHECK_MESSAGE(r.code == 0, cmd, ": ", r.err);
    const auto plan = summary_of(r);
    CHECK(plan["command"] == cmd);
    CHECK(plan["outputs"].size() >= 2);
  }
  CHECK(fs::is_empty(dir));
}

TEST_CASE("replace on the annulus fixture") {
  const auto dir = scratch("annulus");
  const auto r = ogr_run({"replace", "--problem", "data/annulus_p3.json", "--output-dir", dir.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto s = summary_of(r);
  CHECK(s["converged"].get<bool>());
  CHECK(s["linf_error"].get<double>() <= 1e-4);
  const std::string stem = "replace-" + s["hash"].get<std::string>();
  CHECK(slurp(dir / (stem + "-log.csv")).rfind("iter,stage,energy,residual,step\n", 0) == 0);
  CHECK(slurp(dir / (stem + "-solution.csv")).rfind("x,y,u\n", 0) == 0);
}

TEST_CASE("campanato on sqrt|x|") {
  const auto dir = scratch("campanato");
  const auto r = ogr_run({"campanato", "--lambda", "2.5", "--field", "sqrt_abs", "--output-dir", dir.string()});
  CHECK(r.code == 0);
  const auto s = summary_of(r);
  CHECK(s["gamma"].get<double>() == doctest::Approx(0.5));
  CHECK(s.contains("fitted_C"));
  CHECK(s["verdict"] == "PASS");
}

TEST_CASE("a refuted almost-minimizer exits with FAIL") {
  const auto dir = scratch("almost");
  // a spike at the center of a zero field
  json cfg{{"grid", {{"dim", 2}, {"h", 0.0625}, {"lo", {-1, -1}}, {"hi", {1, 1}}}},
           {"field", {{"source", "file"}, {"path", (dir / "spike.json").string()}}},
           {"output_dir", dir.string()}};
  const auto g = Grid::box(2, 0.0625, {-1.0, -1.0}, {1.0, 1.0});
  ScalarField u(g, 0.0);
  u[g.node_index(16, 16)] = 3.0;
  io::save_json(dir / "spike.json", io::to_json(u));
  io::save_json(dir / "cfg.json", cfg);
  const auto r = ogr_run({"almost-min", "--config", (dir / "cfg.json").string()});
  CHECK(r.code == cli::kFail);
  CHECK(summary_of(r)["verdict"] == "FAIL");
}

TEST_CASE("errors map to exit codes") {
  const auto dir = scratch("errors");
  {
    std::ofstream f(dir / "bad.json");
    f << "{\n  \"young\": {\"family\": \"power\",\n  \"p\": 3,,\n}\n";
  }
  const auto bad = ogr_run({"energy", "--config", (dir / "bad.json").string()});
  CHECK(bad.code == cli::kUsage);
  CHECK(bad.err.find("bad.json:3") != std::string::npos);

  const auto field = ogr_run({"energy", "--family", "cubic", "--output-dir", dir.string()});
  CHECK(field.code == cli::kUsage);
  CHECK(field.err.find("young.family") != std::string::npos);

  const auto missing = ogr_run({"energy", "--field-file", (dir / "nope.json").string(), "--output-dir", dir.string()});
  CHECK(missing.code == cli::kUsage);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  CHECK(ogr_run({"frobnicate"}).code == cli::kUsage);
  CHECK(ogr_run({"solve", "--output-dir", dir.string()}).code == cli::kUsage);

  // an iteration cap of one step cannot converge on a staircase trace
  json prob{{"region", {{"kind", "annulus"}, {"r_in", 0.5}, {"r_out", 1.0}}},
            {"data", {{"source", "analytic"}, {"id", "annulus_step"}}},
            {"max_iters", 1}};
  io::save_json(dir / "prob.json", prob);
  const auto num = ogr_run({"solve", "--problem", (dir / "prob.json").string(), "--h", "0.0625", "--output-dir",
                            dir.string()});
  CHECK(num.code == cli::kNumeric);
}

TEST_CASE("descriptor round trips") {
  const auto F = YoungFunction::plog(3.5, 1e-11);
  const auto G = io::young_from_json(io::to_json(F));
  CHECK(G.family() == YoungFamily::PLog);
  CHECK(G.p() == 3.5);
  CHECK(G.G(0.7) == F.G(0.7));

  const auto g = Grid::box(2, 0.125, {-1.0, 0.0}, {1.0, 1.0});
  CHECK(io::grid_from_json(io::to_json(g)) == g);
  const auto ball = Region::ball(g, {0.2, 0.4}, 0.5);
  const auto back = io::region_from_json(io::to_json(ball), g);
  CHECK(std::vector<std::size_t>(back.cells().begin(), back.cells().end()) ==
        std::vector<std::size_t>(ball.cells().begin(), ball.cells().end()));
  ScalarField u = ScalarField::from_function(g, [](const Point& x) { return x[0] / 3.0 + x[1]; });
  const auto v = io::field_from_json(json::parse(io::to_json(u).dump()));
  for (std::size_t n = 0; n < g.node_count(); ++n) CHECK(v[n] == u[n]);
  CHECK_THROWS_AS(io::field_from_json(json{{"grid", io::to_json(g)}, {"values", {1.0}}}), ParseError);
}
