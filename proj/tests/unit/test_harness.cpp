#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "edgewave/harness/config.hpp"
#include "edgewave/harness/experiments.hpp"
#include "edgewave/harness/report.hpp"
#include "edgewave/harness/scene.hpp"

using namespace edgewave;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace fs = std::filesystem;

namespace {

const char* kCircleConfig = R"(
schema_version = 1
experiment = "E2"
model = "dirac"
epsilons = [0.016, 0.004, 0.001]
x0 = 0.1
times = [0.5, 1.0]
output_dir = "out/e2"
seed = 11

[wall]
kind = "circle"
radius = 1.0
bounds = [-2.5, 2.5, -2.5, 2.5]
seed = [1.0, 0.0]

[branch]
m = 1
sign = 1

[envelope]
kind = "gaussian"
center = 0.0
width = 0.3333333333333333

[solver]
dt_over_eps = 0.25
fourth_order = true

[params]
ratio_lo = 1.5
)";

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("edgewave_harness_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config survives a serialize and parse round trip") {
  const ExperimentConfig c = parse_config_string(kCircleConfig);
  CHECK(c.wall.kind == "circle");
  CHECK(c.epsilons.size() == 3);
  CHECK(c.envelope.width == 0.3333333333333333);
  CHECK(c.param("ratio_lo", 0.0) == 1.5);
  const ExperimentConfig back = parse_config_string(serialize_config(c));
  CHECK(back == c);
}

TEST_CASE("config errors name the offending key") {
  const std::string base = "schema_version = 1\nexperiment = \"custom\"\n";
  auto message = [](const std::string& text) -> std::string {
    try {
      parse_config_string(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
      return e.what();
    }
    return "";
  };
  CHECK_THAT(message(base + "[wall]\nkind = \"analytic\"\nexpression = \"y - sin(x\"\n"),
             ContainsSubstring("wall.expression"));
  CHECK_THAT(message(base + "epsilons = [0.01, 0.02]\n"), ContainsSubstring("epsilons"));
  CHECK_THAT(message("experiment = \"E1\"\n"), ContainsSubstring("schema_version"));
  CHECK_THAT(message(base + "[params]\nwidth = \"wide\"\n"), ContainsSubstring("params.width"));
}

TEST_CASE("report CSV round trip keeps values and verdicts") {
  std::vector<ReportRow> rows{
      ReportRow::check("E1", 0.01, 0.5, "residual_u0", 2.5e-12, Tolerance::below(1e-7)),
      ReportRow::check("E2", 0.004, 1.0, "ratio_dispersive", 1.12, Tolerance::range(1.5, 3.0)),
      ReportRow::measure("E6", 0.00025, 1.0, "sp_rel_error", 0.00763),
      ReportRow::check("E6", NAN, 1.0, "xi_star_at_inv_sqrt3", 1.0, Tolerance::within(1.0, 1e-8)),
  };
  std::stringstream ss;
  write_report_csv(rows, ss);
  const auto back = read_report_csv(ss);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].experiment == rows[i].experiment);
    CHECK(back[i].metric == rows[i].metric);
    CHECK(back[i].tolerance == rows[i].tolerance);
    CHECK(back[i].pass == rows[i].pass);
    CHECK_THAT(back[i].value, WithinAbs(rows[i].value, 1e-8 * std::abs(rows[i].value)));
  }
  CHECK(std::isnan(back[3].epsilon));
  CHECK_FALSE(back[2].is_criterion());
  const ReportSummary s = summarize(back);
  CHECK(s.total_fail == 1);
  CHECK(s.by_experiment.at("E2").fail == 1);
  CHECK_FALSE(s.ok());
}

TEST_CASE("fft sizes are even and 7-smooth") {
  CHECK(fft_size(1) == 2);
  CHECK(fft_size(11) == 12);
  CHECK(fft_size(22) == 24);
  CHECK(fft_size(121) == 126);
  CHECK(fft_size(1000) == 1000);
  for (std::size_t n = 2; n < 600; ++n) {
    const std::size_t m = fft_size(n);
    CHECK(m >= n);
    CHECK(m % 2 == 0);
  }
  const Grid g = fft_grid({-1.0, 1.0, -0.5, 0.5}, 0.013);
  CHECK(g.hx <= 0.013);
  CHECK_THAT(g.hx * static_cast<double>(g.nx), WithinAbs(2.0, 1e-12));
}

TEST_CASE("lattice rule sits on multiples of the spacing") {
  const quad::Rule r = lattice_rule(-0.95, 1.02, 0.25);
  REQUIRE(r.nodes.size() == 8);
  CHECK(r.nodes.front() == -0.75);
  CHECK(r.nodes.back() == 1.0);
  for (double w : r.weights) CHECK(w == 0.25);
}

TEST_CASE("relativistic mode overlaps fully with its own profile") {
  WallConfig wc;
  wc.bounds = {-3, 3, -2, 2};
  const Scene sc = Scene::build(wc);
  const double eps = 0.01, se = std::sqrt(eps);
  const RectificationMap map = sc.map(0.6);
  const Grid grid = fft_grid({-2.0, 2.0, -0.8, 0.8}, se / 8);
  const LongitudinalProfile prof{1.0, 0.0};
  const RelativisticMode mode(BranchSpec::create(Model::Dirac, 0, -1), sc.curve, prof, 0.0, eps);
  const Field u = relativistic_field(mode, map, grid, 0.0);
  std::vector<double> centers;
  for (int k = -8; k <= 8; ++k) centers.push_back(k * se / 8);
  CHECK_THAT(detail::max_relativistic_overlap(u, map, prof, eps, centers), WithinAbs(1.0, 1e-6));
  const Field shifted = relativistic_field(mode, map, grid, 1.5);
  CHECK(detail::max_relativistic_overlap(shifted, map, prof, eps, centers) < 1e-6);
}

TEST_CASE("experiment reports are reproducible for a fixed seed") {
  ExperimentConfig c;
  c.experiment = "E6";
  c.wall.bounds = {-6, 6, -2, 2};
  c.epsilons = {0.01, 0.0025};
  c.branch_m = 1;
  c.branch_sign = 1;
  c.envelope.width = 3.0;
  c.times = {1.0};
  c.seed = 3;
  c.params["samples"] = 4;
  const fs::path a = scratch("repro_a"), b = scratch("repro_b");
  c.output_dir = a.string();
  const auto ra = run_experiment(c);
  c.output_dir = b.string();
  const auto rb = run_experiment(c);
  CHECK(ra.rows.size() == rb.rows.size());
  const std::string ta = slurp(a / "report.csv");
  CHECK_FALSE(ta.empty());
  CHECK(ta == slurp(b / "report.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("custom configs have no acceptance run") {
  ExperimentConfig c;
  c.output_dir = scratch("custom").string();
  CHECK_THROWS_AS(run_experiment(c), Error);
  fs::remove_all(c.output_dir);
}
