#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "edgewave/core/error.hpp"
#include "edgewave/core/parallel.hpp"
#include "edgewave/harness/config.hpp"
#include "edgewave/harness/experiments.hpp"
#include "edgewave/harness/report.hpp"
#include "edgewave/harness/scene.hpp"
#include "edgewave/wavepacket/field.hpp"

namespace fs = std::filesystem;
using namespace edgewave;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::string config;
  std::optional<std::string> out;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
};

ExperimentConfig load(const Globals& g) {
  if (g.config.empty()) fail(ErrorCode::ConfigError, "--config is required for this subcommand");
  ExperimentConfig c = load_config(g.config);
  if (g.out) c.output_dir = *g.out;
  if (g.seed) c.seed = *g.seed;
  c.validate();
  c.prepare_output();
  return c;
}

std::string out_path(const ExperimentConfig& c, const std::string& name) { return (fs::path(c.output_dir) / name).string(); }

int cmd_trace(const Globals& g) {
  const ExperimentConfig c = load(g);
  const Scene sc = Scene::build(c.wall);
  const LevelCurve& curve = *sc.curve;
  const std::string path = out_path(c, "curve.csv");
  std::ofstream os(path);
  curve.write_csv(os);
  const std::string summary = out_path(c, "curve_summary.csv");
  std::ofstream ss(summary);
  ss << "closed,total_length,s_min,s_max,max_abs_curvature,min_slope\n";
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", curve.closed() ? 1 : 0,
                curve.closed() ? curve.total_length() : curve.s_max() - curve.s_min(), curve.s_min(), curve.s_max(),
                curve.max_abs_curvature(), curve.min_slope());
  ss << buf;
  std::cout << "samples " << curve.samples().size() << (curve.closed() ? " closed" : " open") << "\n" << buf;
  return kExitOk;
}

int cmd_phase(const Globals& g, int xi_points, double x_step) {
  const ExperimentConfig c = load(g);
  const Scene sc = Scene::build(c.wall);
  const double eps = c.epsilons.front();
  const auto spec = detail::make_spec(sc, ModelSpec::make(c.model_kind(), eps), c.branch(), c.x0, c.envelope.build());
  const PhaseSolution& ph = *spec.phase;
  const Interval vr = ph.valid_range();
  const Interval w = c.envelope.build().window();
  std::vector<double> xis;
  for (int i = 0; i < xi_points; ++i) xis.push_back(w.lo + w.width() * i / std::max(1, xi_points - 1));
  const auto xs = detail::node_range(vr.lo, vr.hi, x_step);
  const std::string path = out_path(c, "phase.csv");
  std::ofstream os(path);
  ph.write_csv(os, xs, xis);
  std::cout << "phase " << ph.branch().label() << " valid x~ [" << vr.lo << ", " << vr.hi << "]"
            << (ph.truncated() ? " (turning point)" : "") << " -> " << path << "\n";
  return kExitOk;
}

int cmd_pack(const Globals& g) {
  const ExperimentConfig c = load(g);
  const Field f = pack_field(c);
  const std::string path = out_path(c, "pack.bin");
  write_field(f, path);
  std::cout << "grid " << f.grid.nx << " x " << f.grid.ny << " components " << f.ncomp << " norm " << f.l2_norm()
            << " -> " << path << "\n";
  return kExitOk;
}

int cmd_solve(const Globals& g, const std::string& init) {
  const ExperimentConfig c = load(g);
  const Field u0 = read_field(init);
  const auto fields = solve_field(c, u0);
  for (const Field& f : fields) {
    char name[64];
    std::snprintf(name, sizeof name, "solve_t%.6g.bin", f.time);
    const std::string path = out_path(c, name);
    write_field(f, path);
    std::cout << "t " << f.time << " norm " << f.l2_norm() << " max " << f.max_abs() << " -> " << path << "\n";
  }
  return kExitOk;
}

int cmd_experiment(const Globals& g) {
  const ExperimentConfig c = load(g);
  const ExperimentResult r = run_experiment(c);
  for (const ReportRow& row : r.all_rows())
    if (row.is_criterion())
      std::cout << (row.pass ? "PASS " : "FAIL ") << row.experiment << ' ' << row.metric << " = " << row.value << " ("
                << row.tolerance << ")\n";
  for (const auto& a : r.artifacts) std::cout << "wrote " << a << "\n";
  return r.passed() ? kExitOk : kExitFailed;
}

int cmd_report(const Globals& g, const std::vector<std::string>& inputs) {
  std::vector<ReportRow> rows;
  for (const auto& p : inputs) {
    const auto part = read_report_csv(p);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  const std::string dir = g.out ? *g.out : ".";
  fs::create_directories(dir);
  const std::string path = (fs::path(dir) / "summary.csv").string();
  write_report_csv(rows, path);
  const ReportSummary s = summarize(rows);
  for (const auto& [id, n] : s.by_experiment) std::cout << id << ": " << n.pass << " pass, " << n.fail << " fail\n";
  std::cout << "total: " << s.total_pass << " pass, " << s.total_fail << " fail -> " << path << "\n";
  return s.ok() ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edgewave: semiclassical edge wavepackets on domain walls"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "experiment configuration (TOML)");
  app.add_option("--out", g.out, "output directory, overrides output_dir");
  app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
  app.add_option("--seed", g.seed, "random seed, overrides the config");

  auto* trace = app.add_subcommand("trace", "trace the interface and export its samples");
  auto* phase = app.add_subcommand("phase", "tabulate the eikonal phase");
  int xi_points = 21;
  double x_step = 0.05;
  phase->add_option("--xi-points", xi_points, "number of wavenumbers")->check(CLI::PositiveNumber);
  phase->add_option("--x-step", x_step, "x~ spacing")->check(CLI::PositiveNumber);
  auto* pack = app.add_subcommand("pack", "build a wavepacket and dump it as a field snapshot");
  auto* solve = app.add_subcommand("solve", "advance a field snapshot with the PDE solver");
  std::string init;
  solve->add_option("--init", init, "initial field snapshot")->required()->check(CLI::ExistingFile);
  auto* experiment = app.add_subcommand("experiment", "run an acceptance experiment");
  auto* report = app.add_subcommand("report", "aggregate report CSV files");
  std::vector<std::string> inputs;
  report->add_option("inputs", inputs, "report.csv files")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }
  if (g.threads > 0) set_thread_count(g.threads);

  try {
    if (*trace) return cmd_trace(g);
    if (*phase) return cmd_phase(g, xi_points, x_step);
    if (*pack) return cmd_pack(g);
    if (*solve) return cmd_solve(g, init);
    if (*experiment) return cmd_experiment(g);
    if (*report) return cmd_report(g, inputs);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitUsage : kExitFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitUsage;
}
