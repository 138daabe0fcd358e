// Runs every acceptance experiment and prints one verdict line per criterion.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "edgewave/core/parallel.hpp"
#include "edgewave/harness/config.hpp"
#include "edgewave/harness/experiments.hpp"

namespace fs = std::filesystem;
using namespace edgewave;

namespace {

void print_row(const ReportRow& row) {
  char eps[32] = "", t[32] = "";
  if (!std::isnan(row.epsilon)) std::snprintf(eps, sizeof eps, " eps=%g", row.epsilon);
  if (!std::isnan(row.t)) std::snprintf(t, sizeof t, " t=%g", row.t);
  std::printf("%s %s %s%s%s value=%.9g tol=%s\n", row.pass ? "PASS" : "FAIL", row.experiment.c_str(),
              row.metric.c_str(), eps, t, row.value, row.tolerance.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path config_dir = EDGEWAVE_CONFIG_DIR;
  const fs::path out_dir = argc > 1 ? fs::path(argv[1]) : fs::path(EDGEWAVE_ACCEPTANCE_OUT);
  set_thread_count(1);
  const std::vector<std::string> ids{"e1", "e2", "e3", "e4", "e5", "e6", "props"};
  int failures = 0, criteria = 0;
  for (const auto& id : ids) {
    const auto start = std::chrono::steady_clock::now();
    try {
      ExperimentConfig c = load_config((config_dir / (id + ".toml")).string());
      c.output_dir = (out_dir / id).string();
      const ExperimentResult r = run_experiment(c);
      for (const ReportRow& row : r.all_rows()) {
        if (!row.is_criterion()) continue;
        print_row(row);
        ++criteria;
        if (!row.pass) ++failures;
      }
    } catch (const std::exception& e) {
      std::printf("FAIL %s aborted: %s\n", id.c_str(), e.what());
      ++failures;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("---- %s done in %.1f s\n", id.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d criteria, %d failed\n", criteria, failures);
  return failures == 0 ? 0 : 1;
}
