#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gridqr::cli {

enum ExitCode : int { kOk = 0, kPropertyFailure = 1, kUsageError = 2 };

/// Arguments shared by every subcommand. Empty lists fall back to per-command
/// defaults.
struct RunSpec {
  std::vector<std::uint64_t> m;
  std::vector<std::uint64_t> n;
  std::vector<std::size_t> sites;
  std::vector<std::size_t> domains;  // per cluster
  std::string tree = "hier";
  std::vector<std::string> algo;
  bool want_q = false;
  std::uint64_t seed = 42;
  std::string topology = "grid5000";
  std::string out;  // CSV path; stdout when empty
  bool json = false;

  // bench / compare
  bool counters_only = false;
  std::uint64_t max_m = std::uint64_t{1} << 22;
  std::uint64_t max_n = 512;
  std::uint64_t max_p = 512;
  std::uint64_t mem_cap_mb = 1024;
  std::size_t jobs = 1;

  // verify
  std::size_t cases = 50;
  std::string inject_fault;  // "" or "tau-sign"

  // model
  std::string report = "table";  // table | crossover | speedup
};

int cmd_verify(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_bench(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_model(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_compare(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// Parse argv and dispatch to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// %.17g, so doubles round-trip through text.
std::string format_double(double v);

}  // namespace gridqr::cli
