#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "binmargin/analysis.hpp"
#include "binmargin/margins.hpp"
#include "binmargin/table.hpp"

namespace binmargin::cli {

enum class Command { kTypical, kCount, kEnumerate, kSample, kMarginal, kJoint, kMoments, kLln, kRates, kVerify };
enum class Format { kJson, kJsonl, kCsv };

const char* to_string(Command c);
const char* to_string(Format f);

struct RunConfig {
  Command command = Command::kTypical;
  std::optional<BlockParams> params;
  std::optional<std::string> margins_file;
  SamplerKind sampler = SamplerKind::kMcmc;
  std::size_t k = 1000;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  std::string output;
  Format format = Format::kJson;
  std::size_t threads = 1;
  bool dry_run = false;
  std::optional<std::int64_t> burn_in;
  std::optional<std::int64_t> thin;
  std::string csv;
  Block block = Block::kBottomRight;
  std::size_t k_cells = 2;
  std::vector<std::int64_t> n_sweep;
  std::vector<Cell> cells;
  std::vector<int> powers;
  std::size_t cap = 100000;
  bool oracle = false;
  std::size_t max_states = 1'000'000;
  std::uint64_t max_tries = 100'000'000;
};

/// Parses command-line arguments (without the program name). A --config
/// file supplies defaults for any flag not given on the command line.
/// Throws InvalidArgument naming the offending flag or key.
RunConfig parse_config(const std::vector<std::string>& args);

/// Resolved configuration as flat JSON (flag names as keys).
std::string describe_config(const RunConfig& cfg);

/// Executes a parsed configuration. Primary output goes to cfg.output or
/// `out`; diagnostics and error JSON go to `err`. Returns the exit code.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full entry point: parse, run and map every error to its exit code.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace binmargin::cli
