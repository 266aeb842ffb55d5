#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ogr/io.hpp"

namespace ogr::cli {

enum ExitCode { kOk = 0, kFail = 1, kUsage = 2, kNumeric = 3 };

/// The experiment subcommands, in help order.
const std::vector<std::string>& commands();

/// A resolved experiment: one JSON document
///   {command, young, grid, field, probe, seed, output_dir}
/// where `field` is {source: analytic|file|solver, ...}.
struct Outcome {
  int exit_code = kOk;
  io::json summary;
  std::vector<std::filesystem::path> files;
};

/// Fills defaults for missing keys; validates cheap parts (Young descriptor,
/// grid). Throws ParseError.
io::json resolve(const std::string& command, io::json config);

/// Hash of the resolved config (FNV-1a of its canonical dump).
std::string config_hash(const io::json& resolved);

/// Runs a resolved experiment, writing CSV + summary JSON to output_dir and
/// printing the summary to `out`. With dry_run only the plan is printed.
Outcome execute(const io::json& resolved, bool dry_run, std::ostream& out);

/// Command-line entry: `ogr <command> [flags]`. Maps errors to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ogr::cli
