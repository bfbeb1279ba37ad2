#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "upbwit/decay_fit.hpp"
#include "upbwit/gilbert.hpp"
#include "upbwit/upb_tiles.hpp"
#include "upbwit/witness.hpp"

namespace upbwit {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumerical = 2, kExitPartial = 3 };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat "key = value" experiment configuration. Lines starting with '#' are
/// comments. Unknown keys and malformed values are errors.
struct RunConfig {
  std::vector<int> dims;                  // d values for batch runs
  std::optional<long long> corrections;   // unset: per-dimension default budget
  long long trials = std::numeric_limits<long long>::max();
  double seconds = std::numeric_limits<double>::infinity();
  int log_every = 50;
  int seesaw_iters = kDefaultSeesawIters;
  int lambda_restarts = kDefaultLambdaRestarts;
  bool real_only = true;
  std::uint64_t seed = 1;
  std::string output_dir = "upbwit-out";

  long long corrections_for(const BipartiteDims& dims) const;
  GilbertConfig gilbert_config(const BipartiteDims& dims, std::uint64_t state_seed) const;
};

RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::string& path);

// Correction budgets used when the config leaves them unset.
long long default_corrections(const BipartiteDims& dims);

// master seed xor stable hash of the layout name
std::uint64_t state_seed(std::uint64_t master_seed, const TileLayout& layout);

struct ExperimentRecord {
  std::string layout;
  int tile_area = 0;
  long long corrections = 0;
  double final_distance = 0.0;
  double extrapolated_distance = 0.0;
  double gilbert_witness_distance = 0.0;
  double bgr_distance = 0.0;
  bool gilbert_valid = false;
  bool beats_bgr = false;
  std::uint64_t seed = 0;
  double seconds = 0.0;

  // final >= extrapolated >= witness distance (witness only when valid).
  bool sandwich_ok(double slack = 1e-9) const;
};

std::string csv_header();
std::string to_csv_row(const ExperimentRecord& r);
ExperimentRecord parse_csv_row(const std::string& line);
// Missing file or empty file gives an empty list; bad header throws.
std::vector<ExperimentRecord> read_records(const std::string& path);
void write_records(const std::string& path, std::vector<ExperimentRecord> records);

struct PipelineResult {
  ExperimentRecord record;
  StateReport validation;
  DecayFit fit;
  WitnessReport gilbert;
  WitnessReport bgr;
  HaltReason halt;
};

/// Full per-state pipeline: build and validate the state, run (or resume)
/// the Gilbert loop, fit the decay, derive both witnesses, and write the
/// artifacts under `<output_dir>/<layout>/`.
PipelineResult run_pipeline(const TileLayout& layout, const RunConfig& cfg,
                            const std::string& output_dir, bool resume = false);

struct BatchSummary {
  int total = 0;
  int completed = 0;
  int skipped = 0;
  int failed = 0;
  int gilbert_valid = 0;
  int beats_bgr = 0;
  int entangled = 0;
  int sandwich_violations = 0;
  std::vector<std::string> failures;
};

BatchSummary run_batch(const std::vector<int>& ds, const RunConfig& cfg,
                       const std::string& output_dir, int parallel, bool force,
                       std::ostream& log);

struct ReportSummary {
  int rows = 0;
  int files = 0;
  int sandwich_violations = 0;
  int bgr_not_beaten = 0;
};

// Writes fig2_<d1>x<d2>.dat per dimension and summary.txt into out_dir.
ReportSummary write_report(const std::string& csv_path, const std::string& out_dir);

inline constexpr const char* kResultsFile = "results.csv";
inline constexpr const char* kFitsFile = "fits.csv";
inline constexpr const char* kErrorsFile = "errors.csv";

}  // namespace upbwit
