#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "upbwit/hermitian.hpp"
#include "upbwit/seesaw.hpp"

namespace upbwit {

// Trials whose segment length tr(rho2 - rho1)^2 falls below this are skipped.
inline constexpr double kDegenerateSegment = 1e-15;
// Allowed growth of the squared distance per correction (rounding only).
inline constexpr double kMonotoneSlack = 1e-14;
// Squared distances below this are rounding noise: rho1 has reached rho0.
inline constexpr double kConvergedSquaredDistance = 1e-24;

struct GilbertConfig {
  // Corrections and trials are totals, counted across resumed runs.
  long long max_corrections = 1000;
  long long max_trials = std::numeric_limits<long long>::max();
  // Wall-clock budget of a single invocation.
  double max_seconds = std::numeric_limits<double>::infinity();
  int log_every = 50;
  int seesaw_iters = kDefaultSeesawIters;
  bool real_only = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TracePoint {
  long long correction = 0;
  double squared_distance = 0.0;
  bool operator==(const TracePoint&) const = default;
};

struct GilbertTrace {
  std::vector<TracePoint> points;
  long long trials_used = 0;
  long long corrections_done = 0;
  bool operator==(const GilbertTrace&) const = default;
};

// Converged: rho1 reached rho0 up to rounding; further trials would all be rejected.
enum class HaltReason { Running, Corrections, Trials, Seconds, Converged };
std::string to_string(HaltReason reason);

struct LineStep {
  double t = 0.0;
  DensityMatrix rho1;
};

/// Closest point to rho0 on the segment (1-t) rho1 + t rho2, t in [0, 1].
/// Returns nullopt when the segment is degenerate.
std::optional<LineStep> line_minimize(const DensityMatrix& rho0, const DensityMatrix& rho1,
                                      const DensityMatrix& rho2);

/// Working state of one Gilbert run: the reference state, the current
/// separable approximant (a convex mixture of product projectors, stored
/// densely), the distance trace and the generator.
class GilbertState {
 public:
  // Starts from the maximally mixed state.
  GilbertState(DensityMatrix rho0, BipartiteDims dims, std::uint64_t seed,
               std::string label = {});

  const DensityMatrix& rho0() const { return rho0_; }
  const DensityMatrix& rho1() const { return rho1_; }
  const BipartiteDims& dims() const { return dims_; }
  const GilbertTrace& trace() const { return trace_; }
  const std::string& label() const { return label_; }
  HaltReason halt_reason() const { return halt_; }
  double squared_distance() const { return sq_dist_; }
  double distance() const;
  Rng& rng() { return rng_; }
  const Rng& rng() const { return rng_; }

  // rho0 - rho1, refreshed after every correction.
  const HermitianOp& residual() const { return residual_; }
  // tr[(rho0 - rho1) rho1]
  double residual_on_rho1() const { return residual_on_rho1_; }

  void note_trial() { ++trace_.trials_used; }
  // Replaces rho1 after an accepted step and logs the trace.
  void apply_correction(DensityMatrix next, int log_every);
  void log_final_point();
  void drop_final_point(int log_every);
  void set_halt(HaltReason reason) { halt_ = reason; }

  std::uint64_t rho0_hash() const;

 private:
  friend GilbertState checkpoint_load(std::istream&, const DensityMatrix&);
  void refresh();

  DensityMatrix rho0_;
  DensityMatrix rho1_;
  BipartiteDims dims_;
  GilbertTrace trace_;
  Rng rng_;
  std::string label_;
  HaltReason halt_ = HaltReason::Running;
  HermitianOp residual_;
  double residual_on_rho1_ = 0.0;
  double sq_dist_ = 0.0;
};

/// One Gilbert trial: a random (optionally real) product start, improved by
/// a seesaw on rho0 - rho1. Returns the product state when it gives a
/// positive objective tr[(rho0 - rho1)(rho2 - rho1)], nullopt otherwise.
/// Always counts one trial.
std::optional<ProductVector> propose_trial(GilbertState& state, const GilbertConfig& cfg);

GilbertState run(const DensityMatrix& rho0, const BipartiteDims& dims,
                 const GilbertConfig& cfg, std::string label = {});

// Continues `state` until one of the limits in `cfg` is reached.
void resume(GilbertState& state, const GilbertConfig& cfg);

void checkpoint_save(std::ostream& os, const GilbertState& state);
// Rejects files that are malformed or were written for a different rho0.
GilbertState checkpoint_load(std::istream& is, const DensityMatrix& rho0);
void checkpoint_save_file(const std::string& path, const GilbertState& state);
GilbertState checkpoint_load_file(const std::string& path, const DensityMatrix& rho0);

// "correction,squared_distance" with a header line.
void write_trace_csv(std::ostream& os, const GilbertTrace& trace);

}  // namespace upbwit
