#include "upbwit/gilbert.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace upbwit {

namespace {

constexpr const char* kCheckpointMagic = "upbwit-checkpoint";
constexpr int kCheckpointVersion = 1;

std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

[[noreturn]] void bad_checkpoint(const std::string& what) {
  throw std::invalid_argument("checkpoint: " + what);
}

std::string expect_key(std::istream& is, const std::string& key) {
  std::string line;
  if (!std::getline(is, line)) bad_checkpoint("unexpected end of file before '" + key + "'");
  if (line.rfind(key + " ", 0) != 0 && line != key) {
    bad_checkpoint("expected '" + key + "', found '" + line + "'");
  }
  return line.size() > key.size() ? line.substr(key.size() + 1) : std::string{};
}

long long parse_count(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    bad_checkpoint("invalid value for '" + key + "': '" + text + "'");
  }
}

HaltReason parse_halt(const std::string& text) {
  for (HaltReason r : {HaltReason::Running, HaltReason::Corrections, HaltReason::Trials,
                       HaltReason::Seconds, HaltReason::Converged}) {
    if (to_string(r) == text) return r;
  }
  bad_checkpoint("unknown halt reason '" + text + "'");
}

}  // namespace

void GilbertConfig::validate() const {
  if (max_corrections < 1 || max_trials < 1 || !(max_seconds > 0.0) || log_every < 1 ||
      seesaw_iters < 1) {
    throw std::invalid_argument(
        "GilbertConfig: corrections, trials, seconds, log_every and seesaw_iters must be "
        "positive");
  }
}

std::string to_string(HaltReason reason) {
  switch (reason) {
    case HaltReason::Running: return "running";
    case HaltReason::Corrections: return "corrections";
    case HaltReason::Trials: return "trials";
    case HaltReason::Seconds: return "seconds";
    case HaltReason::Converged: return "converged";
  }
  return "unknown";
}

std::optional<LineStep> line_minimize(const DensityMatrix& rho0, const DensityMatrix& rho1,
                                      const DensityMatrix& rho2) {
  const HermitianOp seg = rho2.op() - rho1.op();
  const double denom = hs_inner(seg, seg);
  if (denom < kDegenerateSegment) return std::nullopt;
  const double numer = hs_inner(rho0.op() - rho1.op(), seg);
  const double t = std::clamp(numer / denom, 0.0, 1.0);
  return LineStep{t, DensityMatrix::assume_valid(rho1.op() * (1.0 - t) + rho2.op() * t)};
}

// ---------------------------------------------------------------------------
// GilbertState

GilbertState::GilbertState(DensityMatrix rho0, BipartiteDims dims, std::uint64_t seed,
                           std::string label)
    : rho0_(std::move(rho0)),
      rho1_(DensityMatrix::maximally_mixed(rho0_.dim())),
      dims_(dims),
      rng_(seed),
      label_(std::move(label)),
      residual_(HermitianOp::zero(rho0_.dim())) {
  if (dims_.total() != rho0_.dim()) {
    throw std::invalid_argument("GilbertState: dims do not match rho0");
  }
  refresh();
}

double GilbertState::distance() const { return std::sqrt(sq_dist_); }

void GilbertState::refresh() {
  residual_ = rho0_.op() - rho1_.op();
  residual_on_rho1_ = hs_inner(residual_, rho1_.op());
  sq_dist_ = hs_inner(residual_, residual_);
}

void GilbertState::apply_correction(DensityMatrix next, int log_every) {
  const double before = sq_dist_;
  rho1_ = std::move(next);
  refresh();
  if (sq_dist_ > before + kMonotoneSlack) {
    throw NumericalFault("Gilbert correction increased the distance (" +
                         std::to_string(before) + " -> " + std::to_string(sq_dist_) + ")");
  }
  ++trace_.corrections_done;
  if (trace_.corrections_done % log_every == 0) {
    trace_.points.push_back({trace_.corrections_done, sq_dist_});
  }
}

void GilbertState::log_final_point() {
  if (trace_.points.empty() || trace_.points.back().correction != trace_.corrections_done) {
    trace_.points.push_back({trace_.corrections_done, sq_dist_});
  }
}

void GilbertState::drop_final_point(int log_every) {
  if (!trace_.points.empty() && trace_.points.back().correction % log_every != 0) {
    trace_.points.pop_back();
  }
  if (!trace_.points.empty() && trace_.points.back().correction == 0) {
    trace_.points.pop_back();
  }
}

std::uint64_t GilbertState::rho0_hash() const {
  return stable_hash(operator_to_string(rho0_.op()));
}

// ---------------------------------------------------------------------------
// Loop

std::optional<ProductVector> propose_trial(GilbertState& state, const GilbertConfig& cfg) {
  state.note_trial();
  const ProductVector start = random_product_vector(state.dims(), cfg.real_only, state.rng());
  SeesawResult best =
      seesaw_max(state.residual(), state.dims(), start, cfg.seesaw_iters, cfg.real_only);
  if (best.value - state.residual_on_rho1() > 0.0) return std::move(best.arg);
  return std::nullopt;
}

void resume(GilbertState& state, const GilbertConfig& cfg) {
  cfg.validate();
  state.drop_final_point(cfg.log_every);
  state.set_halt(HaltReason::Running);
  const auto t0 = std::chrono::steady_clock::now();
  for (;;) {
    if (state.trace().corrections_done >= cfg.max_corrections) {
      state.set_halt(HaltReason::Corrections);
      break;
    }
    if (state.squared_distance() <= kConvergedSquaredDistance) {
      state.set_halt(HaltReason::Converged);
      break;
    }
    if (state.trace().trials_used >= cfg.max_trials) {
      state.set_halt(HaltReason::Trials);
      break;
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
    if (elapsed.count() >= cfg.max_seconds) {
      state.set_halt(HaltReason::Seconds);
      break;
    }
    auto trial = propose_trial(state, cfg);
    if (!trial) continue;
    auto step = line_minimize(state.rho0(), state.rho1(), product_projector(*trial));
    if (!step) continue;
    state.apply_correction(std::move(step->rho1), cfg.log_every);
  }
  state.log_final_point();
}

GilbertState run(const DensityMatrix& rho0, const BipartiteDims& dims,
                 const GilbertConfig& cfg, std::string label) {
  cfg.validate();
  GilbertState state(rho0, dims, cfg.seed, std::move(label));
  resume(state, cfg);
  return state;
}

// ---------------------------------------------------------------------------
// Checkpoints

void checkpoint_save(std::ostream& os, const GilbertState& state) {
  std::ostringstream buf;
  buf.precision(17);
  buf << kCheckpointMagic << ' ' << kCheckpointVersion << '\n';
  buf << "layout " << (state.label().empty() ? "-" : state.label()) << '\n';
  buf << "dims " << state.dims().d1 << ' ' << state.dims().d2 << '\n';
  buf << "rho0_hash " << hex64(state.rho0_hash()) << '\n';
  buf << "corrections " << state.trace().corrections_done << '\n';
  buf << "trials " << state.trace().trials_used << '\n';
  buf << "halt " << to_string(state.halt_reason()) << '\n';
  buf << "rng " << state.rng().serialize() << '\n';
  buf << "trace " << state.trace().points.size() << '\n';
  for (const TracePoint& p : state.trace().points) {
    buf << p.correction << ' ' << p.squared_distance << '\n';
  }
  buf << "rho1\n";
  write_operator(buf, state.rho1().op());
  os << buf.str();
}

GilbertState checkpoint_load(std::istream& is, const DensityMatrix& rho0) {
  std::string header;
  if (!std::getline(is, header)) bad_checkpoint("empty file");
  std::istringstream hs(header);
  std::string magic;
  int version = 0;
  if (!(hs >> magic >> version) || magic != kCheckpointMagic) {
    bad_checkpoint("missing '" + std::string(kCheckpointMagic) + "' header");
  }
  if (version != kCheckpointVersion) {
    bad_checkpoint("unsupported version " + std::to_string(version));
  }

  std::string label = expect_key(is, "layout");
  if (label == "-") label.clear();
  std::istringstream ds(expect_key(is, "dims"));
  int d1 = 0, d2 = 0;
  if (!(ds >> d1 >> d2) || d1 < 1 || d2 < 1) bad_checkpoint("invalid dims");
  const std::string hash = expect_key(is, "rho0_hash");
  const long long corrections = parse_count(expect_key(is, "corrections"), "corrections");
  const long long trials = parse_count(expect_key(is, "trials"), "trials");
  const HaltReason halt = parse_halt(expect_key(is, "halt"));
  const std::string rng_text = expect_key(is, "rng");
  const long long npoints = parse_count(expect_key(is, "trace"), "trace");

  GilbertState state(rho0, BipartiteDims(d1, d2), 0, label);
  if (hash != hex64(state.rho0_hash())) {
    bad_checkpoint("reference state hash " + hash + " does not match " +
                   hex64(state.rho0_hash()));
  }
  for (long long k = 0; k < npoints; ++k) {
    std::string line;
    if (!std::getline(is, line)) bad_checkpoint("truncated trace");
    std::istringstream ls(line);
    TracePoint p;
    if (!(ls >> p.correction >> p.squared_distance)) {
      bad_checkpoint("bad trace line '" + line + "'");
    }
    state.trace_.points.push_back(p);
  }
  expect_key(is, "rho1");
  HermitianOp rho1 = read_operator(is);
  if (rho1.dim() != rho0.dim()) bad_checkpoint("rho1 dimension mismatch");

  try {
    state.rng_ = Rng::deserialize(rng_text);
  } catch (const std::invalid_argument&) {
    bad_checkpoint("malformed RNG state");
  }
  state.rho1_ = DensityMatrix::assume_valid(std::move(rho1));
  state.trace_.corrections_done = corrections;
  state.trace_.trials_used = trials;
  state.halt_ = halt;
  state.refresh();
  return state;
}

void checkpoint_save_file(const std::string& path, const GilbertState& state) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path);
  checkpoint_save(os, state);
}

GilbertState checkpoint_load_file(const std::string& path, const DensityMatrix& rho0) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::invalid_argument("cannot open checkpoint " + path);
  return checkpoint_load(is, rho0);
}

void write_trace_csv(std::ostream& os, const GilbertTrace& trace) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "correction,squared_distance\n";
  for (const TracePoint& p : trace.points) {
    buf << p.correction << ',' << p.squared_distance << '\n';
  }
  os << buf.str();
}

}  // namespace upbwit
