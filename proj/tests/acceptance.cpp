// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "upbwit/harness.hpp"

using namespace upbwit;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kTraceTol = 1e-10;
constexpr double kPsdTol = 1e-10;
constexpr double kStopperTol = 1e-12;
constexpr double kFamilySeconds = 60.0;
constexpr double kLineTol = 1e-4;
constexpr int kLineTriples = 50;
constexpr double kSeparableDistance = 1e-3;
constexpr long long kSeparableCorrections = 2000;
constexpr long long kCorrections3 = 10000;
constexpr long long kCorrectionsHigh = 3500;
constexpr int kStatesPerDim = 5;
constexpr double kBand3Lo = 0.05, kBand3Hi = 0.10;
constexpr double kBandHighLo = 0.04, kBandHighHi = 0.12;
constexpr int kAcceptanceRestarts = 2000;
constexpr double kWitnessValue = -1e-6;
constexpr int kAuditSamples = 100000;
constexpr double kAuditTol = -1e-9;
constexpr int kNegativeCount = 4;
constexpr double kNegativeOverlap = 0.99;
constexpr long long kCorrections4 = 4000;
constexpr int kBeatRequired4 = 8;
constexpr double kSandwichSlack = 1e-9;
constexpr double kFitRelTol = 0.10;
constexpr double kFitR = 0.99;
constexpr long long kDeterminismCorrections = 2000;

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

RunConfig config(long long corrections, std::uint64_t seed = 1) {
  RunConfig c;
  c.corrections = corrections;
  c.lambda_restarts = kAcceptanceRestarts;
  c.seed = seed;
  return c;
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::size_t> expected{1, 9, 36, 100};
  bool counts = true, states = true;
  int checked = 0;
  for (int d = 3; d <= 6; ++d) {
    const auto layouts = enumerate_layouts({d, d});
    counts = counts && layouts.size() == expected[d - 3];
    for (const auto& t : layouts) {
      const UpbState s = build_state(t);
      const HermitianOp& rho = s.rho.op();
      const bool ok = std::abs(rho.trace() - 1.0) <= kTraceTol &&
                      min_eigenvalue(rho) >= -kPsdTol &&
                      min_eigenvalue(partial_transpose(rho, t.dims())) >= -kPsdTol &&
                      numerical_rank(rho, 1e-8) == 4 &&
                      std::abs(hs_inner(rho, stopper_projector(t.dims()))) <= kStopperTol;
      if (!ok) std::printf("  state %s violates an invariant\n", t.name().c_str());
      states = states && ok;
      ++checked;
    }
  }
  const double secs = seconds_since(t0);
  report(1, counts && states && secs < kFamilySeconds,
         "counts 1/9/36/100 " + std::string(counts ? "ok" : "wrong") + ", " +
             std::to_string(checked) + " states " + (states ? "valid" : "INVALID") + ", " +
             fmt(secs) + " s");
}

void criterion2() {
  Rng rng(2024);
  double worst_t = 0.0;
  for (int d = 3; d <= 6; ++d) {
    const BipartiteDims dims(d, d);
    const int dim = dims.total();
    for (int k = 0; k < kLineTriples; ++k) {
      const DensityMatrix r0(HermitianOp(oracle::random_density(dim, 1 + k % dim, rng)));
      const DensityMatrix r1(HermitianOp(oracle::random_density(dim, dim, rng)));
      const DensityMatrix r2 = product_projector(random_product_vector(dims, false, rng));
      const auto step = line_minimize(r0, r1, r2);
      const double t_scan = oracle::scan_line_argmin(r0.matrix(), r1.matrix(), r2.matrix());
      worst_t = std::max(worst_t, step ? std::abs(step->t - t_scan) : 1.0);
    }
  }
  double worst_sep = 0.0;
  for (int d = 3; d <= 6; ++d) {
    const BipartiteDims dims(d, d);
    const DensityMatrix rho0 = product_projector(random_product_vector(dims, false, rng));
    GilbertConfig cfg;
    cfg.max_corrections = kSeparableCorrections;
    cfg.seed = 100 + d;
    const GilbertState s = run(rho0, dims, cfg);
    worst_sep = std::max(worst_sep, s.distance());
  }
  report(2, worst_t <= kLineTol && worst_sep < kSeparableDistance,
         "max |t - t_scan| " + fmt(worst_t) + " over " + std::to_string(4 * kLineTriples) +
             " triples; max distance to product references " + fmt(worst_sep));
}

struct Runs {
  std::optional<PipelineResult> three;
  std::vector<PipelineResult> high;
  std::vector<PipelineResult> four;
};

void criterion3(const fs::path& out, Runs& runs) {
  runs.three = run_pipeline(TileLayout({3, 3}, 2, 2, 2, 2), config(kCorrections3),
                            (out / "c3").string());
  const double s3 = runs.three->fit.sqrt_a();
  bool ok = s3 > kBand3Lo && s3 < kBand3Hi;
  std::string detail = "3x3 sqrt(a) " + fmt(s3) + " (band " + fmt(kBand3Lo) + ".." +
                       fmt(kBand3Hi) + ")";

  Rng pick(31337);
  int inside = 0, total = 0;
  double lo = 1e300, hi = 0.0;
  for (int d = 4; d <= 6; ++d) {
    auto layouts = enumerate_layouts({d, d});
    for (int k = 0; k < kStatesPerDim; ++k) {
      const std::size_t idx = pick.next_u64() % layouts.size();
      const TileLayout t = layouts[idx];
      layouts.erase(layouts.begin() + idx);
      runs.high.push_back(run_pipeline(t, config(kCorrectionsHigh), (out / "c3").string()));
      const double s = runs.high.back().fit.sqrt_a();
      std::printf("  %s sqrt(a) %s\n", t.name().c_str(), fmt(s).c_str());
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      ++total;
      inside += s > kBandHighLo && s < kBandHighHi;
    }
  }
  ok = ok && inside == total;
  detail += "; d=4..6: " + std::to_string(inside) + "/" + std::to_string(total) +
            " in band " + fmt(kBandHighLo) + ".." + fmt(kBandHighHi) + " (range " + fmt(lo) +
            ".." + fmt(hi) + ")";
  report(3, ok, detail);
}

void criterion4(const Runs& runs) {
  const UpbState s = build_state(TileLayout({3, 3}, 2, 2, 2, 2));
  const WitnessReport& w = runs.three->gilbert;
  const bool valid = w.valid && w.value_on_rho0 < kWitnessValue;
  Rng audit(4242);
  double worst = 1e300;
  for (int k = 0; k < kAuditSamples; ++k) {
    const CVector a = oracle::gaussian_unit(3, audit);
    const CVector b = oracle::gaussian_unit(3, audit);
    worst = std::min(worst, oracle::product_value(w.w.matrix(), {3, 3}, a, b));
  }
  const NegativeSpectrum neg = negative_spectrum(w.w, s.support);
  std::string values;
  for (int k = 0; k < neg.values.size(); ++k) values += (k ? " " : "") + fmt(neg.values(k));
  report(4,
         valid && worst >= kAuditTol && neg.count == kNegativeCount &&
             neg.overlap >= kNegativeOverlap,
         "tr(W rho0) " + fmt(w.value_on_rho0) + ", min over " + std::to_string(kAuditSamples) +
             " products " + fmt(worst) + ", negative eigenvalues " +
             std::to_string(neg.count) + " [" + values + "], overlap with support " +
             fmt(neg.overlap) + " (need >= " + fmt(kNegativeOverlap) + ")");
}

void criterion5(const fs::path& out, Runs& runs) {
  for (const auto& t : enumerate_layouts({4, 4}))
    runs.four.push_back(run_pipeline(t, config(kCorrections4), (out / "c5").string()));
  const auto beats = [](const PipelineResult& r) {
    return r.gilbert.valid && r.record.gilbert_witness_distance > r.record.bgr_distance;
  };
  const bool three = beats(*runs.three);
  int four = 0;
  for (const auto& r : runs.four) four += beats(r);

  int tested = 0, violations = 0;
  auto sandwich = [&](const PipelineResult& r) {
    if (!r.gilbert.valid) return;
    ++tested;
    if (!r.record.sandwich_ok(kSandwichSlack)) {
      ++violations;
      std::printf("  sandwich violated: %s\n", r.record.layout.c_str());
    }
  };
  sandwich(*runs.three);
  for (const auto& r : runs.high) sandwich(r);
  for (const auto& r : runs.four) sandwich(r);
  report(5, three && four >= kBeatRequired4 && violations == 0,
         std::string("3x3 gilbert ") + fmt(runs.three->record.gilbert_witness_distance) +
             " vs bgr " + fmt(runs.three->record.bgr_distance) + "; 4x4 beats bgr " +
             std::to_string(four) + "/9; sandwich ok on " +
             std::to_string(tested - violations) + "/" + std::to_string(tested) +
             " valid states");
}

void criterion6() {
  double worst_rel = 0.0, worst_r = 1.0;
  for (double a0 : {1e-4, 1e-3, 6.4e-3}) {
    GilbertTrace t;
    for (int c = 50; c <= 5000; c += 50)
      t.points.push_back({c, a0 + std::exp(-std::sqrt(c / 300.0))});
    const DecayFit fit = fit_decay(t);
    worst_rel = std::max(worst_rel, std::abs(fit.a - a0) / a0);
    worst_r = std::min(worst_r, std::abs(fit.r));
  }
  report(6, worst_rel <= kFitRelTol && worst_r > kFitR,
         "max relative error in a " + fmt(worst_rel) + ", min |r| " + fmt(worst_r));
}

void criterion7(const fs::path& out) {
  const TileLayout t({3, 3}, 2, 2, 2, 2);
  RunConfig cfg = config(kDeterminismCorrections, 7);
  run_pipeline(t, cfg, (out / "c7a").string());
  run_pipeline(t, cfg, (out / "c7b").string());
  bool same = true;
  for (const char* f : {"trace.csv", "gilbert_witness.json", "bgr_witness.json"}) {
    const std::string a = slurp(out / "c7a" / t.name() / f);
    same = same && !a.empty() && a == slurp(out / "c7b" / t.name() / f);
  }
  report(7, same, same ? "trace and witness metadata byte-identical"
                       : "outputs differ between runs");
}

}  // namespace

int main() {
  const fs::path out = fs::temp_directory_path() / "upbwit-acceptance";
  fs::remove_all(out);
  fs::create_directories(out);
  const auto t0 = std::chrono::steady_clock::now();

  criterion1();
  criterion2();
  Runs runs;
  criterion3(out, runs);
  criterion4(runs);
  criterion5(out, runs);
  criterion6();
  criterion7(out);

  std::printf("%d of 7 criteria failed (%.0f s)\n", failures, seconds_since(t0));
  return failures;
}
