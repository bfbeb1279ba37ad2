#pragma once

#include <cstdint>
#include <string>

#include "upbwit/hermitian.hpp"
#include "upbwit/seesaw.hpp"
#include "upbwit/upb_tiles.hpp"

namespace upbwit {

inline constexpr int kDefaultLambdaRestarts = 200;
// A witness is valid when tr(W rho0) is below minus this value.
inline constexpr double kValidityMargin = 1e-10;
// rho1 this close to rho0 gives no usable hyperplane.
inline constexpr double kDegenerateWitness = 1e-8;

enum class WitnessKind { Gilbert, Bgr };
std::string to_string(WitnessKind kind);

struct WitnessReport {
  WitnessKind kind;
  HermitianOp w;
  double lambda = 0.0;
  ProductVector saturator;  // product state with tr(W rho') = 0
  double value_on_rho0 = 0.0;
  bool valid = false;
  double hyperplane_distance = 0.0;
};

/// Heuristic global maximum of <a b| M |a b> over product vectors: the best
/// of `restarts` seesaw runs from Haar-random complex starts. The result is
/// a lower bound on the true maximum.
SeesawResult lambda_max(const HermitianOp& m, const BipartiteDims& dims, int restarts,
                        Rng& rng, int iters = kDefaultSeesawIters);

/// Witness from a Gilbert approximant rho1 of the closest separable state:
///   W = rho1 - rho0 - lambda * 1,  lambda = min over products <ab|rho1 - rho0|ab>,
/// so tr(W sigma) >= 0 on product states and W detects rho0 iff
/// tr[(rho1 - rho0) rho0] < lambda.
WitnessReport gilbert_witness(const DensityMatrix& rho0, const DensityMatrix& rho1,
                              const BipartiteDims& dims, int restarts, Rng& rng);

/// W' = lambda* 1 - rho0 with lambda* the maximal overlap of rho0 with a
/// product state.
WitnessReport bgr_witness(const UpbState& state, int restarts, Rng& rng);

/// Distance from rho0 to the hyperplane tr(W x) = 0 along the traceless
/// direction of W, anchored at the saturating product state.
double hyperplane_distance(const HermitianOp& w, const DensityMatrix& rho0,
                           const ProductVector& saturator);

struct NegativeSpectrum {
  int count = 0;
  double overlap = 0.0;  // tr(P_neg P_support) / max(count, rank(P_support))
  RVector values;        // negative eigenvalues of the traceless part, ascending
};
NegativeSpectrum negative_spectrum(const HermitianOp& w, const HermitianOp& support);

// Writes `<stem>.txt` (operator) and `<stem>.json` (metadata).
void write_witness(const std::string& stem, const WitnessReport& report,
                   const std::string& layout, std::uint64_t seed);
std::string witness_metadata_json(const WitnessReport& report, const std::string& layout,
                                  std::uint64_t seed);

}  // namespace upbwit
