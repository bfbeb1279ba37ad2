#include "upbwit/witness.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace upbwit {

std::string to_string(WitnessKind kind) {
  return kind == WitnessKind::Gilbert ? "gilbert" : "bgr";
}

SeesawResult lambda_max(const HermitianOp& m, const BipartiteDims& dims, int restarts,
                        Rng& rng, int iters) {
  return seesaw_multistart(m, dims, restarts, rng, iters, /*real_only=*/false);
}

double hyperplane_distance(const HermitianOp& w, const DensityMatrix& rho0,
                           const ProductVector& saturator) {
  const HermitianOp direction = traceless_part(w);
  const double norm = hs_norm(direction);
  if (norm < 1e-12) {
    throw std::invalid_argument("hyperplane_distance: witness has no traceless part");
  }
  const HermitianOp offset = rho0.op() - product_projector(saturator).op();
  return std::abs(hs_inner(direction, offset)) / norm;
}

WitnessReport gilbert_witness(const DensityMatrix& rho0, const DensityMatrix& rho1,
                              const BipartiteDims& dims, int restarts, Rng& rng) {
  const HermitianOp gap = rho1.op() - rho0.op();
  // min <ab|rho1 - rho0|ab> = -max <ab|rho0 - rho1|ab>
  SeesawResult best = lambda_max(-gap, dims, restarts, rng);
  const double lambda = -best.value;
  HermitianOp w = gap - HermitianOp::identity(gap.dim()) * lambda;
  const double value = hs_inner(w, rho0.op());
  const bool degenerate = hs_norm(gap) < kDegenerateWitness;

  WitnessReport rep{WitnessKind::Gilbert, std::move(w), lambda, std::move(best.arg), value,
                    !degenerate && value < -kValidityMargin, 0.0};
  if (!degenerate) rep.hyperplane_distance = hyperplane_distance(rep.w, rho0, rep.saturator);
  return rep;
}

WitnessReport bgr_witness(const UpbState& state, int restarts, Rng& rng) {
  const BipartiteDims& dims = state.layout.dims();
  SeesawResult best = lambda_max(state.rho.op(), dims, restarts, rng);
  HermitianOp w = HermitianOp::identity(dims.total()) * best.value - state.rho.op();
  const double value = hs_inner(w, state.rho.op());
  WitnessReport rep{WitnessKind::Bgr, std::move(w), best.value, std::move(best.arg), value,
                    value < -kValidityMargin, 0.0};
  rep.hyperplane_distance = hyperplane_distance(rep.w, state.rho, rep.saturator);
  return rep;
}

NegativeSpectrum negative_spectrum(const HermitianOp& w, const HermitianOp& support) {
  const EigenDecomposition eig = eig_hermitian(traceless_part(w));
  const int n = w.dim();
  NegativeSpectrum out;
  for (int k = 0; k < n; ++k)
    if (eig.values(k) < 0.0) ++out.count;
  out.values = eig.values.tail(out.count).reverse();
  const CMatrix neg = eig.vectors.rightCols(out.count);
  const double captured = (neg.adjoint() * support.matrix() * neg).trace().real();
  const int rank = numerical_rank(support, 0.5);
  out.overlap = captured / std::max(out.count, rank);
  return out;
}

std::string witness_metadata_json(const WitnessReport& report, const std::string& layout,
                                  std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["layout"] = layout;
  j["kind"] = to_string(report.kind);
  j["lambda"] = report.lambda;
  j["value_on_rho0"] = report.value_on_rho0;
  j["hyperplane_distance"] = report.hyperplane_distance;
  j["valid"] = report.valid;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

void write_witness(const std::string& stem, const WitnessReport& report,
                   const std::string& layout, std::uint64_t seed) {
  std::ofstream op(stem + ".txt", std::ios::binary);
  std::ofstream meta(stem + ".json", std::ios::binary);
  if (!op || !meta) throw std::runtime_error("cannot write witness files for " + stem);
  write_operator(op, report.w);
  meta << witness_metadata_json(report, layout, seed);
}

}  // namespace upbwit
