#include "upbwit/seesaw.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace upbwit {

namespace {

CVector top_eigenvector(const CMatrix& reduced, bool real_only) {
  if (real_only) {
    // For real x, x^T O x only sees the symmetric real part of O.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced.real());
    const Eigen::VectorXd v = solver.eigenvectors().col(reduced.rows() - 1);
    return v.cast<Complex>();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(reduced);
  return solver.eigenvectors().col(reduced.rows() - 1);
}

}  // namespace

CMatrix reduce_on_second(const HermitianOp& m, const BipartiteDims& dims,
                         const CVector& b) {
  const CMatrix& mm = m.matrix();
  CMatrix out(dims.d1, dims.d1);
  CVector mb(dims.d2);
  for (int i = 0; i < dims.d1; ++i) {
    for (int ip = 0; ip < dims.d1; ++ip) {
      mb.noalias() = mm.block(i * dims.d2, ip * dims.d2, dims.d2, dims.d2) * b;
      out(i, ip) = b.dot(mb);
    }
  }
  return 0.5 * (out + out.adjoint());
}

CMatrix reduce_on_first(const HermitianOp& m, const BipartiteDims& dims,
                        const CVector& a) {
  const CMatrix& mm = m.matrix();
  CMatrix out = CMatrix::Zero(dims.d2, dims.d2);
  for (int i = 0; i < dims.d1; ++i) {
    for (int ip = 0; ip < dims.d1; ++ip) {
      out += (std::conj(a(i)) * a(ip)) *
             mm.block(i * dims.d2, ip * dims.d2, dims.d2, dims.d2);
    }
  }
  return 0.5 * (out + out.adjoint());
}

SeesawResult seesaw_max(const HermitianOp& m, const BipartiteDims& dims,
                        const ProductVector& start, int iters, bool real_only) {
  if (m.dim() != dims.total() || start.dims() != dims) {
    throw std::invalid_argument("seesaw_max: dimension mismatch");
  }
  CVector a = start.a();
  CVector b = start.b();
  if (real_only) {
    a = a.real().cast<Complex>();
    b = b.real().cast<Complex>();
    if (a.norm() == 0.0 || b.norm() == 0.0) {
      throw std::invalid_argument("seesaw_max: real_only start has a zero real part");
    }
    a.normalize();
    b.normalize();
  }

  double value = b.dot(reduce_on_first(m, dims, a) * b).real();
  int it = 0;
  while (it < iters) {
    ++it;
    a = top_eigenvector(reduce_on_second(m, dims, b), real_only);
    const CMatrix ob = reduce_on_first(m, dims, a);
    b = top_eigenvector(ob, real_only);
    const double next = b.dot(ob * b).real();
    const bool stalled = std::abs(next - value) < kSeesawStallTol;
    value = next;
    if (stalled) break;
  }
  return SeesawResult{value, ProductVector::normalized(std::move(a), std::move(b)), it};
}

SeesawResult seesaw_multistart(const HermitianOp& m, const BipartiteDims& dims,
                               int restarts, Rng& rng, int iters, bool real_only) {
  if (restarts < 1) throw std::invalid_argument("seesaw_multistart: restarts must be >= 1");
  std::optional<SeesawResult> best;
  for (int r = 0; r < restarts; ++r) {
    Rng child = rng.split();
    const ProductVector start = random_product_vector(dims, real_only, child);
    SeesawResult res = seesaw_max(m, dims, start, iters, real_only);
    if (!best || res.value > best->value) best = std::move(res);
  }
  return *best;
}

}  // namespace upbwit
