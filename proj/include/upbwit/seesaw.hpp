#pragma once

#include "upbwit/hermitian.hpp"

namespace upbwit {

inline constexpr int kDefaultSeesawIters = 200;
inline constexpr double kSeesawStallTol = 1e-12;

struct SeesawResult {
  double value = 0.0;  // <a b| M |a b>
  ProductVector arg;
  int iterations = 0;
};

/// Local maximum of <a b| M |a b> over product vectors by alternating
/// top-eigenvector updates of the two reduced operators. The value never
/// decreases between iterations. With `real_only` both factors stay real.
SeesawResult seesaw_max(const HermitianOp& m, const BipartiteDims& dims,
                        const ProductVector& start, int iters = kDefaultSeesawIters,
                        bool real_only = false);

/// Best of `restarts` seesaw runs from Haar-random starts. Restart r draws
/// its start from the r-th split of `rng`; ties keep the lowest index.
SeesawResult seesaw_multistart(const HermitianOp& m, const BipartiteDims& dims,
                               int restarts, Rng& rng,
                               int iters = kDefaultSeesawIters,
                               bool real_only = false);

// d1 x d1 operator b^H M_(i,i') b, and the d2 x d2 analogue for fixed a.
CMatrix reduce_on_second(const HermitianOp& m, const BipartiteDims& dims,
                         const CVector& b);
CMatrix reduce_on_first(const HermitianOp& m, const BipartiteDims& dims,
                        const CVector& a);

}  // namespace upbwit
