#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "upbwit/rng.hpp"

namespace upbwit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Elementwise Hermiticity tolerance for operators handed in from outside.
inline constexpr double kConstructTol = 1e-12;
// Looser tolerance for quantities derived through long arithmetic chains.
inline constexpr double kDerivedTol = 1e-10;

/// Raised when an internal construction produces an object that violates
/// its mathematical contract (e.g. a projector that is not idempotent).
class NumericalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BipartiteDims {
  int d1 = 0;
  int d2 = 0;

  BipartiteDims() = default;
  BipartiteDims(int d1_, int d2_);

  int total() const { return d1 * d2; }
  // Composite index (i, j) -> i*d2 + j, zero-based.
  int index(int i, int j) const { return i * d2 + j; }
  bool operator==(const BipartiteDims&) const = default;
};

/// Dense complex Hermitian operator of dimension D >= 2.
///
/// The stored matrix is exactly Hermitian: construction checks the input
/// against a tolerance and then replaces it by its Hermitian part, so every
/// downstream trace of a product of two operators is real up to rounding.
class HermitianOp {
 public:
  explicit HermitianOp(CMatrix m, double tol = kConstructTol);

  static HermitianOp zero(int dim);
  static HermitianOp identity(int dim);
  // Hermitian part of an arbitrary square matrix, no tolerance check.
  static HermitianOp hermitian_part(const CMatrix& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }
  double trace() const { return m_.trace().real(); }

  HermitianOp operator+(const HermitianOp& other) const;
  HermitianOp operator-(const HermitianOp& other) const;
  HermitianOp operator-() const;
  HermitianOp operator*(double s) const;
  HermitianOp& operator+=(const HermitianOp& other);
  HermitianOp& operator-=(const HermitianOp& other);
  HermitianOp& operator*=(double s);

  // Exact elementwise equality, used by checkpoint round-trip checks.
  bool operator==(const HermitianOp& other) const { return m_ == other.m_; }

 private:
  struct Trusted {};
  HermitianOp(CMatrix m, Trusted) : m_(std::move(m)) {}

  CMatrix m_;
};

inline HermitianOp operator*(double s, const HermitianOp& a) { return a * s; }

/// Unit-trace positive semidefinite operator.
class DensityMatrix {
 public:
  // Checks trace and spectrum; throws std::invalid_argument on failure.
  explicit DensityMatrix(HermitianOp op, double tol = kDerivedTol);

  // Skips the spectral check. For states that are convex combinations of
  // known states, where the check would cost an eigendecomposition per step.
  static DensityMatrix assume_valid(HermitianOp op);

  static DensityMatrix maximally_mixed(int dim);

  const HermitianOp& op() const { return op_; }
  int dim() const { return op_.dim(); }
  const CMatrix& matrix() const { return op_.matrix(); }

 private:
  struct Unchecked {};
  DensityMatrix(HermitianOp op, Unchecked) : op_(std::move(op)) {}

  HermitianOp op_;
};

/// Pure product state |a> (x) |b> with unit-norm local factors.
class ProductVector {
 public:
  ProductVector(CVector a, CVector b, double tol = kConstructTol);

  // Normalizes both factors first; rejects zero vectors.
  static ProductVector normalized(CVector a, CVector b);

  const CVector& a() const { return a_; }
  const CVector& b() const { return b_; }
  BipartiteDims dims() const {
    return {static_cast<int>(a_.size()), static_cast<int>(b_.size())};
  }
  // The joint vector a (x) b with composite index i*d2 + j.
  CVector joint() const;

 private:
  CVector a_;
  CVector b_;
};

struct EigenDecomposition {
  RVector values;   // descending
  CMatrix vectors;  // column k pairs with values(k)
};

// tr(A B)
double hs_inner(const HermitianOp& a, const HermitianOp& b);
// sqrt(tr (A - B)^2)
double hs_distance(const HermitianOp& a, const HermitianOp& b);
double hs_norm(const HermitianOp& a);

DensityMatrix product_projector(const ProductVector& p);

// <a (x) b| M |a (x) b> without forming the joint vector.
double product_expectation(const HermitianOp& m, const ProductVector& p);

// Transpose on the second tensor factor.
HermitianOp partial_transpose(const HermitianOp& a, const BipartiteDims& dims);

EigenDecomposition eig_hermitian(const HermitianOp& a);
double min_eigenvalue(const HermitianOp& a);
// Number of eigenvalues above `threshold`.
int numerical_rank(const HermitianOp& a, double threshold = 0.5);

HermitianOp traceless_part(const HermitianOp& a);

/// Haar-distributed unit vector in C^d (or R^d when `real_only`), drawn as a
/// normalized vector of i.i.d. standard Gaussian entries.
CVector random_local_state(int d, bool real_only, Rng& rng);

ProductVector random_product_vector(const BipartiteDims& dims, bool real_only,
                                    Rng& rng);

// Operator text format: first line "D", then D rows of D "re,im" tokens.
void write_operator(std::ostream& os, const HermitianOp& a);
HermitianOp read_operator(std::istream& is);
std::string operator_to_string(const HermitianOp& a);
HermitianOp operator_from_string(const std::string& text);

}  // namespace upbwit
