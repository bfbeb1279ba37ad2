#include "upbwit/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <vector>

namespace upbwit {

namespace {

void require_same_dim(const HermitianOp& a, const HermitianOp& b,
                      const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()) + ")");
  }
}

// Rotate so the largest-magnitude component is real and positive.
void fix_phase(Eigen::Ref<CVector> v) {
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  const double mag = std::abs(v(k));
  if (mag > 0.0) v *= std::conj(v(k)) / mag;
}

bool lexicographic_less(const CVector& x, const CVector& y) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i).real() != y(i).real()) return x(i).real() < y(i).real();
    if (x(i).imag() != y(i).imag()) return x(i).imag() < y(i).imag();
  }
  return false;
}

}  // namespace

BipartiteDims::BipartiteDims(int d1_, int d2_) : d1(d1_), d2(d2_) {
  if (d1 < 1 || d2 < 1) {
    throw std::invalid_argument("bipartite dimensions must be positive");
  }
}

// ---------------------------------------------------------------------------
// HermitianOp

HermitianOp::HermitianOp(CMatrix m, double tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("HermitianOp: matrix is not square");
  }
  if (m.rows() < 2) {
    throw std::invalid_argument("HermitianOp: dimension must be at least 2");
  }
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (asym > tol) {
    throw std::invalid_argument("HermitianOp: matrix is not Hermitian (max |A - A^H| = " +
                                std::to_string(asym) + ")");
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOp HermitianOp::zero(int dim) {
  return HermitianOp(CMatrix::Zero(dim, dim));
}

HermitianOp HermitianOp::identity(int dim) {
  return HermitianOp(CMatrix::Identity(dim, dim));
}

HermitianOp HermitianOp::hermitian_part(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw std::invalid_argument("HermitianOp: need a square matrix of size >= 2");
  }
  return HermitianOp(CMatrix(0.5 * (m + m.adjoint())), Trusted{});
}

HermitianOp HermitianOp::operator+(const HermitianOp& other) const {
  require_same_dim(*this, other, "operator+");
  return HermitianOp(CMatrix(m_ + other.m_), Trusted{});
}

HermitianOp HermitianOp::operator-(const HermitianOp& other) const {
  require_same_dim(*this, other, "operator-");
  return HermitianOp(CMatrix(m_ - other.m_), Trusted{});
}

HermitianOp HermitianOp::operator-() const {
  return HermitianOp(CMatrix(-m_), Trusted{});
}

HermitianOp HermitianOp::operator*(double s) const {
  return HermitianOp(CMatrix(m_ * s), Trusted{});
}

HermitianOp& HermitianOp::operator+=(const HermitianOp& other) {
  require_same_dim(*this, other, "operator+=");
  m_ += other.m_;
  return *this;
}

HermitianOp& HermitianOp::operator-=(const HermitianOp& other) {
  require_same_dim(*this, other, "operator-=");
  m_ -= other.m_;
  return *this;
}

HermitianOp& HermitianOp::operator*=(double s) {
  m_ *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(HermitianOp op, double tol) : op_(std::move(op)) {
  const double tr = op_.trace();
  if (std::abs(tr - 1.0) > tol) {
    throw std::invalid_argument("DensityMatrix: trace is " + std::to_string(tr));
  }
  const double lo = min_eigenvalue(op_);
  if (lo < -tol) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                std::to_string(lo));
  }
}

DensityMatrix DensityMatrix::assume_valid(HermitianOp op) {
  return DensityMatrix(std::move(op), Unchecked{});
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return assume_valid(HermitianOp::identity(dim) * (1.0 / dim));
}

// ---------------------------------------------------------------------------
// ProductVector

ProductVector::ProductVector(CVector a, CVector b, double tol)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.size() < 1 || b_.size() < 1) {
    throw std::invalid_argument("ProductVector: empty factor");
  }
  if (std::abs(a_.norm() - 1.0) > tol || std::abs(b_.norm() - 1.0) > tol) {
    throw std::invalid_argument("ProductVector: factors must have unit norm");
  }
}

ProductVector ProductVector::normalized(CVector a, CVector b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("ProductVector: zero factor");
  }
  return ProductVector(a / na, b / nb);
}

CVector ProductVector::joint() const {
  const Eigen::Index d2 = b_.size();
  CVector v(a_.size() * d2);
  for (Eigen::Index i = 0; i < a_.size(); ++i) {
    v.segment(i * d2, d2) = a_(i) * b_;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Operations

double hs_inner(const HermitianOp& a, const HermitianOp& b) {
  require_same_dim(a, b, "hs_inner");
  // tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B.
  return (a.matrix().array() * b.matrix().conjugate().array()).sum().real();
}

double hs_norm(const HermitianOp& a) { return a.matrix().norm(); }

double hs_distance(const HermitianOp& a, const HermitianOp& b) {
  require_same_dim(a, b, "hs_distance");
  return (a.matrix() - b.matrix()).norm();
}

DensityMatrix product_projector(const ProductVector& p) {
  const CVector v = p.joint();
  return DensityMatrix::assume_valid(HermitianOp::hermitian_part(v * v.adjoint()));
}

double product_expectation(const HermitianOp& m, const ProductVector& p) {
  const CVector v = p.joint();
  if (v.size() != m.dim()) {
    throw std::invalid_argument("product_expectation: dimension mismatch");
  }
  return v.dot(m.matrix() * v).real();
}

HermitianOp partial_transpose(const HermitianOp& a, const BipartiteDims& dims) {
  if (dims.total() != a.dim()) {
    throw std::invalid_argument("partial_transpose: dims do not match operator");
  }
  CMatrix out(a.dim(), a.dim());
  for (int i = 0; i < dims.d1; ++i)
    for (int j = 0; j < dims.d2; ++j)
      for (int ip = 0; ip < dims.d1; ++ip)
        for (int jp = 0; jp < dims.d2; ++jp)
          out(dims.index(i, j), dims.index(ip, jp)) =
              a(dims.index(i, jp), dims.index(ip, j));
  return HermitianOp::hermitian_part(out);
}

EigenDecomposition eig_hermitian(const HermitianOp& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalFault("eig_hermitian: eigensolver did not converge");
  }
  const Eigen::Index n = a.dim();
  CMatrix vecs = solver.eigenvectors();
  for (Eigen::Index k = 0; k < n; ++k) fix_phase(vecs.col(k));

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  const RVector& vals = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    if (vals(x) != vals(y)) return vals(x) > vals(y);
    return lexicographic_less(vecs.col(x), vecs.col(y));
  });

  EigenDecomposition out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = vals(order[k]);
    out.vectors.col(k) = vecs.col(order[k]);
  }
  return out;
}

double min_eigenvalue(const HermitianOp& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalFault("min_eigenvalue: eigensolver did not converge");
  }
  return solver.eigenvalues()(0);
}

int numerical_rank(const HermitianOp& a, double threshold) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
  return static_cast<int>((solver.eigenvalues().array() > threshold).count());
}

HermitianOp traceless_part(const HermitianOp& a) {
  const double shift = a.trace() / a.dim();
  CMatrix m = a.matrix();
  m.diagonal().array() -= shift;
  return HermitianOp::hermitian_part(m);
}

CVector random_local_state(int d, bool real_only, Rng& rng) {
  if (d < 2) throw std::invalid_argument("random_local_state: d must be >= 2");
  CVector v(d);
  for (int i = 0; i < d; ++i) {
    const double re = rng.normal();
    const double im = real_only ? 0.0 : rng.normal();
    v(i) = Complex(re, im);
  }
  return v / v.norm();
}

ProductVector random_product_vector(const BipartiteDims& dims, bool real_only,
                                    Rng& rng) {
  CVector a = random_local_state(dims.d1, real_only, rng);
  CVector b = random_local_state(dims.d2, real_only, rng);
  return ProductVector(std::move(a), std::move(b));
}

// ---------------------------------------------------------------------------
// Text serialization

void write_operator(std::ostream& os, const HermitianOp& a) {
  std::ostringstream buf;
  buf.precision(17);
  buf << a.dim() << '\n';
  for (int i = 0; i < a.dim(); ++i) {
    for (int j = 0; j < a.dim(); ++j) {
      if (j) buf << ' ';
      buf << a(i, j).real() << ',' << a(i, j).imag();
    }
    buf << '\n';
  }
  os << buf.str();
}

HermitianOp read_operator(std::istream& is) {
  int dim = 0;
  if (!(is >> dim) || dim < 2) {
    throw std::invalid_argument("read_operator: missing or invalid dimension line");
  }
  CMatrix m(dim, dim);
  std::string token;
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (!(is >> token)) {
        throw std::invalid_argument("read_operator: truncated matrix at row " +
                                    std::to_string(i));
      }
      const auto comma = token.find(',');
      if (comma == std::string::npos) {
        throw std::invalid_argument("read_operator: entry '" + token +
                                    "' is not of the form re,im");
      }
      try {
        std::size_t used_re = 0, used_im = 0;
        const std::string re_text = token.substr(0, comma);
        const std::string im_text = token.substr(comma + 1);
        const double re = std::stod(re_text, &used_re);
        const double im = std::stod(im_text, &used_im);
        if (used_re != re_text.size() || used_im != im_text.size()) throw std::invalid_argument("");
        m(i, j) = Complex(re, im);
      } catch (const std::exception&) {
        throw std::invalid_argument("read_operator: cannot parse entry '" + token + "'");
      }
    }
  }
  return HermitianOp(std::move(m), kDerivedTol);
}

std::string operator_to_string(const HermitianOp& a) {
  std::ostringstream os;
  write_operator(os, a);
  return os.str();
}

HermitianOp operator_from_string(const std::string& text) {
  std::istringstream is(text);
  return read_operator(is);
}

}  // namespace upbwit
