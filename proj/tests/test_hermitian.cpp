#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "upbwit/hermitian.hpp"
#include "upbwit/upb_tiles.hpp"

using namespace upbwit;

namespace {

HermitianOp diag(std::initializer_list<double> values) {
  CMatrix m = CMatrix::Zero(values.size(), values.size());
  int k = 0;
  for (double v : values) m(k, k) = v, ++k;
  return HermitianOp(m);
}

HermitianOp ket_bra(const CVector& v) { return HermitianOp(CMatrix(v * v.adjoint())); }

CVector basis(int d, int k) {
  CVector v = CVector::Zero(d);
  v(k) = 1.0;
  return v;
}

}  // namespace

TEST_CASE("HermitianOp rejects bad input") {
  CMatrix m = CMatrix::Zero(3, 3);
  m(0, 1) = Complex(1.0, 0.5);
  CHECK_THROWS_AS(HermitianOp{m}, std::invalid_argument);
  CHECK_THROWS_AS(HermitianOp(CMatrix::Zero(1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(HermitianOp(CMatrix::Zero(2, 3)), std::invalid_argument);
  m(1, 0) = std::conj(m(0, 1)) + Complex(5e-13, 0);
  CHECK_NOTHROW(HermitianOp{m});
}

TEST_CASE("hs_inner") {
  const HermitianOp i3 = HermitianOp::identity(3);
  CHECK(hs_inner(i3, i3) == doctest::Approx(3.0));
  CHECK(hs_inner(i3, HermitianOp::zero(3)) == 0.0);

  const UpbState s = build_state(TileLayout({3, 3}, 2, 2, 2, 2));
  CHECK(hs_inner(s.rho.op(), s.rho.op()) == doctest::Approx(0.25).epsilon(1e-12));

  CHECK_THROWS_AS(hs_inner(i3, HermitianOp::identity(4)), std::invalid_argument);
}

TEST_CASE("hs_distance") {
  const HermitianOp p0 = ket_bra(basis(2, 0));
  const HermitianOp p1 = ket_bra(basis(2, 1));
  CHECK(hs_distance(p0, p0) == 0.0);
  CHECK(hs_distance(p0, p1) == doctest::Approx(std::sqrt(2.0)));
  // I/2 - |0><0| = diag(-1/2, 1/2)
  CHECK(hs_distance(HermitianOp::identity(2) * 0.5, p0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(hs_distance(p0, HermitianOp::identity(3)), std::invalid_argument);
}

TEST_CASE("HS geometry properties on random Hermitian triples") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int dim = 2 + trial % 7;
    const HermitianOp a(oracle::random_hermitian(dim, rng));
    const HermitianOp b(oracle::random_hermitian(dim, rng));
    const HermitianOp c(oracle::random_hermitian(dim, rng));
    const double s = rng.normal(), t = rng.normal();

    CHECK(hs_inner(a, b) == doctest::Approx(hs_inner(b, a)).epsilon(1e-12));
    CHECK(hs_inner(a * s + b * t, c) ==
          doctest::Approx(s * hs_inner(a, c) + t * hs_inner(b, c)).epsilon(1e-10));
    CHECK(hs_inner(a, a) > 0.0);
    CHECK(hs_distance(a, c) <= hs_distance(a, b) + hs_distance(b, c) + 1e-12);
    // tr(AB) is real for Hermitian A, B
    CHECK(std::abs((a.matrix() * b.matrix()).trace().imag()) < 1e-10);
  }
}

TEST_CASE("product_projector") {
  const ProductVector p(basis(2, 0), basis(2, 0));
  const DensityMatrix rho = product_projector(p);
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = 1.0;
  CHECK((rho.matrix() - expected).norm() == 0.0);
  CHECK(rho.op().trace() == doctest::Approx(1.0));

  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const BipartiteDims dims(2 + k % 4, 2 + k % 3);
    const DensityMatrix r = product_projector(random_product_vector(dims, false, rng));
    CHECK(r.op().trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(numerical_rank(r.op()) == 1);
    CHECK(min_eigenvalue(partial_transpose(r.op(), dims)) >= -1e-12);
  }
}

TEST_CASE("ProductVector enforces unit norm") {
  CHECK_THROWS_AS(ProductVector(CVector::Ones(2), basis(2, 0)), std::invalid_argument);
  CHECK_THROWS_AS(ProductVector::normalized(CVector::Zero(2), basis(2, 0)),
                  std::invalid_argument);
  const ProductVector p = ProductVector::normalized(CVector::Ones(3), CVector::Ones(2));
  CHECK(p.a().norm() == doctest::Approx(1.0));
  CHECK(p.joint().size() == 6);
}

TEST_CASE("partial_transpose") {
  Rng rng(3);
  const BipartiteDims dims(2, 3);
  SUBCASE("acts as transpose on the second factor of a tensor product") {
    const CMatrix sa = oracle::random_hermitian(2, rng);
    const CMatrix sb = oracle::random_hermitian(3, rng);
    CMatrix prod(6, 6), prod_t(6, 6);
    for (int i = 0; i < 2; ++i)
      for (int ip = 0; ip < 2; ++ip) {
        prod.block(3 * i, 3 * ip, 3, 3) = sa(i, ip) * sb;
        prod_t.block(3 * i, 3 * ip, 3, 3) = sa(i, ip) * sb.transpose();
      }
    CHECK((partial_transpose(HermitianOp(prod), dims).matrix() - prod_t).norm() < 1e-14);
  }
  SUBCASE("involution, trace and HS norm preserved") {
    for (int k = 0; k < 50; ++k) {
      const HermitianOp a(oracle::random_hermitian(6, rng));
      const HermitianOp pt = partial_transpose(a, dims);
      CHECK(partial_transpose(pt, dims) == a);
      CHECK(pt.trace() == doctest::Approx(a.trace()).epsilon(1e-12));
      CHECK(hs_norm(pt) == doctest::Approx(hs_norm(a)).epsilon(1e-12));
    }
  }
  SUBCASE("maximally entangled two-qubit projector") {
    // PT(|phi+><phi+|) = SWAP / 2, whose spectrum is {1/2, 1/2, 1/2, -1/2}.
    CVector phi = CVector::Zero(4);
    phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
    const HermitianOp pt = partial_transpose(ket_bra(phi), {2, 2});
    CHECK(min_eigenvalue(pt) == doctest::Approx(-0.5).epsilon(1e-12));
  }
  CHECK_THROWS_AS(partial_transpose(HermitianOp::identity(4), {2, 3}), std::invalid_argument);
}

TEST_CASE("eig_hermitian") {
  const EigenDecomposition id = eig_hermitian(HermitianOp::identity(3));
  CHECK(id.values.isApproxToConstant(1.0));

  const EigenDecomposition e = eig_hermitian(diag({3, 1, 2}));
  CHECK(e.values(0) == doctest::Approx(3));
  CHECK(e.values(1) == doctest::Approx(2));
  CHECK(e.values(2) == doctest::Approx(1));

  SUBCASE("support projector of the 3x3 state: four ones and five zeros") {
    const UpbState s = build_state(TileLayout({3, 3}, 2, 2, 2, 2));
    const EigenDecomposition p = eig_hermitian(s.support);
    for (int k = 0; k < 4; ++k) CHECK(p.values(k) == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 4; k < 9; ++k) CHECK(std::abs(p.values(k)) < 1e-12);
  }

  SUBCASE("reconstruction and orthonormality on random operators") {
    Rng rng(17);
    for (int k = 0; k < 40; ++k) {
      const int dim = 2 + k % 35;
      const HermitianOp a(oracle::random_hermitian(dim, rng));
      const EigenDecomposition d = eig_hermitian(a);
      const CMatrix rebuilt =
          d.vectors * d.values.cast<Complex>().asDiagonal() * d.vectors.adjoint();
      CHECK((rebuilt - a.matrix()).norm() <= 1e-10);
      CHECK((d.vectors.adjoint() * d.vectors - CMatrix::Identity(dim, dim)).norm() <= 1e-10);
      for (int i = 1; i < dim; ++i) CHECK(d.values(i - 1) >= d.values(i));
    }
  }
}

TEST_CASE("traceless_part") {
  CHECK(hs_norm(traceless_part(HermitianOp::identity(4))) == 0.0);
  const HermitianOp t = traceless_part(diag({2, 0}));
  CHECK((t.matrix() - diag({1, -1}).matrix()).norm() < 1e-15);
  Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    const HermitianOp a(oracle::random_hermitian(5, rng));
    const HermitianOp once = traceless_part(a);
    CHECK(std::abs(once.trace()) < 1e-12);
    CHECK((traceless_part(once).matrix() - once.matrix()).norm() < 1e-14);
  }
}

TEST_CASE("DensityMatrix validation") {
  CHECK_NOTHROW(DensityMatrix(HermitianOp::identity(3) * (1.0 / 3)));
  CHECK_THROWS_AS(DensityMatrix(HermitianOp::identity(3)), std::invalid_argument);
  CHECK_THROWS_AS(DensityMatrix(diag({1.5, -0.5})), std::invalid_argument);
}

TEST_CASE("random_local_state") {
  Rng rng(99);
  SUBCASE("unit norm and real mode") {
    for (int k = 0; k < 100; ++k) {
      const CVector v = random_local_state(2 + k % 5, k % 2 == 0, rng);
      CHECK(std::abs(v.norm() - 1.0) < 1e-12);
      if (k % 2 == 0) CHECK(v.imag().cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SUBCASE("Haar second moment E|<e1|v>|^2 = 1/d") {
    // |<e1|v>|^2 for Haar v in C^3 is Beta(1, 2): mean 1/3, variance 1/18.
    const int draws = 100000;
    double sum = 0.0;
    for (int k = 0; k < draws; ++k) sum += std::norm(random_local_state(3, false, rng)(0));
    const double sigma = std::sqrt(1.0 / 18.0 / draws);
    CHECK(std::abs(sum / draws - 1.0 / 3.0) < 3 * sigma);
  }
  SUBCASE("fixed seed is bit-reproducible") {
    Rng x(1234), y(1234);
    for (int k = 0; k < 10; ++k) CHECK(random_local_state(4, false, x) == random_local_state(4, false, y));
  }
  CHECK_THROWS_AS(random_local_state(1, false, rng), std::invalid_argument);
}

TEST_CASE("Rng split and serialization") {
  Rng a(7);
  a.normal();  // leaves a cached Gaussian in the distribution
  const Rng copy = Rng::deserialize(a.serialize());
  CHECK(copy == a);
  Rng b = copy;
  CHECK(a.normal() == b.normal());
  Rng c1 = a.split(), c2 = b.split();
  CHECK(c1.next_u64() == c2.next_u64());
  CHECK_THROWS_AS(Rng::deserialize("garbage"), std::invalid_argument);
}

TEST_CASE("operator text format round-trips exactly") {
  Rng rng(8);
  const HermitianOp a(oracle::random_hermitian(6, rng));
  const std::string text = operator_to_string(a);
  CHECK(text.substr(0, 2) == "6\n");
  const HermitianOp back = operator_from_string(text);
  CHECK(back == a);
  CHECK(operator_to_string(back) == text);

  CHECK_THROWS_AS(operator_from_string("2\n1,0 0,0\n0,0\n"), std::invalid_argument);
  CHECK_THROWS_AS(operator_from_string("2\n1,0 0;0\n0,0 1,0\n"), std::invalid_argument);
  CHECK_THROWS_AS(operator_from_string("x\n"), std::invalid_argument);
}
