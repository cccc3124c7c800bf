#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

using namespace netmimo;
using testutil::random_complex;
using testutil::random_hermitian;
using testutil::random_psd;

TEST_CASE("svd diagonal case") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  const SvdResult dec = svd(a);
  CHECK(dec.sigma(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(dec.sigma(1) == doctest::Approx(1.0).epsilon(1e-14));
  // U and V are the identity up to a common per-column phase.
  CHECK((dec.u.cwiseAbs() - RealMatrix::Identity(2, 2)).norm() < 1e-12);
  CHECK((dec.u * dec.sigma.asDiagonal() * dec.v.adjoint() - a).norm() < 1e-12);
}

TEST_CASE("svd zero matrix") {
  const SvdResult dec = svd(ComplexMatrix::Zero(2, 3));
  REQUIRE(dec.sigma.size() == 2);
  CHECK(dec.sigma(0) == 0.0);
  CHECK(dec.sigma(1) == 0.0);
}

TEST_CASE("svd rejects non-finite input") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd(a), std::invalid_argument);
}

TEST_CASE("svd reconstruction on random rectangular input") {
  rng::SplitMix64 gen(11);
  const ComplexMatrix a = random_complex(gen, 4, 6);
  const SvdResult dec = svd(a);
  const ComplexMatrix rebuilt =
      dec.u.leftCols(4) * dec.sigma.asDiagonal() * dec.v.leftCols(4).adjoint();
  CHECK((rebuilt - a).norm() / a.norm() < 1e-10);
}

TEST_CASE("svd and herm_eig reconstruction over many random sizes") {
  rng::SplitMix64 gen(12);
  for (int trial = 0; trial < 1000; ++trial) {
    const int rows = 1 + static_cast<int>(gen.next() % 12);
    const int cols = 1 + static_cast<int>(gen.next() % 12);
    const ComplexMatrix a = random_complex(gen, rows, cols);
    const SvdResult dec = svd(a);
    const int k = std::min(rows, cols);
    const ComplexMatrix rebuilt =
        dec.u.leftCols(k) * dec.sigma.asDiagonal() * dec.v.leftCols(k).adjoint();
    REQUIRE((rebuilt - a).norm() <= 1e-10 * std::max(1.0, a.norm()));
    REQUIRE((dec.u.adjoint() * dec.u - ComplexMatrix::Identity(rows, rows)).norm() < 1e-10);
    for (Eigen::Index i = 0; i + 1 < dec.sigma.size(); ++i) {
      REQUIRE(dec.sigma(i) >= dec.sigma(i + 1));
    }

    const ComplexMatrix h = random_hermitian(gen, rows);
    const HermEigResult eig = herm_eig(h);
    const ComplexMatrix back =
        eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint();
    REQUIRE((back - h).norm() <= 1e-10 * std::max(1.0, h.norm()));
  }
}

TEST_CASE("null_space_basis coordinate case") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 3);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  const ComplexMatrix n = null_space_basis(a);
  REQUIRE(n.cols() == 1);
  CHECK(std::abs(n(2, 0)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(n(0, 0)) < 1e-12);
  CHECK(std::abs(n(1, 0)) < 1e-12);
}

TEST_CASE("null_space_basis full rank yields zero columns") {
  const ComplexMatrix n = null_space_basis(ComplexMatrix::Identity(3, 3));
  CHECK(n.cols() == 0);
  CHECK(n.rows() == 3);
}

TEST_CASE("null_space_basis of random wide matrix") {
  rng::SplitMix64 gen(13);
  const ComplexMatrix a = random_complex(gen, 4, 6);
  const ComplexMatrix n = null_space_basis(a);
  REQUIRE(n.rows() == 6);
  REQUIRE(n.cols() == 2);
  CHECK((a * n).norm() <= 1e-9 * a.norm());
  CHECK((n.adjoint() * n - ComplexMatrix::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("null_space_basis orthonormality over random inputs") {
  rng::SplitMix64 gen(14);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + static_cast<int>(gen.next() % 6);
    const int cols = 1 + static_cast<int>(gen.next() % 8);
    const ComplexMatrix a = random_complex(gen, rows, cols);
    const ComplexMatrix n = null_space_basis(a);
    const auto d = n.cols();
    REQUIRE((n.adjoint() * n - ComplexMatrix::Identity(d, d)).norm() < 1e-10);
  }
}

TEST_CASE("herm_eig simple spectra") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = -1.0;
  const HermEigResult dec = herm_eig(a);
  CHECK(dec.values(0) == doctest::Approx(2.0));
  CHECK(dec.values(1) == doctest::Approx(-1.0));

  const HermEigResult eye = herm_eig(ComplexMatrix::Identity(4, 4));
  CHECK((eye.values - RealVector::Ones(4)).norm() < 1e-14);
}

TEST_CASE("herm_eig rejects non-Hermitian input") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = 1.0; // missing conjugate partner
  CHECK_THROWS_AS(herm_eig(a), std::invalid_argument);
}

TEST_CASE("psd_inv_sqrt on diagonal and random PD matrices") {
  CHECK((psd_inv_sqrt(4.0 * ComplexMatrix::Identity(3, 3)) -
         0.5 * ComplexMatrix::Identity(3, 3))
            .norm() < 1e-12);

  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 4.0;
  ComplexMatrix expect = ComplexMatrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  expect(1, 1) = 0.5;
  CHECK((psd_inv_sqrt(d) - expect).norm() < 1e-12);

  rng::SplitMix64 gen(15);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix a =
        random_psd(gen, 6) + 0.1 * ComplexMatrix::Identity(6, 6);
    const ComplexMatrix b = psd_inv_sqrt(a);
    CHECK((b * a * b - ComplexMatrix::Identity(6, 6)).norm() < 1e-9);
  }
}

TEST_CASE("psd_inv_sqrt reports the offending eigenpair") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -2.0;
  try {
    psd_inv_sqrt(a);
    FAIL("expected NotPositiveDefiniteError");
  } catch (const NotPositiveDefiniteError& e) {
    CHECK(e.violation().eigenvalue == doctest::Approx(-2.0));
    CHECK(std::abs(e.violation().eigenvector(1)) == doctest::Approx(1.0));
  }
}

TEST_CASE("log_det_psd basics") {
  CHECK(log_det_psd(ComplexMatrix::Identity(3, 3)) == doctest::Approx(0.0));
  CHECK(log_det_psd(2.0 * ComplexMatrix::Identity(2, 2)) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("log_det_psd matches the eigenvalue product oracle") {
  rng::SplitMix64 gen(16);
  const ComplexMatrix a =
      ComplexMatrix::Identity(6, 6) + random_psd(gen, 6);
  const HermEigResult dec = herm_eig(a);
  double expect = 0.0;
  for (Eigen::Index i = 0; i < dec.values.size(); ++i) {
    expect += std::log(dec.values(i));
  }
  CHECK(log_det_psd(a) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("log_det_psd additivity for commuting PD pairs") {
  rng::SplitMix64 gen(17);
  for (int trial = 0; trial < 20; ++trial) {
    RealVector da(5), db(5);
    for (int i = 0; i < 5; ++i) {
      da(i) = 0.1 + 3.0 * gen.next_double();
      db(i) = 0.1 + 3.0 * gen.next_double();
    }
    const ComplexMatrix a = da.asDiagonal().toDenseMatrix().cast<std::complex<double>>();
    const ComplexMatrix b = db.asDiagonal().toDenseMatrix().cast<std::complex<double>>();
    CHECK(log_det_psd(a * b) ==
          doctest::Approx(log_det_psd(a) + log_det_psd(b)).epsilon(1e-9));
  }
}

TEST_CASE("log_det_psd rejects indefinite input") {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  CHECK_THROWS_AS(log_det_psd(a), std::invalid_argument);
}

TEST_CASE("pd_threshold scales with the spectrum") {
  CHECK(pd_threshold(0.5) == doctest::Approx(1e-10));
  CHECK(pd_threshold(100.0) == doctest::Approx(1e-8));
}
