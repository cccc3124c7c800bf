#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "netmimo/bd.hpp"
#include "test_util.hpp"

using namespace netmimo;
using testutil::random_psd;

namespace {

// (P2)-style objective of one user at a given dual weighting.
double bd_user_objective(const ComplexMatrix& heff, const ComplexMatrix& a,
                         const ComplexMatrix& q) {
  const ComplexMatrix eye = ComplexMatrix::Identity(heff.rows(), heff.rows());
  return log_det_psd(eye + hermitize(heff * q * heff.adjoint())) -
         (a * q).trace().real();
}

}  // namespace

TEST_CASE("build_null_spaces single user spans everything") {
  const NetworkConfig cfg = NetworkConfig::make(1, 2, 1, 2, 1.0);
  const ChannelSet ch = sample_channels(cfg, 1);
  const BDNullSpace ns = build_null_spaces(cfg, ch);
  REQUIRE(ns.basis[0].rows() == 2);
  REQUIRE(ns.basis[0].cols() == 2);
  CHECK((ns.basis[0].adjoint() * ns.basis[0] - ComplexMatrix::Identity(2, 2)).norm() < 1e-10);
  CHECK((ns.effective[0] - ch.channels[0] * ns.basis[0]).norm() == 0.0);
}

TEST_CASE("build_null_spaces annihilates the complement channels") {
  const NetworkConfig cfg = NetworkConfig::make(3, 2, 3, 2, 10.0);
  const ChannelSet ch = sample_channels(cfg, 2);
  const BDNullSpace ns = build_null_spaces(cfg, ch);
  for (int k = 0; k < 3; ++k) {
    REQUIRE(ns.basis[k].rows() == 6);
    REQUIRE(ns.basis[k].cols() == 2);
    const ComplexMatrix g = stack_complement(ch, k);
    CHECK((g * ns.basis[k]).norm() <= 1e-9 * g.norm());
    CHECK((ns.basis[k].adjoint() * ns.basis[k] - ComplexMatrix::Identity(2, 2)).norm() <
          1e-10);
  }
}

TEST_CASE("disjoint channel supports give block-aligned null spaces") {
  const NetworkConfig cfg = NetworkConfig::make(3, 2, 3, 2, 1.0);
  rng::SplitMix64 gen(41);
  ChannelSet ch;
  ch.seed = 0;
  for (int k = 0; k < 3; ++k) {
    ComplexMatrix h = ComplexMatrix::Zero(2, 6);
    h.middleCols(2 * k, 2) = testutil::random_complex(gen, 2, 2);
    ch.channels.push_back(h);
  }
  const BDNullSpace ns = build_null_spaces(cfg, ch);
  for (int k = 0; k < 3; ++k) {
    for (int block = 0; block < 3; ++block) {
      const double mass = ns.basis[k].middleRows(2 * block, 2).norm();
      if (block == k) {
        CHECK(mass > 0.99);
      } else {
        CHECK(mass < 1e-9);
      }
    }
  }
}

TEST_CASE("bd_primal_update water-filling plug-in values") {
  // basis = I, effective channel = I: whitened singular values are all one,
  // so the allocation is empty.
  const NetworkConfig cfg = NetworkConfig::make(1, 2, 1, 2, 1.0);
  BDNullSpace ns;
  ns.basis.push_back(ComplexMatrix::Identity(2, 2));
  ns.effective.push_back(ComplexMatrix::Identity(2, 2));
  const RealVector mu = RealVector::Ones(1);
  const auto q_zero = bd_primal_update(cfg, ns, mu);
  CHECK(q_zero[0].norm() < 1e-12);

  // effective channel 2I: each mode allocates 1 - 1/4.
  ns.effective[0] = 2.0 * ComplexMatrix::Identity(2, 2);
  const auto q = bd_primal_update(cfg, ns, mu);
  CHECK((q[0] - 0.75 * ComplexMatrix::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("bd_primal_update signals indefinite weightings") {
  const NetworkConfig cfg = NetworkConfig::make(1, 2, 1, 2, 1.0);
  BDNullSpace ns;
  ns.basis.push_back(ComplexMatrix::Identity(2, 2));
  ns.effective.push_back(ComplexMatrix::Identity(2, 2));
  const RealVector mu = RealVector::Zero(1);
  CHECK_THROWS_AS(bd_primal_update(cfg, ns, mu), NotPositiveDefiniteError);
}

TEST_CASE("bd_primal_update is locally optimal against sampled perturbations") {
  const NetworkConfig cfg = NetworkConfig::make(3, 2, 3, 2, 10.0);
  const ChannelSet ch = sample_channels(cfg, 3);
  const BDNullSpace ns = build_null_spaces(cfg, ch);
  RealVector mu(3);
  mu << 0.05, 0.08, 0.06;
  const auto q = bd_primal_update(cfg, ns, mu);

  rng::SplitMix64 gen(42);
  RealVector weights(6);
  for (int j = 0; j < 3; ++j) weights.segment(2 * j, 2).setConstant(mu(j));
  for (int k = 0; k < 3; ++k) {
    const ComplexMatrix a =
        hermitize(ns.basis[k].adjoint() * weights.asDiagonal() * ns.basis[k]);
    const double base = bd_user_objective(ns.effective[k], a, q[k]);
    for (int trial = 0; trial < 1000; ++trial) {
      ComplexMatrix candidate;
      if (trial % 2 == 0) {
        candidate = q[k] + 0.03 * random_psd(gen, 2) - 0.03 * random_psd(gen, 2);
        // project back to PSD
        const HermEigResult dec = herm_eig(hermitize(candidate));
        const RealVector clamped = dec.values.cwiseMax(0.0);
        candidate = dec.vectors * clamped.asDiagonal() * dec.vectors.adjoint();
      } else {
        candidate = 0.9 * q[k] + 0.1 * random_psd(gen, 2);
      }
      const double perturbed = bd_user_objective(ns.effective[k], a, hermitize(candidate));
      REQUIRE(perturbed <= base + 1e-9 * (1.0 + std::abs(base)));
    }
  }
}

TEST_CASE("bd_solve single-user identity channel matches water-filling") {
  const NetworkConfig cfg = NetworkConfig::make(1, 2, 1, 2, 4.0);
  ChannelSet ch;
  ch.channels.push_back(ComplexMatrix::Identity(2, 2));
  const BDSolution bd = bd_solve(cfg, ch);
  // Symmetric KKT point: equal power P/M on each antenna.
  CHECK((bd.covariances.s[0] - 2.0 * ComplexMatrix::Identity(2, 2)).norm() < 1e-3);
  CHECK(bd.sum_rate_nats == doctest::Approx(2.0 * std::log(3.0)).epsilon(1e-4));
}

TEST_CASE("bd_solve on the reference network") {
  const NetworkConfig cfg = NetworkConfig::make(3, 2, 3, 2, 10.0);
  const ChannelSet ch = sample_channels(cfg, 7);
  const BDSolution bd = bd_solve(cfg, ch);

  CHECK(leakage_norm(ch, bd.covariances) <= 1e-8);
  double max_power = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double pj = per_bs_power(cfg, bd.covariances, j);
    CHECK(pj <= 10.0 * (1.0 + 1e-6));
    max_power = std::max(max_power, pj);
  }
  CHECK(max_power >= 10.0 * (1.0 - 1e-3));
  for (int k = 0; k < 3; ++k) {
    CHECK(effective_rank(bd.covariances.s[k]) <= 2);
    CHECK(bd.mu(k) >= 0.0);
    // Interference-free rates: the achieved rate equals the target.
    CHECK(user_rate(ch, bd.covariances, k) ==
          doctest::Approx(bd.rate_targets[k]).epsilon(1e-9));
  }
  // Duality gap at convergence.
  CHECK(std::abs(bd.sum_rate_nats - bd.dual_value) <=
        1e-3 * (1.0 + std::abs(bd.dual_value)));
}

TEST_CASE("bd_solve sum rate never drops when the budget doubles") {
  const NetworkConfig lo = NetworkConfig::make(3, 2, 3, 2, 5.0);
  const NetworkConfig hi = NetworkConfig::make(3, 2, 3, 2, 10.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const ChannelSet ch = sample_channels(lo, seed);
    const double r_lo = bd_solve(lo, ch).sum_rate_nats;
    const double r_hi = bd_solve(hi, ch).sum_rate_nats;
    REQUIRE(r_hi >= r_lo - 1e-9);
  }
}
