#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "kzmps/io.hpp"
#include "kzmps/lattice_model.hpp"
#include "kzmps/umps.hpp"

using namespace kzmps;

namespace {

// expectation value of a one-site operator for a generic tensor, evaluated
// straight from the fixed points (independent of the canonical machinery)
Complex raw_expectation(const SiteTensor& A, const Mat& op) {
  auto fp = transfer_fixed_points(A, 1e-13);
  Mat Y = transfer_left_op(A, op, fp.l);
  return (Y * fp.r).trace() / fp.lambda1;
}

}  // namespace

TEST_CASE("chi=1 product state canonicalizes to itself") {
  Eigen::VectorXcd local(3);
  local << 0.6, 0.8, 0.0;
  UMPSTensor A = product_state_tensor(local, 1, 0.0);
  auto psi = canonicalize(A);
  CHECK(psi.chi == 1);
  for (int n = 0; n < 3; ++n) {
    CHECK(std::abs(psi.AL[n](0, 0)) == doctest::Approx(std::abs(local[n])));
    CHECK(std::abs(psi.AR[n](0, 0)) == doctest::Approx(std::abs(local[n])));
  }
  CHECK(std::abs(psi.C(0, 0)) == doctest::Approx(1.0));
  CHECK(entanglement_entropy(psi) == doctest::Approx(0.0));
}

TEST_CASE("random tensor: isometries hold and observables are preserved") {
  const int d = 3, chi = 4;
  UMPSTensor A = UMPSTensor::random(d, chi, 42);
  auto ops = build_local_operators(d);

  Complex phi_before = raw_expectation(A.A, ops.phi);
  auto psi = canonicalize(A);
  CHECK(psi.left_isometry_residual() < 1e-12);
  CHECK(psi.right_isometry_residual() < 1e-12);
  CHECK(psi.gauge_residual() < 1e-10);
  CHECK(std::abs(psi.C.norm() - 1.0) < 1e-12);

  Complex phi_after = expectation_one_site(psi, ops.phi);
  CHECK(std::abs(phi_after - phi_before) < 1e-10);

  // normalization: identity expectation is exactly one
  Mat I = Mat::Identity(d, d);
  CHECK(std::abs(expectation_one_site(psi, I) - Complex(1, 0)) < 1e-12);
}

TEST_CASE("canonicalize is idempotent up to gauge") {
  UMPSTensor A = UMPSTensor::random(4, 5, 7);
  auto psi = canonicalize(A);
  Eigen::JacobiSVD<Mat> svd0(psi.C);

  UMPSTensor AL_again(4, 5);
  AL_again.A = psi.AL;
  auto psi2 = canonicalize(AL_again);
  Eigen::JacobiSVD<Mat> svd1(psi2.C);
  CHECK((svd0.singularValues() - svd1.singularValues()).norm() < 1e-12);
}

TEST_CASE("degenerate dominant transfer eigenvalue is reported distinctly") {
  // two distinct decoupled blocks of equal norm give an exactly two-fold
  // degenerate dominant transfer eigenvalue
  const int d = 2, chi = 2;
  UMPSTensor b1 = UMPSTensor::random(d, 1, 3);
  UMPSTensor b2 = UMPSTensor::random(d, 1, 4);
  double n1 = 0, n2 = 0;
  for (int n = 0; n < d; ++n) {
    n1 += std::norm(b1.A[n](0, 0));
    n2 += std::norm(b2.A[n](0, 0));
  }
  UMPSTensor A(d, chi);
  for (int n = 0; n < d; ++n) {
    A.A[n].setZero();
    A.A[n](0, 0) = b1.A[n](0, 0) / std::sqrt(n1);
    A.A[n](1, 1) = b2.A[n](0, 0) / std::sqrt(n2);
  }
  CHECK_THROWS_WITH_AS(canonicalize(A), doctest::Contains("degenerate"),
                       std::runtime_error);
}

TEST_CASE("product state correlator factorizes") {
  // local vector with <phi> = c != 0
  const int d = 4;
  auto ops = build_local_operators(d);
  Eigen::SelfAdjointEigenSolver<Mat> es(ops.phi);
  Eigen::VectorXcd local = es.eigenvectors().col(d - 1);  // largest phi eigenstate
  UMPSTensor A = product_state_tensor(local, 1, 0.0);
  auto psi = canonicalize(A);

  const double c = expectation_one_site(psi, ops.phi).real();
  const double phi2 = expectation_one_site(psi, ops.phi * ops.phi).real();
  auto corr = correlator_one_site(psi, ops.phi, 10);
  CHECK(corr.g[0] == doctest::Approx(phi2).epsilon(1e-12));
  for (int r = 1; r <= 10; ++r)
    CHECK(corr.g[r] == doctest::Approx(c * c).epsilon(1e-10));
}

TEST_CASE("correlator matches brute-force window contraction") {
  // explicit enumeration over a finite window embedded in the fixed-point
  // environments; catches any index or conjugation slip in the transfer code
  const int d = 3, chi = 3, w = 5;
  UMPSTensor A = UMPSTensor::random(d, chi, 99);
  auto psi = canonicalize(A);
  auto ops = build_local_operators(d);
  const Mat rho = psi.C * psi.C.adjoint();

  auto brute = [&](int r) {
    // sum over bra/ket configurations of the window [0, w)
    double val = 0.0;
    std::vector<int> cfg(w, 0), cfgb(w, 0);
    const long total = static_cast<long>(std::pow(d, w));
    for (long ket = 0; ket < total; ++ket) {
      long t = ket;
      for (int i = 0; i < w; ++i) {
        cfg[i] = t % d;
        t /= d;
      }
      Mat Tket = Mat::Identity(chi, chi);
      for (int i = 0; i < w; ++i) Tket = Tket * psi.AL[cfg[i]];
      for (long bra = 0; bra < total; ++bra) {
        long s = bra;
        bool differs_elsewhere = false;
        for (int i = 0; i < w; ++i) {
          cfgb[i] = s % d;
          s /= d;
          if (i != 0 && i != r && cfgb[i] != cfg[i]) differs_elsewhere = true;
        }
        if (differs_elsewhere) continue;
        Complex amp = (r == 0) ? (ops.phi * ops.phi)(cfgb[0], cfg[0])
                               : ops.phi(cfgb[0], cfg[0]) *
                                     ops.phi(cfgb[r], cfg[r]);
        if (amp == Complex(0, 0)) continue;
        Mat Tbra = Mat::Identity(chi, chi);
        for (int i = 0; i < w; ++i) Tbra = Tbra * psi.AL[cfgb[i]];
        val += (amp * (Tbra.adjoint() * Tket * rho).trace()).real();
      }
    }
    return val;
  };

  auto corr = correlator_one_site(psi, ops.phi, w - 1);
  for (int r = 0; r < w; ++r)
    CHECK(corr.g[r] == doctest::Approx(brute(r)).epsilon(1e-10));
}

TEST_CASE("correlation length is gauge and phase invariant") {
  UMPSTensor A = UMPSTensor::random(3, 4, 5);
  auto psi = canonicalize(A);
  double xi = correlation_length(psi);
  CHECK(xi > 0.0);

  UMPSTensor B = A;
  for (auto& m : B.A) m *= Complex(std::cos(0.7), std::sin(0.7)) * 2.3;
  auto psi2 = canonicalize(B);
  CHECK(correlation_length(psi2) == doctest::Approx(xi).epsilon(1e-6));

  // chi = 1 states have no connected correlations
  Eigen::VectorXcd local(3);
  local << 1.0, 0.5, 0.25;
  local.normalize();
  auto prod = canonicalize(product_state_tensor(local, 1, 0.0));
  CHECK(correlation_length(prod) == 0.0);
}

TEST_CASE("entanglement entropy formula and bounds") {
  CanonicalUMPS psi;
  psi.d = 2;
  psi.chi = 2;
  psi.C = Mat::Zero(2, 2);
  psi.C(0, 0) = 1.0 / std::sqrt(2.0);
  psi.C(1, 1) = 1.0 / std::sqrt(2.0);
  CHECK(entanglement_entropy(psi) == doctest::Approx(std::log(2.0)));

  std::mt19937_64 rng(17);
  std::normal_distribution<double> dist;
  const int chi = 6;
  Mat C(chi, chi);
  for (int j = 0; j < chi; ++j)
    for (int i = 0; i < chi; ++i) C(i, j) = Complex(dist(rng), dist(rng));
  C /= C.norm();
  psi.C = C;
  psi.chi = chi;
  Eigen::JacobiSVD<Mat> svd(C);
  double S_direct = 0.0;
  for (int i = 0; i < chi; ++i) {
    double p = svd.singularValues()[i] * svd.singularValues()[i];
    if (p > 0) S_direct -= p * std::log(p);
  }
  CHECK(entanglement_entropy(psi) == doctest::Approx(S_direct).epsilon(1e-14));
  CHECK(entanglement_entropy(psi) <= std::log(double(chi)) + 1e-12);
}

TEST_CASE("two-site expectation on a product state factorizes") {
  const int d = 3;
  auto ops = build_local_operators(d);
  Eigen::VectorXcd local(d);
  local << 0.3, 0.8, 0.52;
  local.normalize();
  auto psi = canonicalize(product_state_tensor(local, 1, 0.0));
  Complex pq = expectation_two_site(psi, ops.phi, ops.number);
  Complex p = expectation_one_site(psi, ops.phi);
  Complex q = expectation_one_site(psi, ops.number);
  CHECK(std::abs(pq - p * q) < 1e-12);
}

TEST_CASE("snapshot serialization round-trips exactly") {
  UMPSTensor A = UMPSTensor::random(3, 4, 12);
  auto psi = canonicalize(A);
  psi.time = 17.25;

  auto path = std::filesystem::temp_directory_path() / "kzmps_state_test.bin";
  save_state(psi, path.string());
  auto back = load_state(path.string());
  CHECK(back.d == psi.d);
  CHECK(back.chi == psi.chi);
  CHECK(back.time == psi.time);
  for (int n = 0; n < psi.d; ++n) {
    CHECK((back.AL[n] - psi.AL[n]).norm() == 0.0);
    CHECK((back.AR[n] - psi.AR[n]).norm() == 0.0);
  }
  CHECK((back.C - psi.C).norm() == 0.0);
  std::filesystem::remove(path);

  CHECK_THROWS(load_state("/nonexistent/kzmps.bin"));
}

TEST_CASE("checkpoint round-trip carries schedule position and hash") {
  UMPSTensor A = UMPSTensor::random(2, 3, 1);
  Checkpoint cp;
  cp.state = canonicalize(A);
  cp.t = 42.17;
  cp.step = 4217;
  cp.config_hash = 0xdeadbeefcafeull;
  auto path = std::filesystem::temp_directory_path() / "kzmps_cp_test.bin";
  save_checkpoint(cp, path.string());
  auto back = load_checkpoint(path.string());
  CHECK(back.t == cp.t);
  CHECK(back.step == cp.step);
  CHECK(back.config_hash == cp.config_hash);
  CHECK((back.state.C - cp.state.C).norm() == 0.0);
  std::filesystem::remove(path);
}
