#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kzmps/lattice_model.hpp"
#include "kzmps/oracle.hpp"

using namespace kzmps;

TEST_CASE("ladder operators have the textbook matrix elements") {
  auto ops = build_local_operators(5);
  for (int n = 1; n < 5; ++n)
    CHECK(std::abs(ops.a(n - 1, n) - std::sqrt(double(n))) < 1e-15);
  CHECK(ops.a.cwiseAbs().sum() == doctest::Approx(std::sqrt(1.) + std::sqrt(2.) +
                                                  std::sqrt(3.) + std::sqrt(4.)));
}

TEST_CASE("phi at d=2 and the number operator") {
  auto ops = build_local_operators(2);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(ops.phi(0, 1) - s) < 1e-15);
  CHECK(std::abs(ops.phi(1, 0) - s) < 1e-15);
  CHECK(std::abs(ops.phi(0, 0)) < 1e-15);

  for (int d : {2, 4, 9}) {
    auto o = build_local_operators(d);
    for (int n = 0; n < d; ++n)
      CHECK(std::abs(o.number(n, n) - double(n)) < 1e-14);
    CHECK(o.number.cwiseAbs().sum() == doctest::Approx(d * (d - 1) / 2.0));
  }
}

TEST_CASE("phi and pi are Hermitian; truncated commutator defect") {
  const int d = 4;
  auto ops = build_local_operators(d);
  CHECK((ops.phi - ops.phi.adjoint()).norm() < 1e-15);
  CHECK((ops.pi - ops.pi.adjoint()).norm() < 1e-15);

  // [pi, phi] = i (1 - d |d-1><d-1|)
  Eigen::MatrixXcd comm = ops.pi * ops.phi - ops.phi * ops.pi;
  Eigen::MatrixXcd expect = Eigen::MatrixXcd::Identity(d, d);
  expect(d - 1, d - 1) -= double(d);
  expect *= std::complex<double>(0, 1);
  CHECK((comm - expect).norm() < 1e-13);
  CHECK(std::abs(std::abs(comm(d - 1, d - 1)) - (d - 1)) < 1e-13);
}

TEST_CASE("rejects d < 2") {
  CHECK_THROWS(build_local_operators(1));
  ModelParams p;
  p.d = 1;
  CHECK_THROWS(p.validate());
  p.d = 4;
  p.lambda0 = -1;
  CHECK_THROWS(p.validate());
}

TEST_CASE("one-site term is Hermitian for assorted couplings") {
  for (double lam : {0.0, 3.0, 7.5})
    for (double mu : {-1.1, 0.0, 1.0}) {
      ModelParams p{lam, mu, 8};
      auto h = hamiltonian_terms(p);
      CHECK((h.one_site - h.one_site.adjoint()).norm() < 1e-12);
      for (int i = 0; i < 8; ++i) CHECK(std::abs(h.one_site(i, i).imag()) < 1e-14);
    }
}

TEST_CASE("energy density does not depend on the sign convention of pi") {
  // pi enters only through pi^2; flipping its sign leaves one_site unchanged
  ModelParams p{3.0, 0.7, 6};
  auto ops = build_local_operators(p.d);
  Eigen::MatrixXcd pi_flipped = -ops.pi;
  Eigen::MatrixXcd phi2 = ops.phi * ops.phi;
  Eigen::MatrixXcd h_a = 0.5 * ops.pi * ops.pi + (1 + 0.5 * p.mu0sq) * phi2 +
                         p.lambda0 / 24.0 * phi2 * phi2;
  Eigen::MatrixXcd h_b = 0.5 * pi_flipped * pi_flipped +
                         (1 + 0.5 * p.mu0sq) * phi2 +
                         p.lambda0 / 24.0 * phi2 * phi2;
  CHECK((h_a - h_b).norm() < 1e-14);
}

TEST_CASE("two-site terms represent -phi phi") {
  ModelParams p{3.0, 1.0, 5};
  auto h = hamiltonian_terms(p);
  auto ops = build_local_operators(5);
  CHECK((h.two_site_left + ops.phi).norm() < 1e-15);
  CHECK((h.two_site_right - ops.phi).norm() < 1e-15);
}

TEST_CASE("classical potential minimum in the broken phase") {
  // v = sqrt(-6 mu / lambda)
  CHECK(classical_vev(-1.1, 3.0) == doctest::Approx(1.4832).epsilon(1e-4));
  CHECK(classical_vev(0.5, 3.0) == 0.0);
  CHECK(classical_kink_width(-1.1) == doctest::Approx(1.3484).epsilon(1e-4));
}

TEST_CASE("schedule boundary values and interior point") {
  QuenchSchedule s;
  s.mu0sq_start = 0.5;
  s.mu0sq_final = -1.1;
  s.tauQ = 64.0;
  CHECK(schedule_value(s, 0.0) == doctest::Approx(0.5));
  CHECK(schedule_value(s, 32.0) == doctest::Approx(0.0));
  CHECK(schedule_value(s, s.t_final()) == doctest::Approx(-1.1));
  CHECK(schedule_value(s, s.t_final() + 100) == doctest::Approx(-1.1));
  CHECK_THROWS(schedule_value(s, -1.0));
}

TEST_CASE("schedule is continuous and non-increasing") {
  QuenchSchedule s;
  s.mu0sq_start = 0.5;
  s.mu0sq_final = -1.1;
  s.tauQ = 8.0;
  double prev = schedule_value(s, 0.0);
  for (double t = 0.01; t < s.t_final() + 5; t += 0.01) {
    double cur = schedule_value(s, t);
    CHECK(cur <= prev + 1e-15);
    CHECK(std::abs(cur - prev) < 0.01 / s.tauQ + 1e-12);
    prev = cur;
  }
}
