#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "kzmps/linalg.hpp"
#include "kzmps/numeric.hpp"

using namespace kzmps;
using linalg::Vec;

namespace {
Eigen::MatrixXcd random_matrix(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  Eigen::MatrixXcd M(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) M(i, j) = std::complex<double>(dist(rng), dist(rng));
  return M;
}
}  // namespace

TEST_CASE("arnoldi finds the dominant eigenpair of a random matrix") {
  const int n = 60;
  Eigen::MatrixXcd M = random_matrix(n, 11);
  linalg::LinOp op = [&](const Vec& x, Vec& y) { y = M * x; };
  auto res = linalg::arnoldi_dominant(op, n, 2, 1e-12);
  REQUIRE(res.converged);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
  double lmax = 0, lsecond = 0;
  for (int i = 0; i < n; ++i) {
    double a = std::abs(es.eigenvalues()[i]);
    if (a > lmax) {
      lsecond = lmax;
      lmax = a;
    } else if (a > lsecond) {
      lsecond = a;
    }
  }
  CHECK(std::abs(std::abs(res.pairs[0].value) - lmax) < 1e-9 * lmax);
  CHECK(std::abs(std::abs(res.pairs[1].value) - lsecond) < 1e-6 * lmax);
  Vec r = M * res.pairs[0].vector - res.pairs[0].value * res.pairs[0].vector;
  CHECK(r.norm() < 1e-9 * lmax);
}

TEST_CASE("lanczos finds the lowest eigenvalue of a Hermitian matrix") {
  const int n = 80;
  Eigen::MatrixXcd M = random_matrix(n, 5);
  M = (M + M.adjoint()).eval();
  linalg::LinOp op = [&](const Vec& x, Vec& y) { y = M * x; };
  auto res = linalg::lanczos_lowest(op, n, 1e-12);
  REQUIRE(res.converged);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  CHECK(std::abs(res.value - es.eigenvalues()[0]) < 1e-9);
}

TEST_CASE("lanczos deflation returns the lowest k eigenvalues") {
  const int n = 50;
  Eigen::MatrixXcd M = random_matrix(n, 9);
  M = (M + M.adjoint()).eval();
  linalg::LinOp op = [&](const Vec& x, Vec& y) { y = M * x; };
  auto res = linalg::lanczos_lowest_k(op, n, 4, 1e-11);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(res[i].value - es.eigenvalues()[i]) < 1e-7);
}

TEST_CASE("gmres solves a shifted non-Hermitian system") {
  const int n = 70;
  Eigen::MatrixXcd M = 0.3 * random_matrix(n, 3);
  M += 4.0 * Eigen::MatrixXcd::Identity(n, n);  // well conditioned
  Vec b = random_matrix(n, 4).col(0);
  linalg::LinOp op = [&](const Vec& x, Vec& y) { y = M * x; };
  auto sol = linalg::gmres(op, b, nullptr, 1e-13);
  REQUIRE(sol.converged);
  CHECK((M * sol.x - b).norm() < 1e-11 * b.norm());
}

TEST_CASE("inverse_sqrt_psd inverts the PSD square root") {
  const int n = 12;
  Eigen::MatrixXcd B = random_matrix(n, 21);
  Eigen::MatrixXcd X = B * B.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd s;
  Eigen::MatrixXcd isq = linalg::inverse_sqrt_psd(X, 1e-14, &s);
  CHECK((s * s - X).norm() < 1e-10 * X.norm());
  CHECK((isq * X * isq - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-10);
}

TEST_CASE("periodic quadrature integrates smooth periodic integrands") {
  auto f = [](double x) { return 1.0 / (2.0 + std::cos(x)); };
  // exact: 2 pi / sqrt(3)
  double val = numeric::integrate_periodic(f, 0, 2 * M_PI, 1e-13);
  CHECK(std::abs(val - 2 * M_PI / std::sqrt(3.0)) < 1e-11);
}

TEST_CASE("adaptive simpson integrates a polynomial exactly enough") {
  auto f = [](double x) { return x * x * x - 2 * x + 1; };
  double val = numeric::integrate_adaptive(f, 0, 2, 1e-12);
  CHECK(std::abs(val - (4.0 - 4.0 + 2.0)) < 1e-10);
}

TEST_CASE("dormand-prince reproduces the harmonic oscillator") {
  Eigen::VectorXcd y(2);
  y << 1.0, 0.0;  // cos(t), -sin(t)
  auto f = [](double, const Eigen::VectorXcd& yv, Eigen::VectorXcd& dy) {
    dy.resize(2);
    dy[0] = yv[1];
    dy[1] = -yv[0];
  };
  numeric::OdeOptions opts;
  opts.rtol = 1e-12;
  opts.atol = 1e-14;
  numeric::integrate_ode(f, 0, 10.0, y, opts);
  CHECK(std::abs(y[0].real() - std::cos(10.0)) < 1e-9);
  CHECK(std::abs(y[1].real() + std::sin(10.0)) < 1e-9);
}
