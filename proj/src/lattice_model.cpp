#include "kzmps/lattice_model.hpp"

#include <cmath>
#include <stdexcept>

namespace kzmps {

void ModelParams::validate() const {
  // lambda0 = 0 is the exactly solvable limit used by the oracle suite
  if (lambda0 < 0.0)
    throw std::invalid_argument("ModelParams: lambda0 must be non-negative");
  if (d < 2) throw std::invalid_argument("ModelParams: d must be >= 2");
}

void QuenchSchedule::validate() const {
  if (tauQ <= 0.0)
    throw std::invalid_argument("QuenchSchedule: tauQ must be positive");
  if (t_final() < 0.0)
    throw std::invalid_argument(
        "QuenchSchedule: mu0sq_final must not exceed mu0sq_start");
  if (t_relax < 0.0)
    throw std::invalid_argument("QuenchSchedule: t_relax must be non-negative");
}

double schedule_value(const QuenchSchedule& s, double t) {
  if (t < 0.0) throw std::invalid_argument("schedule_value: negative time");
  if (t >= s.t_final()) return s.mu0sq_final;
  return s.mu0sq_start - t / s.tauQ;
}

LocalOperators build_local_operators(int d) {
  if (d < 2)
    throw std::invalid_argument("build_local_operators: d must be >= 2");
  LocalOperators ops;
  ops.d = d;
  ops.a = Eigen::MatrixXcd::Zero(d, d);
  for (int n = 1; n < d; ++n) ops.a(n - 1, n) = std::sqrt(double(n));
  ops.adag = ops.a.adjoint();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  ops.phi = inv_sqrt2 * (ops.adag + ops.a);
  ops.pi = std::complex<double>(0.0, inv_sqrt2) * (ops.a - ops.adag);
  ops.number = ops.adag * ops.a;
  return ops;
}

HamiltonianTerms hamiltonian_terms(const ModelParams& params) {
  params.validate();
  const LocalOperators ops = build_local_operators(params.d);
  const Eigen::MatrixXcd phi2 = ops.phi * ops.phi;
  HamiltonianTerms h;
  h.one_site = 0.5 * (ops.pi * ops.pi) + (1.0 + 0.5 * params.mu0sq) * phi2 +
               (params.lambda0 / 24.0) * (phi2 * phi2);
  h.one_site = 0.5 * (h.one_site + h.one_site.adjoint()).eval();
  h.two_site_left = -ops.phi;
  h.two_site_right = ops.phi;
  return h;
}

double classical_vev(double mu0sq, double lambda0) {
  if (mu0sq >= 0.0 || lambda0 <= 0.0) return 0.0;
  return std::sqrt(-6.0 * mu0sq / lambda0);
}

double classical_kink_width(double mu0sq) {
  if (mu0sq >= 0.0) return 0.0;
  return std::sqrt(-2.0 / mu0sq);
}

}  // namespace kzmps
