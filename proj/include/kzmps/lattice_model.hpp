#ifndef KZMPS_LATTICE_MODEL_HPP
#define KZMPS_LATTICE_MODEL_HPP

#include <Eigen/Dense>

namespace kzmps {

/// Couplings of the lattice phi^4 chain in lattice units.
struct ModelParams {
  double lambda0 = 3.0;  // quartic coupling, > 0
  double mu0sq = 0.5;    // bare mass squared, may be negative
  int d = 10;            // local Fock space truncation, >= 2
  void validate() const;
};

/// Linear ramp of the bare mass squared, held constant after t_F.
struct QuenchSchedule {
  double mu0sq_start = 0.5;
  double mu0sq_final = -1.1;
  double tauQ = 32.0;
  double t_relax = 15.0;

  double t_final() const { return (mu0sq_start - mu0sq_final) * tauQ; }
  double t_end() const { return t_final() + t_relax; }
  void validate() const;
};

double schedule_value(const QuenchSchedule& s, double t);

/// Ladder and field operators in the d-dimensional truncated number basis.
struct LocalOperators {
  int d = 0;
  Eigen::MatrixXcd a, adag, phi, pi, number;
};

/// a[n-1, n] = sqrt(n); phi = (a + a^dag)/sqrt(2); pi = i(a - a^dag)/sqrt(2).
/// With this sign, [pi, phi] = i (1 - d |d-1><d-1|), i.e. the canonical
/// commutator up to the unavoidable truncation defect in the top state.
LocalOperators build_local_operators(int d);

/// Nearest-neighbour decomposition of the energy density:
///   e = <one_site> + <two_site_left (x) two_site_right>.
/// The gradient term contributes phi^2 to the one-site part and the product
/// coupling -phi_x phi_{x+1} to the two-site part.
struct HamiltonianTerms {
  Eigen::MatrixXcd one_site;        // pi^2/2 + (1 + mu0sq/2) phi^2 + lambda0/24 phi^4
  Eigen::MatrixXcd two_site_left;   // -phi
  Eigen::MatrixXcd two_site_right;  // phi
};

HamiltonianTerms hamiltonian_terms(const ModelParams& params);

/// Classical vacuum expectation value sqrt(-6 mu0sq / lambda0) (broken phase).
double classical_vev(double mu0sq, double lambda0);

/// Classical kink width sqrt(-2 / mu0sq) (broken phase).
double classical_kink_width(double mu0sq);

}  // namespace kzmps

#endif
