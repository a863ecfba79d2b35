#ifndef KZMPS_ORACLE_HPP
#define KZMPS_ORACLE_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "kzmps/lattice_model.hpp"

namespace kzmps::oracle {

/// Reference data produced by one of the oracle routes, with provenance.
struct OracleResult {
  std::string description;
  std::string method;  // analytic | quadrature | mode-ode | exact-diag
  std::vector<std::string> keys;
  std::vector<Eigen::VectorXd> values;
};

/// Lattice dispersion sqrt(musq + 4 sin^2(k/2)). Throws on a negative
/// radicand (unstable mode); time-dependent oracles handle that case with
/// hyperbolic mode functions instead.
double free_dispersion(double k, double musq);

/// Vacuum two-point function of the free lattice field, 1/(2 w_k).
double free_ground_g2k(double k, double musq);

/// Real-space vacuum correlator (1/2pi) Int cos(k r) / (2 w_k) dk.
double free_ground_g2r(int r, double musq, double reltol = 1e-12);

/// Asymptotic decay mass of the free vacuum correlator,
/// m = 2 asinh(sqrt(musq)/2): the root of the dispersion continued to
/// imaginary momentum.
double free_lattice_mass(double musq);

/// Exact ground-state energy density of the free lattice field.
double free_ground_energy_density(double musq, double reltol = 1e-12);

/// Sudden-quench correlator: instantaneous change musq_initial -> musq_final
/// at t = 0 starting from the initial vacuum.
double free_quench_g2k(double k, double musq_initial, double musq_final,
                       double t);

/// Ramp-quench correlator from the per-mode equation f'' = -w^2(t) f with
/// vacuum initial data f(0) = 1/sqrt(2 w_0), f'(0) = -i w_0 f(0).
double free_ramp_g2k(double k, const QuenchSchedule& schedule, double t,
                     double tol = 1e-11);

/// Batch version: G2(k, t) on a full (k, t) grid in a single ODE sweep per k.
Eigen::MatrixXd free_ramp_g2k_series(const Eigen::VectorXd& kgrid,
                                     const QuenchSchedule& schedule,
                                     const std::vector<double>& times,
                                     double tol = 1e-11);

/// Wronskian defect |Im(f conj(f'))*2 - 1| of a single evolved mode; exact
/// conservation is the integrator quality check.
double free_ramp_wronskian_error(double k, const QuenchSchedule& schedule,
                                 double t, double tol = 1e-11);

// --- exact diagonalization of small periodic chains ---------------------

struct ExactDiagOptions {
  long dim_cap = 2'000'000;   // refuse larger Hilbert spaces
  long dense_cap = 2'500;     // direct dense solve below this dimension
  double lanczos_tol = 1e-12;
  unsigned seed = 7;
};

struct ExactGroundResult {
  double energy = 0.0;          // total ground energy
  double energy_density = 0.0;  // energy / L
  double vev = 0.0;             // <phi> (zero by symmetry on finite chains)
  std::vector<double> g2_r;     // site-averaged <phi_0 phi_r>, r = 0..L/2
};

ExactGroundResult exact_ground(int L, const ModelParams& params,
                               const ExactDiagOptions& opts = {});

/// All eigenvalues of the chain (dense path only); used for spectrum checks.
Eigen::VectorXd exact_spectrum(int L, const ModelParams& params,
                               const ExactDiagOptions& opts = {});

/// Lowest n_levels eigenvalues via deflated Lanczos (any dimension under cap).
Eigen::VectorXd exact_spectrum_low(int L, const ModelParams& params,
                                   int n_levels,
                                   const ExactDiagOptions& opts = {});

/// Time evolution of the ground state of `initial` under the quench schedule
/// (lambda0 fixed), sampling site-averaged G2(r, t) at the given times.
/// Row i of the result is G2(r = 0..L/2) at times[i].
Eigen::MatrixXd exact_quench_g2r(int L, const ModelParams& initial,
                                 const QuenchSchedule& schedule,
                                 const std::vector<double>& times,
                                 double ode_tol = 1e-10,
                                 const ExactDiagOptions& opts = {});

}  // namespace kzmps::oracle

#endif
