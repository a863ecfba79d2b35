#ifndef KZMPS_VUMPS_HPP
#define KZMPS_VUMPS_HPP

#include "kzmps/lattice_model.hpp"
#include "kzmps/umps.hpp"

namespace kzmps {

/// Nearest-neighbour Hamiltonian density: h1 on each site plus the product
/// coupling P_x Q_{x+1} on each bond.
struct NNHamiltonian {
  Mat h1, P, Q;

  static NNHamiltonian from_terms(const HamiltonianTerms& t) {
    return {t.one_site, t.two_site_left, t.two_site_right};
  }
};

/// Energy-subtracted block environments of a canonical state:
///   (1 - T + fixed-point projector) env = local inhomogeneity - e * id.
struct Environments {
  Mat HL, HR;
  double energy_density = 0.0;
  double residual_left = 0.0;
  double residual_right = 0.0;
};

Environments solve_environments(const CanonicalUMPS& psi, const NNHamiltonian& h,
                                double tol, const Environments* warm = nullptr);

/// Effective Hamiltonian applications used by the solver and the evolver.
SiteTensor apply_h_ac(const CanonicalUMPS& psi, const NNHamiltonian& h,
                      const Environments& env, const SiteTensor& AC);
Mat apply_h_c(const CanonicalUMPS& psi, const NNHamiltonian& h,
              const Environments& env, const Mat& C);

double energy_density(const CanonicalUMPS& psi, const NNHamiltonian& h);

struct GroundStateResult {
  CanonicalUMPS state;
  double energy_density = 0.0;
  double gradient_norm = 0.0;
  double vev = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct VumpsOptions {
  double tol_gradient = 1e-8;
  int max_iter = 2000;
  double env_tol = 1e-13;
  double bias = 0.0;      // seeds <phi> != 0 through a -bias*phi one-site field
  double noise = 0.05;    // initial-tensor perturbation around the product seed
  unsigned seed = 1;
  const CanonicalUMPS* warm_start = nullptr;
};

/// Variational uMPS ground-state search at fixed bond dimension.
GroundStateResult find_ground_state(const ModelParams& params, int chi,
                                    const VumpsOptions& opts = {});

}  // namespace kzmps

#endif
