#ifndef KZMPS_TDVP_HPP
#define KZMPS_TDVP_HPP

#include <functional>
#include <vector>

#include "kzmps/lattice_model.hpp"
#include "kzmps/observables.hpp"
#include "kzmps/umps.hpp"
#include "kzmps/vumps.hpp"

namespace kzmps {

/// Tangent-space direction in the left gauge, sum_n AL[n]^dag B[n] = 0.
struct TangentTensor {
  SiteTensor B;
  double gauge_residual = 0.0;
};

struct EvolverConfig {
  double step = 1e-2;
  int sample_every = 100;
  double env_tol = 1e-12;      // environment linear solves
  double fp_tol = 1e-13;       // transfer fixed points
  double pinv_cutoff = 1e-12;  // relative spectral cutoff for l, r inverses
  double canon_tol = 1e-12;
  int r_max = 200;
  double tail_tol = 1e-10;

  void validate() const;
};

/// Reusable warm-start data across Runge-Kutta stages and steps.
struct TdvpWorkspace {
  Mat l, r, HL, HR;
  bool has_fp = false;
  bool has_env = false;
};

/// Projection of H|psi> onto the gauge-fixed tangent space at psi; the
/// evolution direction is dA/dt = -i B.
TangentTensor tangent_derivative(const CanonicalUMPS& psi, const NNHamiltonian& h,
                                 const EvolverConfig& cfg = {});

struct StepStats {
  double norm = 1.0;  // per-site norm before renormalization
};

/// One fixed-size 5th-order Runge-Kutta (Fehlberg tableau) step of the
/// tangent-space flow, with the bare mass evaluated at each stage time.
/// The result is re-canonicalized and re-normalized.
CanonicalUMPS rk5_step(const CanonicalUMPS& psi, const ModelParams& model,
                       const QuenchSchedule& schedule, double t,
                       const EvolverConfig& cfg, TdvpWorkspace* ws = nullptr,
                       StepStats* stats = nullptr);

using SnapshotObserver =
    std::function<void(const CorrelatorRecord&, const CanonicalUMPS&)>;

/// Integrate the quench from t = 0 to t_F + t_relax, sampling observables
/// every sample_every steps. `start_time`/`start_state` support resumption.
std::vector<CorrelatorRecord> evolve_quench(
    const CanonicalUMPS& initial, const ModelParams& model,
    const QuenchSchedule& schedule, const EvolverConfig& cfg,
    const SnapshotObserver& observer = {});

/// Observable snapshot of a state under the instantaneous Hamiltonian.
CorrelatorRecord take_snapshot(const CanonicalUMPS& psi, const ModelParams& model,
                               double mu0sq_now, double t, double norm,
                               const EvolverConfig& cfg);

}  // namespace kzmps

#endif
