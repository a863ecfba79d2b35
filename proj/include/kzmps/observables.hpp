#ifndef KZMPS_OBSERVABLES_HPP
#define KZMPS_OBSERVABLES_HPP

#include <Eigen/Dense>
#include <vector>

#include "kzmps/umps.hpp"

namespace kzmps {

/// One evolution snapshot: the real-space correlator plus bookkeeping.
struct CorrelatorRecord {
  double time = 0.0;
  std::vector<double> g2_r;      // <phi_0 phi_r>, r = 0..r_max
  double norm = 1.0;             // per-site norm of the last step, pre-renormalization
  double energy_density = 0.0;
  double entropy = 0.0;
};

struct MomentumCorrelator {
  Eigen::VectorXd k;
  Eigen::VectorXd g2k;
  double truncation_error = 0.0;  // estimate of the neglected real-space tail
};

/// Cosine transform G2(k) = G2(0) + 2 sum_{r>=1} cos(k r) G2(r).
MomentumCorrelator momentum_transform(const std::vector<double>& g2_r,
                                      const Eigen::VectorXd& k_grid);

struct MomentumSeries {
  Eigen::VectorXd k;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> g2k;
};

MomentumSeries to_momentum_series(const std::vector<CorrelatorRecord>& records,
                                  const Eigen::VectorXd& k_grid);

/// Trapezoidal time average of G2(k, t) over [t_F, t_F + t_R]. With t_R = 0
/// the snapshot at t_F is returned. Throws when the window holds no data.
Eigen::VectorXd time_average(const MomentumSeries& series, double t_F,
                             double t_R);

/// n_est = (G2bar(0) - G2vac(0)) / v^2. Throws when the subtracted value is
/// negative beyond roundoff, carrying both raw values in the message.
double estimate_defect_density(double g2bar_k0, double g2vac_k0, double v);

/// m_S = 1 / xi from the transfer spectrum of a converged ground state.
double scalar_mass(const CanonicalUMPS& ground);

/// Uniform grid of n points on [0, pi].
Eigen::VectorXd default_k_grid(int n = 256);

}  // namespace kzmps

#endif
