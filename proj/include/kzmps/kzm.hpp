#ifndef KZMPS_KZM_HPP
#define KZMPS_KZM_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace kzmps::kzm {

/// Squared Fourier profile of the classical kink, ((pi x/2)/sinh(pi x/2))^2
/// with x = k d_K; the removable singularity at x = 0 evaluates to 1.
double g_kink(double x);

/// Phenomenological kink-distribution factor in momentum space,
/// a1 exp(-a2 y^2) + b1 / (1 + b2 y^2) with y = k/n.
double g_corr_momentum(double y, double alpha1, double alpha2, double beta1,
                       double beta2);

/// Real-space counterpart: a1 exp(-a2 (nr)^2) + b1 exp(-b2 nr).
double g_corr_real(double nr, double a1, double a2, double b1, double b2);

/// Thermal matter term 1/(w_k (e^{beta w_k} - 1)) on the lattice dispersion
/// w_k = sqrt(mu^2 + 4 sin^2(k/2)). Infinite at w_k = 0.
double g_mat(double k, double beta_temp, double mu_fit);

struct KinkConfiguration {
  double value = 0.0;
  int charge = 0;  // (phi(inf) - phi(-inf)) / (2v)
};

/// Classical (anti)kink profile +-v tanh(x / d_K) and its topological charge.
KinkConfiguration classical_kink(double x, double v, double d_K,
                                 bool antikink = false);

struct KZPredictionParams {
  double nu = 1.0;       // correlation-length exponent
  double mu_exp = 1.0;   // relaxation-time exponent (= nu for this theory)
  double xi0 = 1.0;
  double tau0 = 1.0;     // = 1/Delta0
  double Delta0 = 1.0;
  double D_co = 1.0;     // defect co-dimension (kinks: 1)
};

struct KZScales {
  double t_hat = 0.0;    // (negative) freeze-out time
  double eps_hat = 0.0;  // reduced-coupling distance at freeze-out
  double xi_hat = 0.0;   // frozen correlation length
  double n_predicted = 0.0;
};

/// Freeze-out scales of a linear quench epsilon = -t/tauQ:
///   t_hat = -(tau0 tauQ^mu)^{1/(1+mu)},  eps_hat = |t_hat| / tauQ,
///   xi_hat = xi0 (tauQ/tau0)^{nu/(1+mu)},  n = xi_hat^{-D_co}.
KZScales kz_scales(double tauQ, const KZPredictionParams& p);

/// Crossing of ratio(mu0sq) = threshold by linear interpolation; the series
/// is scanned in order and the first bracketing pair is used.
/// Returns eps_hat = mu0sq_cross - mc_sq.
double extract_epsilon_hat(const std::vector<double>& mu0sq,
                           const std::vector<double>& ratio, double mc_sq,
                           double threshold = 0.9);

struct FitResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;
  bool converged = false;
  bool at_bounds = false;
  int iterations = 0;
};

struct LmOptions {
  int max_iter = 400;
  double gtol = 1e-12;
  double xtol = 1e-14;
  double lambda_init = 1e-3;
};

/// Residual callback: fill r(p) and, when J != nullptr, the Jacobian dr/dp.
using ResidualFn = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&,
                                      Eigen::MatrixXd*)>;

/// Damped Gauss-Newton (Levenberg-Marquardt) with analytic Jacobians.
FitResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd p0,
                              int n_residuals, const LmOptions& opts = {});

/// Weighted power-law fit y = A x^p on log-log data; params = (A, p),
/// covariance for (ln A, p). Exact recovery on exact power-law input.
FitResult fit_power_law(const std::vector<double>& xs,
                        const std::vector<double>& ys,
                        const std::vector<double>& sigmas = {});

/// Four-parameter fit of the kink-distribution shape to collapsed data
/// (y_i, g_i) with optional weights; params = (alpha1, alpha2, beta1, beta2).
FitResult fit_g_corr(const std::vector<double>& y,
                     const std::vector<double>& g,
                     const std::vector<double>& sigmas = {},
                     const Eigen::Vector4d& p0 = {0.7, 0.12, 0.3, 0.18});

/// Fixed ingredients of the defect-ansatz fit; beta_temp and mu_fit free.
struct DefectAnsatzData {
  Eigen::VectorXd k;
  Eigen::VectorXd g2bar;     // time-averaged correlator
  Eigen::VectorXd g2vac;     // vacuum reference on the same grid
  Eigen::VectorXd sigmas;    // error estimates; zeros replaced by the median
  double n_est = 0.0;
  double v = 0.0;
  double d_K = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0, beta1 = 0.0, beta2 = 0.0;
};

/// Two-parameter (beta_temp, mu_fit) fit of the full defect ansatz
///   G_def(k) = (v^2/n) G_corr(k/n) G_kink(k d_K) + G_vac(k) + G_mat(k).
/// Positivity is enforced by fitting in log space; params returned in the
/// physical (beta_temp, mu_fit) variables.
FitResult fit_defect_ansatz(const DefectAnsatzData& data, double beta0 = 2.0,
                            double mu0 = 1.0);

/// Model value of the defect ansatz minus vacuum at one k.
double defect_ansatz_value(double k, const DefectAnsatzData& data,
                           double beta_temp, double mu_fit);

/// Normalized universal observable (G2bar - Gvac) / (G2bar(0) - Gvac(0)).
/// Index 0 of the input grids must be k = 0.
Eigen::VectorXd g_uni(const Eigen::VectorXd& g2bar, const Eigen::VectorXd& g2vac);

/// Relative spread max (max-min)/mean over a window of rescaled curves given
/// on per-curve grids xs (k/n) with values ys; curves are linearly
/// interpolated onto a common grid.
double collapse_metric(const std::vector<Eigen::VectorXd>& xs,
                       const std::vector<Eigen::VectorXd>& ys, double window_lo,
                       double window_hi, int n_grid = 64);

}  // namespace kzmps::kzm

#endif
