#include "kzmps/kzm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kzmps::kzm {

namespace {
constexpr double kPi = std::numbers::pi;
}

double g_kink(double x) {
  if (x < 0) throw std::domain_error("g_kink: x must be >= 0");
  const double u = 0.5 * kPi * x;
  if (u < 1e-4) {
    const double u2 = u * u;
    return 1.0 - u2 / 3.0 + u2 * u2 / 15.0;
  }
  if (u > 350.0) return 0.0;  // sinh overflows; the profile is long gone
  const double q = u / std::sinh(u);
  return q * q;
}

double g_corr_momentum(double y, double alpha1, double alpha2, double beta1,
                       double beta2) {
  return alpha1 * std::exp(-alpha2 * y * y) + beta1 / (1.0 + beta2 * y * y);
}

double g_corr_real(double nr, double a1, double a2, double b1, double b2) {
  return a1 * std::exp(-a2 * nr * nr) + b1 * std::exp(-b2 * nr);
}

double g_mat(double k, double beta_temp, double mu_fit) {
  if (beta_temp <= 0) throw std::domain_error("g_mat: beta must be positive");
  const double s = std::sin(0.5 * k);
  const double w = std::sqrt(mu_fit * mu_fit + 4.0 * s * s);
  if (w == 0.0) return std::numeric_limits<double>::infinity();
  const double bw = beta_temp * w;
  if (bw > 700.0) return 0.0;
  return 1.0 / (w * std::expm1(bw));
}

KinkConfiguration classical_kink(double x, double v, double d_K, bool antikink) {
  if (v <= 0 || d_K <= 0)
    throw std::domain_error("classical_kink: v and d_K must be positive");
  const double sign = antikink ? -1.0 : 1.0;
  KinkConfiguration c;
  c.value = sign * v * std::tanh(x / d_K);
  const double at_pinf = sign * v, at_minf = -sign * v;
  c.charge = static_cast<int>(std::lround((at_pinf - at_minf) / (2.0 * v)));
  return c;
}

KZScales kz_scales(double tauQ, const KZPredictionParams& p) {
  if (tauQ <= 0) throw std::domain_error("kz_scales: tauQ must be positive");
  KZScales s;
  const double mu = p.mu_exp;
  s.t_hat = -std::pow(p.tau0 * std::pow(tauQ, mu), 1.0 / (1.0 + mu));
  s.eps_hat = -s.t_hat / tauQ;
  s.xi_hat = p.xi0 * std::pow(tauQ / p.tau0, p.nu / (1.0 + mu));
  s.n_predicted = std::pow(s.xi_hat, -p.D_co);
  return s;
}

double extract_epsilon_hat(const std::vector<double>& mu0sq,
                           const std::vector<double>& ratio, double mc_sq,
                           double threshold) {
  if (mu0sq.size() != ratio.size() || mu0sq.size() < 2)
    throw std::invalid_argument("extract_epsilon_hat: malformed series");
  for (size_t i = 0; i + 1 < ratio.size(); ++i) {
    const double r0 = ratio[i], r1 = ratio[i + 1];
    if ((r0 - threshold) * (r1 - threshold) <= 0.0 && r0 != r1) {
      const double f = (threshold - r0) / (r1 - r0);
      const double mu_cross = mu0sq[i] + f * (mu0sq[i + 1] - mu0sq[i]);
      return mu_cross - mc_sq;
    }
  }
  throw std::runtime_error("extract_epsilon_hat: no threshold crossing in window");
}

FitResult levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd p0,
                              int n_residuals, const LmOptions& opts) {
  const int np = static_cast<int>(p0.size());
  FitResult out;
  Eigen::VectorXd r(n_residuals), r_try(n_residuals);
  Eigen::MatrixXd J(n_residuals, np);

  fn(p0, r, &J);
  double cost = 0.5 * r.squaredNorm();
  double lambda = opts.lambda_init;

  for (int it = 0; it < opts.max_iter; ++it) {
    out.iterations = it + 1;
    Eigen::MatrixXd JtJ = J.transpose() * J;
    Eigen::VectorXd g = J.transpose() * r;
    if (g.lpNorm<Eigen::Infinity>() < opts.gtol) {
      out.converged = true;
      break;
    }
    Eigen::MatrixXd Aug = JtJ;
    for (int i = 0; i < np; ++i) Aug(i, i) += lambda * std::max(JtJ(i, i), 1e-12);
    Eigen::VectorXd step = Aug.ldlt().solve(-g);
    if (step.norm() < opts.xtol * (p0.norm() + opts.xtol)) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd p_try = p0 + step;
    fn(p_try, r_try, nullptr);
    double cost_try = 0.5 * r_try.squaredNorm();
    if (cost_try < cost) {
      p0 = p_try;
      cost = cost_try;
      lambda = std::max(lambda / 3.0, 1e-12);
      fn(p0, r, &J);
    } else {
      lambda = std::min(lambda * 4.0, 1e12);
      if (lambda >= 1e12) break;
    }
  }

  fn(p0, r, &J);
  out.params = p0;
  out.residual_norm = r.norm();
  Eigen::MatrixXd JtJ = J.transpose() * J;
  out.covariance = JtJ.completeOrthogonalDecomposition().pseudoInverse();
  return out;
}

FitResult fit_power_law(const std::vector<double>& xs,
                        const std::vector<double>& ys,
                        const std::vector<double>& sigmas) {
  const int n = static_cast<int>(xs.size());
  if (n < 2 || ys.size() != xs.size())
    throw std::invalid_argument("fit_power_law: need >= 2 points");
  for (int i = 0; i < n; ++i)
    if (xs[i] <= 0 || ys[i] <= 0)
      throw std::invalid_argument("fit_power_law: inputs must be positive");

  // weighted linear regression of ln y on ln x
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd Y(n), w(n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::log(xs[i]);
    Y[i] = std::log(ys[i]);
    double s = sigmas.empty() ? 1.0 : sigmas[i] / ys[i];  // sigma of ln y
    w[i] = 1.0 / std::max(s, 1e-300);
  }
  Eigen::MatrixXd Xw = w.asDiagonal() * X;
  Eigen::VectorXd Yw = w.asDiagonal() * Y;
  Eigen::Matrix2d M = Xw.transpose() * Xw;
  Eigen::Vector2d b = Xw.transpose() * Yw;
  Eigen::Vector2d beta = M.ldlt().solve(b);

  FitResult out;
  out.params = Eigen::Vector2d(std::exp(beta[0]), beta[1]);
  out.covariance = M.inverse();
  if (sigmas.empty() && n > 2) {
    double rss = (Yw - Xw * beta).squaredNorm();
    out.covariance *= rss / (n - 2);
  }
  out.residual_norm = (Yw - Xw * beta).norm();
  out.converged = true;
  return out;
}

FitResult fit_g_corr(const std::vector<double>& y, const std::vector<double>& g,
                     const std::vector<double>& sigmas,
                     const Eigen::Vector4d& p0) {
  const int n = static_cast<int>(y.size());
  if (n < 4 || g.size() != y.size())
    throw std::invalid_argument("fit_g_corr: need >= 4 points");
  std::vector<double> w(n, 1.0);
  if (!sigmas.empty())
    for (int i = 0; i < n; ++i) w[i] = 1.0 / std::max(sigmas[i], 1e-300);

  ResidualFn fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                      Eigen::MatrixXd* J) {
    for (int i = 0; i < n; ++i) {
      const double yy = y[i], y2 = yy * yy;
      const double ga = std::exp(-p[1] * y2);
      const double gl = 1.0 / (1.0 + p[3] * y2);
      r[i] = w[i] * (p[0] * ga + p[2] * gl - g[i]);
      if (J) {
        (*J)(i, 0) = w[i] * ga;
        (*J)(i, 1) = w[i] * (-p[0] * y2 * ga);
        (*J)(i, 2) = w[i] * gl;
        (*J)(i, 3) = w[i] * (-p[2] * y2 * gl * gl);
      }
    }
  };
  auto out = levenberg_marquardt(fn, p0, n);
  if (sigmas.empty() && n > 4)
    out.covariance *= out.residual_norm * out.residual_norm / (n - 4);
  return out;
}

double defect_ansatz_value(double k, const DefectAnsatzData& d, double beta_temp,
                           double mu_fit) {
  const double uni = (d.v * d.v / d.n_est) *
                     g_corr_momentum(k / d.n_est, d.alpha1, d.alpha2, d.beta1,
                                     d.beta2) *
                     g_kink(k * d.d_K);
  return uni + g_mat(k, beta_temp, mu_fit);
}

FitResult fit_defect_ansatz(const DefectAnsatzData& data, double beta0,
                            double mu0) {
  const int n = static_cast<int>(data.k.size());
  if (n < 3) throw std::invalid_argument("fit_defect_ansatz: too few points");
  if (data.n_est <= 0 || data.v <= 0 || data.d_K <= 0)
    throw std::invalid_argument("fit_defect_ansatz: fixed inputs must be positive");

  // weights: zero/unset sigmas take the median of the nonzero ones
  Eigen::VectorXd sig = data.sigmas;
  if (sig.size() != n) sig = Eigen::VectorXd::Zero(n);
  std::vector<double> nz;
  for (int i = 0; i < n; ++i)
    if (sig[i] > 0) nz.push_back(sig[i]);
  double med = 1.0;
  if (!nz.empty()) {
    std::nth_element(nz.begin(), nz.begin() + nz.size() / 2, nz.end());
    med = nz[nz.size() / 2];
  }
  for (int i = 0; i < n; ++i)
    if (sig[i] <= 0) sig[i] = med;

  // fit in log space: p = (ln beta, ln mu) keeps both parameters positive
  ResidualFn fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r,
                      Eigen::MatrixXd* J) {
    const double beta = std::exp(p[0]);
    const double mu = std::exp(p[1]);
    for (int i = 0; i < n; ++i) {
      const double k = data.k[i];
      const double wgt = 1.0 / sig[i];
      const double model =
          defect_ansatz_value(k, data, beta, mu) + data.g2vac[i];
      r[i] = wgt * (model - data.g2bar[i]);
      if (J) {
        const double s = std::sin(0.5 * k);
        const double w = std::sqrt(mu * mu + 4.0 * s * s);
        double dgdbeta = 0.0, dgdw = 0.0;
        if (w > 0 && beta * w < 700.0) {
          const double ex = std::exp(beta * w);
          const double denom = w * (ex - 1.0);
          dgdbeta = -w * ex / (denom * denom) * w;  // d/dbeta of 1/(w(e^{bw}-1))
          dgdw = -((ex - 1.0) + w * beta * ex) / (denom * denom);
        }
        const double dwdmu = (w > 0) ? mu / w : 0.0;
        (*J)(i, 0) = wgt * dgdbeta * beta;          // chain through ln beta
        (*J)(i, 1) = wgt * dgdw * dwdmu * mu;       // chain through ln mu
      }
    }
  };

  Eigen::VectorXd p0(2);
  p0 << std::log(beta0), std::log(mu0);
  auto res = levenberg_marquardt(fn, p0, n);

  FitResult out = res;
  const double beta = std::exp(res.params[0]);
  const double mu = std::exp(res.params[1]);
  out.params = Eigen::Vector2d(beta, mu);
  // delta method back to physical variables
  Eigen::Matrix2d Jt = Eigen::Matrix2d::Zero();
  Jt(0, 0) = beta;
  Jt(1, 1) = mu;
  out.covariance = Jt * res.covariance * Jt.transpose();
  out.at_bounds = std::abs(res.params[0]) > 25.0 || std::abs(res.params[1]) > 25.0;
  return out;
}

Eigen::VectorXd g_uni(const Eigen::VectorXd& g2bar, const Eigen::VectorXd& g2vac) {
  if (g2bar.size() != g2vac.size() || g2bar.size() == 0)
    throw std::invalid_argument("g_uni: size mismatch");
  const double denom = g2bar[0] - g2vac[0];
  if (denom == 0.0) throw std::runtime_error("g_uni: zero denominator at k=0");
  return (g2bar - g2vac) / denom;
}

double collapse_metric(const std::vector<Eigen::VectorXd>& xs,
                       const std::vector<Eigen::VectorXd>& ys, double window_lo,
                       double window_hi, int n_grid) {
  if (xs.size() < 2 || xs.size() != ys.size())
    throw std::invalid_argument("collapse_metric: need >= 2 curves");
  if (!(window_hi > window_lo))
    throw std::invalid_argument("collapse_metric: empty window");

  // common window must lie inside every curve's domain
  double lo = window_lo, hi = window_hi;
  for (const auto& x : xs) {
    lo = std::max(lo, x[0]);
    hi = std::min(hi, x[x.size() - 1]);
  }
  if (!(hi > lo)) throw std::runtime_error("collapse_metric: empty overlap");

  auto interp = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                   double at) {
    int j = 1;
    while (j < x.size() - 1 && x[j] < at) ++j;
    const double f = (at - x[j - 1]) / (x[j] - x[j - 1]);
    return y[j - 1] + f * (y[j] - y[j - 1]);
  };

  double spread = 0.0;
  for (int i = 0; i < n_grid; ++i) {
    const double at = lo + (hi - lo) * i / (n_grid - 1);
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin,
           mean = 0.0;
    for (size_t c = 0; c < xs.size(); ++c) {
      const double v = interp(xs[c], ys[c], at);
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
      mean += v;
    }
    mean /= static_cast<double>(xs.size());
    if (mean != 0.0) spread = std::max(spread, (vmax - vmin) / std::abs(mean));
  }
  return spread;
}

}  // namespace kzmps::kzm
