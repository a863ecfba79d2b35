#include "kzmps/observables.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace kzmps {

MomentumCorrelator momentum_transform(const std::vector<double>& g2_r,
                                      const Eigen::VectorXd& k_grid) {
  if (g2_r.size() < 2)
    throw std::invalid_argument("momentum_transform: need r_max >= 1");
  MomentumCorrelator out;
  out.k = k_grid;
  out.g2k.resize(k_grid.size());
  const int rmax = static_cast<int>(g2_r.size()) - 1;
  for (int i = 0; i < k_grid.size(); ++i) {
    double acc = g2_r[0];
    for (int r = 1; r <= rmax; ++r) acc += 2.0 * std::cos(k_grid[i] * r) * g2_r[r];
    out.g2k[i] = acc;
  }
  // geometric estimate of the dropped tail from the last two entries
  const double a = std::abs(g2_r[rmax]);
  const double b = std::abs(g2_r[rmax - 1]);
  double q = (b > 0) ? std::min(a / b, 0.99) : 0.0;
  out.truncation_error = 2.0 * a * q / (1.0 - q);
  return out;
}

MomentumSeries to_momentum_series(const std::vector<CorrelatorRecord>& records,
                                  const Eigen::VectorXd& k_grid) {
  MomentumSeries s;
  s.k = k_grid;
  s.times.reserve(records.size());
  s.g2k.reserve(records.size());
  for (const auto& rec : records) {
    s.times.push_back(rec.time);
    s.g2k.push_back(momentum_transform(rec.g2_r, k_grid).g2k);
  }
  return s;
}

Eigen::VectorXd time_average(const MomentumSeries& series, double t_F,
                             double t_R) {
  if (t_R < 0) throw std::invalid_argument("time_average: negative window");
  const double eps = 1e-9;
  std::vector<int> idx;
  for (size_t i = 0; i < series.times.size(); ++i)
    if (series.times[i] >= t_F - eps && series.times[i] <= t_F + t_R + eps)
      idx.push_back(static_cast<int>(i));
  if (idx.empty()) throw std::runtime_error("time_average: empty window");
  if (idx.size() == 1 || t_R == 0.0) return series.g2k[idx.front()];

  Eigen::VectorXd acc = Eigen::VectorXd::Zero(series.k.size());
  double span = 0.0;
  for (size_t j = 0; j + 1 < idx.size(); ++j) {
    const double dt = series.times[idx[j + 1]] - series.times[idx[j]];
    acc += 0.5 * dt * (series.g2k[idx[j]] + series.g2k[idx[j + 1]]);
    span += dt;
  }
  if (span <= 0) throw std::runtime_error("time_average: degenerate window");
  return acc / span;
}

double estimate_defect_density(double g2bar_k0, double g2vac_k0, double v) {
  if (v <= 0.0)
    throw std::invalid_argument("estimate_defect_density: v must be positive");
  const double num = g2bar_k0 - g2vac_k0;
  if (num < 0.0) {
    std::ostringstream os;
    os << "estimate_defect_density: negative subtracted correlator, G2bar(0)="
       << g2bar_k0 << " G2vac(0)=" << g2vac_k0;
    throw std::runtime_error(os.str());
  }
  return num / (v * v);
}

double scalar_mass(const CanonicalUMPS& ground) {
  const double xi = correlation_length(ground);
  if (xi <= 0.0)
    throw std::runtime_error("scalar_mass: state has zero correlation length");
  return 1.0 / xi;
}

Eigen::VectorXd default_k_grid(int n) {
  return Eigen::VectorXd::LinSpaced(n, 0.0, std::numbers::pi);
}

}  // namespace kzmps
