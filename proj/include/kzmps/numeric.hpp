#ifndef KZMPS_NUMERIC_HPP
#define KZMPS_NUMERIC_HPP

#include <Eigen/Dense>
#include <functional>

namespace kzmps::numeric {

/// Integral of a smooth periodic function over one full period [a, b].
/// Trapezoidal sums converge geometrically for periodic integrands; the grid
/// is doubled until the relative change drops below reltol.
double integrate_periodic(const std::function<double(double)>& f, double a,
                          double b, double reltol = 1e-12,
                          int max_doublings = 22);

/// Adaptive Simpson quadrature for general smooth integrands.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol = 1e-10, int max_depth = 40);

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double h0 = 1e-3;
  double hmax = 0.0;  // 0 = no cap
  long max_steps = 20'000'000;
};

/// Dormand-Prince 5(4) adaptive integration of y' = f(t, y) from t0 to t1.
/// Throws if the tolerance cannot be met within max_steps.
void integrate_ode(
    const std::function<void(double, const Eigen::VectorXcd&,
                             Eigen::VectorXcd&)>& f,
    double t0, double t1, Eigen::VectorXcd& y, const OdeOptions& opts = {});

}  // namespace kzmps::numeric

#endif
