#include "kzmps/numeric.hpp"

#include <cmath>
#include <stdexcept>

namespace kzmps::numeric {

double integrate_periodic(const std::function<double(double)>& f, double a,
                          double b, double reltol, int max_doublings) {
  const double len = b - a;
  int n = 16;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += f(a + len * i / n);
  double prev = sum * len / n;
  for (int k = 0; k < max_doublings; ++k) {
    // add the midpoints of the current grid
    double add = 0.0;
    for (int i = 0; i < n; ++i) add += f(a + len * (i + 0.5) / n);
    sum += add;
    n *= 2;
    double cur = sum * len / n;
    double scale = std::max(std::abs(cur), 1e-300);
    if (std::abs(cur - prev) < reltol * scale && k > 1) return cur;
    prev = cur;
  }
  return prev;
}

namespace {
double simpson(const std::function<double(double)>& f, double a, double fa,
               double b, double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_rec(const std::function<double(double)>& f, double a,
                    double fa, double b, double fb, double m, double fm,
                    double whole, double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(f, a, fa, m, fm, lm, flm);
  double right = simpson(f, m, fm, b, fb, rm, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double tol, int max_depth) {
  double fa = f(a), fb = f(b), m = 0.5 * (a + b), fm = f(m);
  double whole = simpson(f, a, fa, b, fb, m, fm);
  return adaptive_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

void integrate_ode(
    const std::function<void(double, const Eigen::VectorXcd&,
                             Eigen::VectorXcd&)>& f,
    double t0, double t1, Eigen::VectorXcd& y, const OdeOptions& opts) {
  // Dormand-Prince 5(4) coefficients
  static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (t1 == t0) return;
  const double dir = (t1 > t0) ? 1.0 : -1.0;
  double t = t0;
  double h = dir * std::abs(opts.h0);
  const int n = static_cast<int>(y.size());
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n),
      ynew(n), err(n);
  long steps = 0;

  f(t, y, k1);
  while (dir * (t1 - t) > 0) {
    if (dir * (t + h - t1) > 0) h = t1 - t;
    if (opts.hmax > 0 && std::abs(h) > opts.hmax) h = dir * opts.hmax;
    if (++steps > opts.max_steps)
      throw std::runtime_error("integrate_ode: step limit exceeded");

    ytmp = y + h * a21 * k1;
    f(t + c[1] * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c[2] * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c[3] * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c[4] * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + c[5] * h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + h, ynew, k7);
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double errnorm = 0.0;
    for (int i = 0; i < n; ++i) {
      double sc = opts.atol +
                  opts.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      double e = std::abs(err[i]) / sc;
      errnorm += e * e;
    }
    errnorm = std::sqrt(errnorm / n);

    if (errnorm <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);  // first-same-as-last
    }
    double fac = 0.9 * std::pow(std::max(errnorm, 1e-10), -0.2);
    fac = std::min(5.0, std::max(0.2, fac));
    h *= fac;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t)))
      throw std::runtime_error("integrate_ode: step size underflow");
  }
}

}  // namespace kzmps::numeric
