#include "kzmps/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kzmps/linalg.hpp"
#include "kzmps/numeric.hpp"

namespace kzmps::oracle {

namespace {
constexpr double kPi = std::numbers::pi;

double omega_sq(double k, double musq) {
  double s = std::sin(0.5 * k);
  return musq + 4.0 * s * s;
}
}  // namespace

double free_dispersion(double k, double musq) {
  double w2 = omega_sq(k, musq);
  if (w2 < 0.0)
    throw std::domain_error("free_dispersion: unstable mode (w^2 < 0)");
  return std::sqrt(w2);
}

double free_ground_g2k(double k, double musq) {
  if (musq <= 0.0)
    throw std::domain_error("free_ground_g2k: requires musq > 0");
  return 0.5 / free_dispersion(k, musq);
}

double free_ground_g2r(int r, double musq, double reltol) {
  if (musq <= 0.0)
    throw std::domain_error("free_ground_g2r: requires musq > 0");
  auto f = [&](double k) {
    return std::cos(k * r) * 0.5 / std::sqrt(omega_sq(k, musq));
  };
  return numeric::integrate_periodic(f, 0.0, 2.0 * kPi, reltol) / (2.0 * kPi);
}

double free_lattice_mass(double musq) {
  if (musq <= 0.0)
    throw std::domain_error("free_lattice_mass: requires musq > 0");
  return 2.0 * std::asinh(0.5 * std::sqrt(musq));
}

double free_ground_energy_density(double musq, double reltol) {
  if (musq <= 0.0)
    throw std::domain_error("free_ground_energy_density: requires musq > 0");
  auto f = [&](double k) { return 0.5 * std::sqrt(omega_sq(k, musq)); };
  return numeric::integrate_periodic(f, 0.0, 2.0 * kPi, reltol) / (2.0 * kPi);
}

double free_quench_g2k(double k, double musq_initial, double musq_final,
                       double t) {
  const double wi = free_dispersion(k, musq_initial);
  const double wf2 = omega_sq(k, musq_final);
  const double g0 = 0.5 / wi;
  if (wf2 > 0.0) {
    const double wf = std::sqrt(wf2);
    const double c = std::cos(wf * t), s = std::sin(wf * t);
    return g0 * (c * c + (wi * wi / wf2) * s * s);
  }
  if (wf2 == 0.0) return g0 * (1.0 + wi * wi * t * t);
  const double kap = std::sqrt(-wf2);
  const double ch = std::cosh(kap * t), sh = std::sinh(kap * t);
  return g0 * (ch * ch + (wi * wi / (kap * kap)) * sh * sh);
}

namespace {

// y = (f, f'), f'' = -w^2(t) f
void integrate_mode(double k, const QuenchSchedule& schedule, double t0,
                    double t1, Eigen::VectorXcd& y, double tol) {
  auto rhs = [&](double t, const Eigen::VectorXcd& yv, Eigen::VectorXcd& dy) {
    const double w2 = omega_sq(k, schedule_value(schedule, t));
    dy.resize(2);
    dy[0] = yv[1];
    dy[1] = -w2 * yv[0];
  };
  numeric::OdeOptions opts;
  opts.rtol = tol;
  opts.atol = tol * 1e-2;
  opts.h0 = 1e-3;
  // the schedule has a kink at t_F; split there so the controller never
  // steps across a discontinuous derivative
  const double tF = schedule.t_final();
  if (t0 < tF && t1 > tF) {
    numeric::integrate_ode(rhs, t0, tF, y, opts);
    numeric::integrate_ode(rhs, tF, t1, y, opts);
  } else {
    numeric::integrate_ode(rhs, t0, t1, y, opts);
  }
}

Eigen::VectorXcd mode_initial(double k, const QuenchSchedule& schedule) {
  const double w0 = free_dispersion(k, schedule.mu0sq_start);
  Eigen::VectorXcd y(2);
  y[0] = 1.0 / std::sqrt(2.0 * w0);
  y[1] = std::complex<double>(0.0, -w0) * y[0];
  return y;
}

}  // namespace

double free_ramp_g2k(double k, const QuenchSchedule& schedule, double t,
                     double tol) {
  if (schedule.mu0sq_start <= 0.0)
    throw std::domain_error("free_ramp_g2k: initial musq must be positive");
  Eigen::VectorXcd y = mode_initial(k, schedule);
  integrate_mode(k, schedule, 0.0, t, y, tol);
  return std::norm(y[0]);
}

Eigen::MatrixXd free_ramp_g2k_series(const Eigen::VectorXd& kgrid,
                                     const QuenchSchedule& schedule,
                                     const std::vector<double>& times,
                                     double tol) {
  Eigen::MatrixXd out(times.size(), kgrid.size());
  for (int j = 0; j < kgrid.size(); ++j) {
    Eigen::VectorXcd y = mode_initial(kgrid[j], schedule);
    double t = 0.0;
    for (size_t i = 0; i < times.size(); ++i) {
      if (times[i] < t)
        throw std::invalid_argument("free_ramp_g2k_series: times not sorted");
      if (times[i] > t) integrate_mode(kgrid[j], schedule, t, times[i], y, tol);
      t = times[i];
      out(i, j) = std::norm(y[0]);
    }
  }
  return out;
}

double free_ramp_wronskian_error(double k, const QuenchSchedule& schedule,
                                 double t, double tol) {
  Eigen::VectorXcd y = mode_initial(k, schedule);
  integrate_mode(k, schedule, 0.0, t, y, tol);
  return std::abs(2.0 * std::imag(y[0] * std::conj(y[1])) - 1.0);
}

// --- exact diagonalization ----------------------------------------------

namespace {

long int_pow(int b, int e) {
  long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

struct Chain {
  int L = 0, d = 0;
  long dim = 0;
  Eigen::MatrixXcd h1, P, Q, phi;

  Chain(int L_, const ModelParams& params) : L(L_), d(params.d) {
    if (L < 2) throw std::invalid_argument("exact diag: L must be >= 2");
    dim = int_pow(d, L);
    auto terms = hamiltonian_terms(params);
    h1 = terms.one_site;
    P = terms.two_site_left;
    Q = terms.two_site_right;
    phi = build_local_operators(d).phi;
  }

  void apply_site(const Eigen::MatrixXcd& O, int x, const Eigen::VectorXcd& in,
                  Eigen::VectorXcd& out) const {
    const long stride = int_pow(d, x);
    const long block = stride * d;
    out.setZero();
    for (long base = 0; base < dim; base += block) {
      for (long off = 0; off < stride; ++off) {
        const long at = base + off;
        for (int m = 0; m < d; ++m) {
          std::complex<double> acc = 0.0;
          for (int n = 0; n < d; ++n) acc += O(m, n) * in[at + n * stride];
          out[at + m * stride] = acc;
        }
      }
    }
  }

  // out += H psi with the one-site term evaluated at bare mass musq
  void apply_h(double musq, double musq_ref, const Eigen::MatrixXcd& phi2,
               const Eigen::VectorXcd& in, Eigen::VectorXcd& out,
               Eigen::VectorXcd& tmp, Eigen::VectorXcd& tmp2) const {
    Eigen::MatrixXcd h1t = h1 + (0.5 * (musq - musq_ref)) * phi2;
    out.setZero();
    for (int x = 0; x < L; ++x) {
      apply_site(h1t, x, in, tmp);
      out += tmp;
      apply_site(Q, (x + 1) % L, in, tmp);
      apply_site(P, x, tmp, tmp2);
      out += tmp2;
    }
  }
};

std::vector<double> site_averaged_g2(const Chain& chain,
                                     const Eigen::VectorXcd& psi) {
  const int L = chain.L;
  std::vector<Eigen::VectorXcd> phix(L, Eigen::VectorXcd(chain.dim));
  for (int x = 0; x < L; ++x) chain.apply_site(chain.phi, x, psi, phix[x]);
  std::vector<double> g2(L / 2 + 1, 0.0);
  for (int r = 0; r <= L / 2; ++r) {
    std::complex<double> acc = 0.0;
    for (int x = 0; x < L; ++x) acc += phix[x].dot(phix[(x + r) % L]);
    g2[r] = acc.real() / L;
  }
  return g2;
}

}  // namespace

ExactGroundResult exact_ground(int L, const ModelParams& params,
                               const ExactDiagOptions& opts) {
  params.validate();
  Chain chain(L, params);
  if (chain.dim > opts.dim_cap)
    throw std::runtime_error("exact_ground: Hilbert dimension above cap");
  const Eigen::MatrixXcd phi2 = chain.phi * chain.phi;

  Eigen::VectorXcd psi;
  double e0 = 0.0;
  Eigen::VectorXcd tmp(chain.dim), tmp2(chain.dim);
  linalg::LinOp H = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    y.resize(chain.dim);
    chain.apply_h(params.mu0sq, params.mu0sq, phi2, x, y, tmp, tmp2);
  };
  if (chain.dim <= opts.dense_cap) {
    Eigen::MatrixXd Hm(chain.dim, chain.dim);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(chain.dim), col(chain.dim);
    for (long j = 0; j < chain.dim; ++j) {
      e[j] = 1.0;
      H(e, col);
      Hm.col(j) = col.real();
      e[j] = 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hm);
    e0 = es.eigenvalues()[0];
    psi = es.eigenvectors().col(0).cast<std::complex<double>>();
  } else {
    auto res = linalg::lanczos_lowest(H, static_cast<int>(chain.dim),
                                      opts.lanczos_tol, nullptr, 60, 200);
    if (!res.converged)
      throw std::runtime_error("exact_ground: Lanczos did not converge");
    e0 = res.value;
    psi = res.vector;
  }

  ExactGroundResult out;
  out.energy = e0;
  out.energy_density = e0 / L;
  Eigen::VectorXcd phipsi(chain.dim);
  chain.apply_site(chain.phi, 0, psi, phipsi);
  out.vev = psi.dot(phipsi).real();
  out.g2_r = site_averaged_g2(chain, psi);
  return out;
}

Eigen::VectorXd exact_spectrum(int L, const ModelParams& params,
                               const ExactDiagOptions& opts) {
  params.validate();
  Chain chain(L, params);
  if (chain.dim > opts.dense_cap)
    throw std::runtime_error("exact_spectrum: dense path only");
  const Eigen::MatrixXcd phi2 = chain.phi * chain.phi;
  Eigen::VectorXcd tmp(chain.dim), tmp2(chain.dim);
  Eigen::MatrixXd Hm(chain.dim, chain.dim);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(chain.dim), col(chain.dim);
  for (long j = 0; j < chain.dim; ++j) {
    e[j] = 1.0;
    chain.apply_h(params.mu0sq, params.mu0sq, phi2, e, col, tmp, tmp2);
    Hm.col(j) = col.real();
    e[j] = 0.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hm);
  return es.eigenvalues();
}

Eigen::VectorXd exact_spectrum_low(int L, const ModelParams& params,
                                   int n_levels, const ExactDiagOptions& opts) {
  params.validate();
  Chain chain(L, params);
  if (chain.dim > opts.dim_cap)
    throw std::runtime_error("exact_spectrum_low: Hilbert dimension above cap");
  const Eigen::MatrixXcd phi2 = chain.phi * chain.phi;
  Eigen::VectorXcd tmp(chain.dim), tmp2(chain.dim);
  linalg::LinOp H = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    y.resize(chain.dim);
    chain.apply_h(params.mu0sq, params.mu0sq, phi2, x, y, tmp, tmp2);
  };
  // a couple of spare levels guard against near-degenerate ordering noise
  const int extra = std::min<long>(2, chain.dim - n_levels);
  auto res = linalg::lanczos_lowest_k(H, static_cast<int>(chain.dim),
                                      n_levels + extra, opts.lanczos_tol, 60,
                                      300);
  std::vector<double> vals;
  for (const auto& r : res) {
    if (!r.converged)
      throw std::runtime_error("exact_spectrum_low: Lanczos did not converge");
    vals.push_back(r.value);
  }
  std::sort(vals.begin(), vals.end());
  Eigen::VectorXd out(n_levels);
  for (int i = 0; i < n_levels; ++i) out[i] = vals[i];
  return out;
}

Eigen::MatrixXd exact_quench_g2r(int L, const ModelParams& initial,
                                 const QuenchSchedule& schedule,
                                 const std::vector<double>& times,
                                 double ode_tol, const ExactDiagOptions& opts) {
  auto ground = exact_ground(L, initial, opts);
  Chain chain(L, initial);
  const Eigen::MatrixXcd phi2 = chain.phi * chain.phi;

  // rebuild the ground state vector (exact_ground discards it); cheaper to
  // recompute than to widen the interface
  Eigen::VectorXcd tmp(chain.dim), tmp2(chain.dim);
  linalg::LinOp H0 = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
    y.resize(chain.dim);
    chain.apply_h(initial.mu0sq, initial.mu0sq, phi2, x, y, tmp, tmp2);
  };
  Eigen::VectorXcd psi;
  if (chain.dim <= opts.dense_cap) {
    Eigen::MatrixXd Hm(chain.dim, chain.dim);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(chain.dim), col(chain.dim);
    for (long j = 0; j < chain.dim; ++j) {
      e[j] = 1.0;
      H0(e, col);
      Hm.col(j) = col.real();
      e[j] = 0.0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hm);
    psi = es.eigenvectors().col(0).cast<std::complex<double>>();
  } else {
    auto res = linalg::lanczos_lowest(H0, static_cast<int>(chain.dim),
                                      opts.lanczos_tol, nullptr, 60, 200);
    psi = res.vector;
  }

  auto rhs = [&](double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    dy.resize(chain.dim);
    Eigen::VectorXcd hy(chain.dim);
    chain.apply_h(schedule_value(schedule, t), initial.mu0sq, phi2, y, hy, tmp,
                  tmp2);
    dy = std::complex<double>(0.0, -1.0) * hy;
  };

  numeric::OdeOptions ode;
  ode.rtol = ode_tol;
  ode.atol = ode_tol * 1e-2;
  ode.h0 = 1e-3;

  Eigen::MatrixXd out(times.size(), L / 2 + 1);
  double t = 0.0;
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t)
      throw std::invalid_argument("exact_quench_g2r: times not sorted");
    if (times[i] > t) {
      const double tF = schedule.t_final();
      if (t < tF && times[i] > tF) {
        numeric::integrate_ode(rhs, t, tF, psi, ode);
        numeric::integrate_ode(rhs, tF, times[i], psi, ode);
      } else {
        numeric::integrate_ode(rhs, t, times[i], psi, ode);
      }
      t = times[i];
      psi.normalize();
    }
    auto g2 = site_averaged_g2(chain, psi);
    for (int r = 0; r <= L / 2; ++r) out(i, r) = g2[r];
  }
  return out;
}

}  // namespace kzmps::oracle
