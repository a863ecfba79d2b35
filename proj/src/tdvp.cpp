#include "kzmps/tdvp.hpp"

#include <cmath>
#include <stdexcept>

#include "kzmps/linalg.hpp"

namespace kzmps {

namespace {

using linalg::Vec;

Vec flatten(const Mat& X) { return Eigen::Map<const Vec>(X.data(), X.size()); }

Mat unflatten(const Vec& v, int rows, int cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

// Tangent projection of H|psi> for a general (not necessarily canonical)
// tensor. All geometric data lives in the fixed points l, r of the tensor's
// own transfer matrix; the result B satisfies sum_n A[n]^dag l B[n] = 0 and
// parameterizes the unique gauge-fixed tangent representative.
SiteTensor projected_hamiltonian_tangent(const SiteTensor& A_raw,
                                         const NNHamiltonian& h,
                                         const EvolverConfig& cfg,
                                         TdvpWorkspace& ws, double* lambda_out) {
  const int d = static_cast<int>(A_raw.size());
  const int chi = static_cast<int>(A_raw[0].rows());

  auto fp = transfer_fixed_points(A_raw, cfg.fp_tol,
                                  ws.has_fp ? &ws.l : nullptr,
                                  ws.has_fp ? &ws.r : nullptr);
  if (lambda_out) *lambda_out = fp.lambda1;
  ws.l = fp.l;
  ws.r = fp.r;
  ws.has_fp = true;

  SiteTensor A(d);
  const double scale = 1.0 / std::sqrt(fp.lambda1);
  for (int n = 0; n < d; ++n) A[n] = A_raw[n] * scale;
  const Mat& l = fp.l;
  const Mat& r = fp.r;

  // local energy inhomogeneities
  Mat hl = transfer_left_op(A, h.h1, l) +
           transfer_left_op(A, h.Q, transfer_left_op(A, h.P, l));
  hl = 0.5 * (hl + hl.adjoint()).eval();
  const double eL = (hl * r).trace().real();
  Mat hr = transfer_right_op(A, h.h1, r) +
           transfer_right_op(A, h.P, transfer_right_op(A, h.Q, r));
  hr = 0.5 * (hr + hr.adjoint()).eval();
  const double eR = (l * hr).trace().real();

  // energy-subtracted geometric sums
  linalg::LinOp opL = [&](const Vec& x, Vec& y) {
    Mat X = unflatten(x, chi, chi);
    y = flatten((X - transfer_left(A, X) + (X * r).trace() * l).eval());
  };
  linalg::LinOp opR = [&](const Vec& x, Vec& y) {
    Mat X = unflatten(x, chi, chi);
    y = flatten((X - transfer_right(A, X) + (l * X).trace() * r).eval());
  };
  Vec bL = flatten((hl - eL * l).eval());
  Vec bR = flatten((hr - eR * r).eval());
  Vec wL, wR;
  const Vec* wLp = nullptr;
  const Vec* wRp = nullptr;
  if (ws.has_env) {
    wL = flatten(ws.HL);
    wR = flatten(ws.HR);
    wLp = &wL;
    wRp = &wR;
  }
  auto solL = linalg::gmres(opL, bL, wLp, cfg.env_tol);
  auto solR = linalg::gmres(opR, bR, wRp, cfg.env_tol);
  if (!solL.converged || !solR.converged)
    throw std::runtime_error("tdvp: environment solve stagnated, residual " +
                             std::to_string(std::max(solL.residual,
                                                     solR.residual)));
  Mat HL = unflatten(solL.x, chi, chi);
  Mat HR = unflatten(solR.x, chi, chi);
  HL = 0.5 * (HL + HL.adjoint()).eval();
  HR = 0.5 * (HR + HR.adjoint()).eval();
  ws.HL = HL;
  ws.HR = HR;
  ws.has_env = true;

  // gradient F[n]: coefficient of Tr(B[n]^dag .) in <Phi[B]|H|psi>
  const Mat LP = transfer_left_op(A, h.P, l);
  const Mat RQ = transfer_right_op(A, h.Q, r);
  std::vector<Mat> lAr(d), LPAr(d), lARQ(d);
  for (int m = 0; m < d; ++m) {
    const Mat Ar = A[m] * r;
    lAr[m] = l * Ar;
    LPAr[m] = LP * Ar;
    lARQ[m] = (l * A[m]) * RQ;
  }
  SiteTensor F(d, Mat::Zero(chi, chi));
  for (int n = 0; n < d; ++n) {
    F[n].noalias() += HL * (A[n] * r);
    F[n].noalias() += (l * A[n]) * HR;
    for (int m = 0; m < d; ++m) {
      if (h.h1(n, m) != Complex(0, 0)) F[n].noalias() += h.h1(n, m) * lAr[m];
      if (h.Q(n, m) != Complex(0, 0)) F[n].noalias() += h.Q(n, m) * LPAr[m];
      if (h.P(n, m) != Complex(0, 0)) F[n].noalias() += h.P(n, m) * lARQ[m];
    }
  }

  // gauge-fixed projection: B = l^{-1/2} (1 - Q_K Q_K^dag) G r^{-1/2} with
  // G = l^{-1/2} F r^{-1/2} and K the stacked l^{1/2} A[n]
  Mat l_sqrt;
  Mat l_isqrt = linalg::inverse_sqrt_psd(l, cfg.pinv_cutoff, &l_sqrt);
  Mat r_isqrt = linalg::inverse_sqrt_psd(r, cfg.pinv_cutoff);

  Mat K(d * chi, chi), G(d * chi, chi);
  for (int n = 0; n < d; ++n) {
    K.middleRows(n * chi, chi) = l_sqrt * A[n];
    G.middleRows(n * chi, chi) = l_isqrt * F[n] * r_isqrt;
  }
  Eigen::HouseholderQR<Mat> qr(K);
  Mat QK = qr.householderQ() * Mat::Identity(d * chi, chi);
  G -= QK * (QK.adjoint() * G).eval();

  SiteTensor B(d);
  for (int n = 0; n < d; ++n)
    B[n] = l_isqrt * G.middleRows(n * chi, chi) * r_isqrt;
  return B;
}

}  // namespace

void EvolverConfig::validate() const {
  if (step <= 0) throw std::invalid_argument("EvolverConfig: step must be > 0");
  if (sample_every < 1)
    throw std::invalid_argument("EvolverConfig: sample_every must be >= 1");
}

TangentTensor tangent_derivative(const CanonicalUMPS& psi, const NNHamiltonian& h,
                                 const EvolverConfig& cfg) {
  TdvpWorkspace ws;
  ws.l = Mat::Identity(psi.chi, psi.chi);
  ws.r = psi.C * psi.C.adjoint();
  ws.has_fp = true;
  TangentTensor out;
  out.B = projected_hamiltonian_tangent(psi.AL, h, cfg, ws, nullptr);
  Mat g = Mat::Zero(psi.chi, psi.chi);
  for (int n = 0; n < psi.d; ++n) g.noalias() += psi.AL[n].adjoint() * ws.l * out.B[n];
  out.gauge_residual = g.norm();
  return out;
}

CanonicalUMPS rk5_step(const CanonicalUMPS& psi, const ModelParams& model,
                       const QuenchSchedule& schedule, double t,
                       const EvolverConfig& cfg, TdvpWorkspace* ws,
                       StepStats* stats) {
  cfg.validate();
  // Fehlberg 6-stage tableau, 5th-order weights
  static const double c2 = 0.25, c3 = 0.375, c4 = 12.0 / 13.0, c5 = 1.0,
                      c6 = 0.5;
  static const double a21 = 0.25;
  static const double a31 = 3.0 / 32, a32 = 9.0 / 32;
  static const double a41 = 1932.0 / 2197, a42 = -7200.0 / 2197,
                      a43 = 7296.0 / 2197;
  static const double a51 = 439.0 / 216, a52 = -8.0, a53 = 3680.0 / 513,
                      a54 = -845.0 / 4104;
  static const double a61 = -8.0 / 27, a62 = 2.0, a63 = -3544.0 / 2565,
                      a64 = 1859.0 / 4104, a65 = -11.0 / 40;
  static const double b1 = 16.0 / 135, b3 = 6656.0 / 12825,
                      b4 = 28561.0 / 56430, b5 = -9.0 / 50, b6 = 2.0 / 55;

  const int d = psi.d;
  const double tau = cfg.step;
  TdvpWorkspace local_ws;
  TdvpWorkspace& w = ws ? *ws : local_ws;

  ModelParams p = model;
  auto flow = [&](const SiteTensor& A, double at_t) {
    p.mu0sq = schedule_value(schedule, at_t);
    NNHamiltonian h = NNHamiltonian::from_terms(hamiltonian_terms(p));
    SiteTensor B = projected_hamiltonian_tangent(A, h, cfg, w, nullptr);
    for (int n = 0; n < d; ++n) B[n] *= Complex(0.0, -1.0);
    return B;
  };
  auto combine = [&](const SiteTensor& A,
                     std::initializer_list<std::pair<double, const SiteTensor*>>
                         terms) {
    SiteTensor out = A;
    for (const auto& [w_i, K] : terms)
      for (int n = 0; n < d; ++n) out[n] += (tau * w_i) * (*K)[n];
    return out;
  };

  const SiteTensor& A0 = psi.AL;
  SiteTensor k1 = flow(A0, t);
  SiteTensor k2 = flow(combine(A0, {{a21, &k1}}), t + c2 * tau);
  SiteTensor k3 = flow(combine(A0, {{a31, &k1}, {a32, &k2}}), t + c3 * tau);
  SiteTensor k4 =
      flow(combine(A0, {{a41, &k1}, {a42, &k2}, {a43, &k3}}), t + c4 * tau);
  SiteTensor k5 = flow(
      combine(A0, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}),
      t + c5 * tau);
  SiteTensor k6 = flow(
      combine(A0, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}),
      t + c6 * tau);

  UMPSTensor Anew(d, psi.chi);
  Anew.A = combine(A0, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});

  CanonicalizeOptions copts;
  copts.tol = cfg.canon_tol;
  copts.warm = &psi;
  double lambda = 1.0;
  CanonicalUMPS out = canonicalize(Anew, copts, &lambda);
  out.time = psi.time + tau;
  if (stats) stats->norm = std::sqrt(lambda);
  return out;
}

CorrelatorRecord take_snapshot(const CanonicalUMPS& psi, const ModelParams& model,
                               double mu0sq_now, double t, double norm,
                               const EvolverConfig& cfg) {
  ModelParams p = model;
  p.mu0sq = mu0sq_now;
  NNHamiltonian h = NNHamiltonian::from_terms(hamiltonian_terms(p));
  const LocalOperators ops = build_local_operators(model.d);

  CorrelatorRecord rec;
  rec.time = t;
  rec.norm = norm;
  rec.energy_density = energy_density(psi, h);
  rec.entropy = entanglement_entropy(psi);
  rec.g2_r = correlator_one_site(psi, ops.phi, cfg.r_max, cfg.tail_tol).g;
  return rec;
}

std::vector<CorrelatorRecord> evolve_quench(const CanonicalUMPS& initial,
                                            const ModelParams& model,
                                            const QuenchSchedule& schedule,
                                            const EvolverConfig& cfg,
                                            const SnapshotObserver& observer) {
  cfg.validate();
  schedule.validate();
  const double tau = cfg.step;
  const long n_steps = std::lround(schedule.t_end() / tau);

  std::vector<CorrelatorRecord> records;
  CanonicalUMPS psi = initial;
  psi.time = initial.time;
  TdvpWorkspace ws;
  StepStats stats;

  long start_step = std::lround(psi.time / tau);
  auto sample = [&](long step) {
    double t = step * tau;
    CorrelatorRecord rec = take_snapshot(psi, model, schedule_value(schedule, t),
                                         t, stats.norm, cfg);
    records.push_back(rec);
    if (observer) observer(rec, psi);
  };

  if (start_step % cfg.sample_every == 0) sample(start_step);
  for (long step = start_step; step < n_steps; ++step) {
    psi = rk5_step(psi, model, schedule, step * tau, cfg, &ws, &stats);
    if ((step + 1) % cfg.sample_every == 0 || step + 1 == n_steps)
      sample(step + 1);
  }
  return records;
}

}  // namespace kzmps
