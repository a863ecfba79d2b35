#include "kzmps/vumps.hpp"

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

Vec pack_site(const SiteTensor& A) {
  const int d = static_cast<int>(A.size());
  const long c = A[0].size();
  Vec v(d * c);
  for (int n = 0; n < d; ++n)
    v.segment(n * c, c) = Eigen::Map<const Vec>(A[n].data(), c);
  return v;
}

SiteTensor unpack_site(const Vec& v, int d, int chi) {
  SiteTensor A(d);
  const long c = static_cast<long>(chi) * chi;
  for (int n = 0; n < d; ++n)
    A[n] = Eigen::Map<const Mat>(v.data() + n * c, chi, chi);
  return A;
}

// isometric factor of the orthogonal Procrustes problem, U V^dag from the SVD
Mat polar_isometry(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

Environments solve_environments(const CanonicalUMPS& psi, const NNHamiltonian& h,
                                double tol, const Environments* warm) {
  const int chi = psi.chi;
  const Mat I = Mat::Identity(chi, chi);
  const Mat rhoR = psi.C * psi.C.adjoint();
  const Mat rhoL = psi.C.adjoint() * psi.C;

  Mat hl = transfer_left_op(psi.AL, h.h1, I) +
           transfer_left_op(psi.AL, h.Q, transfer_left_op(psi.AL, h.P, I));
  hl = 0.5 * (hl + hl.adjoint()).eval();
  const double eL = (hl * rhoR).trace().real();

  Mat hr = transfer_right_op(psi.AR, h.h1, I) +
           transfer_right_op(psi.AR, h.P, transfer_right_op(psi.AR, h.Q, I));
  hr = 0.5 * (hr + hr.adjoint()).eval();
  const double eR = (rhoL * hr).trace().real();

  linalg::LinOp opL = [&](const Vec& x, Vec& y) {
    Mat X = unflatten(x, chi, chi);
    Mat Y = X - transfer_left(psi.AL, X) + (X * rhoR).trace() * I;
    y = flatten(Y);
  };
  linalg::LinOp opR = [&](const Vec& x, Vec& y) {
    Mat X = unflatten(x, chi, chi);
    Mat Y = X - transfer_right(psi.AR, X) + (rhoL * X).trace() * I;
    y = flatten(Y);
  };

  Environments env;
  env.energy_density = 0.5 * (eL + eR);

  Vec bL = flatten((hl - eL * I).eval());
  Vec bR = flatten((hr - eR * I).eval());
  Vec wL, wR;
  const Vec* wLp = nullptr;
  const Vec* wRp = nullptr;
  if (warm && warm->HL.rows() == chi) {
    wL = flatten(warm->HL);
    wR = flatten(warm->HR);
    wLp = &wL;
    wRp = &wR;
  }
  auto solL = linalg::gmres(opL, bL, wLp, tol);
  auto solR = linalg::gmres(opR, bR, wRp, tol);
  if (!solL.converged || !solR.converged)
    throw std::runtime_error("solve_environments: GMRES stagnated, residual " +
                             std::to_string(std::max(solL.residual,
                                                     solR.residual)));
  env.residual_left = solL.residual;
  env.residual_right = solR.residual;
  Mat HL = unflatten(solL.x, chi, chi);
  Mat HR = unflatten(solR.x, chi, chi);
  env.HL = 0.5 * (HL + HL.adjoint());
  env.HR = 0.5 * (HR + HR.adjoint());
  return env;
}

SiteTensor apply_h_ac(const CanonicalUMPS& psi, const NNHamiltonian& h,
                      const Environments& env, const SiteTensor& AC) {
  const int d = psi.d;
  const int chi = psi.chi;
  const Mat I = Mat::Identity(chi, chi);
  const Mat LP = transfer_left_op(psi.AL, h.P, I);
  const Mat RQ = transfer_right_op(psi.AR, h.Q, I);

  SiteTensor out(d, Mat::Zero(chi, chi));
  for (int n = 0; n < d; ++n) {
    for (int m = 0; m < d; ++m) {
      if (h.h1(n, m) != Complex(0, 0)) out[n].noalias() += h.h1(n, m) * AC[m];
      if (h.Q(n, m) != Complex(0, 0)) out[n].noalias() += h.Q(n, m) * (LP * AC[m]);
      if (h.P(n, m) != Complex(0, 0)) out[n].noalias() += h.P(n, m) * (AC[m] * RQ);
    }
    out[n].noalias() += env.HL * AC[n];
    out[n].noalias() += AC[n] * env.HR;
  }
  return out;
}

Mat apply_h_c(const CanonicalUMPS& psi, const NNHamiltonian& h,
              const Environments& env, const Mat& C) {
  const int chi = psi.chi;
  const Mat I = Mat::Identity(chi, chi);
  const Mat LP = transfer_left_op(psi.AL, h.P, I);
  const Mat RQ = transfer_right_op(psi.AR, h.Q, I);
  return env.HL * C + C * env.HR + LP * C * RQ;
}

double energy_density(const CanonicalUMPS& psi, const NNHamiltonian& h) {
  return expectation_one_site(psi, h.h1).real() +
         expectation_two_site(psi, h.P, h.Q).real();
}

GroundStateResult find_ground_state(const ModelParams& params, int chi,
                                    const VumpsOptions& opts) {
  params.validate();
  const int d = params.d;
  NNHamiltonian h = NNHamiltonian::from_terms(hamiltonian_terms(params));

  CanonicalUMPS psi;
  if (opts.warm_start && opts.warm_start->d == d && opts.warm_start->chi == chi) {
    psi = *opts.warm_start;
  } else {
    // seed: ground state of the single-site problem, optionally biased to a
    // nonzero field expectation value
    const LocalOperators ops = build_local_operators(d);
    Mat h1b = h.h1 - opts.bias * ops.phi;
    Eigen::SelfAdjointEigenSolver<Mat> es(h1b);
    Eigen::VectorXcd local = es.eigenvectors().col(0);
    UMPSTensor A0 = product_state_tensor(local, chi, opts.noise, opts.seed);
    psi = canonicalize(A0);
  }

  GroundStateResult res;
  Environments env;
  const Environments* warm = nullptr;
  linalg::Vec ac_guess, c_guess;

  double err = 1.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    double env_tol = std::min(1e-12, std::max(opts.env_tol, 1e-3 * err * err));
    env = solve_environments(psi, h, std::max(env_tol, opts.env_tol), warm);
    warm = &env;

    const int nac = d * chi * chi;
    linalg::LinOp opAC = [&](const Vec& x, Vec& y) {
      y = pack_site(apply_h_ac(psi, h, env, unpack_site(x, d, chi)));
    };
    linalg::LinOp opC = [&](const Vec& x, Vec& y) {
      y = flatten(apply_h_c(psi, h, env, unflatten(x, chi, chi)));
    };

    double eig_tol = std::max(1e-14, std::min(1e-10, 1e-3 * err));
    ac_guess = pack_site(psi.center_tensor());
    auto rac = linalg::lanczos_lowest(opAC, nac, eig_tol, &ac_guess);
    c_guess = flatten(psi.C);
    auto rc = linalg::lanczos_lowest(opC, chi * chi, eig_tol, &c_guess);

    SiteTensor AC = unpack_site(rac.vector, d, chi);
    Mat C = unflatten(rc.vector, chi, chi);

    // extract the updated isometries (orthogonal Procrustes)
    Mat MAC(d * chi, chi);
    for (int n = 0; n < d; ++n) MAC.middleRows(n * chi, chi) = AC[n];
    Mat ALs = polar_isometry(MAC * C.adjoint());
    Mat NAC(chi, d * chi);
    for (int n = 0; n < d; ++n) NAC.middleCols(n * chi, chi) = AC[n];
    Mat ARs = polar_isometry(C.adjoint() * NAC);

    for (int n = 0; n < d; ++n) {
      psi.AL[n] = ALs.middleRows(n * chi, chi);
      psi.AR[n] = ARs.middleCols(n * chi, chi);
    }
    psi.C = C / C.norm();

    // gradient norm: the component of H_AC(AC) outside the AL column space
    // (the part inside is the energy flowing through H_C, not an error)
    SiteTensor HAC = apply_h_ac(psi, h, env, psi.center_tensor());
    Mat MH(d * chi, chi), MAL(d * chi, chi);
    for (int n = 0; n < d; ++n) {
      MH.middleRows(n * chi, chi) = HAC[n];
      MAL.middleRows(n * chi, chi) = psi.AL[n];
    }
    MH -= MAL * (MAL.adjoint() * MH).eval();
    err = MH.norm();

    res.iterations = it + 1;
    if (err < opts.tol_gradient) {
      res.converged = true;
      break;
    }
  }

  res.state = psi;
  res.gradient_norm = err;
  res.energy_density = energy_density(psi, h);
  const LocalOperators ops = build_local_operators(d);
  res.vev = expectation_one_site(psi, ops.phi).real();
  return res;
}

}  // namespace kzmps
