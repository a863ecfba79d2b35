#include "kzmps/umps.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "kzmps/linalg.hpp"

namespace kzmps {

namespace {

using linalg::Vec;

Vec flatten(const Mat& X) {
  return Eigen::Map<const Vec>(X.data(), X.size());
}

Mat unflatten(const Vec& v, int rows, int cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

// Hermitize and rotate away the arbitrary eigenvector phase.
Mat fix_phase_hermitian(const Mat& X) {
  Complex tr = X.trace();
  Mat Y = X;
  if (std::abs(tr) > 0) Y *= std::conj(tr) / std::abs(tr);
  return 0.5 * (Y + Y.adjoint());
}

// Thin QR with positive real diagonal of R, so the factors are unique.
void thin_qr(const Mat& M, Mat& Q, Mat& R) {
  Eigen::HouseholderQR<Mat> qr(M);
  Mat thinQ = qr.householderQ() * Mat::Identity(M.rows(), M.cols());
  Mat thinR = qr.matrixQR().topRows(M.cols()).triangularView<Eigen::Upper>();
  for (int i = 0; i < thinR.rows(); ++i) {
    Complex di = thinR(i, i);
    Complex ph = (std::abs(di) > 0) ? di / std::abs(di) : Complex(1, 0);
    thinR.row(i) *= std::conj(ph);
    thinQ.col(i) *= ph;
  }
  Q = std::move(thinQ);
  R = std::move(thinR);
}

Mat stack_site(const SiteTensor& A) {
  const int d = static_cast<int>(A.size());
  const int chi = static_cast<int>(A[0].rows());
  Mat M(d * chi, A[0].cols());
  for (int n = 0; n < d; ++n) M.middleRows(n * chi, chi) = A[n];
  return M;
}

SiteTensor unstack_site(const Mat& M, int d, int chi) {
  SiteTensor A(d);
  for (int n = 0; n < d; ++n) A[n] = M.middleRows(n * chi, chi);
  return A;
}

}  // namespace

UMPSTensor UMPSTensor::random(int d, int chi, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  UMPSTensor t(d, chi);
  for (int n = 0; n < d; ++n)
    for (int j = 0; j < chi; ++j)
      for (int i = 0; i < chi; ++i) t.A[n](i, j) = Complex(dist(rng), dist(rng));
  return t;
}

SiteTensor CanonicalUMPS::center_tensor() const {
  SiteTensor AC(d);
  for (int n = 0; n < d; ++n) AC[n] = AL[n] * C;
  return AC;
}

double CanonicalUMPS::left_isometry_residual() const {
  Mat S = Mat::Zero(chi, chi);
  for (int n = 0; n < d; ++n) S.noalias() += AL[n].adjoint() * AL[n];
  return (S - Mat::Identity(chi, chi)).norm();
}

double CanonicalUMPS::right_isometry_residual() const {
  Mat S = Mat::Zero(chi, chi);
  for (int n = 0; n < d; ++n) S.noalias() += AR[n] * AR[n].adjoint();
  return (S - Mat::Identity(chi, chi)).norm();
}

double CanonicalUMPS::gauge_residual() const {
  double acc = 0.0;
  for (int n = 0; n < d; ++n) acc += (AL[n] * C - C * AR[n]).squaredNorm();
  return std::sqrt(acc);
}

Mat transfer_left(const SiteTensor& A, const Mat& X) {
  Mat Y = Mat::Zero(A[0].cols(), A[0].cols());
  for (const auto& An : A) Y.noalias() += An.adjoint() * X * An;
  return Y;
}

Mat transfer_right(const SiteTensor& A, const Mat& X) {
  Mat Y = Mat::Zero(A[0].rows(), A[0].rows());
  for (const auto& An : A) Y.noalias() += An * X * An.adjoint();
  return Y;
}

Mat transfer_left_op(const SiteTensor& A, const Mat& O, const Mat& X) {
  const int d = static_cast<int>(A.size());
  Mat Y = Mat::Zero(A[0].cols(), A[0].cols());
  for (int n = 0; n < d; ++n) {
    Mat G = Mat::Zero(A[0].rows(), A[0].cols());  // sum_m conj(O(m,n)) A[m]
    for (int m = 0; m < d; ++m)
      if (O(m, n) != Complex(0, 0)) G.noalias() += std::conj(O(m, n)) * A[m];
    Y.noalias() += G.adjoint() * X * A[n];
  }
  return Y;
}

Mat transfer_right_op(const SiteTensor& A, const Mat& O, const Mat& X) {
  const int d = static_cast<int>(A.size());
  Mat Y = Mat::Zero(A[0].rows(), A[0].rows());
  for (int n = 0; n < d; ++n) {
    Mat G = Mat::Zero(A[0].rows(), A[0].cols());
    for (int m = 0; m < d; ++m)
      if (O(m, n) != Complex(0, 0)) G.noalias() += std::conj(O(m, n)) * A[m];
    Y.noalias() += A[n] * X * G.adjoint();
  }
  return Y;
}

Mat transfer_left_mixed(const SiteTensor& Abra, const SiteTensor& Aket,
                        const Mat& X) {
  Mat Y = Mat::Zero(Abra[0].cols(), Aket[0].cols());
  for (size_t n = 0; n < Aket.size(); ++n)
    Y.noalias() += Abra[n].adjoint() * X * Aket[n];
  return Y;
}

TransferFixedPoints transfer_fixed_points(const SiteTensor& A, double tol,
                                          const Mat* l_guess, const Mat* r_guess,
                                          bool want_lambda2) {
  const int chi = static_cast<int>(A[0].rows());
  const int n = chi * chi;
  TransferFixedPoints fp;

  linalg::LinOp right_op = [&](const Vec& x, Vec& y) {
    y = flatten(transfer_right(A, unflatten(x, chi, chi)));
  };
  linalg::LinOp left_op = [&](const Vec& x, Vec& y) {
    y = flatten(transfer_left(A, unflatten(x, chi, chi)));
  };

  Vec rg, lg;
  const Vec* rgp = nullptr;
  const Vec* lgp = nullptr;
  if (r_guess && r_guess->size() == n) {
    rg = flatten(*r_guess);
    rgp = &rg;
  }
  if (l_guess && l_guess->size() == n) {
    lg = flatten(*l_guess);
    lgp = &lg;
  }

  const int nev = want_lambda2 ? 2 : 1;
  auto res_r = linalg::arnoldi_dominant(right_op, n, nev, tol, rgp);
  if (!res_r.converged)
    throw std::runtime_error("transfer_fixed_points: right eigensolve failed");
  Complex lam = res_r.pairs[0].value;
  if (std::abs(lam.imag()) > 1e-8 * std::abs(lam) || lam.real() <= 0.0)
    throw std::runtime_error(
        "transfer_fixed_points: dominant transfer eigenvalue not positive");
  fp.lambda1 = lam.real();
  fp.r = fix_phase_hermitian(unflatten(res_r.pairs[0].vector, chi, chi));
  if (fp.r.trace().real() < 0) fp.r = -fp.r;
  if (want_lambda2) {
    // a single Krylov run cannot see multiplicity: a degenerate subspace
    // contributes one direction only. Deflate the converged eigenvector and
    // look again; the larger of the two estimates is the honest |lambda2|.
    double l2 = (res_r.pairs.size() > 1) ? std::abs(res_r.pairs[1].value) : 0.0;
    if (n > 1) {
      const Vec v1 = res_r.pairs[0].vector;
      linalg::LinOp deflated = [&](const Vec& x, Vec& y) {
        Vec xp = x - v1 * v1.dot(x);
        right_op(xp, y);
        y -= v1 * v1.dot(y);
      };
      // the start vector must come from an independent stream: the default
      // seed's component inside a degenerate eigenspace IS v1, so the
      // deflated run would be blind to the remaining copy
      std::mt19937_64 rng(0x51ed2701u);
      std::normal_distribution<double> dist;
      Vec guess(n);
      for (int i = 0; i < n; ++i) guess[i] = Complex(dist(rng), dist(rng));
      guess -= v1 * v1.dot(guess);
      auto res_d = linalg::arnoldi_dominant(deflated, n, 1,
                                            std::max(tol, 1e-10), &guess);
      if (res_d.converged && !res_d.pairs.empty())
        l2 = std::max(l2, std::abs(res_d.pairs[0].value));
    }
    fp.lambda2_abs = l2;
    if (fp.lambda2_abs > fp.lambda1 * (1.0 - 1e-11))
      throw std::runtime_error(
          "transfer_fixed_points: degenerate dominant transfer eigenvalue");
  }

  auto res_l = linalg::arnoldi_dominant(left_op, n, 1, tol, lgp);
  if (!res_l.converged)
    throw std::runtime_error("transfer_fixed_points: left eigensolve failed");
  fp.l = fix_phase_hermitian(unflatten(res_l.pairs[0].vector, chi, chi));
  if (fp.l.trace().real() < 0) fp.l = -fp.l;

  Complex ip = (fp.l * fp.r).trace();
  if (std::abs(ip) < 1e-300)
    throw std::runtime_error("transfer_fixed_points: fixed points orthogonal");
  fp.l /= ip.real();
  return fp;
}

double transfer_lambda2(const CanonicalUMPS& psi, double tol) {
  if (psi.chi == 1) return 0.0;
  const int chi = psi.chi;
  const int n = chi * chi;
  linalg::LinOp right_op = [&](const Vec& x, Vec& y) {
    y = flatten(transfer_right(psi.AR, unflatten(x, chi, chi)));
  };
  // dominant right eigenmatrix of the AR transfer is the identity; deflate it
  // exactly and take the dominant remainder
  const Vec v1 = flatten(Mat::Identity(chi, chi)).normalized();
  linalg::LinOp deflated = [&](const Vec& x, Vec& y) {
    Vec xp = x - v1 * v1.dot(x);
    right_op(xp, y);
    y -= v1 * v1.dot(y);
  };
  auto res = linalg::arnoldi_dominant(deflated, n, 1, tol, nullptr,
                                      std::min(40, n));
  if (!res.converged || res.pairs.empty())
    throw std::runtime_error("transfer_lambda2: eigensolve failed");
  double l2 = std::abs(res.pairs[0].value);
  if (l2 > 1.0 + 1e-6)
    throw std::runtime_error("transfer_lambda2: state not normalized");
  return std::min(l2, 1.0);
}

CanonicalUMPS canonicalize(const UMPSTensor& A0, const CanonicalizeOptions& opts,
                           double* norm_out) {
  const int d = A0.d;
  const int chi = A0.chi;
  if (d < 1 || chi < 1 || static_cast<int>(A0.A.size()) != d)
    throw std::invalid_argument("canonicalize: malformed tensor");

  Mat lg, rg;
  const Mat *lgp = nullptr, *rgp = nullptr;
  if (opts.warm && opts.warm->chi == chi) {
    lg = Mat::Identity(chi, chi);
    rg = opts.warm->C * opts.warm->C.adjoint();
    lgp = &lg;
    rgp = &rg;
  }
  auto fp = transfer_fixed_points(A0.A, std::min(opts.tol, 1e-13), lgp, rgp,
                                  /*want_lambda2=*/true);
  if (norm_out) *norm_out = fp.lambda1;

  SiteTensor A(d);
  const double scale = 1.0 / std::sqrt(fp.lambda1);
  for (int n = 0; n < d; ++n) A[n] = A0.A[n] * scale;

  // factor the fixed points: l = L^dag L, r = R R^dag
  Eigen::SelfAdjointEigenSolver<Mat> esl(fp.l);
  Eigen::SelfAdjointEigenSolver<Mat> esr(fp.r);
  const double lcut = esl.eigenvalues().maxCoeff() * 1e-15;
  const double rcut = esr.eigenvalues().maxCoeff() * 1e-15;
  Eigen::VectorXd sl = esl.eigenvalues().cwiseMax(lcut).cwiseSqrt();
  Eigen::VectorXd sr = esr.eigenvalues().cwiseMax(rcut).cwiseSqrt();
  Mat L = sl.asDiagonal() * esl.eigenvectors().adjoint();
  Mat Li = esl.eigenvectors() * sl.cwiseInverse().asDiagonal();
  Mat R = esr.eigenvectors() * sr.asDiagonal();
  Mat Ri = sr.cwiseInverse().asDiagonal() * esr.eigenvectors().adjoint();

  SiteTensor AL(d), AR(d);
  for (int n = 0; n < d; ++n) {
    AL[n] = L * A[n] * Li;
    AR[n] = Ri * A[n] * R;
  }
  L /= L.norm();
  R /= R.norm();

  // QR polish: enforce the isometry conditions exactly and tighten the gauge
  // factors; linear convergence, but the seed above is already accurate.
  Mat Q, Rfac;
  for (int it = 0; it < opts.max_polish; ++it) {
    Mat M(d * chi, chi);
    for (int n = 0; n < d; ++n) M.middleRows(n * chi, chi) = L * A[n];
    thin_qr(M, Q, Rfac);
    Rfac /= Rfac.norm();
    double delta = (Rfac - L).norm();
    AL = unstack_site(Q, d, chi);
    L = Rfac;
    if (delta < opts.tol) break;
  }
  for (int it = 0; it < opts.max_polish; ++it) {
    Mat M(d * chi, chi);
    for (int n = 0; n < d; ++n) M.middleRows(n * chi, chi) = (A[n] * R).adjoint();
    thin_qr(M, Q, Rfac);
    Rfac /= Rfac.norm();
    double delta = (Rfac.adjoint() - R).norm();
    for (int n = 0; n < d; ++n) AR[n] = Q.middleRows(n * chi, chi).adjoint();
    R = Rfac.adjoint();
    if (delta < opts.tol) break;
  }

  Mat Cmat = L * R;
  Eigen::JacobiSVD<Mat> svd(Cmat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = svd.singularValues();
  s /= s.norm();

  CanonicalUMPS psi;
  psi.d = d;
  psi.chi = chi;
  psi.AL.resize(d);
  psi.AR.resize(d);
  for (int n = 0; n < d; ++n) {
    psi.AL[n] = svd.matrixU().adjoint() * AL[n] * svd.matrixU();
    psi.AR[n] = svd.matrixV().adjoint() * AR[n] * svd.matrixV();
  }
  psi.C = s.cast<Complex>().asDiagonal();

  if (psi.left_isometry_residual() > 1e-10 ||
      psi.right_isometry_residual() > 1e-10)
    throw std::runtime_error("canonicalize: isometry residual above tolerance");
  return psi;
}

Complex expectation_one_site(const CanonicalUMPS& psi, const Mat& op) {
  if (op.rows() != psi.d || op.cols() != psi.d)
    throw std::invalid_argument("expectation_one_site: dimension mismatch");
  SiteTensor AC = psi.center_tensor();
  return transfer_left_op(AC, op, Mat::Identity(psi.chi, psi.chi)).trace();
}

Complex expectation_two_site(const CanonicalUMPS& psi, const Mat& P,
                             const Mat& Q) {
  if (P.rows() != psi.d || Q.rows() != psi.d)
    throw std::invalid_argument("expectation_two_site: dimension mismatch");
  SiteTensor AC = psi.center_tensor();
  Mat X = transfer_left_op(AC, P, Mat::Identity(psi.chi, psi.chi));
  return transfer_left_op(psi.AR, Q, X).trace();
}

Correlator correlator_one_site(const CanonicalUMPS& psi, const Mat& op,
                               int r_max, double tail_tol) {
  if (r_max < 1) throw std::invalid_argument("correlator_one_site: r_max < 1");
  Correlator out;
  out.g.assign(r_max + 1, 0.0);

  const Mat I = Mat::Identity(psi.chi, psi.chi);
  const Mat rho = psi.C * psi.C.adjoint();  // right fixed point of the AL transfer
  const double mean = expectation_one_site(psi, op).real();
  const double limit = mean * mean;

  out.g[0] = expectation_one_site(psi, op * op).real();
  Mat X = transfer_left_op(psi.AL, op, I);
  int settled = 0;
  for (int r = 1; r <= r_max; ++r) {
    out.g[r] = (transfer_left_op(psi.AL, op, X) * rho).trace().real();
    if (std::abs(out.g[r] - limit) < tail_tol) {
      if (++settled >= 2) {
        for (int rr = r + 1; rr <= r_max; ++rr) out.g[rr] = limit;
        out.clamp_index = r + 1;
        break;
      }
    } else {
      settled = 0;
    }
    if (r < r_max) X = transfer_left(psi.AL, X);
  }
  return out;
}

double correlation_length(const CanonicalUMPS& psi) {
  double l2 = transfer_lambda2(psi);
  if (l2 <= 0.0) return 0.0;
  if (l2 >= 1.0)
    throw std::runtime_error("correlation_length: degenerate transfer spectrum");
  return -1.0 / std::log(l2);
}

double entanglement_entropy(const CanonicalUMPS& psi) {
  Eigen::JacobiSVD<Mat> svd(psi.C);
  Eigen::VectorXd s = svd.singularValues();
  s /= s.norm();
  double S = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    double p = s[i] * s[i];
    if (p > 1e-300) S -= p * std::log(p);
  }
  return S;
}

UMPSTensor product_state_tensor(const Eigen::VectorXcd& local, int chi,
                                double noise, unsigned seed) {
  const int d = static_cast<int>(local.size());
  UMPSTensor t(d, chi);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int n = 0; n < d; ++n) {
    t.A[n](0, 0) = local[n];
    if (noise > 0.0)
      for (int j = 0; j < chi; ++j)
        for (int i = 0; i < chi; ++i)
          t.A[n](i, j) += noise * Complex(dist(rng), dist(rng));
  }
  return t;
}

}  // namespace kzmps
