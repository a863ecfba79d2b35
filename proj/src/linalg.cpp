#include "kzmps/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace kzmps::linalg {

namespace {

Vec random_unit(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(dist(rng), dist(rng));
  v.normalize();
  return v;
}

// Builds an Arnoldi factorization op*V_m = V_m*H_m + h[m+1,m] v_{m+1} e_m^T
// and returns the Ritz pairs of H_m sorted by descending magnitude.
struct KrylovFactorization {
  Mat V;   // n x (m+1)
  Mat H;   // (m+1) x m, upper Hessenberg
  int m = 0;
};

void arnoldi_extend(const LinOp& op, KrylovFactorization& kf, int target_m) {
  const int n = static_cast<int>(kf.V.rows());
  Vec w(n);
  for (int j = kf.m; j < target_m; ++j) {
    op(kf.V.col(j), w);
    // modified Gram-Schmidt, one refinement pass
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        Complex h = kf.V.col(i).dot(w);
        w -= h * kf.V.col(i);
        kf.H(i, j) += h;
      }
    }
    double nrm = w.norm();
    kf.H(j + 1, j) = nrm;
    if (nrm < 1e-14) {  // invariant subspace found
      kf.m = j + 1;
      return;
    }
    kf.V.col(j + 1) = w / nrm;
    kf.m = j + 1;
  }
}

}  // namespace

ArnoldiResult arnoldi_dominant(const LinOp& op, int n, int nev, double tol,
                               const Vec* guess, int krylov_dim,
                               int max_restarts) {
  ArnoldiResult res;
  if (n <= 0) throw std::invalid_argument("arnoldi_dominant: empty space");
  nev = std::min(nev, n);
  const int m = std::min(std::max(krylov_dim, nev + 2), n);

  Vec v0 = (guess && guess->size() == n && guess->norm() > 0)
               ? guess->normalized()
               : random_unit(n, 0x9e3779b97f4a7c15ULL);

  for (int restart = 0; restart < max_restarts; ++restart) {
    KrylovFactorization kf;
    kf.V = Mat::Zero(n, m + 1);
    kf.H = Mat::Zero(m + 1, m);
    kf.V.col(0) = v0;
    arnoldi_extend(op, kf, m);
    const int k = kf.m;

    Eigen::ComplexEigenSolver<Mat> es(kf.H.topLeftCorner(k, k));
    std::vector<int> order(k);
    for (int i = 0; i < k; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(es.eigenvalues()[a]) > std::abs(es.eigenvalues()[b]);
    });

    res.pairs.clear();
    const int take = std::min(nev, k);
    for (int i = 0; i < take; ++i) {
      EigPair p;
      p.value = es.eigenvalues()[order[i]];
      p.vector = kf.V.leftCols(k) * es.eigenvectors().col(order[i]);
      p.vector.normalize();
      res.pairs.push_back(std::move(p));
    }
    res.iterations += k;

    // residuals |H(k, k-1)| * |last component of y_i|, relative to |lambda_1|
    const double beta = std::abs(kf.H(k, k - 1));
    const double scale = std::max(1e-300, std::abs(res.pairs[0].value));
    res.residual = 0.0;
    for (int i = 0; i < take; ++i)
      res.residual = std::max(
          res.residual,
          beta * std::abs(es.eigenvectors().col(order[i])[k - 1]) / scale);
    if (res.residual < tol || k < m) {
      res.converged = true;
      return res;
    }
    // blended restart keeps the subleading Ritz directions alive
    v0 = res.pairs[0].vector;
    for (int i = 1; i < take; ++i) v0 += 0.3 * res.pairs[i].vector;
    v0.normalize();
  }
  return res;
}

LanczosResult lanczos_lowest(const LinOp& op, int n, double tol,
                             const Vec* guess, int krylov_dim,
                             int max_restarts, const std::vector<Vec>* deflate) {
  // Thick-restart Rayleigh-Ritz: the lowest Ritz vectors survive each
  // restart. The retained block is re-projected against the deflation space
  // every cycle and its Hamiltonian overlaps recomputed; otherwise roundoff
  // re-introduces deflated directions, which sit at Rayleigh quotient zero
  // and can masquerade as the minimum.
  LanczosResult res;
  if (n <= 0) throw std::invalid_argument("lanczos_lowest: empty space");
  const int m = std::min(krylov_dim, n);
  const int thick = std::min(10, m / 2);

  auto project_out = [&](Vec& v) {
    if (!deflate) return;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& u : *deflate) v -= u.dot(v) * u;
  };

  Vec v0 = (guess && guess->size() == n && guess->norm() > 0)
               ? guess->normalized()
               : random_unit(n, 0xc2b2ae3d27d4eb4fULL);
  project_out(v0);
  if (v0.norm() < 1e-12) {
    v0 = random_unit(n, 0x6a09e667f3bcc909ULL);
    project_out(v0);
  }
  v0.normalize();

  Mat V = Mat::Zero(n, m + 1);
  Mat T = Mat::Zero(m + 1, m + 1);
  V.col(0) = v0;
  int p = 0;  // retained block size
  Vec w(n);

  for (int cycle = 0; cycle < max_restarts; ++cycle) {
    // exact overlaps of the retained block (stale values are not trusted)
    for (int j = 0; j < p; ++j) {
      op(V.col(j), w);
      project_out(w);
      ++res.iterations;
      for (int i = 0; i <= p; ++i) T(i, j) = V.col(i).dot(w);
    }
    int mm = m;
    double last_nrm = 0.0;
    for (int j = p; j < m; ++j) {
      op(V.col(j), w);
      project_out(w);
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          Complex c = V.col(i).dot(w);
          w -= c * V.col(i);
          if (pass == 0) T(i, j) += c;
        }
      }
      ++res.iterations;
      last_nrm = w.norm();
      if (last_nrm < 1e-13) {
        mm = j + 1;
        break;
      }
      T(j + 1, j) = last_nrm;
      V.col(j + 1) = w / last_nrm;
    }

    Mat Ts = T.topLeftCorner(mm, mm);
    Ts = 0.5 * (Ts + Ts.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(Ts);
    const auto& theta = es.eigenvalues();
    res.value = theta[0];
    res.vector = V.leftCols(mm) * es.eigenvectors().col(0);
    project_out(res.vector);
    res.vector.normalize();
    // explicit residual; the recurrence-based estimate is unreliable once a
    // retained block is present
    op(res.vector, w);
    project_out(w);
    ++res.iterations;
    res.residual = (w - res.value * res.vector).norm();
    const double scale = std::max({1.0, std::abs(theta[0]),
                                   std::abs(theta[mm - 1])});
    if (res.residual < tol * scale || mm < m || cycle + 1 == max_restarts) {
      res.converged = res.residual < tol * scale || mm < m;
      return res;
    }

    // restart: lowest `thick` Ritz vectors plus the leftover direction,
    // re-projected and re-orthonormalized
    p = std::min(thick, mm - 1);
    Mat U = V.leftCols(mm) * es.eigenvectors().leftCols(p);
    V.leftCols(p) = U;
    V.col(p) = V.col(mm);
    for (int j = 0; j <= p; ++j) {
      Vec col = V.col(j);
      project_out(col);
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i < j; ++i) col -= V.col(i).dot(col) * V.col(i);
      double nr = col.norm();
      if (nr < 1e-12) {
        col = random_unit(n, 0x9e3779b97f4a7c15ULL + cycle * 1315423911ULL + j);
        project_out(col);
        for (int pass = 0; pass < 2; ++pass)
          for (int i = 0; i < j; ++i) col -= V.col(i).dot(col) * V.col(i);
        nr = col.norm();
      }
      V.col(j) = col / nr;
    }
    T.setZero();
  }
  return res;
}

std::vector<LanczosResult> lanczos_lowest_k(const LinOp& op, int n, int k,
                                            double tol, int krylov_dim,
                                            int max_restarts) {
  std::vector<LanczosResult> out;
  std::vector<Vec> deflate;
  for (int i = 0; i < k; ++i) {
    auto r = lanczos_lowest(op, n, tol, nullptr, krylov_dim, max_restarts,
                            deflate.empty() ? nullptr : &deflate);
    deflate.push_back(r.vector);
    out.push_back(std::move(r));
  }
  return out;
}

SolveResult gmres(const LinOp& op, const Vec& b, const Vec* x0, double tol,
                  int restart, int max_iters) {
  SolveResult res;
  const int n = static_cast<int>(b.size());
  const double bnorm = b.norm();
  res.x = (x0 && x0->size() == n) ? *x0 : Vec::Zero(n);
  if (bnorm == 0.0) {
    res.x.setZero();
    res.converged = true;
    return res;
  }
  const int m = std::min(restart, n);
  Vec r(n), w(n);

  while (res.iterations < max_iters) {
    op(res.x, r);
    r = b - r;
    double rnorm = r.norm();
    res.residual = rnorm / bnorm;
    if (res.residual < tol) {
      res.converged = true;
      return res;
    }

    Mat V = Mat::Zero(n, m + 1);
    Mat H = Mat::Zero(m + 1, m);
    V.col(0) = r / rnorm;
    Vec g = Vec::Zero(m + 1);
    g[0] = rnorm;
    // Givens rotations applied on the fly
    std::vector<Complex> cs(m), sn(m);
    int j = 0;
    for (; j < m && res.iterations < max_iters; ++j, ++res.iterations) {
      op(V.col(j), w);
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          Complex h = V.col(i).dot(w);
          w -= h * V.col(i);
          H(i, j) += h;
        }
      }
      H(j + 1, j) = w.norm();
      if (std::abs(H(j + 1, j)) > 1e-300) V.col(j + 1) = w / H(j + 1, j);

      for (int i = 0; i < j; ++i) {
        Complex t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -std::conj(sn[i]) * H(i, j) + std::conj(cs[i]) * H(i + 1, j);
        H(i, j) = t;
      }
      double denom = std::sqrt(std::norm(H(j, j)) + std::norm(H(j + 1, j)));
      if (denom < 1e-300) denom = 1e-300;
      cs[j] = std::conj(H(j, j)) / denom;
      sn[j] = std::conj(H(j + 1, j)) / denom;
      H(j, j) = cs[j] * H(j, j) + sn[j] * H(j + 1, j);
      H(j + 1, j) = 0.0;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];
      res.residual = std::abs(g[j + 1]) / bnorm;
      if (res.residual < tol) {
        ++j;
        break;
      }
    }
    // back substitution on the j x j triangular system
    Vec y = Vec::Zero(j);
    for (int i = j - 1; i >= 0; --i) {
      Complex s = g[i];
      for (int l = i + 1; l < j; ++l) s -= H(i, l) * y[l];
      y[i] = s / H(i, i);
    }
    res.x += V.leftCols(j) * y;
    if (res.residual < tol) {
      res.converged = true;
      return res;
    }
  }
  return res;
}

Mat inverse_sqrt_psd(const Mat& X, double rel_cutoff, Mat* sqrt_out,
                     int* rank_out) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (X + X.adjoint()));
  const auto& ev = es.eigenvalues();
  const double cutoff = std::max(ev.maxCoeff(), 0.0) * rel_cutoff;
  if (ev.maxCoeff() <= 0.0)
    throw std::runtime_error("inverse_sqrt_psd: matrix has no positive part");
  Eigen::VectorXd inv_sqrt = Eigen::VectorXd::Zero(ev.size());
  Eigen::VectorXd sqrt_ev = Eigen::VectorXd::Zero(ev.size());
  int rank = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] > cutoff) {
      inv_sqrt[i] = 1.0 / std::sqrt(ev[i]);
      sqrt_ev[i] = std::sqrt(ev[i]);
      ++rank;
    }
  }
  if (rank_out) *rank_out = rank;
  if (sqrt_out)
    *sqrt_out = es.eigenvectors() * sqrt_ev.asDiagonal() *
                es.eigenvectors().adjoint();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace kzmps::linalg
