#ifndef KZMPS_LINALG_HPP
#define KZMPS_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace kzmps::linalg {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

/// Matrix-free linear operator on C^n: y = op(x).
using LinOp = std::function<void(const Vec&, Vec&)>;

struct EigPair {
  Complex value{0.0, 0.0};
  Vec vector;
};

struct ArnoldiResult {
  std::vector<EigPair> pairs;  // sorted by descending |value|
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // residual of the dominant pair
};

/// Largest-magnitude eigenpairs of a general operator via restarted Arnoldi.
/// `guess` (optional) seeds the Krylov space; warm starts from a previous
/// dominant eigenvector cut the iteration count drastically.
ArnoldiResult arnoldi_dominant(const LinOp& op, int n, int nev, double tol,
                               const Vec* guess = nullptr, int krylov_dim = 30,
                               int max_restarts = 60);

struct LanczosResult {
  double value = 0.0;
  Vec vector;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
};

/// Lowest eigenpair of a Hermitian operator via restarted Lanczos with full
/// reorthogonalization. `deflate` restricts the search to the orthogonal
/// complement of the given (orthonormal) vectors.
LanczosResult lanczos_lowest(const LinOp& op, int n, double tol,
                             const Vec* guess = nullptr, int krylov_dim = 40,
                             int max_restarts = 100,
                             const std::vector<Vec>* deflate = nullptr);

/// Lowest k eigenpairs by sequential deflation.
std::vector<LanczosResult> lanczos_lowest_k(const LinOp& op, int n, int k,
                                            double tol, int krylov_dim = 40,
                                            int max_restarts = 100);

struct SolveResult {
  Vec x;
  double residual = 0.0;  // relative to ||b||
  int iterations = 0;
  bool converged = false;
};

/// Restarted GMRES(m) for general (non-Hermitian) operators.
SolveResult gmres(const LinOp& op, const Vec& b, const Vec* x0 = nullptr,
                  double tol = 1e-12, int restart = 30, int max_iters = 2000);

/// Hermitian square root inverse with spectral cutoff: X^{-1/2} where
/// eigenvalues below cutoff*max_eig are dropped (pseudo-inverse).
Mat inverse_sqrt_psd(const Mat& X, double rel_cutoff, Mat* sqrt_out = nullptr,
                     int* rank_out = nullptr);

}  // namespace kzmps::linalg

#endif
