#ifndef KZMPS_UMPS_HPP
#define KZMPS_UMPS_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

namespace kzmps {

using Mat = Eigen::MatrixXcd;
using Complex = std::complex<double>;
using SiteTensor = std::vector<Mat>;  // physical index outermost: A[n] is chi x chi

/// Translation-invariant MPS defined by a single (d, chi, chi) tensor.
struct UMPSTensor {
  int d = 0;
  int chi = 0;
  SiteTensor A;

  UMPSTensor() = default;
  UMPSTensor(int d_, int chi_) : d(d_), chi(chi_), A(d_, Mat::Zero(chi_, chi_)) {}
  static UMPSTensor random(int d, int chi, unsigned seed);
};

/// Mixed canonical gauge: sum_n AL[n]^dag AL[n] = 1, sum_n AR[n] AR[n]^dag = 1,
/// AL[n] C = C AR[n], singular values of C normalized to unit 2-norm.
struct CanonicalUMPS {
  int d = 0;
  int chi = 0;
  SiteTensor AL, AR;
  Mat C;
  double time = 0.0;

  SiteTensor center_tensor() const;  // AC[n] = AL[n] C
  double left_isometry_residual() const;
  double right_isometry_residual() const;
  double gauge_residual() const;  // || AL C - C AR ||
};

/// Dominant transfer-matrix data of a uMPS tensor.
struct TransferFixedPoints {
  Mat l, r;             // Hermitian PSD, normalized so trace(l r) = 1
  double lambda1 = 0.0;  // dominant eigenvalue (norm^2 per site)
  double lambda2_abs = 0.0;
};

// --- transfer maps -----------------------------------------------------
// Left action accumulates bra-side from -infinity: X -> sum_n A[n]^dag X A[n].
// Right action accumulates from +infinity: X -> sum_n A[n] X A[n]^dag.
Mat transfer_left(const SiteTensor& A, const Mat& X);
Mat transfer_right(const SiteTensor& A, const Mat& X);
// Same with a one-site operator inserted, O(m, n) = <m|O|n>.
Mat transfer_left_op(const SiteTensor& A, const Mat& O, const Mat& X);
Mat transfer_right_op(const SiteTensor& A, const Mat& O, const Mat& X);
// Mixed bra/ket tensors (used by brute-force cross-checks).
Mat transfer_left_mixed(const SiteTensor& Abra, const SiteTensor& Aket, const Mat& X);

/// Dominant (and subleading) transfer eigenvalues plus fixed points.
/// Warm starts may pass previous l, r to seed the eigensolver.
TransferFixedPoints transfer_fixed_points(const SiteTensor& A, double tol = 1e-13,
                                          const Mat* l_guess = nullptr,
                                          const Mat* r_guess = nullptr,
                                          bool want_lambda2 = false);

/// Subleading transfer eigenvalue magnitude of a canonical state (lambda1 = 1).
double transfer_lambda2(const CanonicalUMPS& psi, double tol = 1e-10);

struct CanonicalizeOptions {
  double tol = 1e-12;
  int max_polish = 40;
  const CanonicalUMPS* warm = nullptr;  // previous gauge for fixed-point seeds
};

/// Gauge a generic tensor into mixed canonical form. Throws on a degenerate
/// or non-converging dominant transfer eigenvalue. The physical state is
/// unchanged; the norm is set to one (lambda1 reported via *norm_out).
CanonicalUMPS canonicalize(const UMPSTensor& A, const CanonicalizeOptions& opts = {},
                           double* norm_out = nullptr);

// --- observables --------------------------------------------------------
Complex expectation_one_site(const CanonicalUMPS& psi, const Mat& op);
/// <P_x Q_{x+1}> for a nearest-neighbour product term.
Complex expectation_two_site(const CanonicalUMPS& psi, const Mat& P, const Mat& Q);

struct Correlator {
  std::vector<double> g;  // g[r], r = 0..r_max
  int clamp_index = -1;   // first r where the decayed tail was clamped
};

/// Full equal-time two-point function <op_0 op_r>, r = 0..r_max. The tail is
/// clamped to the factorized limit once converged to tail_tol.
Correlator correlator_one_site(const CanonicalUMPS& psi, const Mat& op, int r_max,
                               double tail_tol = 1e-10);

/// xi = -1 / ln |lambda2|; zero for product states (chi = 1 or |lambda2| = 0).
double correlation_length(const CanonicalUMPS& psi);

double entanglement_entropy(const CanonicalUMPS& psi);

/// Product state with every site in the given normalized local vector,
/// embedded at bond dimension chi with an optional noise perturbation.
UMPSTensor product_state_tensor(const Eigen::VectorXcd& local, int chi,
                                double noise = 0.0, unsigned seed = 1);

}  // namespace kzmps

#endif
