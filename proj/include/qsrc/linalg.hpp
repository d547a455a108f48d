// Dense complex linear algebra: Hermitian spectra, spectral functions,
// singular values, tensor products, partial traces and the trace norm.
#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qsrc::linalg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are sorted in
/// descending order; column k of `eigenvectors` belongs to eigenvalues[k].
struct HermitianSpectrum {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;

  std::size_t dim() const { return eigenvalues.size(); }
  /// Sum_k lambda_k v_k v_k^dag.
  ComplexMatrix reconstruct() const;
};

struct SingularValueDecomposition {
  ComplexMatrix u;
  std::vector<double> singular_values;  // descending, nonnegative
  ComplexMatrix v;                      // A = u diag(s) v^dag
};

bool all_finite(const ComplexMatrix& m);

/// ||M - M^dag||_F / max(1, ||M||_F).
double hermiticity_defect(const ComplexMatrix& m);

/// Throws DimensionError unless `m` is square.
void require_square(const ComplexMatrix& m, const char* what);

/// (M + M^dag)/2 for input already Hermitian within tolerance; throws
/// ValidationError otherwise.
ComplexMatrix hermitian_part(const ComplexMatrix& m);

HermitianSpectrum eig_hermitian(const ComplexMatrix& m);

/// Tr sqrt(A^dag A). With `hermitian` set the input is validated and the sum
/// of absolute eigenvalues is returned; otherwise singular values are summed.
double trace_norm(const ComplexMatrix& a, bool hermitian);

/// Eigenvalues in [-eigen_clip, 0) become 0; anything below throws.
std::vector<double> clip_nonnegative(std::vector<double> values);

/// Sum_k f(lambda_k) v_k v_k^dag.
template <class F>
ComplexMatrix spectral_apply(const HermitianSpectrum& spec, F&& f) {
  const auto n = static_cast<Eigen::Index>(spec.dim());
  Eigen::VectorXd fv(n);
  for (Eigen::Index k = 0; k < n; ++k) fv[k] = f(spec.eigenvalues[static_cast<std::size_t>(k)]);
  return spec.eigenvectors * fv.asDiagonal() * spec.eigenvectors.adjoint();
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector kron(const ComplexVector& a, const ComplexVector& b);
ComplexMatrix kron_all(std::span<const ComplexMatrix> factors);
ComplexVector kron_all(std::span<const ComplexVector> factors);

/// Partial trace of `m` on the tensor product with factor dimensions `dims`,
/// keeping the subsystems listed in `keep` (in their original order).
ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

SingularValueDecomposition svd(const ComplexMatrix& a);

/// Trace norm of B diag(w) B^dag given only the Gram matrix G = B^dag B and
/// the column weights w. Avoids forming B B^dag when B is tall.
double weighted_gram_trace_norm(const ComplexMatrix& gram, std::span<const double> weights);

/// Same with a general Hermitian weight: || B W B^dag ||_1 from G = B^dag B.
double weighted_gram_trace_norm(const ComplexMatrix& gram, const ComplexMatrix& weight);

/// Orthonormal basis (columns) of the span of the columns of `vectors`,
/// dropping directions with singular value below `cutoff` * largest.
ComplexMatrix orthonormal_span(const ComplexMatrix& vectors, double cutoff = 1e-10);

}  // namespace qsrc::linalg
