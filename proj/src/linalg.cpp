#include "qsrc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qsrc/common.hpp"

namespace qsrc::linalg {

ComplexMatrix HermitianSpectrum::reconstruct() const {
  return spectral_apply(*this, [](double x) { return x; });
}

bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

double hermiticity_defect(const ComplexMatrix& m) {
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() / scale;
}

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

ComplexMatrix hermitian_part(const ComplexMatrix& m) {
  require_square(m, "hermitian_part");
  if (!all_finite(m)) throw ValidationError("matrix has non-finite entries");
  const double defect = hermiticity_defect(m);
  if (defect > kTol.hermitian) {
    throw ValidationError("matrix is not Hermitian (relative defect " + std::to_string(defect) + ")");
  }
  return 0.5 * (m + m.adjoint());
}

HermitianSpectrum eig_hermitian(const ComplexMatrix& m) {
  const ComplexMatrix h = hermitian_part(m);
  const auto n = h.rows();
  HermitianSpectrum out;
  if (n == 0) return out;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw ValidationError("eigen-decomposition did not converge");
  // Eigen returns ascending order.
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues[static_cast<std::size_t>(k)] = solver.eigenvalues()[n - 1 - k];
    out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

double trace_norm(const ComplexMatrix& a, bool hermitian) {
  require_square(a, "trace_norm");
  if (hermitian) {
    const auto spec = eig_hermitian(a);
    double s = 0.0;
    for (double x : spec.eigenvalues) s += std::abs(x);
    return s;
  }
  const auto dec = svd(a);
  return std::accumulate(dec.singular_values.begin(), dec.singular_values.end(), 0.0);
}

std::vector<double> clip_nonnegative(std::vector<double> values) {
  for (double& x : values) {
    if (x < -kTol.eigen_clip) {
      throw ValidationError("negative eigenvalue " + std::to_string(x) + " below clipping threshold");
    }
    if (x < 0.0) x = 0.0;
  }
  return values;
}

ComplexMatrix matrix_sqrt_psd(const ComplexMatrix& m) {
  auto spec = eig_hermitian(m);
  spec.eigenvalues = clip_nonnegative(std::move(spec.eigenvalues));
  return spectral_apply(spec, [](double x) { return std::sqrt(x); });
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexVector kron(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

ComplexVector kron_all(std::span<const ComplexVector> factors) {
  ComplexVector out = ComplexVector::Ones(1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& m, std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  require_square(m, "partial_trace");
  const std::size_t n = dims.size();
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  if (total != static_cast<std::size_t>(m.rows())) {
    throw DimensionError("partial_trace: factor dimensions multiply to " + std::to_string(total) +
                         " but matrix has dimension " + std::to_string(m.rows()));
  }
  std::vector<bool> kept(n, false);
  for (auto k : keep) {
    if (k >= n) throw DimensionError("partial_trace: subsystem index out of range");
    kept[k] = true;
  }
  std::size_t keep_dim = 1, trace_dim = 1;
  for (std::size_t s = 0; s < n; ++s) (kept[s] ? keep_dim : trace_dim) *= dims[s];

  // full_index[kidx * trace_dim + tidx] for every split of a full index.
  std::vector<std::size_t> full_index(total);
  std::vector<std::size_t> digits(n, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rem = idx;
    for (std::size_t s = n; s-- > 0;) {
      digits[s] = rem % dims[s];
      rem /= dims[s];
    }
    std::size_t kidx = 0, tidx = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (kept[s]) kidx = kidx * dims[s] + digits[s];
      else tidx = tidx * dims[s] + digits[s];
    }
    full_index[kidx * trace_dim + tidx] = idx;
  }

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(keep_dim),
                                          static_cast<Eigen::Index>(keep_dim));
  for (std::size_t r = 0; r < keep_dim; ++r) {
    for (std::size_t c = 0; c < keep_dim; ++c) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < trace_dim; ++t) {
        acc += m(static_cast<Eigen::Index>(full_index[r * trace_dim + t]),
                 static_cast<Eigen::Index>(full_index[c * trace_dim + t]));
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  }
  return out;
}

SingularValueDecomposition svd(const ComplexMatrix& a) {
  if (!all_finite(a)) throw ValidationError("svd: matrix has non-finite entries");
  SingularValueDecomposition out;
  if (a.size() == 0) return out;
  Eigen::BDCSVD<ComplexMatrix> dec(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.u = dec.matrixU();
  out.v = dec.matrixV();
  const auto& s = dec.singularValues();
  out.singular_values.assign(s.data(), s.data() + s.size());
  return out;
}

namespace {

// Pivoted G = P^T L D L^dag P gives C = D^{1/2} L^dag P with C^dag C = G.
// B W B^dag and C W C^dag then share their nonzero spectrum.
ComplexMatrix gram_factor(const ComplexMatrix& gram) {
  if (!all_finite(gram)) throw ValidationError("weighted_gram_trace_norm: non-finite Gram entries");
  const ComplexMatrix h = 0.5 * (gram + gram.adjoint());
  // A Gram matrix is only semidefinite; round-off may leave tiny negative
  // pivots, which are clipped below.
  Eigen::LDLT<ComplexMatrix> ldlt(h);
  const ComplexMatrix l = ldlt.matrixL();
  const ComplexMatrix pl = ldlt.transpositionsP().transpose() * l;  // P^T L
  ComplexMatrix c = pl.adjoint();
  const auto d = ldlt.vectorD();
  for (Eigen::Index i = 0; i < c.rows(); ++i) c.row(i) *= std::sqrt(std::max(d[i].real(), 0.0));
  return c;
}

double hermitian_abs_sum(ComplexMatrix inner) {
  inner = 0.5 * (inner + inner.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(inner, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace

double weighted_gram_trace_norm(const ComplexMatrix& gram, std::span<const double> weights) {
  require_square(gram, "weighted_gram_trace_norm");
  if (static_cast<std::size_t>(gram.rows()) != weights.size()) {
    throw DimensionError("weighted_gram_trace_norm: weight count does not match Gram matrix");
  }
  const auto n = gram.rows();
  if (n == 0) return 0.0;
  const ComplexMatrix c = gram_factor(gram);
  Eigen::Map<const Eigen::VectorXd> w(weights.data(), n);
  return hermitian_abs_sum(c * w.asDiagonal() * c.adjoint());
}

double weighted_gram_trace_norm(const ComplexMatrix& gram, const ComplexMatrix& weight) {
  require_square(gram, "weighted_gram_trace_norm");
  require_square(weight, "weighted_gram_trace_norm");
  if (gram.rows() != weight.rows()) {
    throw DimensionError("weighted_gram_trace_norm: weight matrix does not match Gram matrix");
  }
  if (gram.rows() == 0) return 0.0;
  const ComplexMatrix c = gram_factor(gram);
  return hermitian_abs_sum(c * weight * c.adjoint());
}

ComplexMatrix orthonormal_span(const ComplexMatrix& vectors, double cutoff) {
  if (vectors.cols() == 0) return ComplexMatrix(vectors.rows(), 0);
  Eigen::BDCSVD<ComplexMatrix> dec(vectors, Eigen::ComputeThinU);
  const auto& s = dec.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return ComplexMatrix(vectors.rows(), 0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > cutoff * s[0]) ++rank;
  return dec.matrixU().leftCols(rank);
}

}  // namespace qsrc::linalg
