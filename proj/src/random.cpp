#include "qsrc/random.hpp"

#include <cmath>
#include <numbers>

#include "qsrc/common.hpp"

namespace qsrc {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw ValidationError("Rng::index: empty range");
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

linalg::Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 over the pair.
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace qsrc

namespace qsrc::random {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j)
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.complex_normal();
  return g;
}

ComplexMatrix unitary(std::size_t d, Rng& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(g.rows(), g.cols());
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const Complex diag = r(k, k);
    const double mag = std::abs(diag);
    if (mag > 0.0) q.col(k) *= diag / mag;
  }
  return q;
}

ComplexVector pure_amplitudes(std::size_t d, Rng& rng) {
  ComplexVector v(static_cast<Eigen::Index>(d));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.complex_normal();
  return v / v.norm();
}

ComplexMatrix density_matrix(std::size_t d, std::size_t rank, Rng& rng) {
  if (rank < 1 || rank > d) throw ValidationError("random density matrix: rank out of range");
  const ComplexMatrix g = ginibre(d, rank, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

ComplexMatrix hermitian(std::size_t d, Rng& rng) {
  const ComplexMatrix g = ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

std::vector<double> probabilities(std::size_t n, Rng& rng) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& x : p) {
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    x = -std::log(u);
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

}  // namespace qsrc::random
