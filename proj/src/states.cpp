#include "qsrc/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qsrc {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

PureState PureState::from_amplitudes(ComplexVector amplitudes) {
  if (amplitudes.size() == 0) throw ValidationError("pure state: empty amplitude vector");
  for (Eigen::Index i = 0; i < amplitudes.size(); ++i) {
    if (!std::isfinite(amplitudes[i].real()) || !std::isfinite(amplitudes[i].imag()))
      throw ValidationError("pure state: non-finite amplitude");
  }
  const double n = amplitudes.norm();
  if (std::abs(n - 1.0) > kTol.norm)
    throw ValidationError("pure state: norm " + std::to_string(n) + " is not 1");
  return PureState(amplitudes / n);
}

PureState PureState::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw ValidationError("basis state index out of range");
  ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return PureState(std::move(v));
}

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m) {
  linalg::require_square(m, "density matrix");
  if (m.rows() == 0) throw ValidationError("density matrix: empty matrix");
  const ComplexMatrix h = linalg::hermitian_part(m);
  auto spec = linalg::eig_hermitian(h);
  spec.eigenvalues = linalg::clip_nonnegative(std::move(spec.eigenvalues));
  const double tr = h.trace().real();
  if (std::abs(tr - 1.0) > kTol.trace)
    throw ValidationError("density matrix: trace " + std::to_string(tr) + " is not 1");
  return DensityMatrix(h, std::move(spec));
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  const auto& a = psi.amplitudes();
  return from_matrix(a * a.adjoint());
}

DensityMatrix DensityMatrix::from_bloch(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  if (!std::isfinite(r) || r > 1.0 + 1e-12)
    throw ValidationError("Bloch vector length " + std::to_string(r) + " exceeds 1");
  ComplexMatrix m(2, 2);
  m << Complex(0.5 * (1.0 + z), 0.0), Complex(0.5 * x, -0.5 * y),
       Complex(0.5 * x, 0.5 * y), Complex(0.5 * (1.0 - z), 0.0);
  return from_matrix(m);
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return from_matrix(ComplexMatrix::Identity(n, n) / static_cast<double>(dim));
}

std::size_t DensityMatrix::rank() const {
  return static_cast<std::size_t>(std::count_if(spectrum_.eigenvalues.begin(), spectrum_.eigenvalues.end(),
                                                [](double x) { return x > kTol.rank_cutoff; }));
}

Ensemble::Ensemble(std::vector<double> probs, std::vector<DensityMatrix> states)
    : probs_(std::move(probs)), states_(std::move(states)) {
  if (probs_.empty()) throw ValidationError("ensemble: no members");
  if (probs_.size() != states_.size())
    throw ValidationError("ensemble: probability count does not match state count");
  double total = 0.0;
  for (double p : probs_) {
    if (!std::isfinite(p) || p < 0.0) throw ValidationError("ensemble: negative or non-finite probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kTol.probability)
    throw ValidationError("ensemble: probabilities sum to " + std::to_string(total));
  const std::size_t d = states_.front().dim();
  for (const auto& s : states_) {
    if (s.dim() != d) throw DimensionError("ensemble: members have different dimensions");
  }
}

bool Ensemble::all_pure() const {
  return std::all_of(states_.begin(), states_.end(), [](const DensityMatrix& s) { return s.is_pure(); });
}

void BlockSequence::validate(const Ensemble& e) const {
  for (auto i : indices) {
    if (i >= e.size()) throw ValidationError("block sequence: member index out of range");
  }
}

double BlockSequence::probability(const Ensemble& e) const {
  double p = 1.0;
  for (auto i : indices) p *= e.prob(i);
  return p;
}

ProductState::ProductState(std::vector<DensityMatrix> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw ValidationError("product state: no factors");
}

std::size_t ProductState::dim() const {
  std::size_t total = 1;
  for (const auto& f : factors_) {
    if (total > std::numeric_limits<std::size_t>::max() / f.dim()) return std::numeric_limits<std::size_t>::max();
    total *= f.dim();
  }
  return total;
}

Complex ProductState::product_expectation(std::span<const ComplexMatrix> ops) const {
  if (ops.size() != factors_.size()) throw DimensionError("product_expectation: operator count mismatch");
  Complex acc = 1.0;
  for (std::size_t j = 0; j < ops.size(); ++j) {
    if (ops[j].rows() != static_cast<Eigen::Index>(factors_[j].dim()) || ops[j].cols() != ops[j].rows())
      throw DimensionError("product_expectation: operator dimension mismatch");
    acc *= (ops[j] * factors_[j].matrix()).trace();
  }
  return acc;
}

DensityMatrix ProductState::materialize(std::size_t dense_cap) const {
  if (dim() > dense_cap)
    throw ResourceCapError("block state of dimension " + std::to_string(dim()) + " exceeds dense cap " +
                           std::to_string(dense_cap));
  std::vector<ComplexMatrix> mats;
  mats.reserve(factors_.size());
  for (const auto& f : factors_) mats.push_back(f.matrix());
  return DensityMatrix::from_matrix(linalg::kron_all(mats));
}

DensityMatrix ensemble_average(const Ensemble& e) {
  ComplexMatrix avg = ComplexMatrix::Zero(static_cast<Eigen::Index>(e.dim()), static_cast<Eigen::Index>(e.dim()));
  for (std::size_t i = 0; i < e.size(); ++i) avg += e.prob(i) * e.state(i).matrix();
  return DensityMatrix::from_matrix(avg);
}

ProductState block_state(const Ensemble& e, const BlockSequence& seq) {
  seq.validate(e);
  std::vector<DensityMatrix> factors;
  factors.reserve(seq.length());
  for (auto i : seq.indices) factors.push_back(e.state(i));
  return ProductState(std::move(factors));
}

namespace {

// Canonical purification matrix sqrt(rho) V restricted to the support,
// padded with zero columns to `ancilla` columns.
ComplexMatrix canonical_matrix(const DensityMatrix& rho, std::size_t ancilla) {
  const auto& spec = rho.spectrum();
  const auto d = static_cast<Eigen::Index>(rho.dim());
  ComplexMatrix x = ComplexMatrix::Zero(d, static_cast<Eigen::Index>(ancilla));
  const std::size_t r = rho.rank();
  for (std::size_t k = 0; k < r; ++k)
    x.col(static_cast<Eigen::Index>(k)) = std::sqrt(spec.eigenvalues[k]) * spec.eigenvectors.col(static_cast<Eigen::Index>(k));
  return x;
}

ComplexVector vectorize(const ComplexMatrix& x) {
  ComplexVector v(x.size());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) v[i * x.cols() + j] = x(i, j);
  return v;
}

}  // namespace

ComplexMatrix purification_matrix(const PureState& psi, std::size_t system_dim) {
  if (system_dim == 0 || psi.dim() % system_dim != 0)
    throw DimensionError("purification_matrix: dimension is not a multiple of the system dimension");
  const auto d = static_cast<Eigen::Index>(system_dim);
  const auto a = static_cast<Eigen::Index>(psi.dim() / system_dim);
  ComplexMatrix x(d, a);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < a; ++j) x(i, j) = psi.amplitudes()[i * a + j];
  return x;
}

PureState pad_ancilla(const PureState& psi, std::size_t system_dim, std::size_t target_ancilla) {
  const ComplexMatrix x = purification_matrix(psi, system_dim);
  if (static_cast<std::size_t>(x.cols()) > target_ancilla)
    throw DimensionError("pad_ancilla: target ancilla smaller than current");
  ComplexMatrix padded = ComplexMatrix::Zero(x.rows(), static_cast<Eigen::Index>(target_ancilla));
  padded.leftCols(x.cols()) = x;
  return PureState::from_amplitudes(vectorize(padded));
}

PureState purify(const DensityMatrix& rho) {
  const std::size_t r = std::max<std::size_t>(rho.rank(), 1);
  return PureState::from_amplitudes(vectorize(canonical_matrix(rho, r)));
}

std::pair<PureState, PureState> optimal_purification_pair(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.dim() != rho2.dim()) throw DimensionError("optimal_purification_pair: dimension mismatch");
  const std::size_t a = std::max<std::size_t>({rho1.rank(), rho2.rank(), 1});
  const ComplexMatrix x1 = canonical_matrix(rho1, a);
  const ComplexMatrix x2 = canonical_matrix(rho2, a);
  // <psi1|psi2> = Tr(X1^dag X2 R); maximized by the polar factor R = V U^dag
  // of X1^dag X2 = U S V^dag, giving Tr S = ||sqrt(rho1) sqrt(rho2)||_1.
  const auto dec = linalg::svd(x1.adjoint() * x2);
  const ComplexMatrix rotation = dec.v * dec.u.adjoint();
  return {PureState::from_amplitudes(vectorize(x1)), PureState::from_amplitudes(vectorize(x2 * rotation))};
}

std::size_t sample_member(const std::vector<double>& probs, double u) {
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last = i;
    cum += probs[i];
    if (u < cum) return i;
  }
  return last;
}

BlockSequence sample_sequence(const Ensemble& e, std::size_t n, Rng& rng) {
  if (n == 0) throw ValidationError("sample_sequence: N must be at least 1");
  BlockSequence seq;
  seq.indices.resize(n);
  for (auto& i : seq.indices) i = sample_member(e.probs(), rng.uniform());
  return seq;
}

}  // namespace qsrc
