// Quantum states, ensembles, block sequences and purifications.
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "qsrc/common.hpp"
#include "qsrc/linalg.hpp"
#include "qsrc/random.hpp"

namespace qsrc {

/// Unit vector in C^dim.
class PureState {
public:
  /// Validates the norm (within kTol.norm) and renormalizes exactly.
  static PureState from_amplitudes(linalg::ComplexVector amplitudes);
  static PureState basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  const linalg::ComplexVector& amplitudes() const { return amplitudes_; }

private:
  explicit PureState(linalg::ComplexVector a) : amplitudes_(std::move(a)) {}
  linalg::ComplexVector amplitudes_;
};

/// Hermitian, positive semidefinite, unit-trace matrix. The (clipped)
/// spectrum is computed once at construction and kept.
class DensityMatrix {
public:
  static DensityMatrix from_matrix(const linalg::ComplexMatrix& m);
  static DensityMatrix from_pure(const PureState& psi);
  /// rho = (I + x X + y Y + z Z)/2, |(x,y,z)| <= 1.
  static DensityMatrix from_bloch(double x, double y, double z);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return spectrum_.dim(); }
  const linalg::ComplexMatrix& matrix() const { return matrix_; }
  /// Spectrum with eigenvalues clipped to be nonnegative.
  const linalg::HermitianSpectrum& spectrum() const { return spectrum_; }
  /// Number of eigenvalues above kTol.rank_cutoff.
  std::size_t rank() const;
  bool is_pure() const { return rank() == 1; }

private:
  DensityMatrix(linalg::ComplexMatrix m, linalg::HermitianSpectrum s)
      : matrix_(std::move(m)), spectrum_(std::move(s)) {}
  linalg::ComplexMatrix matrix_;
  linalg::HermitianSpectrum spectrum_;
};

/// Probability-weighted list of states of equal dimension.
class Ensemble {
public:
  Ensemble(std::vector<double> probs, std::vector<DensityMatrix> states);

  std::size_t size() const { return probs_.size(); }
  std::size_t dim() const { return states_.front().dim(); }
  const std::vector<double>& probs() const { return probs_; }
  const std::vector<DensityMatrix>& states() const { return states_; }
  double prob(std::size_t i) const { return probs_[i]; }
  const DensityMatrix& state(std::size_t i) const { return states_[i]; }
  bool all_pure() const;

private:
  std::vector<double> probs_;
  std::vector<DensityMatrix> states_;
};

/// Multi-index (i_1, ..., i_N) of ensemble members.
struct BlockSequence {
  std::vector<std::size_t> indices;

  std::size_t length() const { return indices.size(); }
  /// Throws ValidationError if any index is not a member of `e`.
  void validate(const Ensemble& e) const;
  /// Product of member probabilities.
  double probability(const Ensemble& e) const;
};

/// Lazy tensor product rho_{i_1} (x) ... (x) rho_{i_N}.
class ProductState {
public:
  explicit ProductState(std::vector<DensityMatrix> factors);

  std::size_t length() const { return factors_.size(); }
  const std::vector<DensityMatrix>& factors() const { return factors_; }
  const DensityMatrix& factor(std::size_t j) const { return factors_[j]; }
  std::size_t factor_dim() const { return factors_.front().dim(); }
  /// Total dimension, saturating at SIZE_MAX.
  std::size_t dim() const;
  /// Tr(P_1 (x) ... (x) P_N rho_block) for product operators P_j.
  linalg::Complex product_expectation(std::span<const linalg::ComplexMatrix> ops) const;
  /// Dense matrix; throws ResourceCapError beyond `dense_cap`.
  DensityMatrix materialize(std::size_t dense_cap = Limits{}.dense_cap) const;

private:
  std::vector<DensityMatrix> factors_;
};

DensityMatrix ensemble_average(const Ensemble& e);

ProductState block_state(const Ensemble& e, const BlockSequence& seq);

/// Canonical purification sum_k sqrt(lambda_k) |v_k> (x) |k> on
/// C^dim (x) C^rank (system first, ancilla second).
PureState purify(const DensityMatrix& rho);

/// Purifications of rho1 and rho2 on a common C^d (x) C^a,
/// a = max(rank rho1, rank rho2), whose overlap |<psi1|psi2>|^2 equals the
/// fidelity. psi1 is canonical; psi2 is the canonical purification of rho2
/// rotated on the ancilla by the polar factor of the overlap operator.
std::pair<PureState, PureState> optimal_purification_pair(const DensityMatrix& rho1,
                                                          const DensityMatrix& rho2);

/// Purification matrix X (d x a) of a pure state on C^d (x) C^a, i.e.
/// psi = sum_{x,y} X(x,y) |x>|y>; Tr_anc |psi><psi| = X X^dag.
linalg::ComplexMatrix purification_matrix(const PureState& psi, std::size_t system_dim);

/// Pads the ancilla of a purification on C^d (x) C^a to C^d (x) C^target.
PureState pad_ancilla(const PureState& psi, std::size_t system_dim, std::size_t target_ancilla);

/// N i.i.d. draws from the ensemble probabilities.
BlockSequence sample_sequence(const Ensemble& e, std::size_t n, Rng& rng);

/// Index of the sampled member for one uniform draw u in [0,1).
std::size_t sample_member(const std::vector<double>& probs, double u);

}  // namespace qsrc
