// Typical-subspace (Schumacher-Jozsa) block compression, the
// purification-composed protocol, and the distortion / rate bookkeeping.
//
// Multi-indices refer to eigenvectors of the single-copy state in
// descending eigenvalue order, so multi-index m names the product vector
// e_{m_1} (x) ... (x) e_{m_N}. Retained multi-indices are ordered by
// descending product eigenvalue, ties in lexicographic order; entry 0 is the
// "junk" vector that absorbs the weight falling outside the subspace.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsrc/channels.hpp"
#include "qsrc/functionals.hpp"

namespace qsrc {

struct TypicalSubspace {
  std::size_t block_length = 0;
  linalg::HermitianSpectrum base_spectrum;  // eigenvalues clipped at 0
  std::vector<std::uint16_t> retained;      // size() * block_length entries
  double retained_weight = 0.0;
  // Complement of the subspace: type classes left out entirely (base_dim()
  // counts each) and the left-out members of a partially kept group.
  std::vector<std::uint16_t> excluded_classes;
  std::vector<std::uint16_t> boundary_excluded;

  std::size_t base_dim() const { return base_spectrum.dim(); }
  std::size_t size() const { return block_length == 0 ? 0 : retained.size() / block_length; }
  std::span<const std::uint16_t> multi_index(std::size_t r) const {
    return {retained.data() + r * block_length, block_length};
  }
  std::span<const std::uint16_t> junk_index() const { return multi_index(0); }
  /// log2 of the number of retained product vectors.
  double log_dim() const;
  /// log2 of the product eigenvalue of retained entry r (-inf if zero).
  double log2_eigenvalue(std::size_t r) const;
};

/// The K largest product eigenvalues of rho^{(x)N}, found by type-class
/// enumeration over the single-copy spectrum.
TypicalSubspace product_spectrum_topk(const DensityMatrix& rho, std::size_t n, std::size_t k,
                                      const Limits& limits = {});

/// Product eigenvalues inside [2^{-N(S+delta)}, 2^{-N(S-delta)}], S the
/// entropy of rho; the single top index when the window is empty.
TypicalSubspace product_spectrum_delta(const DensityMatrix& rho, std::size_t n, double delta,
                                       const Limits& limits = {});

/// Number of retained vectors for a rate in qubits per message:
/// ceil(2^{N rate}), clamped to dim^N. Throws ValidationError for a rate
/// outside [0, log2 dim].
std::size_t retained_count_for_rate(double rate, std::size_t n, std::size_t dim);

/// Tr(Pi rho_block) for a mixed product block.
double captured_weight(const TypicalSubspace& ts, const ProductState& block);
/// <Psi|Pi|Psi> for a pure product block Psi = psi_1 (x) ... (x) psi_N.
double captured_weight(const TypicalSubspace& ts, std::span<const PureState> factors);

/// <Psi|(1 - Pi)|Psi>, summed over the complement rather than taken as
/// 1 - <Psi|Pi|Psi>, so it stays accurate when Psi is nearly inside.
double excluded_weight(const TypicalSubspace& ts, std::span<const PureState> factors);

/// <e_m|Psi> for every retained m, in retained order.
std::vector<linalg::Complex> retained_amplitudes(const TypicalSubspace& ts, std::span<const PureState> factors);

/// Columns are the retained product vectors in C^{dim^N}.
linalg::ComplexMatrix retained_basis(const TypicalSubspace& ts, std::size_t dense_cap = Limits{}.dense_cap);

/// Pi rho Pi + (1 - Tr Pi rho)|e_junk><e_junk| in retained coordinates.
DensityMatrix sj_encode(const TypicalSubspace& ts, const DensityMatrix& block,
                        std::size_t dense_cap = Limits{}.dense_cap);

/// Low-rank embedding basis * coordinates * basis^dag of an encoded state in
/// the block space.
struct EmbeddedState {
  linalg::ComplexMatrix basis;        // dim^N x K, orthonormal columns
  linalg::ComplexMatrix coordinates;  // K x K

  std::size_t dim() const { return static_cast<std::size_t>(basis.rows()); }
  double trace() const { return coordinates.trace().real(); }
  linalg::ComplexMatrix dense() const { return basis * coordinates * basis.adjoint(); }
};

EmbeddedState sj_decode(const TypicalSubspace& ts, const DensityMatrix& encoded,
                        std::size_t dense_cap = Limits{}.dense_cap);

/// The encoder as a Kraus channel C^{dim^N} -> C^K: V_0 = (retained basis)^dag
/// plus |junk><u| for every product eigenvector u outside the subspace.
KrausChannel sj_encoder_channel(const TypicalSubspace& ts, std::size_t dense_cap = Limits{}.dense_cap);

/// || |Psi><Psi| - decode(encode(Psi)) || for a pure product block, from the
/// 3x3 Gram matrix of {Pi Psi, (1 - Pi) Psi, e_junk}.
double pure_block_distortion(const TypicalSubspace& ts, std::span<const PureState> factors);

/// Distortion after the ancillas are traced out, for blocks of purified
/// messages on C^d (x) C^a: || Tr_anc(|Psi><Psi| - sigma') ||. The Gram
/// blocks mat(u)^dag mat(v) are contracted site by site over the span of the
/// purifications and retained site vectors; no d^N matrix is formed.
class TracedDistortion {
public:
  TracedDistortion(const TypicalSubspace& ts, std::vector<PureState> members, std::size_t system_dim,
                   const Limits& limits = {});

  double operator()(std::span<const std::size_t> sequence) const;
  std::size_t site_rank() const { return static_cast<std::size_t>(site_basis_.cols()); }

private:
  linalg::ComplexMatrix gram_block(const linalg::ComplexVector& u, const linalg::ComplexVector& v) const;
  linalg::ComplexMatrix product_gram_block(std::span<const linalg::ComplexVector> u,
                                           std::span<const linalg::ComplexVector> v) const;
  linalg::ComplexMatrix ancilla_rows(const linalg::ComplexVector& v) const;

  const TypicalSubspace& ts_;
  std::vector<PureState> members_;
  std::size_t system_dim_;
  std::size_t ancilla_dim_;
  linalg::ComplexMatrix site_basis_;                  // (d a) x s, orthonormal
  std::vector<linalg::ComplexMatrix> site_maps_;       // H_{c c'} = G_c^dag G_c', index c*s+c'
  std::vector<linalg::ComplexVector> member_coords_;   // g^dag psi_i
  std::vector<linalg::ComplexMatrix> member_rows_;     // ancilla row space of mat(psi_i)
  std::vector<linalg::ComplexVector> eigen_coords_;    // g^dag f_l (empty if unused)
};

enum class ProtocolKind { blind_sj, composed_purified };
std::string to_string(ProtocolKind kind);

enum class SubspaceMode { top_k, delta };

struct SubspaceSpec {
  SubspaceMode mode = SubspaceMode::top_k;
  double delta = 0.1;
};

struct EstimationConfig {
  std::uint64_t seed = 1;
  std::size_t samples = 10000;
  std::size_t exact_budget = Limits{}.exact_budget;
};

struct RunOptions {
  Limits limits;
  std::size_t threads = 1;
};

struct ProtocolRecord {
  ProtocolKind kind = ProtocolKind::blind_sj;
  std::size_t block_length = 0;  // N (blind) or k (composed)
  std::size_t source_dim = 0;
  double target_rate = 0.0;
  double rate = 0.0;  // log_dim_encoded / block_length
  double log_dim_encoded = 0.0;
  double avg_distortion = 0.0;
  double std_error = 0.0;  // 0 for exact averages
  std::size_t n_sequences = 0;
  bool exact = true;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double holevo_per_msg = 0.0;
  BoundReport bound;
  // Composed protocol only.
  std::optional<double> purified_distortion;
  std::size_t contractivity_violations = 0;
  double max_contractivity_excess = 0.0;
  std::uint64_t ensemble_fingerprint = 0;
};

/// Stable hash of an ensemble's probabilities and matrices.
std::uint64_t fingerprint(const Ensemble& e);

ProtocolRecord run_blind_sj(const Ensemble& e, std::size_t n, double rate, const SubspaceSpec& mode = {},
                            const EstimationConfig& est = {}, const RunOptions& opts = {});

/// Purify each message (optimal pair for binary ensembles, canonical
/// otherwise), compress k-blocks of purifications with the SJ top-K code and
/// trace the ancillas out at the decoder.
ProtocolRecord run_composed(const Ensemble& e, std::size_t k, double rate, const EstimationConfig& est = {},
                            const RunOptions& opts = {});

/// Theorem check against the ensemble the record was produced from.
/// Throws ValidationError when the record does not belong to `e`.
BoundReport verify_record(const ProtocolRecord& rec, const Ensemble& e);

}  // namespace qsrc
