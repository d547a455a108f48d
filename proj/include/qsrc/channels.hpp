// Trace-preserving completely positive maps in Kraus form and as unitary
// dilations Lambda(rho) = Tr_anc U (rho (x) P) U^dag.
#pragma once

#include <cstddef>
#include <vector>

#include "qsrc/states.hpp"

namespace qsrc {

/// Kraus operators V_i (dout x din) with sum V_i^dag V_i = I.
class KrausChannel {
public:
  /// Throws ValidationError when the operator list is empty, shapes differ,
  /// or trace preservation fails by more than kTol.kraus.
  explicit KrausChannel(std::vector<linalg::ComplexMatrix> operators);

  static KrausChannel identity(std::size_t dim);
  static KrausChannel unitary(const linalg::ComplexMatrix& u);

  std::size_t din() const { return din_; }
  std::size_t dout() const { return dout_; }
  std::size_t size() const { return ops_.size(); }
  const std::vector<linalg::ComplexMatrix>& operators() const { return ops_; }

  /// ||sum V^dag V - I||_F.
  static double trace_preservation_defect(const std::vector<linalg::ComplexMatrix>& ops);

private:
  std::vector<linalg::ComplexMatrix> ops_;
  std::size_t din_ = 0;
  std::size_t dout_ = 0;
};

/// Unitary dilation. The input ancilla `ancilla_state` lives on C^{ancilla_in};
/// `unitary` acts on C^{din} (x) C^{ancilla_in} = C^{dout} (x) C^{ancilla_out}
/// and the output ancilla (second factor) is traced out.
struct Dilation {
  std::size_t din = 0;
  std::size_t dout = 0;
  std::size_t ancilla_in = 1;
  std::size_t ancilla_out = 1;
  PureState ancilla_state = PureState::basis(1, 0);
  linalg::ComplexMatrix unitary;
};

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho);

/// Throws ValidationError if the dilation's unitary is not unitary.
DensityMatrix apply_via_dilation(const Dilation& dil, const DensityMatrix& rho);

/// Stacks the Kraus operators into the isometry sum_i V_i (x) |i> and
/// completes it to a unitary by orthonormalizing standard basis vectors in
/// index order.
Dilation dilate(const KrausChannel& ch);

/// Random channel with k Kraus operators: orthonormalized complex Gaussian
/// (dout k) x din matrix split into k row blocks. Requires dout k >= din.
KrausChannel random_channel(std::size_t din, std::size_t dout, std::size_t k, Rng& rng);

/// Kraus operators {A_j B_i} of `after` o `before`.
KrausChannel compose(const KrausChannel& after, const KrausChannel& before);

Ensemble apply_to_ensemble(const KrausChannel& ch, const Ensemble& e);

}  // namespace qsrc
