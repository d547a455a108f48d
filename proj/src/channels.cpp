#include "qsrc/channels.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace qsrc {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

double KrausChannel::trace_preservation_defect(const std::vector<ComplexMatrix>& ops) {
  if (ops.empty()) return 0.0;
  const auto din = ops.front().cols();
  ComplexMatrix sum = ComplexMatrix::Zero(din, din);
  for (const auto& v : ops) sum += v.adjoint() * v;
  return (sum - ComplexMatrix::Identity(din, din)).norm();
}

KrausChannel::KrausChannel(std::vector<ComplexMatrix> operators) : ops_(std::move(operators)) {
  if (ops_.empty()) throw ValidationError("Kraus channel: empty operator list");
  din_ = static_cast<std::size_t>(ops_.front().cols());
  dout_ = static_cast<std::size_t>(ops_.front().rows());
  if (din_ == 0 || dout_ == 0) throw ValidationError("Kraus channel: zero-dimensional operator");
  for (const auto& v : ops_) {
    if (static_cast<std::size_t>(v.cols()) != din_ || static_cast<std::size_t>(v.rows()) != dout_)
      throw ValidationError("Kraus channel: operators have different shapes");
    if (!linalg::all_finite(v)) throw ValidationError("Kraus channel: non-finite entries");
  }
  const double defect = trace_preservation_defect(ops_);
  if (defect > kTol.kraus)
    throw ValidationError("Kraus channel: not trace preserving (||sum V^dag V - I|| = " + std::to_string(defect) + ")");
}

KrausChannel KrausChannel::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return KrausChannel({ComplexMatrix::Identity(n, n)});
}

KrausChannel KrausChannel::unitary(const ComplexMatrix& u) { return KrausChannel({u}); }

DensityMatrix apply(const KrausChannel& ch, const DensityMatrix& rho) {
  if (rho.dim() != ch.din())
    throw DimensionError("apply: state dimension " + std::to_string(rho.dim()) + " does not match channel input " +
                         std::to_string(ch.din()));
  const auto n = static_cast<Eigen::Index>(ch.dout());
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (const auto& v : ch.operators()) out += v * rho.matrix() * v.adjoint();
  return DensityMatrix::from_matrix(out);
}

DensityMatrix apply_via_dilation(const Dilation& dil, const DensityMatrix& rho) {
  if (rho.dim() != dil.din) throw DimensionError("apply_via_dilation: state dimension mismatch");
  if (dil.ancilla_state.dim() != dil.ancilla_in) throw DimensionError("apply_via_dilation: ancilla dimension mismatch");
  const auto total = static_cast<Eigen::Index>(dil.din * dil.ancilla_in);
  if (dil.unitary.rows() != total || dil.unitary.cols() != total ||
      dil.dout * dil.ancilla_out != dil.din * dil.ancilla_in)
    throw DimensionError("apply_via_dilation: unitary does not act on the joint space");
  const double defect = (dil.unitary.adjoint() * dil.unitary - ComplexMatrix::Identity(total, total)).norm();
  if (defect > kTol.unitary) throw ValidationError("apply_via_dilation: matrix is not unitary");

  const ComplexVector& p = dil.ancilla_state.amplitudes();
  const ComplexMatrix joint = linalg::kron(rho.matrix(), ComplexMatrix(p * p.adjoint()));
  const ComplexMatrix evolved = dil.unitary * joint * dil.unitary.adjoint();
  const std::size_t dims[] = {dil.dout, dil.ancilla_out};
  const std::size_t keep[] = {0};
  return DensityMatrix::from_matrix(linalg::partial_trace(evolved, dims, keep));
}

Dilation dilate(const KrausChannel& ch) {
  const std::size_t din = ch.din(), dout = ch.dout(), k = ch.size();
  // Smallest joint dimension divisible by din and dout that fits the isometry.
  const std::size_t base = std::lcm(din, dout);
  std::size_t total = base;
  while (total < dout * k || total < din) total += base;

  Dilation dil;
  dil.din = din;
  dil.dout = dout;
  dil.ancilla_in = total / din;
  dil.ancilla_out = total / dout;
  dil.ancilla_state = PureState::basis(dil.ancilla_in, 0);

  const auto n = static_cast<Eigen::Index>(total);
  ComplexMatrix u = ComplexMatrix::Zero(n, n);
  std::vector<bool> filled(total, false);
  // Column x * ancilla_in carries W|x> = sum_i V_i|x> (x) |i>.
  for (std::size_t x = 0; x < din; ++x) {
    const auto col = static_cast<Eigen::Index>(x * dil.ancilla_in);
    for (std::size_t i = 0; i < k; ++i) {
      const auto& v = ch.operators()[i];
      for (std::size_t o = 0; o < dout; ++o)
        u(static_cast<Eigen::Index>(o * dil.ancilla_out + i), col) = v(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(x));
    }
    filled[static_cast<std::size_t>(col)] = true;
  }
  // Complete with Gram-Schmidt over e_0, e_1, ... in index order.
  std::vector<Eigen::Index> open;
  for (std::size_t c = 0; c < total; ++c)
    if (!filled[c]) open.push_back(static_cast<Eigen::Index>(c));
  std::vector<Eigen::Index> done;
  for (std::size_t c = 0; c < total; ++c)
    if (filled[c]) done.push_back(static_cast<Eigen::Index>(c));
  std::size_t next = 0;
  for (Eigen::Index candidate = 0; candidate < n && next < open.size(); ++candidate) {
    ComplexVector v = ComplexVector::Zero(n);
    v[candidate] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (auto c : done) v -= u.col(c).dot(v) * u.col(c);
    const double norm = v.norm();
    if (norm < 1e-8) continue;
    u.col(open[next]) = v / norm;
    done.push_back(open[next]);
    ++next;
  }
  if (next != open.size()) throw std::logic_error("dilate: unitary completion failed");
  dil.unitary = std::move(u);
  return dil;
}

KrausChannel random_channel(std::size_t din, std::size_t dout, std::size_t k, Rng& rng) {
  if (k < 1) throw ValidationError("random_channel: need at least one Kraus operator");
  if (din == 0 || dout == 0) throw ValidationError("random_channel: dimensions must be positive");
  if (dout * k < din) throw ValidationError("random_channel: dout * k must be at least din");
  const ComplexMatrix g = random::ginibre(dout * k, din, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(g.rows(), g.cols());
  std::vector<ComplexMatrix> ops;
  ops.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    ops.push_back(q.block(static_cast<Eigen::Index>(i * dout), 0, static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(din)));
  return KrausChannel(std::move(ops));
}

KrausChannel compose(const KrausChannel& after, const KrausChannel& before) {
  if (before.dout() != after.din()) throw DimensionError("compose: inner dimensions do not match");
  std::vector<ComplexMatrix> ops;
  ops.reserve(after.size() * before.size());
  for (const auto& a : after.operators())
    for (const auto& b : before.operators()) ops.push_back(a * b);
  return KrausChannel(std::move(ops));
}

Ensemble apply_to_ensemble(const KrausChannel& ch, const Ensemble& e) {
  if (e.dim() != ch.din()) throw DimensionError("apply_to_ensemble: ensemble dimension mismatch");
  std::vector<DensityMatrix> out;
  out.reserve(e.size());
  for (const auto& s : e.states()) out.push_back(apply(ch, s));
  return Ensemble(e.probs(), std::move(out));
}

}  // namespace qsrc
