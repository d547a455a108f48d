#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <exception>
#include <string>
#include <thread>

#include "qsrc/compression.hpp"

namespace qsrc {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

std::string to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::blind_sj: return "blind_sj";
    case ProtocolKind::composed_purified: return "composed_purified";
  }
  return "unknown";
}

namespace {

constexpr double kOrthogonal = 1e-13;

std::size_t power_or_cap(std::size_t base, std::size_t exp, std::size_t cap) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > cap / base) return cap + 1;
    out *= base;
  }
  return out;
}

ComplexMatrix reshape(const ComplexVector& v, std::size_t rows) {
  const auto r = static_cast<Eigen::Index>(rows);
  const auto c = v.size() / r;
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = v[i * c + j];
  return m;
}

ComplexMatrix kron_all(std::span<const ComplexMatrix> factors) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (const auto& f : factors) out = linalg::kron(out, f);
  return out;
}

ComplexVector kron_coords(std::span<const ComplexVector* const> sites) {
  ComplexVector out = ComplexVector::Ones(1);
  for (const auto* s : sites) out = linalg::kron(out, *s);
  return out;
}

}  // namespace

// Right singular vectors of mat(v) with nonzero singular value (a x rank).
ComplexMatrix TracedDistortion::ancilla_rows(const ComplexVector& v) const {
  const auto dec = linalg::svd(reshape(v, system_dim_));
  Eigen::Index rank = 0;
  while (rank < static_cast<Eigen::Index>(dec.singular_values.size()) &&
         dec.singular_values[static_cast<std::size_t>(rank)] > kOrthogonal)
    ++rank;
  return dec.v.leftCols(rank);
}

TracedDistortion::TracedDistortion(const TypicalSubspace& ts, std::vector<PureState> members, std::size_t system_dim,
                                   const Limits& limits)
    : ts_(ts), members_(std::move(members)), system_dim_(system_dim) {
  if (members_.empty()) throw ValidationError("TracedDistortion: no members");
  const std::size_t site_dim = ts.base_dim();
  if (system_dim == 0 || site_dim % system_dim != 0)
    throw DimensionError("TracedDistortion: site dimension is not a multiple of the system dimension");
  for (const auto& m : members_)
    if (m.dim() != site_dim) throw DimensionError("TracedDistortion: member dimension does not match subspace");
  ancilla_dim_ = site_dim / system_dim;

  // Eigenvectors orthogonal to every member only ever carry zero amplitude,
  // so they are left out of the site basis unless the junk vector needs them.
  const auto& f = ts.base_spectrum.eigenvectors;
  std::vector<bool> overlaps(site_dim, false);
  for (std::size_t l = 0; l < site_dim; ++l)
    for (const auto& m : members_)
      if (std::abs(f.col(static_cast<Eigen::Index>(l)).dot(m.amplitudes())) > kOrthogonal) overlaps[l] = true;
  std::vector<bool> used(site_dim, false);
  for (auto l : ts.retained) used[l] = used[l] || overlaps[l];
  for (auto l : ts.junk_index()) used[l] = true;
  std::vector<ComplexVector> span;
  for (const auto& m : members_) span.push_back(m.amplitudes());
  for (std::size_t l = 0; l < site_dim; ++l)
    if (used[l]) span.push_back(ts.base_spectrum.eigenvectors.col(static_cast<Eigen::Index>(l)));
  ComplexMatrix stacked(static_cast<Eigen::Index>(site_dim), static_cast<Eigen::Index>(span.size()));
  for (std::size_t c = 0; c < span.size(); ++c) stacked.col(static_cast<Eigen::Index>(c)) = span[c];
  site_basis_ = linalg::orthonormal_span(stacked);

  const std::size_t s = site_rank();
  const std::size_t k = ts.block_length;
  const std::size_t widest = std::max(ancilla_dim_, s);
  const std::size_t tensor = power_or_cap(widest, 2 * k, limits.contraction_cap);
  if (tensor > limits.contraction_cap)
    throw ResourceCapError("traced distortion: contraction tensor " + std::to_string(widest) + "^" +
                           std::to_string(2 * k) + " exceeds cap " + std::to_string(limits.contraction_cap));
  const std::size_t gram = power_or_cap(ancilla_dim_, k, limits.dense_cap);
  if (gram > limits.dense_cap / 3)
    throw ResourceCapError("traced distortion: Gram dimension 3*" + std::to_string(ancilla_dim_) + "^" +
                           std::to_string(k) + " exceeds dense cap " + std::to_string(limits.dense_cap));

  std::vector<ComplexMatrix> g;
  for (std::size_t c = 0; c < s; ++c) g.push_back(reshape(site_basis_.col(static_cast<Eigen::Index>(c)), system_dim));
  site_maps_.resize(s * s);
  for (std::size_t c = 0; c < s; ++c)
    for (std::size_t c2 = 0; c2 < s; ++c2) site_maps_[c * s + c2] = g[c].adjoint() * g[c2];
  for (const auto& m : members_) {
    member_coords_.push_back(site_basis_.adjoint() * m.amplitudes());
    member_rows_.push_back(ancilla_rows(m.amplitudes()));
  }
  eigen_coords_.resize(site_dim);
  for (std::size_t l = 0; l < site_dim; ++l)
    if (used[l]) eigen_coords_[l] = site_basis_.adjoint() * ts.base_spectrum.eigenvectors.col(static_cast<Eigen::Index>(l));
}

// mat(u)^dag mat(v) for u, v given by coordinates in the k-fold site basis.
// Sites are contracted one at a time: the pair (c_j, c'_j) of site-basis
// indices is replaced by the ancilla pair (y_j, y'_j) through H_{c_j c'_j}.
ComplexMatrix TracedDistortion::gram_block(const ComplexVector& u, const ComplexVector& v) const {
  const std::size_t s = site_rank();
  const std::size_t a = ancilla_dim_;
  const std::size_t k = ts_.block_length;
  ComplexMatrix t = u.conjugate() * v.transpose();
  std::size_t prefix = 1;
  std::size_t rest = static_cast<std::size_t>(u.size());
  for (std::size_t j = 0; j < k; ++j) {
    rest /= s;
    const auto next_dim = static_cast<Eigen::Index>(prefix * a * rest);
    ComplexMatrix next = ComplexMatrix::Zero(next_dim, next_dim);
    for (std::size_t yp = 0; yp < prefix; ++yp)
      for (std::size_t c = 0; c < s; ++c)
        for (std::size_t cr = 0; cr < rest; ++cr) {
          const auto row = static_cast<Eigen::Index>((yp * s + c) * rest + cr);
          for (std::size_t yq = 0; yq < prefix; ++yq)
            for (std::size_t c2 = 0; c2 < s; ++c2) {
              const ComplexMatrix& h = site_maps_[c * s + c2];
              for (std::size_t cr2 = 0; cr2 < rest; ++cr2) {
                const Complex val = t(row, static_cast<Eigen::Index>((yq * s + c2) * rest + cr2));
                if (val == Complex(0.0)) continue;
                for (std::size_t y = 0; y < a; ++y)
                  for (std::size_t y2 = 0; y2 < a; ++y2)
                    next(static_cast<Eigen::Index>((yp * a + y) * rest + cr),
                         static_cast<Eigen::Index>((yq * a + y2) * rest + cr2)) +=
                        val * h(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(y2));
              }
            }
        }
    t = std::move(next);
    prefix *= a;
  }
  return t;
}

ComplexMatrix TracedDistortion::product_gram_block(std::span<const ComplexVector> u,
                                                   std::span<const ComplexVector> v) const {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const ComplexMatrix mu = reshape(u[j], system_dim_);
    const ComplexMatrix mv = reshape(v[j], system_dim_);
    out = linalg::kron(out, ComplexMatrix(mu.adjoint() * mv));
  }
  return out;
}

double TracedDistortion::operator()(std::span<const std::size_t> sequence) const {
  const std::size_t k = ts_.block_length;
  if (sequence.size() != k) throw DimensionError("traced distortion: sequence length does not match block length");
  std::vector<PureState> factors;
  std::vector<ComplexVector> junk_sites;
  std::vector<const ComplexVector*> psi_coords, junk_coords;
  const auto junk = ts_.junk_index();
  for (std::size_t j = 0; j < k; ++j) {
    if (sequence[j] >= members_.size()) throw ValidationError("traced distortion: member index out of range");
    factors.push_back(members_[sequence[j]]);
    junk_sites.push_back(ts_.base_spectrum.eigenvectors.col(junk[j]));
    psi_coords.push_back(&member_coords_[sequence[j]]);
    junk_coords.push_back(&eigen_coords_[junk[j]]);
  }
  const auto alpha = retained_amplitudes(ts_, factors);

  const ComplexVector psi_c = kron_coords(psi_coords);
  const ComplexVector junk_c = kron_coords(junk_coords);
  ComplexVector phi_c = ComplexVector::Zero(psi_c.size());
  std::vector<const ComplexVector*> sites(k);
  for (std::size_t r = 0; r < ts_.size(); ++r) {
    if (alpha[r] == Complex(0.0)) continue;
    const auto m = ts_.multi_index(r);
    bool inside = true;
    for (std::size_t j = 0; j < k && inside; ++j) {
      sites[j] = &eigen_coords_[m[j]];
      inside = sites[j]->size() > 0;
    }
    if (inside) phi_c += alpha[r] * kron_coords(sites);
  }
  // Psi = phi + delta with delta orthogonal to the subspace. Working with
  // delta directly keeps small distortions accurate: forming Psi and phi
  // separately loses half the digits when they nearly coincide.
  const ComplexVector delta_c = psi_c - phi_c;
  const double outside = delta_c.squaredNorm();

  // mat(Psi) and mat(e) are Kronecker products, so their ancilla row spaces
  // factor site by site and are usually much smaller than a^k. With V the
  // row-space isometry of mat(Psi), A = mat(phi), B = mat(delta) V and
  // E = mat(e) V_e:
  //   Tr_anc(Psi Psi^dag - phi phi^dag) = (A V + B)(A V + B)^dag - A A^dag,
  // so the traced difference is [A B E] W [A B E]^dag with the weight below.
  std::vector<ComplexMatrix> psi_rows, junk_rows;
  for (std::size_t j = 0; j < k; ++j) {
    psi_rows.push_back(member_rows_[sequence[j]]);
    junk_rows.push_back(ancilla_rows(junk_sites[j]));
  }
  const ComplexMatrix v_psi = kron_all(psi_rows);
  const ComplexMatrix v_e = kron_all(junk_rows);

  const ComplexMatrix g_ff = gram_block(phi_c, phi_c);
  const ComplexMatrix g_fd = gram_block(phi_c, delta_c);
  const ComplexMatrix g_dd = gram_block(delta_c, delta_c);
  const ComplexMatrix g_fe = gram_block(phi_c, junk_c);
  const ComplexMatrix g_de = gram_block(delta_c, junk_c);
  const ComplexMatrix g_ee = product_gram_block(junk_sites, junk_sites);

  const auto na = g_ff.rows();
  const auto nb = v_psi.cols();
  const auto ne = v_e.cols();
  const auto n = na + nb + ne;
  ComplexMatrix gram(n, n);
  gram.block(0, 0, na, na) = g_ff;
  gram.block(0, na, na, nb) = g_fd * v_psi;
  gram.block(0, na + nb, na, ne) = g_fe * v_e;
  gram.block(na, na, nb, nb) = v_psi.adjoint() * g_dd * v_psi;
  gram.block(na, na + nb, nb, ne) = v_psi.adjoint() * g_de * v_e;
  gram.block(na + nb, na + nb, ne, ne) = v_e.adjoint() * g_ee * v_e;
  gram.block(na, 0, nb, na) = gram.block(0, na, na, nb).adjoint();
  gram.block(na + nb, 0, ne, na) = gram.block(0, na + nb, na, ne).adjoint();
  gram.block(na + nb, na, ne, nb) = gram.block(na, na + nb, nb, ne).adjoint();

  ComplexMatrix weight = ComplexMatrix::Zero(n, n);
  weight.block(0, 0, na, na) = v_psi * v_psi.adjoint() - ComplexMatrix::Identity(na, na);
  weight.block(0, na, na, nb) = v_psi;
  weight.block(na, 0, nb, na) = v_psi.adjoint();
  weight.block(na, na, nb, nb) = ComplexMatrix::Identity(nb, nb);
  weight.block(na + nb, na + nb, ne, ne) = -outside * ComplexMatrix::Identity(ne, ne);
  return std::clamp(linalg::weighted_gram_trace_norm(gram, weight), 0.0, 2.0);
}

std::uint64_t fingerprint(const Ensemble& e) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  const std::uint64_t n = e.size(), d = e.dim();
  mix(&n, sizeof n);
  mix(&d, sizeof d);
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double p = e.prob(i);
    mix(&p, sizeof p);
    const auto& m = e.state(i).matrix();
    mix(m.data(), sizeof(Complex) * static_cast<std::size_t>(m.size()));
  }
  return h;
}

namespace {

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < count; i += threads) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

struct SequencePlan {
  std::vector<std::vector<std::size_t>> sequences;
  std::vector<double> weights;  // probabilities (exact) or 1/n (Monte Carlo)
  bool exact = true;
  std::size_t n_sequences = 0;
};

SequencePlan plan_sequences(const Ensemble& e, std::size_t n, const EstimationConfig& est) {
  SequencePlan plan;
  const std::size_t m = e.size();
  const std::size_t count = power_or_cap(m, n, est.exact_budget);
  if (count <= est.exact_budget) {
    plan.exact = true;
    plan.n_sequences = count;
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t c = 0; c < count; ++c) {
      double p = 1.0;
      for (auto i : idx) p *= e.prob(i);
      if (p > 0.0) {
        plan.sequences.push_back(idx);
        plan.weights.push_back(p);
      }
      for (std::size_t j = n; j-- > 0;) {
        if (++idx[j] < m) break;
        idx[j] = 0;
      }
    }
    return plan;
  }
  if (est.samples == 0) throw ValidationError("Monte Carlo estimation needs at least one sample");
  plan.exact = false;
  plan.n_sequences = est.samples;
  Rng rng(est.seed);
  for (std::size_t s = 0; s < est.samples; ++s) plan.sequences.push_back(sample_sequence(e, n, rng).indices);
  plan.weights.assign(est.samples, 1.0 / static_cast<double>(est.samples));
  return plan;
}

struct Average {
  double mean = 0.0;
  double std_error = 0.0;
};

Average average(const SequencePlan& plan, const std::vector<double>& values) {
  Average out;
  for (std::size_t i = 0; i < values.size(); ++i) out.mean += plan.weights[i] * values[i];
  if (!plan.exact && values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    const double n = static_cast<double>(values.size());
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  out.mean = std::clamp(out.mean, 0.0, 2.0);
  return out;
}

void fill_common(ProtocolRecord& rec, const Ensemble& e, const TypicalSubspace& ts, std::size_t n, double target,
                 const SequencePlan& plan, const EstimationConfig& est, const Average& avg) {
  rec.block_length = n;
  rec.source_dim = e.dim();
  rec.target_rate = target;
  rec.log_dim_encoded = ts.log_dim();
  rec.rate = rec.log_dim_encoded / static_cast<double>(n);
  rec.avg_distortion = avg.mean;
  rec.std_error = avg.std_error;
  rec.n_sequences = plan.n_sequences;
  rec.exact = plan.exact;
  rec.seed = plan.exact ? 0 : est.seed;
  rec.samples = plan.exact ? 0 : est.samples;
  rec.holevo_per_msg = holevo_information(e);
  rec.bound = theorem_bound_check(rec.holevo_per_msg, rec.avg_distortion, n, e.dim(), rec.log_dim_encoded);
  rec.ensemble_fingerprint = fingerprint(e);
}

PureState pure_member(const DensityMatrix& rho) {
  return PureState::from_amplitudes(rho.spectrum().eigenvectors.col(0));
}

}  // namespace

ProtocolRecord run_blind_sj(const Ensemble& e, std::size_t n, double rate, const SubspaceSpec& mode,
                            const EstimationConfig& est, const RunOptions& opts) {
  if (n == 0) throw ValidationError("run_blind_sj: block length must be positive");
  const DensityMatrix avg = ensemble_average(e);
  const TypicalSubspace ts = mode.mode == SubspaceMode::top_k
                                 ? product_spectrum_topk(avg, n, retained_count_for_rate(rate, n, e.dim()), opts.limits)
                                 : product_spectrum_delta(avg, n, mode.delta, opts.limits);
  const bool pure = e.all_pure();
  std::vector<PureState> members;
  if (pure) {
    for (const auto& s : e.states()) members.push_back(pure_member(s));
  } else {
    const std::size_t full = power_or_cap(e.dim(), n, opts.limits.dense_cap);
    if (full > opts.limits.dense_cap)
      throw ResourceCapError("run_blind_sj: mixed block dimension " + std::to_string(e.dim()) + "^" +
                             std::to_string(n) + " exceeds dense cap " + std::to_string(opts.limits.dense_cap));
  }
  const SequencePlan plan = plan_sequences(e, n, est);
  std::vector<double> values(plan.sequences.size());
  parallel_for(plan.sequences.size(), opts.threads, [&](std::size_t i) {
    const auto& seq = plan.sequences[i];
    if (pure) {
      std::vector<PureState> factors;
      factors.reserve(n);
      for (auto j : seq) factors.push_back(members[j]);
      values[i] = pure_block_distortion(ts, factors);
      return;
    }
    const DensityMatrix block = block_state(e, BlockSequence{seq}).materialize(opts.limits.dense_cap);
    const EmbeddedState out = sj_decode(ts, sj_encode(ts, block, opts.limits.dense_cap), opts.limits.dense_cap);
    values[i] = std::clamp(linalg::trace_norm(block.matrix() - out.dense(), true), 0.0, 2.0);
  });
  ProtocolRecord rec;
  rec.kind = ProtocolKind::blind_sj;
  fill_common(rec, e, ts, n, rate, plan, est, average(plan, values));
  return rec;
}

ProtocolRecord run_composed(const Ensemble& e, std::size_t k, double rate, const EstimationConfig& est,
                            const RunOptions& opts) {
  if (k == 0) throw ValidationError("run_composed: block length must be positive");
  const std::size_t d = e.dim();
  std::vector<PureState> purified;
  if (e.size() == 2) {
    auto [a, b] = optimal_purification_pair(e.state(0), e.state(1));
    purified = {std::move(a), std::move(b)};
  } else {
    std::size_t anc = 1;
    for (const auto& s : e.states()) anc = std::max(anc, s.rank());
    for (const auto& s : e.states()) purified.push_back(pad_ancilla(purify(s), d, anc));
  }
  const std::size_t site_dim = purified.front().dim();
  ComplexMatrix avg = ComplexMatrix::Zero(static_cast<Eigen::Index>(site_dim), static_cast<Eigen::Index>(site_dim));
  for (std::size_t i = 0; i < e.size(); ++i)
    avg += e.prob(i) * purified[i].amplitudes() * purified[i].amplitudes().adjoint();
  const DensityMatrix purified_avg = DensityMatrix::from_matrix(avg);
  const TypicalSubspace ts =
      product_spectrum_topk(purified_avg, k, retained_count_for_rate(rate, k, site_dim), opts.limits);
  const TracedDistortion traced(ts, purified, d, opts.limits);

  const SequencePlan plan = plan_sequences(e, k, est);
  std::vector<double> traced_values(plan.sequences.size()), purified_values(plan.sequences.size());
  parallel_for(plan.sequences.size(), opts.threads, [&](std::size_t i) {
    const auto& seq = plan.sequences[i];
    std::vector<PureState> factors;
    factors.reserve(k);
    for (auto j : seq) factors.push_back(purified[j]);
    purified_values[i] = pure_block_distortion(ts, factors);
    traced_values[i] = traced(seq);
  });

  ProtocolRecord rec;
  rec.kind = ProtocolKind::composed_purified;
  fill_common(rec, e, ts, k, rate, plan, est, average(plan, traced_values));
  rec.purified_distortion = average(plan, purified_values).mean;
  for (std::size_t i = 0; i < traced_values.size(); ++i) {
    const double excess = traced_values[i] - purified_values[i];
    if (excess > kTol.bound) ++rec.contractivity_violations;
    rec.max_contractivity_excess = std::max(rec.max_contractivity_excess, excess);
  }
  return rec;
}

BoundReport verify_record(const ProtocolRecord& rec, const Ensemble& e) {
  if (rec.ensemble_fingerprint != fingerprint(e) || rec.source_dim != e.dim())
    throw ValidationError("verify_record: record was not produced from this ensemble");
  return theorem_bound_check(holevo_information(e), rec.avg_distortion, rec.block_length, rec.source_dim,
                             rec.log_dim_encoded);
}

}  // namespace qsrc
