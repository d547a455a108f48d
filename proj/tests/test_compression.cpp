#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qsrc/compression.hpp"

using namespace qsrc;
using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

namespace {

DensityMatrix diag_state(std::vector<double> p) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(p.size()), static_cast<Eigen::Index>(p.size()));
  for (std::size_t i = 0; i < p.size(); ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p[i];
  return DensityMatrix::from_matrix(m);
}

PureState ket(std::vector<Complex> a) {
  ComplexVector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i];
  return PureState::from_amplitudes(v);
}

PureState random_pure(std::size_t d, Rng& rng) { return PureState::from_amplitudes(random::pure_amplitudes(d, rng)); }

DensityMatrix random_state(std::size_t d, std::size_t rank, Rng& rng) {
  return DensityMatrix::from_matrix(random::density_matrix(d, rank, rng));
}

// All d^N product eigenvalues in flat (lexicographic) index order.
std::vector<double> all_products(const std::vector<double>& lambda, std::size_t n) {
  std::vector<double> out{1.0};
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> next;
    for (double x : out)
      for (double l : lambda) next.push_back(x * l);
    out.swap(next);
  }
  return out;
}

ComplexVector dense_block(std::span<const PureState> factors) {
  ComplexVector v = ComplexVector::Ones(1);
  for (const auto& f : factors) v = linalg::kron(v, f.amplitudes());
  return v;
}

// || |Psi><Psi| - (Pi Psi Psi^dag Pi + (1-w) e e^dag) || with dense matrices.
double dense_pure_distortion(const TypicalSubspace& ts, std::span<const PureState> factors) {
  const ComplexVector psi = dense_block(factors);
  const ComplexMatrix e = retained_basis(ts);
  const ComplexVector phi = e * (e.adjoint() * psi);
  const double w = phi.squaredNorm();
  const ComplexVector junk = e.col(0);
  const ComplexMatrix diff = psi * psi.adjoint() - phi * phi.adjoint() - (1.0 - w) * junk * junk.adjoint();
  return linalg::trace_norm(diff, true);
}

// Same difference with every ancilla traced out (sites ordered sys, anc, sys, anc, ...).
double dense_traced_distortion(const TypicalSubspace& ts, std::span<const PureState> factors, std::size_t d) {
  const ComplexVector psi = dense_block(factors);
  const ComplexMatrix e = retained_basis(ts);
  const ComplexVector phi = e * (e.adjoint() * psi);
  const double w = phi.squaredNorm();
  const ComplexVector junk = e.col(0);
  const ComplexMatrix diff = psi * psi.adjoint() - phi * phi.adjoint() - (1.0 - w) * junk * junk.adjoint();
  const std::size_t a = factors.front().dim() / d;
  std::vector<std::size_t> dims, keep;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    keep.push_back(dims.size());
    dims.push_back(d);
    dims.push_back(a);
  }
  return linalg::trace_norm(linalg::partial_trace(diff, dims, keep), true);
}

Ensemble plus_zero() {
  const double r = 1.0 / std::sqrt(2.0);
  return Ensemble({0.5, 0.5}, {DensityMatrix::from_pure(ket({1.0, 0.0})), DensityMatrix::from_pure(ket({r, r}))});
}

// Binary qutrit ensemble with disjoint supports: a rank-2 state on span{|0>,|1>} and |2><2|.
Ensemble disjoint_mixed(double p) {
  ComplexMatrix m1 = ComplexMatrix::Zero(3, 3);
  m1(0, 0) = 0.7;
  m1(1, 1) = 0.3;
  m1(0, 1) = Complex(0.1, 0.05);
  m1(1, 0) = std::conj(m1(0, 1));
  return Ensemble({p, 1.0 - p}, {DensityMatrix::from_matrix(m1), diag_state({0, 0, 1})});
}

}  // namespace

TEST_CASE("top-K product spectrum examples") {
  const DensityMatrix q = diag_state({0.9, 0.1});
  auto ts = product_spectrum_topk(q, 1, 2);
  CHECK(ts.size() == 2);
  CHECK(ts.retained_weight == doctest::Approx(1.0));

  ts = product_spectrum_topk(DensityMatrix::from_pure(ket({0.6, Complex(0.0, 0.8)})), 7, 1);
  CHECK(ts.size() == 1);
  CHECK(ts.retained_weight == doctest::Approx(1.0));

  ts = product_spectrum_topk(q, 3, 4);
  const auto all = all_products({0.9, 0.1}, 3);
  std::vector<double> sorted = all;
  std::sort(sorted.rbegin(), sorted.rend());
  CHECK(ts.retained_weight == doctest::Approx(sorted[0] + sorted[1] + sorted[2] + sorted[3]).epsilon(1e-12));
  CHECK(ts.retained_weight == doctest::Approx(0.972).epsilon(1e-12));
  // Junk index is the top product eigenvector.
  for (auto l : ts.junk_index()) CHECK(l == 0);
}

TEST_CASE("ties are broken lexicographically") {
  const auto ts = product_spectrum_topk(DensityMatrix::maximally_mixed(2), 3, 3);
  const std::vector<std::vector<std::uint16_t>> expect = {{0, 0, 0}, {0, 0, 1}, {0, 1, 0}};
  for (std::size_t r = 0; r < 3; ++r) {
    const auto m = ts.multi_index(r);
    CHECK(std::vector<std::uint16_t>(m.begin(), m.end()) == expect[r]);
  }
}

TEST_CASE("top-K agrees with exhaustive enumeration") {
  Rng rng(31);
  for (int t = 0; t < 30; ++t) {
    const std::size_t d = 2 + rng.index(3);
    const std::size_t n = 1 + rng.index(4);
    const DensityMatrix rho = random_state(d, 1 + rng.index(d), rng);
    const std::size_t full = static_cast<std::size_t>(std::pow(d, n));
    const std::size_t k = 1 + rng.index(full);
    const auto ts = product_spectrum_topk(rho, n, k);
    auto all = all_products(rho.spectrum().eigenvalues, n);
    std::sort(all.rbegin(), all.rend());
    double expect = 0.0;
    for (std::size_t i = 0; i < k; ++i) expect += all[i];
    CHECK(ts.size() == k);
    CHECK(ts.retained_weight == doctest::Approx(expect).epsilon(1e-10));
    for (std::size_t r = 1; r < ts.size(); ++r) CHECK(ts.log2_eigenvalue(r) <= ts.log2_eigenvalue(0) + 1e-9);
  }
}

TEST_CASE("top-K rejects K outside [1, dim^N]") {
  const DensityMatrix q = diag_state({0.5, 0.5});
  CHECK_THROWS_AS(product_spectrum_topk(q, 2, 0), ValidationError);
  CHECK_THROWS_AS(product_spectrum_topk(q, 2, 5), ValidationError);
}

TEST_CASE("retained weight is nondecreasing in K") {
  const DensityMatrix rho = diag_state({0.6, 0.3, 0.1});
  double last = 0.0;
  for (std::size_t k = 1; k <= 27; ++k) {
    const double w = product_spectrum_topk(rho, 3, k).retained_weight;
    CHECK(w >= last - 1e-15);
    last = w;
  }
  CHECK(last == doctest::Approx(1.0));
}

TEST_CASE("delta-typical subspace") {
  const auto pure = product_spectrum_delta(DensityMatrix::from_pure(ket({0.0, 1.0})), 6, 0.1);
  CHECK(pure.size() == 1);
  CHECK(pure.retained_weight == doctest::Approx(1.0));

  const auto flat = product_spectrum_delta(DensityMatrix::maximally_mixed(2), 5, 0.1);
  CHECK(flat.size() == 32);

  // Window weight by direct enumeration of all 2^10 products.
  const double s = binary_entropy(0.9);
  const auto ts = product_spectrum_delta(diag_state({0.9, 0.1}), 10, 0.2);
  double expect = 0.0;
  std::size_t count = 0;
  for (double lam : all_products({0.9, 0.1}, 10)) {
    const double rate = -std::log2(lam) / 10.0;
    if (rate >= s - 0.2 - 1e-12 && rate <= s + 0.2 + 1e-12) {
      expect += lam;
      ++count;
    }
  }
  CHECK(ts.size() == count);
  CHECK(ts.retained_weight == doctest::Approx(expect).epsilon(1e-12));
  const double floor = 1.0 - 2.0 * std::exp(-2.0 * 10.0 * std::pow(0.2 / std::log2(9.0), 2));
  CHECK(ts.retained_weight >= floor);
  CHECK_THROWS_AS(product_spectrum_delta(diag_state({0.9, 0.1}), 3, 0.0), ValidationError);
}

TEST_CASE("retained count for a rate") {
  CHECK(retained_count_for_rate(1.0, 5, 2) == 32);
  CHECK(retained_count_for_rate(0.0, 5, 2) == 1);
  CHECK(retained_count_for_rate(0.5, 4, 2) == 4);
  CHECK(retained_count_for_rate(0.51, 4, 2) == 5);
  CHECK(retained_count_for_rate(std::log2(3.0), 3, 3) == 27);
  CHECK_THROWS_AS(retained_count_for_rate(1.01, 4, 2), ValidationError);
  CHECK_THROWS_AS(retained_count_for_rate(-0.1, 4, 2), ValidationError);
}

TEST_CASE("captured weight: implicit and dense paths agree") {
  Rng rng(41);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 2 + rng.index(2);
    const std::size_t n = 1 + rng.index(d == 2 ? 4 : 3);
    const DensityMatrix avg = random_state(d, d, rng);
    const std::size_t full = static_cast<std::size_t>(std::pow(d, n));
    const auto ts = product_spectrum_topk(avg, n, 1 + rng.index(full));
    const ComplexMatrix e = retained_basis(ts);
    const ComplexMatrix proj = e * e.adjoint();

    std::vector<DensityMatrix> mixed;
    std::vector<PureState> pure;
    for (std::size_t j = 0; j < n; ++j) {
      mixed.push_back(random_state(d, 1 + rng.index(d), rng));
      pure.push_back(random_pure(d, rng));
    }
    const ProductState block(mixed);
    const double dense = (proj * block.materialize().matrix()).trace().real();
    CHECK(std::abs(captured_weight(ts, block) - dense) < 1e-9);
    const ComplexVector psi = dense_block(pure);
    CHECK(std::abs(captured_weight(ts, pure) - (psi.adjoint() * proj * psi)(0, 0).real()) < 1e-9);
  }
  const DensityMatrix rho = diag_state({0.7, 0.2, 0.1});
  const auto ts = product_spectrum_topk(rho, 3, 7);
  CHECK(captured_weight(ts, ProductState({rho, rho, rho})) == doctest::Approx(ts.retained_weight).epsilon(1e-12));
  const auto full = product_spectrum_topk(rho, 2, 9);
  CHECK(captured_weight(full, ProductState({random_state(3, 2, rng), rho})) == doctest::Approx(1.0));
}

TEST_CASE("encode and decode") {
  Rng rng(51);
  const DensityMatrix avg = random_state(2, 2, rng);
  const auto ts = product_spectrum_topk(avg, 3, 3);
  const ComplexMatrix e = retained_basis(ts);

  SUBCASE("state inside the subspace is unchanged") {
    const ComplexVector c = random::pure_amplitudes(3, rng);
    const ComplexVector v = e * c;
    const DensityMatrix in = DensityMatrix::from_matrix(v * v.adjoint());
    const EmbeddedState out = sj_decode(ts, sj_encode(ts, in));
    CHECK(linalg::trace_norm(out.dense() - in.matrix(), true) < 1e-12);
  }
  SUBCASE("state orthogonal to the subspace becomes the junk projector") {
    ComplexMatrix full = ComplexMatrix::Identity(8, 8) - e * e.adjoint();
    const ComplexVector v = linalg::orthonormal_span(full).col(0);
    const DensityMatrix enc = sj_encode(ts, DensityMatrix::from_matrix(v * v.adjoint()));
    ComplexMatrix junk = ComplexMatrix::Zero(3, 3);
    junk(0, 0) = 1.0;
    CHECK((enc.matrix() - junk).norm() < 1e-12);
  }
  SUBCASE("pure block: encoded spectrum from {w, 1-w} and dense decode") {
    std::vector<PureState> f = {random_pure(2, rng), random_pure(2, rng), random_pure(2, rng)};
    const ComplexVector psi = dense_block(f);
    const DensityMatrix in = DensityMatrix::from_matrix(psi * psi.adjoint());
    const DensityMatrix enc = sj_encode(ts, in);
    CHECK(enc.matrix().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    const auto alpha = retained_amplitudes(ts, f);
    double w = 0.0;
    for (auto a : alpha) w += std::norm(a);
    // Encoded = a a^dag + (1-w) |0><0|: its determinant-free check is the 2x2 Gram of {a, e_0}.
    ComplexVector av(3);
    for (int i = 0; i < 3; ++i) av[i] = alpha[static_cast<std::size_t>(i)];
    ComplexMatrix expect = av * av.adjoint();
    expect(0, 0) += 1.0 - w;
    CHECK((enc.matrix() - expect).norm() < 1e-12);
    const EmbeddedState out = sj_decode(ts, enc);
    CHECK(out.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(linalg::trace_norm(in.matrix() - out.dense(), true) - pure_block_distortion(ts, f)) < 1e-8);
  }
  SUBCASE("decode preserves trace") {
    for (int t = 0; t < 5; ++t) {
      const EmbeddedState out = sj_decode(ts, random_state(3, 1 + rng.index(3), rng));
      CHECK(out.dense().trace().real() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(out.dim() == 8);
    }
  }
}

TEST_CASE("encoder is a trace-preserving quantum operation") {
  Rng rng(61);
  for (std::size_t n = 1; n <= 3; ++n) {
    const DensityMatrix avg = random_state(2, 2, rng);
    const auto ts = product_spectrum_topk(avg, n, 1 + rng.index(1u << n));
    const KrausChannel enc = sj_encoder_channel(ts);
    CHECK(KrausChannel::trace_preservation_defect(enc.operators()) < 1e-8);
    for (int t = 0; t < 5; ++t) {
      const DensityMatrix block = DensityMatrix::from_matrix(random::density_matrix(1u << n, 2, rng));
      CHECK((apply(enc, block).matrix() - sj_encode(ts, block).matrix()).norm() < 1e-9);
    }
  }
}

TEST_CASE("pure-block distortion: Gram path against dense") {
  Rng rng(71);
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 2 + rng.index(2);
    const std::size_t n = 1 + rng.index(d == 2 ? 4 : 3);
    std::vector<PureState> members = {random_pure(d, rng), random_pure(d, rng), random_pure(d, rng)};
    const Ensemble e({0.5, 0.3, 0.2}, {DensityMatrix::from_pure(members[0]), DensityMatrix::from_pure(members[1]),
                                        DensityMatrix::from_pure(members[2])});
    const std::size_t full = static_cast<std::size_t>(std::pow(d, n));
    const auto ts = product_spectrum_topk(ensemble_average(e), n, 1 + rng.index(full));
    std::vector<PureState> f;
    for (std::size_t j = 0; j < n; ++j) f.push_back(members[rng.index(3)]);
    CHECK(std::abs(pure_block_distortion(ts, f) - dense_pure_distortion(ts, f)) < 1e-8);
  }
  const auto ts = product_spectrum_topk(diag_state({0.8, 0.2}), 2, 1);
  const std::vector<PureState> inside = {ket({1.0, 0.0}), ket({1.0, 0.0})};
  CHECK(pure_block_distortion(ts, inside) < 1e-12);
  const std::vector<PureState> outside = {ket({0.0, 1.0}), ket({1.0, 0.0})};
  CHECK(pure_block_distortion(ts, outside) == doctest::Approx(2.0));
}

TEST_CASE("blind protocol edge cases") {
  const Ensemble e = plus_zero();
  auto rec = run_blind_sj(e, 6, 1.0);
  CHECK(rec.avg_distortion < 1e-10);
  CHECK(rec.exact);
  CHECK(rec.n_sequences == 64);

  const Ensemble single({1.0}, {DensityMatrix::from_pure(ket({0.6, 0.8}))});
  rec = run_blind_sj(single, 8, 0.0);
  CHECK(rec.avg_distortion < 1e-12);
  CHECK(rec.log_dim_encoded == 0.0);
}

TEST_CASE("blind protocol rate identity and rate bound") {
  const Ensemble e = plus_zero();
  for (std::size_t n : {2u, 5u, 8u})
    for (double rate : {0.0, 0.3, 0.45, 0.75, 1.0}) {
      const auto rec = run_blind_sj(e, n, rate);
      CHECK(std::abs(rec.rate * static_cast<double>(n) - rec.log_dim_encoded) < 1e-12);
      CHECK(rec.log_dim_encoded == doctest::Approx(std::log2(static_cast<double>(retained_count_for_rate(rate, n, 2)))));
      CHECK(rec.avg_distortion >= 0.0);
      CHECK(rec.avg_distortion <= 2.0);
      const auto check = verify_record(rec, e);
      CHECK(check.satisfied);
      CHECK(check.applicable == (rec.avg_distortion <= 0.5));
    }
}

TEST_CASE("blind protocol on mixed states uses the dense path") {
  Rng rng(81);
  const Ensemble e({0.6, 0.4}, {random_state(2, 2, rng), random_state(2, 2, rng)});
  const auto rec = run_blind_sj(e, 3, 0.7);
  // Direct average over all 8 sequences.
  const auto ts = product_spectrum_topk(ensemble_average(e), 3, retained_count_for_rate(0.7, 3, 2));
  double expect = 0.0;
  for (std::size_t s = 0; s < 8; ++s) {
    std::vector<std::size_t> seq = {s >> 2 & 1, s >> 1 & 1, s & 1};
    const DensityMatrix block = block_state(e, BlockSequence{seq}).materialize();
    const EmbeddedState out = sj_decode(ts, sj_encode(ts, block));
    expect += BlockSequence{seq}.probability(e) * linalg::trace_norm(block.matrix() - out.dense(), true);
  }
  CHECK(rec.avg_distortion == doctest::Approx(expect).epsilon(1e-10));
  CHECK(verify_record(rec, e).satisfied);

  RunOptions tight;
  tight.limits.dense_cap = 4;
  CHECK_THROWS_AS(run_blind_sj(e, 3, 0.7, {}, {}, tight), ResourceCapError);
}

TEST_CASE("blind protocol delta mode") {
  const auto rec = run_blind_sj(plus_zero(), 8, 0.0, {SubspaceMode::delta, 0.2});
  const auto ts = product_spectrum_delta(ensemble_average(plus_zero()), 8, 0.2);
  CHECK(rec.log_dim_encoded == doctest::Approx(ts.log_dim()));
  CHECK(verify_record(rec, plus_zero()).satisfied);
}

TEST_CASE("Monte Carlo estimate agrees with the exact average") {
  // Three unequal members, so distortions differ between sequences.
  const Ensemble e({0.5, 0.3, 0.2}, {DensityMatrix::from_bloch(0, 0, 1), DensityMatrix::from_bloch(0.8, 0, 0.6),
                                     DensityMatrix::from_bloch(0, 1, 0)});
  const auto exact = run_blind_sj(e, 8, 0.6);
  EstimationConfig mc;
  mc.exact_budget = 1;
  mc.samples = 10000;
  mc.seed = 2024;
  const auto est = run_blind_sj(e, 8, 0.6, {}, mc);
  CHECK_FALSE(est.exact);
  CHECK(est.seed == 2024);
  CHECK(est.std_error > 0.0);
  CHECK(std::abs(est.avg_distortion - exact.avg_distortion) <= 5.0 * est.std_error);
  const auto again = run_blind_sj(e, 8, 0.6, {}, mc);
  CHECK(again.avg_distortion == est.avg_distortion);
  RunOptions threaded;
  threaded.threads = 3;
  CHECK(run_blind_sj(e, 8, 0.6, {}, mc, threaded).avg_distortion == est.avg_distortion);
}

TEST_CASE("below the source entropy the blind distortion grows with N") {
  const Ensemble e = plus_zero();
  double last = -1.0;
  for (std::size_t n : {4u, 6u, 8u, 10u, 12u, 14u}) {
    EstimationConfig est;
    est.seed = 5;
    const double d = run_blind_sj(e, n, 0.45, {}, est).avg_distortion;
    CHECK(d > last);
    last = d;
  }
}

TEST_CASE("well above the source entropy the blind distortion falls with N") {
  const Ensemble e = plus_zero();
  double last = 3.0;
  for (std::size_t n : {4u, 6u, 8u, 10u, 12u, 14u}) {
    EstimationConfig est;
    est.seed = 5;
    const double d = run_blind_sj(e, n, 0.95, {}, est).avg_distortion;
    CHECK(d < last);
    last = d;
  }
}

TEST_CASE("traced distortion: Gram contraction against dense partial trace") {
  Rng rng(91);
  SUBCASE("disjoint-support qutrit fixture") {
    const Ensemble e = disjoint_mixed(0.8);
    const auto [p1, p2] = optimal_purification_pair(e.state(0), e.state(1));
    const std::vector<PureState> members = {p1, p2};
    ComplexMatrix avg = 0.8 * p1.amplitudes() * p1.amplitudes().adjoint() + 0.2 * p2.amplitudes() * p2.amplitudes().adjoint();
    for (std::size_t k : {1u, 2u, 3u}) {
      const auto ts = product_spectrum_topk(DensityMatrix::from_matrix(avg), k, retained_count_for_rate(0.9, k, 6));
      const TracedDistortion traced(ts, members, 3);
      for (int t = 0; t < 6; ++t) {
        std::vector<std::size_t> seq(k);
        std::vector<PureState> f;
        for (auto& s : seq) {
          s = rng.index(2);
          f.push_back(members[s]);
        }
        CHECK(std::abs(traced(seq) - dense_traced_distortion(ts, f, 3)) < 1e-8);
      }
    }
  }
  SUBCASE("random qubit pairs") {
    for (int t = 0; t < 8; ++t) {
      const DensityMatrix r1 = random_state(2, 2, rng), r2 = random_state(2, 1 + rng.index(2), rng);
      const auto [p1, p2] = optimal_purification_pair(r1, r2);
      const std::vector<PureState> members = {p1, p2};
      ComplexMatrix avg = 0.5 * p1.amplitudes() * p1.amplitudes().adjoint() + 0.5 * p2.amplitudes() * p2.amplitudes().adjoint();
      const std::size_t k = 1 + rng.index(3);
      const auto ts = product_spectrum_topk(DensityMatrix::from_matrix(avg), k, 1 + rng.index(1u << (2 * k)));
      const TracedDistortion traced(ts, members, 2);
      std::vector<std::size_t> seq(k);
      std::vector<PureState> f;
      for (auto& s : seq) {
        s = rng.index(2);
        f.push_back(members[s]);
      }
      CHECK(std::abs(traced(seq) - dense_traced_distortion(ts, f, 2)) < 1e-8);
      CHECK(traced(seq) <= pure_block_distortion(ts, f) + 1e-9);
    }
  }
}

TEST_CASE("composed protocol") {
  SUBCASE("a repeated mixed state costs nothing") {
    const DensityMatrix rho = diag_state({0.5, 0.3, 0.2});
    const Ensemble e({0.4, 0.6}, {rho, rho});
    const auto rec = run_composed(e, 4, 0.0);
    CHECK(rec.avg_distortion < 1e-10);
    CHECK(rec.log_dim_encoded == 0.0);
    CHECK(von_neumann_entropy(rho) > 1.0);
  }
  SUBCASE("tracing never increases distortion and the rate bound holds") {
    const Ensemble e = disjoint_mixed(0.8);
    const double chi = holevo_information(e);
    CHECK(chi == doctest::Approx(binary_entropy(0.8)).epsilon(1e-9));
    for (std::size_t k : {1u, 2u, 3u, 4u}) {
      const auto rec = run_composed(e, k, chi + 0.15);
      CHECK(rec.kind == ProtocolKind::composed_purified);
      CHECK(rec.contractivity_violations == 0);
      REQUIRE(rec.purified_distortion.has_value());
      CHECK(rec.avg_distortion <= *rec.purified_distortion + 1e-9);
      CHECK(verify_record(rec, e).satisfied);
    }
  }
  SUBCASE("more than two members use padded canonical purifications") {
    Rng rng(99);
    const Ensemble e({0.5, 0.3, 0.2}, {random_state(2, 2, rng), random_state(2, 1, rng), random_state(2, 2, rng)});
    const auto rec = run_composed(e, 2, 1.2);
    CHECK(rec.contractivity_violations == 0);
    CHECK(verify_record(rec, e).satisfied);
  }
}

TEST_CASE("verify_record checks provenance and applicability") {
  const Ensemble e = plus_zero();
  auto rec = run_blind_sj(e, 4, 1.0);
  CHECK(verify_record(rec, e).satisfied);
  CHECK(verify_record(rec, e).applicable);
  CHECK_THROWS_AS(verify_record(rec, disjoint_mixed(0.5)), ValidationError);
  rec = run_blind_sj(e, 10, 0.0);
  CHECK(rec.avg_distortion > 0.5);
  CHECK_FALSE(verify_record(rec, e).applicable);
}
