#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "qsrc/functionals.hpp"
#include "qsrc/properties.hpp"

using namespace qsrc;
using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

namespace {

PureState ket(std::vector<Complex> a) {
  ComplexVector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i];
  return PureState::from_amplitudes(v);
}

DensityMatrix pure(std::vector<Complex> a) { return DensityMatrix::from_pure(ket(std::move(a))); }

DensityMatrix random_state(std::size_t d, std::size_t rank, Rng& rng) {
  return DensityMatrix::from_matrix(random::density_matrix(d, rank, rng));
}

Ensemble random_ensemble(std::size_t d, std::size_t members, Rng& rng) {
  std::vector<DensityMatrix> states;
  for (std::size_t i = 0; i < members; ++i) states.push_back(random_state(d, 1 + rng.index(d), rng));
  return Ensemble(random::probabilities(members, rng), std::move(states));
}

// rho1 on span{|0>,...,|split-1>}, rho2 on the rest, each a random state there.
std::pair<DensityMatrix, DensityMatrix> disjoint_pair(std::size_t d, std::size_t split, Rng& rng) {
  ComplexMatrix m1 = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  ComplexMatrix m2 = m1;
  const auto a = static_cast<Eigen::Index>(split), b = static_cast<Eigen::Index>(d - split);
  m1.topLeftCorner(a, a) = random::density_matrix(split, 1 + rng.index(split), rng);
  m2.bottomRightCorner(b, b) = random::density_matrix(d - split, 1 + rng.index(d - split), rng);
  return {DensityMatrix::from_matrix(m1), DensityMatrix::from_matrix(m2)};
}

// Binary entropy evaluated term by term.
double h2(double x) {
  double s = 0.0;
  if (x > 0.0) s -= x * std::log2(x);
  if (x < 1.0) s -= (1.0 - x) * std::log2(1.0 - x);
  return s;
}

const double kInv = 1.0 / std::sqrt(2.0);

}  // namespace

TEST_CASE("shannon_entropy") {
  CHECK(shannon_entropy(std::vector<double>{1.0}) == 0.0);
  CHECK(shannon_entropy(std::vector<double>{0.5, 0.5}) == doctest::Approx(1.0));
  CHECK(shannon_entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0));
  CHECK(shannon_entropy(std::vector<double>{0.0, 1.0}) == 0.0);
  CHECK_THROWS_AS(shannon_entropy(std::vector<double>{0.7, 0.7}), ValidationError);
  CHECK_THROWS_AS(shannon_entropy(std::vector<double>{1.5, -0.5}), ValidationError);
}

TEST_CASE("von_neumann_entropy") {
  CHECK(von_neumann_entropy(pure({0.6, 0.8})) == doctest::Approx(0.0));
  CHECK(std::abs(von_neumann_entropy(DensityMatrix::maximally_mixed(2)) - 1.0) < 1e-12);
  CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(4)) == doctest::Approx(2.0));

  // [[3/4,1/4],[1/4,1/4]] has eigenvalues (1 +- 1/sqrt 2)/2.
  ComplexMatrix m(2, 2);
  m << 0.75, 0.25, 0.25, 0.25;
  const double lp = (1.0 + kInv) / 2.0, lm = (1.0 - kInv) / 2.0;
  const double expect = -lp * std::log2(lp) - lm * std::log2(lm);
  CHECK(std::abs(von_neumann_entropy(DensityMatrix::from_matrix(m)) - expect) < 1e-12);
  CHECK(expect == doctest::Approx(0.6009).epsilon(1e-4));
}

TEST_CASE("binary_entropy and eta") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  for (int i = 0; i <= 20; ++i) {
    const double x = i / 20.0;
    CHECK(binary_entropy(x) == doctest::Approx(binary_entropy(1.0 - x)).epsilon(1e-12));
    CHECK(binary_entropy(x) == doctest::Approx(h2(x)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(binary_entropy(1.1), ValidationError);
  CHECK_THROWS_AS(binary_entropy(-0.1), ValidationError);

  CHECK(eta(0.0) == 0.0);
  CHECK(eta(1.0) == 0.0);
  CHECK(eta(1.0 / M_E) == doctest::Approx(1.0 / M_E));
  // Natural log, not base 2.
  CHECK(eta(0.5) == doctest::Approx(0.5 * std::log(2.0)));
  CHECK_THROWS_AS(eta(1.5), ValidationError);
}

TEST_CASE("relative_entropy") {
  Rng rng(41);
  const auto rho = random_state(3, 3, rng);
  CHECK(std::abs(relative_entropy(rho, rho)) < 1e-10);
  CHECK(relative_entropy(pure({1, 0}), pure({0, 1})) == std::numeric_limits<double>::infinity());
  CHECK(relative_entropy(pure({1, 0}), DensityMatrix::maximally_mixed(2)) == doctest::Approx(1.0));
  // Support inside a rank-deficient sigma stays finite.
  ComplexMatrix s = ComplexMatrix::Zero(3, 3);
  s(0, 0) = 0.5;
  s(1, 1) = 0.5;
  CHECK(std::isfinite(relative_entropy(pure({0.6, 0.8, 0}), DensityMatrix::from_matrix(s))));
  CHECK(relative_entropy(pure({0.6, 0, 0.8}), DensityMatrix::from_matrix(s)) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(relative_entropy(rho, DensityMatrix::maximally_mixed(2)), DimensionError);
  for (int t = 0; t < 50; ++t) CHECK(relative_entropy(random_state(3, 2, rng), random_state(3, 3, rng)) >= -1e-10);
}

TEST_CASE("holevo_information examples") {
  const auto zero = pure({1, 0});
  const auto one = pure({0, 1});
  const auto plus = pure({kInv, kInv});
  Rng rng(42);
  const auto rho = random_state(3, 2, rng);
  CHECK(holevo_information(Ensemble({0.3, 0.7}, {rho, rho})) == doctest::Approx(0.0));
  CHECK(holevo_information(Ensemble({0.5, 0.5}, {zero, one})) == doctest::Approx(1.0));

  const double lp = (1.0 + kInv) / 2.0, lm = (1.0 - kInv) / 2.0;
  const double oracle = -lp * std::log2(lp) - lm * std::log2(lm);
  const Ensemble e({0.5, 0.5}, {zero, plus});
  CHECK(std::abs(holevo_information(e) - oracle) < 1e-6);
  CHECK(std::abs(holevo_via_relative_entropy(e) - oracle) < 1e-6);
  CHECK(holevo_via_relative_entropy(Ensemble({0.3, 0.7}, {rho, rho})) == doctest::Approx(0.0));
}

TEST_CASE("disjoint supports carry one full bit at p = 1/2") {
  Rng rng(43);
  for (int t = 0; t < 20; ++t) {
    const auto [r1, r2] = disjoint_pair(4, 2, rng);
    const Ensemble e({0.5, 0.5}, {r1, r2});
    CHECK(holevo_information(e) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(holevo_via_relative_entropy(e) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("Holevo properties on random ensembles") {
  Rng rng(44);
  for (int t = 0; t < 500; ++t) {
    const std::size_t d = 2 + rng.index(3);
    const Ensemble e = random_ensemble(d, 2 + rng.index(3), rng);
    const double chi = holevo_information(e);
    CHECK(std::abs(chi - holevo_via_relative_entropy(e)) <= 1e-8);
    CHECK(chi <= von_neumann_entropy(ensemble_average(e)) + 1e-9);
    CHECK(chi >= 0.0);
  }
  for (int t = 0; t < 50; ++t) {
    const std::size_t d = 2 + rng.index(3);
    std::vector<DensityMatrix> states;
    for (int i = 0; i < 3; ++i) states.push_back(DensityMatrix::from_pure(PureState::from_amplitudes(random::pure_amplitudes(d, rng))));
    const Ensemble e(random::probabilities(3, rng), states);
    CHECK(std::abs(holevo_information(e) - von_neumann_entropy(ensemble_average(e))) <= 1e-9);
  }
}

TEST_CASE("trace_distance") {
  Rng rng(45);
  const auto rho = random_state(3, 2, rng);
  CHECK(trace_distance(rho, rho) < 1e-12);
  CHECK(trace_distance(pure({1, 0}), pure({0, 1})) == doctest::Approx(2.0));
  CHECK(trace_distance(pure({1, 0}), pure({kInv, kInv})) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(trace_distance(rho, DensityMatrix::maximally_mixed(2)), DimensionError);
  for (int t = 0; t < 100; ++t) {
    const double d = trace_distance(random_state(3, 1 + rng.index(3), rng), random_state(3, 1 + rng.index(3), rng));
    CHECK(d >= 0.0);
    CHECK(d <= 2.0);
  }
}

TEST_CASE("fidelity") {
  Rng rng(46);
  const auto rho = random_state(3, 3, rng);
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-9));
  const auto [r1, r2] = disjoint_pair(3, 1, rng);
  CHECK(fidelity(r1, r2) < 1e-12);
  CHECK_THROWS_AS(fidelity(rho, DensityMatrix::maximally_mixed(2)), DimensionError);
  for (int t = 0; t < 100; ++t) {
    const ComplexVector a = random::pure_amplitudes(3, rng), b = random::pure_amplitudes(3, rng);
    const auto pa = DensityMatrix::from_pure(PureState::from_amplitudes(a));
    const auto pb = DensityMatrix::from_pure(PureState::from_amplitudes(b));
    CHECK(std::abs(fidelity(pa, pb) - std::norm(a.dot(b))) < 1e-8);
  }
  for (int t = 0; t < 100; ++t) {
    const auto x = random_state(2 + t % 3, 1 + rng.index(2), rng);
    const auto y = random_state(2 + t % 3, 1 + rng.index(2), rng);
    const double f = fidelity(x, y);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0 + 1e-9);
    CHECK(std::abs(f - fidelity(y, x)) < 1e-8);
  }
}

TEST_CASE("fannes_bound_check") {
  Rng rng(47);
  const auto rho = random_state(3, 3, rng);
  const auto same = fannes_bound_check(rho, rho);
  CHECK(same.applicable);
  CHECK(same.satisfied);
  CHECK(same.lhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(!fannes_bound_check(pure({1, 0}), pure({0, 1})).applicable);
  CHECK(fannes_bound_check(pure({1, 0}), pure({0, 1})).satisfied);

  // Explicit instance: rho = I/2, sigma = diag(0.7, 0.3), T = 0.4.
  ComplexMatrix m(2, 2);
  m << 0.7, 0.0, 0.0, 0.3;
  const auto r = fannes_bound_check(DensityMatrix::maximally_mixed(2), DensityMatrix::from_matrix(m));
  CHECK(r.lhs == doctest::Approx(1.0 - h2(0.7)));
  CHECK(r.rhs == doctest::Approx(0.4 - 0.4 * std::log(0.4)));
  CHECK(r.satisfied);
}

TEST_CASE("lemma_bound") {
  CHECK(lemma_bound(0.0, 5, 3) == 0.0);
  CHECK(lemma_bound(0.5, 1, 2) == doctest::Approx(2.0 * (0.5 + 0.5 * std::log(2.0))));
  CHECK(lemma_bound(0.5, 1, 2) == doctest::Approx(1.6931).epsilon(1e-4));
  double last = -1.0;
  for (std::size_t n = 1; n <= 10; ++n) {
    const double b = lemma_bound(0.2, n, 3);
    CHECK(b >= last);
    last = b;
  }
  CHECK_THROWS_AS(lemma_bound(0.6, 1, 2), ValidationError);
  CHECK_THROWS_AS(lemma_bound(-0.1, 1, 2), ValidationError);
}

TEST_CASE("theorem_bound_check") {
  const double chi = 0.6;
  const auto edge = theorem_bound_check(chi, 0.0, 5, 2, 5 * chi);
  CHECK(edge.applicable);
  CHECK(edge.satisfied);
  CHECK(std::abs(edge.slack) < 1e-12);

  const auto loose = theorem_bound_check(chi, 0.1, 5, 2, 2.0);
  CHECK(loose.lhs == doctest::Approx(5 * chi - 2.0 * (0.1 * 5 + eta(0.1))));
  CHECK(loose.rhs == 2.0);
  CHECK(loose.satisfied == (loose.lhs <= 2.0 + 1e-9));

  CHECK_FALSE(theorem_bound_check(chi, 0.0, 5, 2, 1.0).satisfied);
  CHECK_FALSE(theorem_bound_check(chi, 0.7, 5, 2, 0.0).applicable);
  CHECK(theorem_bound_check(chi, 0.7, 5, 2, 0.0).satisfied);
}

TEST_CASE("purified_pair_entropy") {
  CHECK(purified_pair_entropy(1.0, 0.0, 0.3) == doctest::Approx(0.0));
  CHECK(purified_pair_entropy(0.5, 0.5, 0.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(purified_pair_entropy(0.6, 0.6, 0.5), ValidationError);
  CHECK_THROWS_AS(purified_pair_entropy(0.5, 0.5, 1.5), ValidationError);

  // Oracle: build p1|a><a| + p2|b><b| with |<a|b>|^2 = c and take its entropy.
  Rng rng(48);
  for (int t = 0; t < 100; ++t) {
    const double p1 = rng.uniform();
    const double c = rng.uniform();
    ComplexVector a(2), b(2);
    a << 1.0, 0.0;
    b << std::sqrt(c), std::sqrt(1.0 - c) * std::exp(Complex(0.0, 2.0 * M_PI * rng.uniform()));
    const ComplexMatrix m = p1 * a * a.adjoint() + (1.0 - p1) * b * b.adjoint();
    CHECK(std::abs(purified_pair_entropy(p1, 1.0 - p1, c) - von_neumann_entropy(DensityMatrix::from_matrix(m))) < 1e-9);
  }
}

TEST_CASE("smin_binary") {
  Rng rng(49);
  const auto rho = random_state(3, 2, rng);
  CHECK(smin_binary(0.4, 0.6, rho, rho) == doctest::Approx(0.0).epsilon(1e-6));

  for (int t = 0; t < 100; ++t) {
    const auto [r1, r2] = disjoint_pair(2 + rng.index(3), 1, rng);
    const double p = 0.05 + 0.9 * rng.uniform();
    const Ensemble e({p, 1.0 - p}, {r1, r2});
    CHECK(std::abs(smin_binary(p, 1.0 - p, r1, r2) - holevo_information(e)) < 1e-9);
  }
  const auto [r1, r2] = disjoint_pair(3, 1, rng);
  CHECK(smin_binary(0.5, 0.5, r1, r2) == doctest::Approx(1.0));

  // Construction oracle against the explicit optimal purified ensemble.
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 2 + rng.index(2);
    const auto s1 = random_state(d, 1 + rng.index(d), rng), s2 = random_state(d, 1 + rng.index(d), rng);
    const double p = rng.uniform();
    const auto [a, b] = optimal_purification_pair(s1, s2);
    const ComplexMatrix m = p * a.amplitudes() * a.amplitudes().adjoint() +
                            (1.0 - p) * b.amplitudes() * b.amplitudes().adjoint();
    CHECK(std::abs(smin_binary(p, 1.0 - p, s1, s2) - von_neumann_entropy(DensityMatrix::from_matrix(m))) < 1e-7);
    CHECK(smin_binary(p, 1.0 - p, s1, s2) >= holevo_information(Ensemble({p, 1.0 - p}, {s1, s2})) - 1e-9);
  }
}

TEST_CASE("inequality suites hold on seeded random samples") {
  const auto fannes = run_suite(PropertySuite::fannes, 1000, 8);
  CHECK(fannes.passed());
  CHECK(fannes.checked >= 1000);
  CHECK(fannes.worst_slack >= -1e-9);

  const auto mono = run_suite(PropertySuite::monotonicity, 500, 9);
  CHECK(mono.passed());
  CHECK(mono.samples == 500);
  CHECK(mono.checked > 0);

  const auto lemma = run_suite(PropertySuite::lemma, 200, 10);
  CHECK(lemma.passed());
  CHECK(lemma.checked > 0);
}

TEST_CASE("property sweeps are reproducible") {
  const auto a = run_suite(PropertySuite::lemma, 30, 77);
  const auto b = run_suite(PropertySuite::lemma, 30, 77);
  CHECK(a.checked == b.checked);
  CHECK(a.skipped == b.skipped);
  CHECK(a.worst_slack == b.worst_slack);
  const auto one = replay(PropertySuite::lemma, derive_seed(77, 3));
  CHECK(one.samples == 1);
}
