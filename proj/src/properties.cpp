#include "qsrc/properties.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsrc/channels.hpp"
#include "qsrc/functionals.hpp"

namespace qsrc {

using linalg::ComplexMatrix;

std::string to_string(PropertySuite suite) {
  switch (suite) {
    case PropertySuite::contractivity: return "contractivity";
    case PropertySuite::monotonicity: return "monotonicity";
    case PropertySuite::fannes: return "fannes";
    case PropertySuite::lemma: return "lemma";
  }
  return "unknown";
}

namespace {

struct Recorder {
  PropertyResult& result;
  std::uint64_t seed;
  std::string detail;

  void check(const std::string& name, double lhs, double rhs, double tol) {
    ++result.checked;
    const double slack = rhs - lhs;
    if (result.checked == 1 || slack < result.worst_slack) result.worst_slack = slack;
    if (!(lhs <= rhs + tol)) result.failures.push_back({name, seed, lhs, rhs, detail});
  }
};

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) { return lo + rng.index(hi - lo + 1); }

DensityMatrix random_state(std::size_t d, Rng& rng) {
  const std::size_t rank = pick(rng, 1, d);
  return DensityMatrix::from_matrix(random::density_matrix(d, rank, rng));
}

Ensemble random_ensemble(std::size_t d, std::size_t members, Rng& rng) {
  std::vector<DensityMatrix> states;
  for (std::size_t i = 0; i < members; ++i) states.push_back(random_state(d, rng));
  return Ensemble(random::probabilities(members, rng), std::move(states));
}

std::string dims(std::size_t din, std::size_t dout, std::size_t k) {
  return "din=" + std::to_string(din) + " dout=" + std::to_string(dout) + " kraus=" + std::to_string(k);
}

// One channel, two states. Checks the channel itself and the three steps of
// its dilation separately: appending the ancilla, the unitary, the partial
// trace.
void contractivity_sample(Recorder& rec, Rng& rng) {
  const std::size_t din = pick(rng, 2, 4), dout = pick(rng, 2, 4);
  const std::size_t kmin = (din + dout - 1) / dout;
  const std::size_t k = pick(rng, kmin, 4);
  rec.detail = dims(din, dout, k);
  const KrausChannel ch = random_channel(din, dout, k, rng);
  const DensityMatrix rho = random_state(din, rng), sigma = random_state(din, rng);
  const double before = trace_distance(rho, sigma);
  rec.check("channel", trace_distance(apply(ch, rho), apply(ch, sigma)), before, kTol.bound);

  const Dilation dil = dilate(ch);
  const ComplexMatrix p = DensityMatrix::from_pure(dil.ancilla_state).matrix();
  const ComplexMatrix jr = linalg::kron(rho.matrix(), p), js = linalg::kron(sigma.matrix(), p);
  const double appended = linalg::trace_norm(jr - js, true);
  rec.check("append-ancilla", appended, before, kTol.bound);
  const ComplexMatrix ur = dil.unitary * jr * dil.unitary.adjoint();
  const ComplexMatrix us = dil.unitary * js * dil.unitary.adjoint();
  const double rotated = linalg::trace_norm(ur - us, true);
  rec.check("unitary", rotated, appended, kTol.bound);
  const std::size_t split[] = {dil.dout, dil.ancilla_out};
  const std::size_t keep[] = {0};
  const double traced =
      linalg::trace_norm(linalg::partial_trace(ur, split, keep) - linalg::partial_trace(us, split, keep), true);
  rec.check("partial-trace", traced, rotated, kTol.bound);
}

void monotonicity_sample(PropertyResult& result, Recorder& rec, Rng& rng) {
  const std::size_t din = pick(rng, 2, 4), dout = pick(rng, 2, 4);
  const std::size_t kmin = (din + dout - 1) / dout;
  const std::size_t k = pick(rng, kmin, 4);
  rec.detail = dims(din, dout, k);
  const KrausChannel ch = random_channel(din, dout, k, rng);
  const DensityMatrix rho = random_state(din, rng), sigma = random_state(din, rng);
  const double before = relative_entropy(rho, sigma);
  if (std::isfinite(before)) {
    rec.check("relative-entropy", relative_entropy(apply(ch, rho), apply(ch, sigma)), before, 1e-8);
  } else {
    ++result.skipped;
  }
  const Ensemble e = random_ensemble(din, pick(rng, 2, 4), rng);
  rec.check("holevo", holevo_information(apply_to_ensemble(ch, e)), holevo_information(e), 1e-8);
}

// Returns false when the drawn pair is farther apart than 1/2.
bool fannes_sample(Recorder& rec, Rng& rng) {
  const std::size_t d = pick(rng, 2, 4);
  rec.detail = "dim=" + std::to_string(d);
  const DensityMatrix rho = random_state(d, rng), tau = random_state(d, rng);
  const double t = 0.5 * rng.uniform();
  const DensityMatrix sigma = DensityMatrix::from_matrix((1.0 - t) * rho.matrix() + t * tau.matrix());
  const BoundReport r = fannes_bound_check(rho, sigma);
  if (!r.applicable) return false;
  rec.check("fannes", r.lhs, r.rhs, kTol.bound);
  return true;
}

// Block ensembles E^{(x)N} of a random source and of a perturbed copy;
// |I(E) - I(E')| <= lemma_bound(sum_i p_i ||rho_i - rho'_i||, N, d).
bool lemma_sample(Recorder& rec, Rng& rng) {
  const std::size_t d = pick(rng, 2, 3), m = pick(rng, 2, 3), n = pick(rng, 1, 2);
  rec.detail = "dim=" + std::to_string(d) + " members=" + std::to_string(m) + " N=" + std::to_string(n);
  const Ensemble e = random_ensemble(d, m, rng);
  std::vector<DensityMatrix> perturbed;
  const double t = 0.3 * rng.uniform();
  for (const auto& s : e.states())
    perturbed.push_back(DensityMatrix::from_matrix((1.0 - t) * s.matrix() + t * random_state(d, rng).matrix()));
  const Ensemble e2(e.probs(), std::move(perturbed));

  std::vector<double> probs;
  std::vector<DensityMatrix> blocks, blocks2;
  std::vector<std::size_t> idx(n, 0);
  double eps = 0.0;
  for (;;) {
    double p = 1.0;
    std::vector<DensityMatrix> f, f2;
    for (auto i : idx) {
      p *= e.prob(i);
      f.push_back(e.state(i));
      f2.push_back(e2.state(i));
    }
    const DensityMatrix b = ProductState(f).materialize(), b2 = ProductState(f2).materialize();
    eps += p * trace_distance(b, b2);
    probs.push_back(p);
    blocks.push_back(b);
    blocks2.push_back(b2);
    std::size_t j = n;
    while (j-- > 0) {
      if (++idx[j] < m) break;
      idx[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  if (eps > 0.5) return false;
  const double lhs = std::abs(holevo_information(Ensemble(probs, blocks)) - holevo_information(Ensemble(probs, blocks2)));
  rec.check("lemma", lhs, lemma_bound(eps, n, d), kTol.bound);
  return true;
}

// Runs one sample; false means the draw was not applicable.
bool run_sample(PropertySuite suite, PropertyResult& result, std::uint64_t seed) {
  Rng rng(seed);
  Recorder rec{result, seed, {}};
  switch (suite) {
    case PropertySuite::contractivity: contractivity_sample(rec, rng); return true;
    case PropertySuite::monotonicity: monotonicity_sample(result, rec, rng); return true;
    case PropertySuite::fannes: return fannes_sample(rec, rng);
    case PropertySuite::lemma: return lemma_sample(rec, rng);
  }
  return false;
}

}  // namespace

PropertyResult run_suite(PropertySuite suite, std::size_t count, std::uint64_t master_seed) {
  PropertyResult result;
  result.name = to_string(suite);
  if (suite == PropertySuite::fannes) {
    std::size_t applicable = 0;
    for (std::uint64_t i = 0; applicable < count && i < 4 * count; ++i) {
      ++result.samples;
      if (run_sample(suite, result, derive_seed(master_seed, i))) ++applicable;
      else ++result.skipped;
    }
    return result;
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    ++result.samples;
    if (!run_sample(suite, result, derive_seed(master_seed, i))) ++result.skipped;
  }
  return result;
}

PropertyResult replay(PropertySuite suite, std::uint64_t sample_seed) {
  PropertyResult result;
  result.name = to_string(suite);
  result.samples = 1;
  if (!run_sample(suite, result, sample_seed)) ++result.skipped;
  return result;
}

PropertyResult tampered_channel_control() {
  PropertyResult result;
  result.name = "tampered-channel";
  result.samples = 1;
  result.checked = 1;
  const std::vector<ComplexMatrix> ops = {std::sqrt(0.9) * ComplexMatrix::Identity(2, 2)};
  try {
    KrausChannel ch(ops);
    result.failures.push_back({"tampered-channel", 0, KrausChannel::trace_preservation_defect(ops), kTol.kraus,
                               "trace-decreasing operator set was accepted"});
  } catch (const ValidationError&) {
  }
  return result;
}

}  // namespace qsrc
