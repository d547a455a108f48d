// Seeded random streams and the fixed sampling distributions used by the
// property suites and Monte Carlo estimators.
//
// Distributions (fixed, so any failure is replayable from its seed):
//   states   : Ginibre G (d x rank, i.i.d. complex normal), rho = G G^dag / Tr
//   pure     : normalized complex normal vector
//   unitary  : QR of a complex Ginibre matrix with R's diagonal phases removed
//   channels : see channels::random_channel
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qsrc/linalg.hpp"

namespace qsrc {

/// Deterministic random stream. Draws are built directly from the 64-bit
/// engine output so they do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal (Box-Muller).
  double normal();
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  linalg::Complex complex_normal();

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Independent stream seed for worker / sample `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace qsrc

namespace qsrc::random {

linalg::ComplexMatrix ginibre(std::size_t rows, std::size_t cols, Rng& rng);
linalg::ComplexMatrix unitary(std::size_t d, Rng& rng);
linalg::ComplexVector pure_amplitudes(std::size_t d, Rng& rng);
/// Density matrix of rank `rank` (1 <= rank <= d) as a raw matrix.
linalg::ComplexMatrix density_matrix(std::size_t d, std::size_t rank, Rng& rng);
/// Random Hermitian matrix (GUE-like, unnormalized).
linalg::ComplexMatrix hermitian(std::size_t d, Rng& rng);
/// Point of the probability simplex (normalized exponentials).
std::vector<double> probabilities(std::size_t n, Rng& rng);

}  // namespace qsrc::random
