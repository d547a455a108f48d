// Shared error types and numerical tolerances.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qsrc {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (non-Hermitian matrix, negative
/// eigenvalue, probabilities that do not sum to one, out-of-range argument).
class ValidationError : public Error {
public:
  using Error::Error;
};

/// Operand shapes are incompatible.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A dense or enumeration size limit would be exceeded.
class ResourceCapError : public Error {
public:
  using Error::Error;
};

/// Numerical tolerances used across modules. One record, so that every
/// threshold in the library is traceable to a single place.
struct Tolerances {
  double hermitian = 1e-9;        // relative ||M - M^dag||_F
  double eigen_clip = 1e-10;      // eigenvalues in [-clip, 0) become 0
  double trace = 1e-9;            // |Tr rho - 1|
  double norm = 1e-9;             // | ||psi|| - 1 |
  double probability = 1e-9;      // |sum p - 1|
  double kraus = 1e-8;            // ||sum V^dag V - I||
  double unitary = 1e-8;          // ||U^dag U - I||
  double support_weight = 1e-8;   // relative-entropy support test
  double bound = 1e-9;            // BoundReport satisfaction slack
  double holevo_clamp = 1e-9;     // round-off allowance for chi < 0
  double rank_cutoff = 1e-10;     // rank decisions for purification
};

inline constexpr Tolerances kTol{};

/// Size limits for dense matrices and explicit enumerations.
struct Limits {
  std::size_t dense_cap = 4096;          // max dimension of a dense block matrix
  std::size_t exact_budget = 4096;       // max sequences averaged exactly
  std::size_t enumeration_cap = 1u << 22;  // max retained multi-indices
  std::size_t contraction_cap = 1u << 22;  // max entries of a contraction tensor
};

}  // namespace qsrc
