// Scalar information quantities and the explicit inequality checks.
//
// Units: every entropy is in bits. eta(x) = -x ln x is in nats. The Lemma
// and Theorem bounds combine both exactly as written, i.e.
// 2[eps N log2 d + eta(eps)] with eta in nats.
#pragma once

#include <cstddef>
#include <span>

#include "qsrc/states.hpp"

namespace qsrc {

/// Outcome of checking one inequality instance lhs <= rhs.
struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool applicable = true;
  bool satisfied = true;  // lhs <= rhs + kTol.bound (true when not applicable)
  double slack = 0.0;     // rhs - lhs

  static BoundReport check(double lhs, double rhs);
  static BoundReport not_applicable();
};

double shannon_entropy(std::span<const double> p);
double von_neumann_entropy(const DensityMatrix& rho);
/// Entropy in bits of an already computed spectrum (clipped at 0).
double spectrum_entropy(std::span<const double> eigenvalues);
double binary_entropy(double x);
double eta(double x);

/// S(rho|sigma) in bits; +infinity when supp(rho) is not inside supp(sigma).
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

/// S(sum p_i rho_i) - sum p_i S(rho_i), clamped at 0.
double holevo_information(const Ensemble& e);
/// sum p_i S(rho_i | rho).
double holevo_via_relative_entropy(const Ensemble& e);

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
/// (Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2, clipped to [0, 1].
double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2);

/// |S(rho) - S(sigma)| <= T log2 dim + eta(T), T = ||rho - sigma|| <= 1/2.
BoundReport fannes_bound_check(const DensityMatrix& rho, const DensityMatrix& sigma);

/// 2[eps N log2 d + eta(eps)] for 0 <= eps <= 1/2.
double lemma_bound(double epsilon, std::size_t n, std::size_t d);

/// log_dim_encoded >= N chi - 2[Dbar N log2 d + eta(Dbar)]; not applicable
/// for Dbar > 1/2. Reported as lhs = the right-hand expression,
/// rhs = log_dim_encoded.
BoundReport theorem_bound_check(double holevo_per_msg, double avg_distortion, std::size_t n, std::size_t d,
                                double log_dim_encoded);

/// H[(1 + sqrt((p1-p2)^2 + 4 p1 p2 overlap_sq))/2].
double purified_pair_entropy(double p1, double p2, double overlap_sq);

/// purified_pair_entropy(p1, p2, fidelity(rho1, rho2)).
double smin_binary(double p1, double p2, const DensityMatrix& rho1, const DensityMatrix& rho2);

}  // namespace qsrc
