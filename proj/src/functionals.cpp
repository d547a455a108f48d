#include "qsrc/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qsrc {

using linalg::ComplexMatrix;

BoundReport BoundReport::check(double lhs, double rhs) {
  BoundReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.applicable = true;
  r.slack = rhs - lhs;
  r.satisfied = lhs <= rhs + kTol.bound;
  return r;
}

BoundReport BoundReport::not_applicable() {
  BoundReport r;
  r.applicable = false;
  r.satisfied = true;
  return r;
}

namespace {

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

double shannon_entropy(std::span<const double> p) {
  if (p.empty()) throw ValidationError("shannon_entropy: empty distribution");
  double total = 0.0, h = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) throw ValidationError("shannon_entropy: negative probability");
    total += x;
    h -= xlog2x(x);
  }
  if (std::abs(total - 1.0) > kTol.probability)
    throw ValidationError("shannon_entropy: probabilities sum to " + std::to_string(total));
  return h;
}

double spectrum_entropy(std::span<const double> eigenvalues) {
  double h = 0.0;
  for (double x : eigenvalues) h -= xlog2x(std::max(x, 0.0));
  return std::max(h, 0.0);
}

double von_neumann_entropy(const DensityMatrix& rho) { return spectrum_entropy(rho.spectrum().eigenvalues); }

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("binary_entropy: argument outside [0,1]");
  return -xlog2x(x) - xlog2x(1.0 - x);
}

double eta(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("eta: argument outside [0,1]");
  return x > 0.0 ? -x * std::log(x) : 0.0;
}

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("relative_entropy: dimension mismatch");
  const auto& a = rho.spectrum();
  const auto& b = sigma.spectrum();
  const std::size_t n = rho.dim();
  // overlap(l, k) = |<b_l|a_k>|^2
  const Eigen::MatrixXd overlap = (b.eigenvectors.adjoint() * a.eigenvectors).cwiseAbs2();

  double cross = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double lk = a.eigenvalues[k];
    if (lk <= 0.0) continue;
    double outside = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      const double ov = overlap(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(k));
      if (b.eigenvalues[l] > kTol.eigen_clip) cross += lk * ov * std::log2(b.eigenvalues[l]);
      else outside += ov;
    }
    if (lk > kTol.eigen_clip && outside > kTol.support_weight) return std::numeric_limits<double>::infinity();
  }
  double self = 0.0;
  for (double lk : a.eigenvalues) self += xlog2x(lk);
  return std::max(self - cross, 0.0);
}

double holevo_information(const Ensemble& e) {
  double mean_entropy = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) mean_entropy += e.prob(i) * von_neumann_entropy(e.state(i));
  const double chi = von_neumann_entropy(ensemble_average(e)) - mean_entropy;
  if (chi < -kTol.holevo_clamp)
    throw ValidationError("holevo_information: negative value " + std::to_string(chi));
  return std::max(chi, 0.0);
}

double holevo_via_relative_entropy(const Ensemble& e) {
  const DensityMatrix avg = ensemble_average(e);
  double chi = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e.prob(i) <= 0.0) continue;
    const double s = relative_entropy(e.state(i), avg);
    // supp(rho_i) lies inside supp(sum p_j rho_j) whenever p_i > 0.
    if (!std::isfinite(s)) throw std::logic_error("holevo_via_relative_entropy: member support escapes average");
    chi += e.prob(i) * s;
  }
  return chi;
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw DimensionError("trace_distance: dimension mismatch");
  return std::clamp(linalg::trace_norm(rho.matrix() - sigma.matrix(), true), 0.0, 2.0);
}

double fidelity(const DensityMatrix& rho1, const DensityMatrix& rho2) {
  if (rho1.dim() != rho2.dim()) throw DimensionError("fidelity: dimension mismatch");
  // Tr sqrt(sqrt(r1) r2 sqrt(r1)) = || sqrt(r1) sqrt(r2) ||_1. The singular
  // values avoid square roots of round-off-sized eigenvalues.
  const auto root = [](double x) { return std::sqrt(x); };
  const ComplexMatrix s1 = linalg::spectral_apply(rho1.spectrum(), root);
  const ComplexMatrix s2 = linalg::spectral_apply(rho2.spectrum(), root);
  const double t = linalg::trace_norm(s1 * s2, false);
  return std::clamp(t * t, 0.0, 1.0);
}

BoundReport fannes_bound_check(const DensityMatrix& rho, const DensityMatrix& sigma) {
  const double t = trace_distance(rho, sigma);
  if (t > 0.5) return BoundReport::not_applicable();
  const double lhs = std::abs(von_neumann_entropy(rho) - von_neumann_entropy(sigma));
  const double rhs = t * std::log2(static_cast<double>(rho.dim())) + eta(t);
  return BoundReport::check(lhs, rhs);
}

double lemma_bound(double epsilon, std::size_t n, std::size_t d) {
  if (!(epsilon >= 0.0 && epsilon <= 0.5)) throw ValidationError("lemma_bound: epsilon outside [0, 1/2]");
  if (d == 0) throw ValidationError("lemma_bound: dimension must be positive");
  return 2.0 * (epsilon * static_cast<double>(n) * std::log2(static_cast<double>(d)) + eta(epsilon));
}

BoundReport theorem_bound_check(double holevo_per_msg, double avg_distortion, std::size_t n, std::size_t d,
                                double log_dim_encoded) {
  if (!(avg_distortion >= 0.0) || avg_distortion > 0.5) return BoundReport::not_applicable();
  const double needed = static_cast<double>(n) * holevo_per_msg - lemma_bound(avg_distortion, n, d);
  return BoundReport::check(needed, log_dim_encoded);
}

double purified_pair_entropy(double p1, double p2, double overlap_sq) {
  if (!(p1 >= 0.0 && p2 >= 0.0) || std::abs(p1 + p2 - 1.0) > kTol.probability)
    throw ValidationError("purified_pair_entropy: (p1, p2) is not a distribution");
  if (!(overlap_sq >= -kTol.bound && overlap_sq <= 1.0 + kTol.bound))
    throw ValidationError("purified_pair_entropy: squared overlap outside [0,1]");
  const double ov = std::clamp(overlap_sq, 0.0, 1.0);
  const double root = std::sqrt((p1 - p2) * (p1 - p2) + 4.0 * p1 * p2 * ov);
  return binary_entropy(std::clamp(0.5 * (1.0 + root), 0.0, 1.0));
}

double smin_binary(double p1, double p2, const DensityMatrix& rho1, const DensityMatrix& rho2) {
  return purified_pair_entropy(p1, p2, fidelity(rho1, rho2));
}

}  // namespace qsrc
