#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "qsrc/compression.hpp"

namespace qsrc {

using linalg::Complex;
using linalg::ComplexMatrix;
using linalg::ComplexVector;

double TypicalSubspace::log_dim() const { return std::log2(static_cast<double>(size())); }

double TypicalSubspace::log2_eigenvalue(std::size_t r) const {
  double s = 0.0;
  for (auto l : multi_index(r)) {
    const double lam = base_spectrum.eigenvalues[l];
    if (lam <= 0.0) return -std::numeric_limits<double>::infinity();
    s += std::log2(lam);
  }
  return s;
}

namespace {

constexpr double kGroupTolerance = 1e-9;

struct TypeClass {
  std::vector<std::size_t> counts;  // occurrences of each eigen-index
  double log2_value = 0.0;          // -inf for a zero eigenvalue
  double value = 0.0;
  double size = 0.0;                // multinomial coefficient (as double)
};

double log_multinomial(const std::vector<std::size_t>& counts) {
  std::size_t n = 0;
  double s = 0.0;
  for (auto c : counts) {
    n += c;
    s -= std::lgamma(static_cast<double>(c) + 1.0);
  }
  return s + std::lgamma(static_cast<double>(n) + 1.0);
}

std::vector<TypeClass> type_classes(const std::vector<double>& lambda, std::size_t n) {
  const std::size_t d = lambda.size();
  std::vector<TypeClass> out;
  std::vector<std::size_t> counts(d, 0);
  // Enumerate compositions of n into d parts.
  auto emit = [&]() {
    TypeClass tc;
    tc.counts = counts;
    tc.value = 1.0;
    for (std::size_t l = 0; l < d; ++l) {
      if (counts[l] == 0) continue;
      if (lambda[l] <= 0.0) {
        tc.log2_value = -std::numeric_limits<double>::infinity();
        tc.value = 0.0;
        break;
      }
      tc.log2_value += static_cast<double>(counts[l]) * std::log2(lambda[l]);
      tc.value *= std::pow(lambda[l], static_cast<double>(counts[l]));
    }
    tc.size = std::round(std::exp(log_multinomial(counts)));
    out.push_back(std::move(tc));
  };
  auto rec = [&](auto& self, std::size_t pos, std::size_t left) -> void {
    if (pos + 1 == d) {
      counts[pos] = left;
      emit();
      return;
    }
    for (std::size_t c = left + 1; c-- > 0;) {
      counts[pos] = c;
      self(self, pos + 1, left - c);
    }
  };
  if (d == 0) throw ValidationError("type_classes: empty spectrum");
  rec(rec, 0, n);
  return out;
}

bool same_group(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b);
  return std::abs(a - b) <= kGroupTolerance;
}

/// Classes grouped by equal product eigenvalue, groups in descending order.
std::vector<std::vector<TypeClass>> grouped_classes(const std::vector<double>& lambda, std::size_t n) {
  auto classes = type_classes(lambda, n);
  std::stable_sort(classes.begin(), classes.end(),
                   [](const TypeClass& x, const TypeClass& y) { return x.log2_value > y.log2_value; });
  std::vector<std::vector<TypeClass>> groups;
  for (auto& c : classes) {
    if (groups.empty() || !same_group(groups.back().front().log2_value, c.log2_value)) groups.emplace_back();
    groups.back().push_back(std::move(c));
  }
  return groups;
}

/// All multi-indices of a group, lexicographically sorted, flattened.
std::vector<std::uint16_t> group_members(const std::vector<TypeClass>& group, std::size_t n, std::size_t cap) {
  double total = 0.0;
  for (const auto& c : group) total += c.size;
  if (total > static_cast<double>(cap))
    throw ResourceCapError("typical subspace: eigenvalue class of " + std::to_string(static_cast<long double>(total)) +
                           " multi-indices exceeds enumeration cap " + std::to_string(cap));
  std::vector<std::uint16_t> flat;
  flat.reserve(static_cast<std::size_t>(total) * n);
  for (const auto& c : group) {
    std::vector<std::uint16_t> m;
    m.reserve(n);
    for (std::size_t l = 0; l < c.counts.size(); ++l) m.insert(m.end(), c.counts[l], static_cast<std::uint16_t>(l));
    do {
      flat.insert(flat.end(), m.begin(), m.end());
    } while (std::next_permutation(m.begin(), m.end()));
  }
  if (group.size() > 1) {
    const std::size_t count = flat.size() / n;
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(flat.begin() + a * n, flat.begin() + (a + 1) * n, flat.begin() + b * n,
                                          flat.begin() + (b + 1) * n);
    });
    std::vector<std::uint16_t> sorted;
    sorted.reserve(flat.size());
    for (auto i : order) sorted.insert(sorted.end(), flat.begin() + i * n, flat.begin() + (i + 1) * n);
    flat.swap(sorted);
  }
  return flat;
}

TypicalSubspace empty_subspace(const DensityMatrix& rho, std::size_t n) {
  if (n == 0) throw ValidationError("typical subspace: block length must be positive");
  if (rho.dim() > std::numeric_limits<std::uint16_t>::max())
    throw ValidationError("typical subspace: single-copy dimension too large");
  TypicalSubspace ts;
  ts.block_length = n;
  ts.base_spectrum = rho.spectrum();
  return ts;
}

double class_value(const TypeClass& c) { return c.value; }

void exclude_group(TypicalSubspace& ts, const std::vector<TypeClass>& group) {
  for (const auto& c : group)
    for (auto x : c.counts) ts.excluded_classes.push_back(static_cast<std::uint16_t>(x));
}

}  // namespace

std::size_t retained_count_for_rate(double rate, std::size_t n, std::size_t dim) {
  if (dim == 0 || n == 0) throw ValidationError("retained_count_for_rate: dimension and block length must be positive");
  const double max_rate = std::log2(static_cast<double>(dim));
  if (!std::isfinite(rate) || rate < 0.0 || rate > max_rate + 1e-12)
    throw ValidationError("invalid rate " + std::to_string(rate) + ": must lie in [0, log2(" + std::to_string(dim) +
                          ")]");
  const double full = std::pow(static_cast<double>(dim), static_cast<double>(n));
  const double k = std::ceil(std::exp2(static_cast<double>(n) * rate) - 1e-9);
  const double clamped = std::clamp(k, 1.0, full);
  if (clamped > static_cast<double>(std::numeric_limits<std::size_t>::max() / 2))
    throw ResourceCapError("retained_count_for_rate: subspace dimension overflows");
  return static_cast<std::size_t>(clamped);
}

TypicalSubspace product_spectrum_topk(const DensityMatrix& rho, std::size_t n, std::size_t k, const Limits& limits) {
  TypicalSubspace ts = empty_subspace(rho, n);
  const double full = std::pow(static_cast<double>(rho.dim()), static_cast<double>(n));
  if (k < 1 || static_cast<double>(k) > full)
    throw ValidationError("product_spectrum_topk: K = " + std::to_string(k) + " outside [1, dim^N]");
  if (k > limits.enumeration_cap)
    throw ResourceCapError("product_spectrum_topk: K = " + std::to_string(k) + " exceeds enumeration cap " +
                           std::to_string(limits.enumeration_cap));
  ts.retained.reserve(k * n);
  std::size_t have = 0;
  for (const auto& group : grouped_classes(ts.base_spectrum.eigenvalues, n)) {
    if (have == k) {
      exclude_group(ts, group);
      continue;
    }
    const std::size_t need = k - have;
    const auto members = group_members(group, n, limits.enumeration_cap);
    const std::size_t take = std::min(need, members.size() / n);
    ts.retained.insert(ts.retained.end(), members.begin(), members.begin() + take * n);
    ts.boundary_excluded.insert(ts.boundary_excluded.end(), members.begin() + take * n, members.end());
    ts.retained_weight += static_cast<double>(take) * class_value(group.front());
    have += take;
  }
  return ts;
}

TypicalSubspace product_spectrum_delta(const DensityMatrix& rho, std::size_t n, double delta, const Limits& limits) {
  if (!(delta > 0.0)) throw ValidationError("product_spectrum_delta: delta must be positive");
  TypicalSubspace ts = empty_subspace(rho, n);
  const double s = spectrum_entropy(ts.base_spectrum.eigenvalues);
  const double nn = static_cast<double>(n);
  const double lo = -nn * (s + delta) - kGroupTolerance;
  const double hi = -nn * (s - delta) + kGroupTolerance;
  double total = 0.0;
  const auto groups = grouped_classes(ts.base_spectrum.eigenvalues, n);
  for (const auto& group : groups) {
    const double lv = group.front().log2_value;
    if (lv < lo || lv > hi) {
      exclude_group(ts, group);
      continue;
    }
    const auto members = group_members(group, n, limits.enumeration_cap);
    total += static_cast<double>(members.size() / n);
    if (total > static_cast<double>(limits.enumeration_cap))
      throw ResourceCapError("product_spectrum_delta: typical set exceeds enumeration cap");
    ts.retained.insert(ts.retained.end(), members.begin(), members.end());
    ts.retained_weight += static_cast<double>(members.size() / n) * class_value(group.front());
  }
  if (ts.retained.empty()) return product_spectrum_topk(rho, n, 1, limits);
  return ts;
}

namespace {

void require_block(const TypicalSubspace& ts, std::size_t length, std::size_t factor_dim, const char* what) {
  if (length != ts.block_length)
    throw DimensionError(std::string(what) + ": block length " + std::to_string(length) + " does not match subspace " +
                         std::to_string(ts.block_length));
  if (factor_dim != ts.base_dim())
    throw DimensionError(std::string(what) + ": factor dimension does not match the subspace");
}

/// table[j * d + l] = <f_l|psi_j>
std::vector<Complex> site_overlaps(const TypicalSubspace& ts, std::span<const PureState> factors) {
  const std::size_t d = ts.base_dim();
  std::vector<Complex> table(factors.size() * d);
  for (std::size_t j = 0; j < factors.size(); ++j) {
    const ComplexVector ov = ts.base_spectrum.eigenvectors.adjoint() * factors[j].amplitudes();
    for (std::size_t l = 0; l < d; ++l) table[j * d + l] = ov[static_cast<Eigen::Index>(l)];
  }
  return table;
}

std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t cap, const char* what) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > cap / base)
      throw ResourceCapError(std::string(what) + ": dimension " + std::to_string(base) + "^" + std::to_string(exp) +
                             " exceeds dense cap " + std::to_string(cap));
    out *= base;
  }
  return out;
}

}  // namespace

double captured_weight(const TypicalSubspace& ts, const ProductState& block) {
  require_block(ts, block.length(), block.factor_dim(), "captured_weight");
  const std::size_t d = ts.base_dim();
  const std::size_t n = ts.block_length;
  // diag[j * d + l] = <f_l|rho_j|f_l>
  std::vector<double> diag(n * d);
  const auto& f = ts.base_spectrum.eigenvectors;
  for (std::size_t j = 0; j < n; ++j) {
    const ComplexMatrix m = f.adjoint() * block.factor(j).matrix() * f;
    for (std::size_t l = 0; l < d; ++l) diag[j * d + l] = m(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)).real();
  }
  double total = 0.0;
  for (std::size_t r = 0; r < ts.size(); ++r) {
    double p = 1.0;
    const auto m = ts.multi_index(r);
    for (std::size_t j = 0; j < n; ++j) p *= diag[j * d + m[j]];
    total += p;
  }
  return total;
}

std::vector<Complex> retained_amplitudes(const TypicalSubspace& ts, std::span<const PureState> factors) {
  if (factors.empty()) throw DimensionError("retained_amplitudes: empty block");
  require_block(ts, factors.size(), factors.front().dim(), "retained_amplitudes");
  const std::size_t d = ts.base_dim();
  const auto table = site_overlaps(ts, factors);
  std::vector<Complex> out(ts.size());
  for (std::size_t r = 0; r < ts.size(); ++r) {
    Complex a = 1.0;
    const auto m = ts.multi_index(r);
    for (std::size_t j = 0; j < m.size(); ++j) a *= table[j * d + m[j]];
    out[r] = a;
  }
  return out;
}

double excluded_weight(const TypicalSubspace& ts, std::span<const PureState> factors) {
  if (factors.empty()) throw DimensionError("excluded_weight: empty block");
  require_block(ts, factors.size(), factors.front().dim(), "excluded_weight");
  const std::size_t d = ts.base_dim();
  const std::size_t n = ts.block_length;
  std::vector<double> q(n * d);
  const auto table = site_overlaps(ts, factors);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::norm(table[i]);

  double total = 0.0;
  for (std::size_t off = 0; off < ts.boundary_excluded.size(); off += n) {
    double p = 1.0;
    for (std::size_t j = 0; j < n; ++j) p *= q[j * d + ts.boundary_excluded[off + j]];
    total += p;
  }
  if (ts.excluded_classes.empty()) return total;

  // Whole classes: the class sums are the coefficients of
  // prod_j (sum_l q_{j,l} x_l), expanded site by site. A count vector is
  // keyed in base n+1.
  const double key_bits = static_cast<double>(d) * std::log2(static_cast<double>(n) + 1.0);
  if (key_bits >= 63.0) throw ResourceCapError("excluded_weight: too many eigen-indices for class expansion");
  std::vector<std::uint64_t> place(d, 1);
  for (std::size_t l = 1; l < d; ++l) place[l] = place[l - 1] * (n + 1);
  std::unordered_map<std::uint64_t, double> coeff{{0, 1.0}}, next;
  for (std::size_t j = 0; j < n; ++j) {
    next.clear();
    next.reserve(coeff.size() * 2);
    for (const auto& [key, val] : coeff)
      for (std::size_t l = 0; l < d; ++l) {
        const double x = q[j * d + l];
        if (x != 0.0) next[key + place[l]] += val * x;
      }
    coeff.swap(next);
  }
  for (std::size_t off = 0; off < ts.excluded_classes.size(); off += d) {
    std::uint64_t key = 0;
    for (std::size_t l = 0; l < d; ++l) key += ts.excluded_classes[off + l] * place[l];
    const auto it = coeff.find(key);
    if (it != coeff.end()) total += it->second;
  }
  return total;
}

double captured_weight(const TypicalSubspace& ts, std::span<const PureState> factors) {
  double w = 0.0;
  for (const auto& a : retained_amplitudes(ts, factors)) w += std::norm(a);
  return w;
}

ComplexMatrix retained_basis(const TypicalSubspace& ts, std::size_t dense_cap) {
  const std::size_t full = checked_power(ts.base_dim(), ts.block_length, dense_cap, "retained_basis");
  const auto& f = ts.base_spectrum.eigenvectors;
  ComplexMatrix basis(static_cast<Eigen::Index>(full), static_cast<Eigen::Index>(ts.size()));
  for (std::size_t r = 0; r < ts.size(); ++r) {
    ComplexVector v = ComplexVector::Ones(1);
    for (auto l : ts.multi_index(r)) v = linalg::kron(v, ComplexVector(f.col(l)));
    basis.col(static_cast<Eigen::Index>(r)) = v;
  }
  return basis;
}

DensityMatrix sj_encode(const TypicalSubspace& ts, const DensityMatrix& block, std::size_t dense_cap) {
  if (ts.size() > dense_cap)
    throw ResourceCapError("sj_encode: retained dimension " + std::to_string(ts.size()) + " exceeds dense cap " +
                           std::to_string(dense_cap));
  const ComplexMatrix e = retained_basis(ts, dense_cap);
  if (e.rows() != block.matrix().rows()) throw DimensionError("sj_encode: block dimension does not match subspace");
  ComplexMatrix enc = e.adjoint() * block.matrix() * e;
  const double kept = enc.trace().real();
  enc(0, 0) += std::max(0.0, 1.0 - kept);
  return DensityMatrix::from_matrix(enc);
}

EmbeddedState sj_decode(const TypicalSubspace& ts, const DensityMatrix& encoded, std::size_t dense_cap) {
  if (encoded.dim() != ts.size()) throw DimensionError("sj_decode: encoded dimension does not match subspace");
  return EmbeddedState{retained_basis(ts, dense_cap), encoded.matrix()};
}

KrausChannel sj_encoder_channel(const TypicalSubspace& ts, std::size_t dense_cap) {
  const ComplexMatrix e = retained_basis(ts, dense_cap);
  const auto full = e.rows();
  const auto k = e.cols();
  std::vector<ComplexMatrix> ops;
  ops.push_back(e.adjoint());
  // Every product eigenvector outside the subspace is sent to the junk vector.
  std::vector<bool> kept(static_cast<std::size_t>(full), false);
  const std::size_t d = ts.base_dim();
  for (std::size_t r = 0; r < ts.size(); ++r) {
    std::size_t flat = 0;
    for (auto l : ts.multi_index(r)) flat = flat * d + l;
    kept[flat] = true;
  }
  const auto& f = ts.base_spectrum.eigenvectors;
  std::vector<std::size_t> digits(ts.block_length);
  for (std::size_t flat = 0; flat < static_cast<std::size_t>(full); ++flat) {
    if (kept[flat]) continue;
    std::size_t rem = flat;
    for (std::size_t j = ts.block_length; j-- > 0;) {
      digits[j] = rem % d;
      rem /= d;
    }
    ComplexVector u = ComplexVector::Ones(1);
    for (auto l : digits) u = linalg::kron(u, ComplexVector(f.col(static_cast<Eigen::Index>(l))));
    ComplexMatrix v = ComplexMatrix::Zero(k, full);
    v.row(0) = u.adjoint();
    ops.push_back(std::move(v));
  }
  return KrausChannel(std::move(ops));
}

double pure_block_distortion(const TypicalSubspace& ts, std::span<const PureState> factors) {
  const auto alpha = retained_amplitudes(ts, factors);
  double w = 0.0;
  for (const auto& a : alpha) w += std::norm(a);
  const double outside = excluded_weight(ts, factors);
  // Gram matrix of {phi, delta, e_junk} with phi = Pi Psi, delta = Psi - phi;
  // delta is orthogonal to both others. The junk vector is retained entry 0.
  const Complex a0 = alpha.front();
  ComplexMatrix g(3, 3);
  g << w, 0.0, std::conj(a0),
       0.0, outside, 0.0,
       a0, 0.0, 1.0;
  // |Psi><Psi| - |phi><phi| - <delta|delta> |e><e|
  ComplexMatrix weight(3, 3);
  weight << 0.0, 1.0, 0.0,
            1.0, 1.0, 0.0,
            0.0, 0.0, -outside;
  return std::clamp(linalg::weighted_gram_trace_norm(g, weight), 0.0, 2.0);
}

}  // namespace qsrc
