#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "glmg/small_buffer.hpp"

namespace glmg::rdm {

inline constexpr std::uint64_t kDefaultSupportCap = 100'000'000;

/// An L-site block of an N-site Dicke state with magnon numbers N_1..N_{m+1}.
struct BlockSpec {
  int N = 0;
  int L = 0;
  std::vector<int> magnons;

  int m() const { return static_cast<int>(magnons.size()) - 1; }
  void validate() const;
  /// The last N-L sites, with N_a - L_a magnons.
  BlockSpec complement() const { return {N, N - L, magnons}; }
};

/// Eigenvalues of rho_L keyed by (L_1..L_m), stored flat in lexicographic order.
struct RdmSpectrum {
  BlockSpec block;
  std::vector<int> indices;     // size() * m entries
  std::vector<double> values;   // lambda per support point

  std::size_t size() const { return values.size(); }
  std::span<const int> index(std::size_t i) const {
    const auto m = static_cast<std::size_t>(block.m());
    return {indices.data() + i * m, m};
  }
};

struct Moments {
  std::vector<double> means;       // <L_i>
  std::vector<double> covariance;  // m x m row-major, <x_i x_j>
  int m = 0;

  double cov(int i, int j) const { return covariance[static_cast<std::size_t>(i * m + j)]; }
};

/// ln C(n, k); -infinity when k is outside [0, n].
double log_binomial(int n, int k);

/// Largest n for which every C(n, k) fits in a signed 64-bit integer.
inline constexpr int kExactBinomialMax = 66;

namespace detail {
struct BinomialTable {
  std::int64_t value[kExactBinomialMax + 1][kExactBinomialMax + 1] = {};
};
constexpr BinomialTable make_binomial_table() {
  BinomialTable t;
  for (int n = 0; n <= kExactBinomialMax; ++n) {
    t.value[n][0] = t.value[n][n] = 1;
    for (int k = 1; k < n; ++k) t.value[n][k] = t.value[n - 1][k - 1] + t.value[n - 1][k];
  }
  return t;
}
inline constexpr BinomialTable kBinomials = make_binomial_table();
}  // namespace detail

/// Exact C(n, k) for 0 <= k <= n <= kExactBinomialMax.
inline std::int64_t exact_binomial(int n, int k) { return detail::kBinomials.value[n][k]; }

/// ln(n!) and 1/n for n in [0, max_n], tabulated in extended precision (a view of a shared cache).
class LogFactorialTable {
 public:
  explicit LogFactorialTable(int max_n);
  long double operator()(int n) const { return table_[n]; }
  long double log_binomial(int n, int k) const { return table_[n] - table_[k] - table_[n - k]; }
  /// 1/k for k >= 1.
  long double inverse(int k) const { return inverse_[k]; }

 private:
  struct Tables {
    std::vector<long double> log_factorial;
    std::vector<long double> inverse;
  };
  std::shared_ptr<const Tables> owner_;
  const long double* table_ = nullptr;
  const long double* inverse_ = nullptr;
};

/// Natural log of lambda(L_1..L_m); -infinity off the support.
long double log_rdm_eigenvalue(const BlockSpec& block, std::span<const int> index);

/// lambda = C(N,L)^-1 prod_a C(N_a, L_a) with L_{m+1} = L - sum L_a. Zero off the support.
double rdm_eigenvalue(const BlockSpec& block, std::span<const int> index);

/// Number of lattice points (L_1..L_m) in the support.
std::uint64_t support_size(const BlockSpec& block);

/// Lexicographic walk over the support with L_1 in [l1_begin, l1_end), one call per innermost row:
/// `row(prefix, lo, hi, remaining, partial)` covers L_m in [lo, hi] with L_{m+1} = remaining - L_m,
/// prefix holding L_1..L_{m-1} and partial the log-weight of the prefix (including -ln C(N,L)).
/// The block must already be validated and `lf` must cover block.N.
template <typename RowVisitor>
void visit_support_rows(const BlockSpec& block, const LogFactorialTable& lf, RowVisitor&& row, int l1_begin = 0,
                        int l1_end = std::numeric_limits<int>::max()) {
  const int m = block.m();
  SmallBuffer<long, 17> suffix(block.magnons.size() + 1, 0);
  for (std::size_t a = block.magnons.size(); a-- > 0;) suffix[a] = suffix[a + 1] + block.magnons[a];
  SmallBuffer<int, 16> prefix(static_cast<std::size_t>(m), 0);

  auto rec = [&](auto&& self, int a, long remaining, long double partial) -> void {
    long lo = std::max(0L, remaining - suffix[a + 1]);
    long hi = std::min<long>(block.magnons[a], remaining);
    if (a == 0) {
      lo = std::max<long>(lo, l1_begin);
      hi = std::min<long>(hi, static_cast<long>(l1_end) - 1);
    }
    if (a == m - 1) {
      if (lo <= hi) row(std::span<int>(prefix.data(), prefix.size()), lo, hi, remaining, partial);
      return;
    }
    for (long v = lo; v <= hi; ++v) {
      prefix[a] = static_cast<int>(v);
      self(self, a + 1, remaining - v, partial + lf.log_binomial(block.magnons[a], static_cast<int>(v)));
    }
  };
  rec(rec, 0, block.L, -lf.log_binomial(block.N, block.L));
}

/// Per-point form of visit_support_rows: `visit(index, log_lambda)`.
template <typename Visitor>
void visit_support(const BlockSpec& block, const LogFactorialTable& lf, Visitor&& visit, int l1_begin = 0,
                   int l1_end = std::numeric_limits<int>::max()) {
  const int m = block.m();
  const int na = block.magnons[static_cast<std::size_t>(m - 1)];
  const int n_last = block.magnons[static_cast<std::size_t>(m)];
  visit_support_rows(
      block, lf,
      [&](std::span<int> index, long lo, long hi, long remaining, long double partial) {
        for (long v = lo; v <= hi; ++v) {
          index[static_cast<std::size_t>(m - 1)] = static_cast<int>(v);
          visit(std::span<const int>(index), partial + lf.log_binomial(na, static_cast<int>(v)) +
                                                 lf.log_binomial(n_last, static_cast<int>(remaining - v)));
        }
      },
      l1_begin, l1_end);
}

using EigenvalueVisitor = std::function<void(std::span<const int> index, long double log_lambda)>;

/// Visits the support in lexicographic order, restricted to L_1 in [l1_begin, l1_end).
void for_each_eigenvalue(const BlockSpec& block, const EigenvalueVisitor& visit, int l1_begin = 0,
                         int l1_end = std::numeric_limits<int>::max());

/// Full enumeration. Throws ResourceLimitError when the support exceeds `cap`.
RdmSpectrum rdm_spectrum(const BlockSpec& block, std::uint64_t cap = kDefaultSupportCap);

/// Schmidt coefficients sqrt(lambda), same index layout as the spectrum.
RdmSpectrum schmidt_coefficients(const BlockSpec& block, std::uint64_t cap = kDefaultSupportCap);

/// Closed-form multivariate hypergeometric moments. Requires N >= 2.
Moments moments_closed_form(const BlockSpec& block);

/// Direct weighted sums over an enumerated spectrum.
Moments moments_brute_force(const RdmSpectrum& spectrum);

/// CSV with header "L1,...,Lm,lambda", lexicographic rows, 17 significant digits.
void write_spectrum_csv(std::ostream& out, const RdmSpectrum& spectrum);

}  // namespace glmg::rdm
