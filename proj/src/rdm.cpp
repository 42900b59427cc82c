#include "glmg/rdm.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>

#include "glmg/compensated_sum.hpp"
#include "glmg/errors.hpp"

namespace glmg::rdm {

void BlockSpec::validate() const {
  if (N < 1) throw std::invalid_argument("block: N must be >= 1");
  if (L < 0 || L > N) throw std::invalid_argument("block: L must satisfy 0 <= L <= N");
  if (magnons.size() < 2) throw std::invalid_argument("block: need at least two magnon numbers (m >= 1)");
  long total = 0;
  for (int v : magnons) {
    if (v < 0) throw std::invalid_argument("block: magnon numbers must be nonnegative");
    total += v;
  }
  if (total != N) throw std::invalid_argument("block: magnon numbers must sum to N");
}

double log_binomial(int n, int k) {
  if (n < 0) throw std::invalid_argument("log_binomial: n must be >= 0");
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  if (k == 0 || k == n) return 0.0;
  return static_cast<double>(std::lgamma(n + 1.0L) - std::lgamma(k + 1.0L) - std::lgamma(n - k + 1.0L));
}

LogFactorialTable::LogFactorialTable(int max_n) {
  // Shared, grow-only cache; a table already handed out is never modified.
  static std::mutex mutex;
  static std::shared_ptr<const Tables> cache;
  const auto needed = static_cast<std::size_t>(std::max(max_n, 1)) + 1;
  std::lock_guard lock(mutex);
  if (!cache || cache->log_factorial.size() < needed) {
    auto grown = std::make_shared<Tables>(cache ? *cache : Tables{});
    const std::size_t old = grown->log_factorial.size();
    const std::size_t size = std::max(needed, 2 * old);
    grown->log_factorial.resize(size);
    grown->inverse.resize(size);
    for (std::size_t i = old; i < size; ++i) {
      grown->log_factorial[i] = std::lgamma(static_cast<long double>(i) + 1.0L);
      grown->inverse[i] = i == 0 ? 0.0L : 1.0L / static_cast<long double>(i);
    }
    grown->log_factorial[0] = grown->log_factorial[1] = 0.0L;
    cache = std::move(grown);
  }
  owner_ = cache;
  table_ = owner_->log_factorial.data();
  inverse_ = owner_->inverse.data();
}

namespace {

bool in_support(const BlockSpec& b, std::span<const int> index) {
  const int m = b.m();
  if (static_cast<int>(index.size()) != m) return false;
  long s = 0;
  for (int a = 0; a < m; ++a) {
    if (index[a] < 0 || index[a] > b.magnons[a]) return false;
    s += index[a];
  }
  const long last = b.L - s;
  return last >= 0 && last <= b.magnons[m];
}


}  // namespace

long double log_rdm_eigenvalue(const BlockSpec& block, std::span<const int> index) {
  block.validate();
  if (!in_support(block, index)) return -std::numeric_limits<long double>::infinity();
  const LogFactorialTable lf(block.N);
  const int m = block.m();
  long double acc = -lf.log_binomial(block.N, block.L);
  int s = 0;
  for (int a = 0; a < m; ++a) {
    acc += lf.log_binomial(block.magnons[a], index[a]);
    s += index[a];
  }
  acc += lf.log_binomial(block.magnons[m], block.L - s);
  return acc;
}

double rdm_eigenvalue(const BlockSpec& block, std::span<const int> index) {
  const long double l = log_rdm_eigenvalue(block, index);
  if (std::isinf(l)) return 0.0;
  return static_cast<double>(std::exp(l));
}

std::uint64_t support_size(const BlockSpec& block) {
  block.validate();
  const int m = block.m();
  const std::size_t parts = block.magnons.size();
  if (block.L + m <= kExactBinomialMax && parts <= 8) {
    // Inclusion-exclusion over the components forced above their cap: sum over subsets S of
    // (-1)^|S| C(L - sum_S (N_a + 1) + m, m).
    std::int64_t count = 0;
    int excess[1u << 8];
    int sign[1u << 8];
    excess[0] = 0;
    sign[0] = 1;
    count += exact_binomial(block.L + m, m);
    for (unsigned mask = 1; mask < (1u << parts); ++mask) {
      const unsigned low = mask & -mask;
      excess[mask] = excess[mask ^ low] + block.magnons[static_cast<std::size_t>(std::countr_zero(low))] + 1;
      sign[mask] = -sign[mask ^ low];
      const int top = block.L + m - excess[mask];
      if (top >= m) count += sign[mask] * exact_binomial(top, m);
    }
    return static_cast<std::uint64_t>(count);
  }
  SmallBuffer<long, 18> suffix(parts + 1, 0);
  for (std::size_t a = parts; a-- > 0;) suffix[a] = suffix[a + 1] + block.magnons[a];
  // Recursion over the first m-1 coordinates; the last free coordinate is an interval.
  std::uint64_t count = 0;
  auto rec = [&](auto&& self, int a, long remaining) -> void {
    const long lo = std::max(0L, remaining - suffix[a + 1]);
    const long hi = std::min<long>(block.magnons[a], remaining);
    if (lo > hi) return;
    if (a == m - 1) {
      count += static_cast<std::uint64_t>(hi - lo + 1);
      return;
    }
    for (long v = lo; v <= hi; ++v) self(self, a + 1, remaining - v);
  };
  rec(rec, 0, block.L);
  return count;
}

void for_each_eigenvalue(const BlockSpec& block, const EigenvalueVisitor& visit, int l1_begin, int l1_end) {
  block.validate();
  const LogFactorialTable lf(block.N);
  visit_support(block, lf, visit, l1_begin, l1_end);
}

namespace {

// lambda = C(N_1, L_1) ... C(N_m+1, L_m+1) / C(N, L); every numerator is a term of the
// Vandermonde sum for C(N, L) < 2^63, so it is formed exactly and rounded once.
// M = 0 takes m from the block.
template <int M>
void fill_exact(const BlockSpec& block, RdmSpectrum& spec) {
  const int m = M > 0 ? M : block.m();
  const auto mu = static_cast<std::size_t>(m);
  const std::int64_t* c_na = detail::kBinomials.value[block.magnons[mu - 1]];
  const std::int64_t* c_last = detail::kBinomials.value[block.magnons[mu]];
  const double inv_total = 1.0 / static_cast<double>(exact_binomial(block.N, block.L));
  SmallBuffer<long, 18> suffix(block.magnons.size() + 1, 0);
  for (std::size_t a = block.magnons.size(); a-- > 0;) suffix[a] = suffix[a + 1] + block.magnons[a];
  std::conditional_t<(M > 0), std::array<int, M + (M == 0)>, std::vector<int>> prefix{};
  if constexpr (M == 0) prefix.resize(mu);
  int* index = spec.indices.data();
  double* value = spec.values.data();
  auto row = [&](int remaining, std::int64_t head) {
    const int lo = std::max<int>(0, static_cast<int>(remaining - suffix[mu]));
    const int hi = std::min(block.magnons[mu - 1], remaining);
    for (int v = lo; v <= hi; ++v) {
#pragma GCC unroll 4
      for (std::size_t b = 0; b + 1 < mu; ++b) index[b] = prefix[b];
      index[mu - 1] = v;
      index += mu;
      *value++ = static_cast<double>(head * c_na[v] * c_last[remaining - v]) * inv_total;
    }
  };
  if constexpr (M > 0) {
    auto level = [&]<int A>(auto&& self, int remaining, std::int64_t head) -> void {
      if constexpr (A == M - 1) {
        row(remaining, head);
      } else {
        const int lo = std::max<int>(0, static_cast<int>(remaining - suffix[A + 1]));
        const int hi = std::min(block.magnons[A], remaining);
        for (int v = lo; v <= hi; ++v) {
          prefix[A] = v;
          self.template operator()<A + 1>(self, remaining - v, head * exact_binomial(block.magnons[A], v));
        }
      }
    };
    level.template operator()<0>(level, block.L, 1);
  } else {
    auto rec = [&](auto&& self, int a, int remaining, std::int64_t head) -> void {
      if (a == m - 1) {
        row(remaining, head);
        return;
      }
      const int lo = std::max<int>(0, static_cast<int>(remaining - suffix[a + 1]));
      const int hi = std::min(block.magnons[a], remaining);
      for (int v = lo; v <= hi; ++v) {
        prefix[a] = v;
        self(self, a + 1, remaining - v, head * exact_binomial(block.magnons[a], v));
      }
    };
    rec(rec, 0, block.L, 1);
  }
}

}  // namespace

RdmSpectrum rdm_spectrum(const BlockSpec& block, std::uint64_t cap) {
  const std::uint64_t points = support_size(block);
  if (points > cap) {
    throw ResourceLimitError("rdm_spectrum: support has " + std::to_string(points) + " points, cap is " +
                             std::to_string(cap));
  }
  RdmSpectrum spec;
  spec.block = block;
  if (block.N <= kExactBinomialMax) {
    spec.values.resize(points);
    spec.indices.resize(points * static_cast<std::size_t>(block.m()));
    switch (block.m()) {
      case 1: fill_exact<1>(block, spec); break;
      case 2: fill_exact<2>(block, spec); break;
      case 3: fill_exact<3>(block, spec); break;
      default: fill_exact<0>(block, spec);
    }
    return spec;
  }
  spec.values.reserve(points);
  spec.indices.reserve(points * static_cast<std::size_t>(block.m()));
  const LogFactorialTable lf(block.N);
  visit_support(block, lf, [&](std::span<const int> index, long double log_lambda) {
    spec.indices.insert(spec.indices.end(), index.begin(), index.end());
    spec.values.push_back(static_cast<double>(std::exp(log_lambda)));
  });
  return spec;
}

RdmSpectrum schmidt_coefficients(const BlockSpec& block, std::uint64_t cap) {
  auto spec = rdm_spectrum(block, cap);
  for (double& v : spec.values) v = std::sqrt(v);
  return spec;
}

Moments moments_closed_form(const BlockSpec& block) {
  block.validate();
  if (block.N < 2) throw std::invalid_argument("moments_closed_form: needs N >= 2");
  const int m = block.m();
  const double N = block.N;
  const double L = block.L;
  const double factor = L * (N - L) / (N - 1.0);
  Moments out;
  out.m = m;
  out.means.resize(static_cast<std::size_t>(m));
  out.covariance.assign(static_cast<std::size_t>(m * m), 0.0);
  for (int i = 0; i < m; ++i) {
    const double ni = block.magnons[i] / N;
    out.means[i] = L * ni;
    for (int j = 0; j < m; ++j) {
      const double nj = block.magnons[j] / N;
      out.covariance[static_cast<std::size_t>(i * m + j)] = i == j ? factor * ni * (1.0 - ni) : -factor * (ni * nj);
    }
  }
  return out;
}

namespace {

constexpr std::size_t kMomentRun = 64;

// Run sums over points [b, e): first[i] += sum lambda L_i, and with the means known,
// second[i*m+j] += sum lambda (L_i - mean_i)(L_j - mean_j) for j >= i. M = 0 takes m at run time.
template <int M>
void first_run(const double* values, const int* indices, std::size_t b, std::size_t e, std::size_t mu, double* out) {
  if constexpr (M > 0) {
    double acc[M] = {};
    for (std::size_t p = b; p < e; ++p)
#pragma GCC unroll 4
      for (int i = 0; i < M; ++i) acc[i] += values[p] * indices[p * M + i];
    for (int i = 0; i < M; ++i) out[i] = acc[i];
  } else {
    std::fill(out, out + mu, 0.0);
    for (std::size_t p = b; p < e; ++p)
      for (std::size_t i = 0; i < mu; ++i) out[i] += values[p] * indices[p * mu + i];
  }
}

template <int M>
void second_run(const double* values, const int* indices, std::size_t b, std::size_t e, std::size_t mu,
                const double* mean, double* out) {
  if constexpr (M > 0) {
    double acc[M * M] = {};
    for (std::size_t p = b; p < e; ++p) {
      double x[M];
#pragma GCC unroll 4
      for (int i = 0; i < M; ++i) x[i] = indices[p * M + i] - mean[i];
#pragma GCC unroll 4
      for (int i = 0; i < M; ++i) {
        const double wx = values[p] * x[i];
#pragma GCC unroll 4
        for (int j = i; j < M; ++j) acc[i * M + j] += wx * x[j];
      }
    }
    for (int k = 0; k < M * M; ++k) out[k] = acc[k];
  } else {
    std::fill(out, out + mu * mu, 0.0);
    std::vector<double> x(mu);
    for (std::size_t p = b; p < e; ++p) {
      for (std::size_t i = 0; i < mu; ++i) x[i] = indices[p * mu + i] - mean[i];
      for (std::size_t i = 0; i < mu; ++i) {
        const double wx = values[p] * x[i];
        for (std::size_t j = i; j < mu; ++j) out[i * mu + j] += wx * x[j];
      }
    }
  }
}

// Two passes (means, then central moments). Runs of kMomentRun points are summed in double
// and the run totals are summed compensated.
template <int M>
void brute_force_moments(const RdmSpectrum& spectrum, Moments& out) {
  const std::size_t mu = M > 0 ? static_cast<std::size_t>(M) : static_cast<std::size_t>(spectrum.block.m());
  const std::size_t n = spectrum.size();
  const double* values = spectrum.values.data();
  const int* indices = spectrum.indices.data();
  using Scratch = std::conditional_t<(M > 0), std::array<double, M * M + (M == 0)>, std::vector<double>>;
  using Sums = std::conditional_t<(M > 0), std::array<CompensatedSum<long double>, M * M + (M == 0)>,
                                  std::vector<CompensatedSum<long double>>>;
  Scratch run{}, mean{};
  Sums first{}, second{};
  if constexpr (M == 0) {
    run.resize(mu * mu);
    mean.resize(mu);
    first.resize(mu);
    second.resize(mu * mu);
  }

  for (std::size_t start = 0; start < n; start += kMomentRun) {
    first_run<M>(values, indices, start, std::min(n, start + kMomentRun), mu, run.data());
    for (std::size_t i = 0; i < mu; ++i) first[i] += run[i];
  }
  out.means.resize(mu);
  for (std::size_t i = 0; i < mu; ++i) out.means[i] = mean[i] = static_cast<double>(first[i].value());

  for (std::size_t start = 0; start < n; start += kMomentRun) {
    second_run<M>(values, indices, start, std::min(n, start + kMomentRun), mu, mean.data(), run.data());
    for (std::size_t i = 0; i < mu; ++i)
      for (std::size_t j = i; j < mu; ++j) second[i * mu + j] += run[i * mu + j];
  }
  out.covariance.assign(mu * mu, 0.0);
  for (std::size_t i = 0; i < mu; ++i) {
    for (std::size_t j = i; j < mu; ++j) {
      const auto v = static_cast<double>(second[i * mu + j].value());
      out.covariance[i * mu + j] = v;
      out.covariance[j * mu + i] = v;
    }
  }
}

}  // namespace

Moments moments_brute_force(const RdmSpectrum& spectrum) {
  Moments out;
  out.m = spectrum.block.m();
  switch (out.m) {
    case 1: brute_force_moments<1>(spectrum, out); break;
    case 2: brute_force_moments<2>(spectrum, out); break;
    case 3: brute_force_moments<3>(spectrum, out); break;
    default: brute_force_moments<0>(spectrum, out);
  }
  return out;
}

void write_spectrum_csv(std::ostream& out, const RdmSpectrum& spectrum) {
  const int m = spectrum.block.m();
  for (int a = 1; a <= m; ++a) out << 'L' << a << ',';
  out << "lambda\n";
  char buf[64];
  for (std::size_t p = 0; p < spectrum.size(); ++p) {
    for (int v : spectrum.index(p)) out << v << ',';
    std::snprintf(buf, sizeof buf, "%.17g", spectrum.values[p]);
    out << buf << '\n';
  }
}

}  // namespace glmg::rdm
