#include "glmg/entropy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "glmg/compensated_sum.hpp"

namespace glmg::entropy {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kReductionChunks = 64;
constexpr long kAnchorStride = 32;
constexpr int kRowsPerChunk = 16;

void require_q(double q, const char* who) {
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument(std::string(who) + ": q must be > 0");
}

bool is_unit_q(double q) { return std::abs(q - 1.0) < kUnitQThreshold; }

EntropyValue flagged(double v) {
  return {v, v < 0.0 ? EntropyFlag::negative_asymptotic : EntropyFlag::ok};
}

}  // namespace

void AsymptoticInput::validate() const {
  if (m_eff < 0) throw std::invalid_argument("asymptotic input: m_eff must be >= 0");
  if (densities.size() != static_cast<std::size_t>(m_eff) + 1)
    throw std::invalid_argument("asymptotic input: expected m_eff + 1 densities");
  double total = 0.0;
  for (double n : densities) {
    if (!(n > 0.0) || n > 1.0) throw std::invalid_argument("asymptotic input: densities must lie in (0,1]");
    total += n;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("asymptotic input: densities must sum to 1");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("asymptotic input: alpha must lie in [0,1)");
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("asymptotic input: L must be > 0");
}

double AsymptoticInput::log_scale() const {
  double log_prod = 0.0;
  for (double n : densities) log_prod += std::log(n);
  return std::log(L) + std::log1p(-alpha) + log_prod / m_eff;
}

AsymptoticInput reduce_densities(const std::vector<double>& densities, double L, double alpha) {
  AsymptoticInput inp;
  inp.L = L;
  inp.alpha = alpha;
  for (double n : densities) {
    if (n > 0.0) inp.densities.push_back(n);
  }
  inp.m_eff = static_cast<int>(inp.densities.size()) - 1;
  inp.validate();
  return inp;
}

double trace_power_exact(const rdm::RdmSpectrum& spectrum, double q) {
  require_q(q, "trace_power_exact");
  CompensatedSum<double> acc;
  for (double v : spectrum.values) acc += std::pow(v, q);
  return acc.value();
}

double entropy_exact(const rdm::RdmSpectrum& spectrum) {
  CompensatedSum<double> acc;
  for (double v : spectrum.values) {
    if (v > 0.0) acc += -v * std::log(v);
  }
  return acc.value();
}

double renyi_exact(const rdm::RdmSpectrum& spectrum, double q) {
  require_q(q, "renyi_exact");
  if (is_unit_q(q)) return entropy_exact(spectrum);
  return std::log(trace_power_exact(spectrum, q)) / (1.0 - q);
}

double tsallis_exact(const rdm::RdmSpectrum& spectrum, double q) {
  require_q(q, "tsallis_exact");
  if (is_unit_q(q)) return entropy_exact(spectrum);
  return (trace_power_exact(spectrum, q) - 1.0) / (1.0 - q);
}

int default_thread_count() {
  if (const char* env = std::getenv("GLMG_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

// C(n, k) and ln C(n, k) for n <= kExactBinomialMax, each rounded once to double.
struct Binomials {
  double value[rdm::kExactBinomialMax + 1][rdm::kExactBinomialMax + 1];
  double log[rdm::kExactBinomialMax + 1][rdm::kExactBinomialMax + 1];
};

const Binomials& binomials() {
  static const Binomials table = [] {
    Binomials t{};
    const rdm::LogFactorialTable lf(rdm::kExactBinomialMax);
    for (int n = 0; n <= rdm::kExactBinomialMax; ++n) {
      for (int k = 0; k <= n; ++k) {
        t.value[n][k] = static_cast<double>(rdm::exact_binomial(n, k));
        t.log[n][k] = static_cast<double>(lf.log_binomial(n, k));
      }
    }
    return t;
  }();
  return table;
}

constexpr int kMaxIntegerOrder = 8;

int integer_order(double q) {
  return q == std::floor(q) && q >= 2.0 && q <= kMaxIntegerOrder ? static_cast<int>(q) : 0;
}

// lambda = C(N_1, L_1) ... C(N_m+1, L_m+1) / C(N, L) from correctly rounded binomials, a few ulp
// per eigenvalue. A row (all but the last free index fixed) has at most kExactBinomialMax + 1
// points and is summed in double; a block has at most (kExactBinomialMax + 1)^(m-1) rows, so
// plain long double row totals keep every sum well inside 1e-15 relative.
void small_block(const rdm::BlockSpec& block, const std::vector<double>& qs, long double* totals) {
  const auto& bt = binomials();
  const int m = block.m();
  const std::size_t nq = qs.size();
  // The sums are symmetric in the components; ascending order makes the innermost rows the longest.
  SmallBuffer<int, 17> mag(block.magnons.size());
  std::copy(block.magnons.begin(), block.magnons.end(), mag.begin());
  std::sort(mag.begin(), mag.end());
  const int na = mag[static_cast<std::size_t>(m - 1)];
  const int n_last = mag[static_cast<std::size_t>(m)];
  const double* log_na = bt.log[na];
  const double* log_last = bt.log[n_last];
  const double* c_na = bt.value[na];
  const double* c_last = bt.value[n_last];
  const double inv_total = 1.0 / bt.value[block.N][block.L];

  SmallBuffer<int, 8> order(nq, 0);
  for (std::size_t k = 0; k < nq; ++k) order[k] = integer_order(qs[k]);
  const bool low_orders = std::all_of(order.begin(), order.end(), [](int o) { return o == 2 || o == 3; });
  SmallBuffer<long, 18> suffix(mag.size() + 1, 0);
  for (std::size_t a = mag.size(); a-- > 0;) suffix[a] = suffix[a + 1] + mag[a];

  double lam[rdm::kExactBinomialMax + 1];
  double log_lam[rdm::kExactBinomialMax + 1];
  auto row = [&](long lo, long hi, long remaining, double head, double partial) {
    const int len = static_cast<int>(hi - lo + 1);
    const double* a = c_na + lo;
    const double* la = log_na + lo;
    // C(n_last, remaining - v) = C(n_last, n_last - remaining + v), so both run forward.
    const double* b = c_last + (n_last - remaining + lo);
    const double* lb = log_last + (n_last - remaining + lo);
    const double scale = head * inv_total;
    double trace = 0.0, vn = 0.0;
    if (low_orders) {
      // Orders 2 and 3 only: one pass for both power sums.
      double sum2 = 0.0, sum3 = 0.0;
      for (int i = 0; i < len; ++i) {
        const double l = a[i] * b[i] * scale;
        const double ll = partial + la[i] + lb[i];
        const double l2 = l * l;
        const double l3 = l2 * l;
        trace += l;
        vn -= l * ll;
        sum2 += l2;
        sum3 += l3;
      }
      totals[0] += trace;
      totals[1] += vn;
      for (std::size_t k = 0; k < nq; ++k) totals[k + 2] += order[k] == 2 ? sum2 : sum3;
      return;
    }
    for (int i = 0; i < len; ++i) {
      const double l = a[i] * b[i] * scale;
      const double ll = partial + la[i] + lb[i];
      lam[i] = l;
      log_lam[i] = ll;
      trace += l;
      vn -= l * ll;
    }
    totals[0] += trace;
    totals[1] += vn;
    for (std::size_t k = 0; k < nq; ++k) {
      double acc = 0.0;
      switch (order[k]) {
        case 2:
          for (int i = 0; i < len; ++i) acc += lam[i] * lam[i];
          break;
        case 3:
          for (int i = 0; i < len; ++i) acc += lam[i] * lam[i] * lam[i];
          break;
        case 0: {
          const double q = qs[k];
          for (int i = 0; i < len; ++i) acc += std::exp(q * log_lam[i]);
          break;
        }
        default:
          for (int i = 0; i < len; ++i) {
            double power = lam[i];
            for (int e = 1; e < order[k]; ++e) power *= lam[i];
            acc += power;
          }
      }
      totals[k + 2] += acc;
    }
  };
  auto rec = [&](auto&& self, int a, long remaining, double head, double partial) -> void {
    const long lo = std::max(0L, remaining - suffix[a + 1]);
    const long hi = std::min<long>(mag[a], remaining);
    if (a == m - 1) {
      if (lo <= hi) row(lo, hi, remaining, head, partial);
      return;
    }
    const int n = mag[a];
    for (long v = lo; v <= hi; ++v)
      self(self, a + 1, remaining - v, head * bt.value[n][v], partial + bt.log[n][v]);
  };
  rec(rec, 0, block.L, 1.0, -bt.log[block.N][block.L]);
}

ExactEntropies finish_entropies(const std::vector<double>& qs, const long double* totals) {
  const std::size_t nq = qs.size();
  ExactEntropies out;
  out.trace = static_cast<double>(totals[0]);
  out.von_neumann = static_cast<double>(totals[1]);
  out.q = qs;
  out.trace_power.resize(nq);
  out.renyi.resize(nq);
  out.tsallis.resize(nq);
  for (std::size_t k = 0; k < nq; ++k) {
    const long double tr = totals[k + 2];
    out.trace_power[k] = static_cast<double>(tr);
    if (is_unit_q(qs[k])) {
      out.renyi[k] = out.tsallis[k] = out.von_neumann;
    } else {
      out.renyi[k] = static_cast<double>(std::log(tr) / (1.0L - qs[k]));
      out.tsallis[k] = static_cast<double>((tr - 1.0L) / (1.0L - qs[k]));
    }
  }
  return out;
}

}  // namespace

ExactEntropies exact_entropies(const rdm::BlockSpec& block, const std::vector<double>& qs, int threads) {
  block.validate();
  for (double q : qs) require_q(q, "exact_entropies");
  const std::size_t nq = qs.size();
  const std::size_t slots = nq + 2;  // trace, von Neumann, one per q

  if (block.N <= rdm::kExactBinomialMax) {
    SmallBuffer<long double, 10> totals(slots, 0.0L);
    small_block(block, qs, totals.data());
    return finish_entropies(qs, totals.data());
  }

  if (threads <= 0) threads = default_thread_count();
  // Fixed chunking of the L_1 range: the reduction order does not depend on
  // how many workers run, so results are reproducible across thread counts.
  const int l1_max = std::min(block.L, block.magnons[0]);
  const int chunks = std::clamp((l1_max + 1) / kRowsPerChunk, 1, kReductionChunks);
  SmallBuffer<CompensatedSum<long double>, 128> partials(static_cast<std::size_t>(chunks) * slots);

  // Small integer orders are formed by repeated multiplication, the rest through exp(q ln lambda).
  SmallBuffer<int, 8> order(nq, 0);
  for (std::size_t k = 0; k < nq; ++k) order[k] = integer_order(qs[k]);
  const rdm::LogFactorialTable lf(block.N);
  const int m = block.m();
  const int na = block.magnons[static_cast<std::size_t>(m - 1)];
  const int n_last = block.magnons[static_cast<std::size_t>(m)];
  std::vector<long double> log_na(static_cast<std::size_t>(na) + 1);
  std::vector<long double> log_last(static_cast<std::size_t>(n_last) + 1);
  for (int k = 0; k <= na; ++k) log_na[k] = lf.log_binomial(na, k);
  for (int k = 0; k <= n_last; ++k) log_last[k] = lf.log_binomial(n_last, k);

  auto work = [&](int c) {
    const int begin = (l1_max + 1) * c / chunks;
    const int end = (l1_max + 1) * (c + 1) / chunks;
    CompensatedSum<long double>* p = partials.data() + static_cast<std::size_t>(c) * slots;
    // Each row is summed plainly; rows are summed compensated.
    SmallBuffer<long double, 10> row(slots, 0.0L);
    auto add = [&](long double lambda, long double log_lambda) {
      row[0] += lambda;
      row[1] -= lambda * log_lambda;
      for (std::size_t k = 0; k < nq; ++k) {
        long double power = lambda;
        if (order[k] > 0) {
          for (int i = 1; i < order[k]; ++i) power *= lambda;
        } else {
          power = std::exp(qs[k] * log_lambda);
        }
        row[k + 2] += power;
      }
    };
    auto flush = [&] {
      for (std::size_t k = 0; k < slots; ++k) {
        p[k] += row[k];
        row[k] = 0.0L;
      }
    };

    // Along a row lambda is advanced by the exact binomial ratio and re-anchored with exp
    // every kAnchorStride points.
    rdm::visit_support_rows(
        block, lf,
        [&](std::span<int>, long lo, long hi, long remaining, long double partial) {
          long double lambda = 0.0L;
          long since_anchor = kAnchorStride;
          for (long v = lo; v <= hi; ++v) {
            const int iv = static_cast<int>(v);
            const int ir = static_cast<int>(remaining - v);
            const long double log_lambda = partial + log_na[iv] + log_last[ir];
            if (since_anchor == kAnchorStride) {
              lambda = std::exp(log_lambda);
              since_anchor = 1;
            } else {
              // C(na, v) / C(na, v-1) * C(n_last, r) / C(n_last, r+1)
              lambda *= static_cast<long double>(static_cast<long>(na - iv + 1) * (ir + 1)) *
                        (lf.inverse(iv) * lf.inverse(n_last - ir));
              ++since_anchor;
            }
            add(lambda, log_lambda);
          }
          flush();
        },
        begin, end);
  };

  const int workers = std::min(threads, chunks);
  if (workers <= 1) {
    for (int c = 0; c < chunks; ++c) work(c);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int c = next++; c < chunks; c = next++) work(c);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (int c = 1; c < chunks; ++c)
    for (std::size_t k = 0; k < slots; ++k) partials[k] += partials[static_cast<std::size_t>(c) * slots + k];
  SmallBuffer<long double, 10> totals(slots);
  for (std::size_t k = 0; k < slots; ++k) totals[k] = partials[k].value();
  return finish_entropies(qs, totals.data());
}

namespace {

double log_trace_power(const AsymptoticInput& inp, double q) {
  if (inp.m_eff == 0) return 0.0;
  const double m = inp.m_eff;
  return -0.5 * m * std::log(q) + 0.5 * m * (1.0 - q) * (std::log(kTwoPi) + inp.log_scale());
}

}  // namespace

double trace_power_asymptotic(const AsymptoticInput& inp, double q) {
  inp.validate();
  require_q(q, "trace_power_asymptotic");
  return std::exp(log_trace_power(inp, q));
}

EntropyValue vn_asymptotic(const AsymptoticInput& inp) {
  inp.validate();
  if (inp.m_eff == 0) return {0.0, EntropyFlag::ok};
  const double m = inp.m_eff;
  return flagged(0.5 * m * (std::log(kTwoPi) + 1.0 + inp.log_scale()));
}

EntropyValue renyi_asymptotic(const AsymptoticInput& inp, double q) {
  inp.validate();
  require_q(q, "renyi_asymptotic");
  if (is_unit_q(q)) return vn_asymptotic(inp);
  if (inp.m_eff == 0) return {0.0, EntropyFlag::ok};
  const double m = inp.m_eff;
  return flagged(0.5 * m * std::log(q) / (q - 1.0) + 0.5 * m * (std::log(kTwoPi) + inp.log_scale()));
}

EntropyValue tsallis_asymptotic(const AsymptoticInput& inp, double q) {
  inp.validate();
  require_q(q, "tsallis_asymptotic");
  if (is_unit_q(q)) return vn_asymptotic(inp);
  return flagged(std::expm1(log_trace_power(inp, q)) / (1.0 - q));
}

double tsallis_extensive_limit(const AsymptoticInput& inp) {
  inp.validate();
  if (inp.m_eff <= 2) {
    throw std::domain_error("tsallis_extensive_limit: Tsallis not extensive for any q when m_eff = " +
                            std::to_string(inp.m_eff) + " (needs m_eff >= 3)");
  }
  const double m = inp.m_eff;
  double log_prod = 0.0;
  for (double n : inp.densities) log_prod += std::log(n);
  return std::numbers::pi * m * (1.0 - inp.alpha) * std::exp(log_prod / m) / std::pow(1.0 - 2.0 / m, 0.5 * m);
}

double entropy_upper_bound(int L, int m) {
  if (L < 0 || m < 1) throw std::invalid_argument("entropy_upper_bound: needs L >= 0 and m >= 1");
  return rdm::log_binomial(L + m, m);
}

double zero_entropy_distance(const FaceDescriptor& face, double L, double alpha, EntropyKind kind, double q) {
  const auto& n = face.face_densities;
  const int m = static_cast<int>(n.size()) - 1;
  if (m < 1) throw std::invalid_argument("zero_entropy_distance: need m >= 1");
  if (face.vanishing < 1 || face.vanishing > m + 1)
    throw std::invalid_argument("zero_entropy_distance: vanishing index out of range");
  if (!(L > 0.0) || !(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("zero_entropy_distance: needs L > 0 and alpha in [0,1)");
  const auto a = static_cast<std::size_t>(face.vanishing - 1);
  if (std::abs(n[a]) > 1e-12) throw std::invalid_argument("zero_entropy_distance: density of the vanishing index must be 0");
  double total = 0.0;
  double log_prod = 0.0;
  for (std::size_t b = 0; b < n.size(); ++b) {
    total += n[b];
    if (b == a) continue;
    if (!(n[b] > 1e-12)) {
      throw std::invalid_argument(
          "zero_entropy_distance: point lies on a lower-dimensional face (distance scales as L^{-m/k} there)");
    }
    log_prod += std::log(n[b]);
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("zero_entropy_distance: densities must sum to 1");

  const double md = m;
  const double log_scale = std::log(kTwoPi * std::numbers::e * L) + std::log1p(-alpha);
  const double prefactor =
      face.vanishing <= m ? (md + 1.0) / std::sqrt(md * md + md - 1.0) : (md + 1.0) / std::sqrt(md);
  double r0 = prefactor * std::exp(-md * log_scale - log_prod);
  if (kind == EntropyKind::renyi) {
    require_q(q, "zero_entropy_distance");
    if (!is_unit_q(q)) r0 *= std::exp(md * std::log(q) / (1.0 - q) + md);
  }
  return r0;
}

}  // namespace glmg::entropy
