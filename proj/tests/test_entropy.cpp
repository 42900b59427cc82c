#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "glmg/entropy.hpp"
#include "glmg/rdm.hpp"
#include "oracles.hpp"

using namespace glmg;
using namespace glmg::entropy;

namespace {

const double kPi = std::numbers::pi;
const double kE = std::numbers::e;

AsymptoticInput input(std::vector<double> n, double L, double alpha) {
  AsymptoticInput a;
  a.m_eff = static_cast<int>(n.size()) - 1;
  a.densities = std::move(n);
  a.L = L;
  a.alpha = alpha;
  return a;
}

const AsymptoticInput kFig = input({0.4, 0.4, 0.2}, 1000, 0.5);

}  // namespace

TEST(EntropyExact, Examples) {
  EXPECT_NEAR(entropy_exact(rdm::rdm_spectrum({6, 3, {2, 2, 2}})), -(6 * 0.1 * std::log(0.1) + 0.4 * std::log(0.4)),
              1e-14);
  EXPECT_NEAR(entropy_exact(rdm::rdm_spectrum({6, 3, {2, 2, 2}})), 1.748067, 1e-6);
  EXPECT_EQ(entropy_exact(rdm::rdm_spectrum({6, 0, {2, 2, 2}})), 0.0);
  EXPECT_EQ(entropy_exact(rdm::rdm_spectrum({6, 6, {2, 2, 2}})), 0.0);
  const auto s = rdm::rdm_spectrum({4, 2, {2, 2}});
  EXPECT_NEAR(entropy_exact(s), std::log(6.0) / 3 + 2.0 / 3 * std::log(1.5), 1e-15);
  EXPECT_NEAR(entropy_exact(s), 0.867563, 1e-6);
}

TEST(RenyiExact, Examples) {
  const auto s = rdm::rdm_spectrum({4, 2, {2, 2}});
  EXPECT_NEAR(renyi_exact(s, 2.0), std::log(2.0), 1e-15);
  EXPECT_EQ(renyi_exact(s, 1.0), entropy_exact(s));
  EXPECT_EQ(renyi_exact(s, 1.0 + 1e-9), entropy_exact(s));
  EXPECT_NEAR(renyi_exact(rdm::rdm_spectrum({5, 2, {5, 0}}), 3.0), 0.0, 1e-16);
  EXPECT_THROW(renyi_exact(s, 0.0), std::invalid_argument);
  EXPECT_THROW(renyi_exact(s, -1.0), std::invalid_argument);
}

TEST(TsallisExact, Examples) {
  const auto s = rdm::rdm_spectrum({4, 2, {2, 2}});
  EXPECT_NEAR(tsallis_exact(s, 2.0), 0.5, 1e-15);
  EXPECT_EQ(tsallis_exact(s, 1.0), entropy_exact(s));
  EXPECT_NEAR(tsallis_exact(rdm::rdm_spectrum({5, 2, {5, 0}}), 0.5), 0.0, 1e-16);
  EXPECT_THROW(tsallis_exact(s, 0.0), std::invalid_argument);
}

TEST(ExactProperties, RenyiTsallisBoundsAndLimits) {
  for (int N = 1; N <= 24; ++N) {
    oracle::compositions(N, 3, [&](const std::vector<int>& mag) {
      for (int L = 0; L <= N; ++L) {
        const auto s = rdm::rdm_spectrum({N, L, mag});
        const double S = entropy_exact(s);
        ASSERT_LE(S, entropy_upper_bound(L, 2) + 1e-12);
        ASSERT_GE(S, -1e-15);
        ASSERT_NEAR(renyi_exact(s, 1.0 + 1e-6), S, 1e-4);
        ASSERT_NEAR(renyi_exact(s, 1.0 - 1e-6), S, 1e-4);
        for (double q : {0.5, 2.0, 3.0}) {
          const double R = renyi_exact(s, q);
          const double T = tsallis_exact(s, q);
          ASSERT_NEAR(std::log1p((1 - q) * T) / (1 - q), R, 1e-12);
        }
      }
    });
  }
}

TEST(ExactEntropies, StreamingMatchesEnumeration) {
  const rdm::BlockSpec b{30, 13, {7, 9, 6, 8}};
  const auto s = rdm::rdm_spectrum(b);
  const auto ex = exact_entropies(b, {0.5, 1.0, 2.0, 3.0}, 1);
  EXPECT_NEAR(ex.trace, 1.0, 1e-14);
  EXPECT_NEAR(ex.von_neumann, entropy_exact(s), 1e-13);
  for (std::size_t k = 0; k < ex.q.size(); ++k) {
    EXPECT_NEAR(ex.renyi[k], renyi_exact(s, ex.q[k]), 1e-12);
    EXPECT_NEAR(ex.tsallis[k], tsallis_exact(s, ex.q[k]), 1e-12);
  }
}

TEST(ExactEntropies, OrderOfPowersAndComponentsIrrelevant) {
  const rdm::BlockSpec b{40, 17, {12, 3, 9, 16}};
  const auto mixed = exact_entropies(b, {0.5, 2.0, 3.0}, 1);
  const auto low = exact_entropies(b, {3.0, 2.0}, 1);
  EXPECT_NEAR(low.trace_power[0], mixed.trace_power[2], 1e-15);
  EXPECT_NEAR(low.trace_power[1], mixed.trace_power[1], 1e-15);
  EXPECT_NEAR(low.von_neumann, mixed.von_neumann, 1e-13);
  // Relabelled components give the same multiset of eigenvalues.
  const auto perm = exact_entropies({40, 17, {16, 9, 3, 12}}, {3.0, 2.0}, 1);
  EXPECT_NEAR(perm.von_neumann, low.von_neumann, 1e-13);
  EXPECT_NEAR(perm.trace_power[0], low.trace_power[0], 1e-15);
}

TEST(ExactEntropies, SmallAndLargeBlockPathsAgree) {
  // N = 66 is the last block summed from exact binomials, N = 67 the first through logarithms.
  for (int N : {66, 67}) {
    const rdm::BlockSpec b{N, 30, {N - 40, 25, 15}};
    const auto s = rdm::rdm_spectrum(b);
    const auto ex = exact_entropies(b, {0.5, 2.0, 4.0}, 1);
    EXPECT_NEAR(ex.trace, 1.0, 1e-14);
    EXPECT_NEAR(ex.von_neumann, entropy_exact(s), 1e-12);
    for (std::size_t k = 0; k < ex.q.size(); ++k)
      EXPECT_NEAR(ex.trace_power[k], trace_power_exact(s, ex.q[k]), 1e-13 * ex.trace_power[k]);
  }
  const double S = exact_entropies({60, 30, {24, 24, 12}}, {}, 1).von_neumann;
  EXPECT_NEAR(S, oracle::quad_entropy_m2(60, 30, {24, 24, 12}), 1e-13);
}

TEST(ExactEntropies, IndependentOfThreadCount) {
  const rdm::BlockSpec b{400, 170, {150, 130, 120}};
  const auto one = exact_entropies(b, {2.0, 0.5}, 1);
  for (int t : {2, 3, 8}) {
    const auto many = exact_entropies(b, {2.0, 0.5}, t);
    EXPECT_EQ(one.von_neumann, many.von_neumann);
    EXPECT_EQ(one.trace_power, many.trace_power);
  }
}

TEST(ExactEntropies, MatchesQuadPrecisionOracle) {
  const double S = exact_entropies({200, 100, {80, 80, 40}}, {}, 1).von_neumann;
  EXPECT_NEAR(S, oracle::quad_entropy_m2(200, 100, {80, 80, 40}), 1e-13);
  const auto ex = exact_entropies({300, 120, {150, 150}}, {2.0}, 1);
  EXPECT_NEAR(ex.trace_power[0], oracle::quad_trace_power_m1(300, 120, 150, 2.0), 1e-15);
}

TEST(TracePowerAsymptotic, Examples) {
  EXPECT_NEAR(trace_power_asymptotic(kFig, 1.0), 1.0, 1e-15);
  const auto half = input({0.5, 0.5}, 100, 0.0);
  EXPECT_NEAR(trace_power_asymptotic(half, 2.0), 1 / std::sqrt(2.0) / std::sqrt(50 * kPi), 1e-15);
  EXPECT_NEAR(trace_power_asymptotic(half, 2.0), 0.0564190, 1e-7);
  // (2 pi * 500 * sqrt(0.032))^{-1} / 2; the e factor belongs to the von Neumann formula only.
  EXPECT_NEAR(trace_power_asymptotic(kFig, 2.0), 0.5 / (2 * kPi * 500 * std::sqrt(0.032)), 1e-17);
  EXPECT_NEAR(trace_power_asymptotic(kFig, 2.0), 8.8970e-4, 1e-8);
  // Cross-check against the exact sum at N = 10^4.
  const double exact = oracle::quad_trace_power_m1(10000, 100, 5000, 2.0);
  EXPECT_LT(std::abs(exact - trace_power_asymptotic(half, 2.0)) / exact, 3.0 / 100);
}

TEST(VnAsymptotic, Examples) {
  EXPECT_NEAR(vn_asymptotic(kFig).value, 7.3315, 1e-4);
  EXPECT_EQ(vn_asymptotic(kFig).flag, EntropyFlag::ok);
  for (double L : {10.0, 100.0, 1e5}) {
    const auto a = input({0.5, 0.5}, L, 0.25);
    EXPECT_NEAR(vn_asymptotic(a).value, 0.5 * std::log(kPi * kE / 2 * L * 0.75), 1e-13);
  }
  const auto thin = input({1 - 1e-9, 1e-9}, 100, 0.0);
  EXPECT_LT(vn_asymptotic(thin).value, 0.0);
  EXPECT_EQ(vn_asymptotic(thin).flag, EntropyFlag::negative_asymptotic);
}

TEST(RenyiAsymptotic, Examples) {
  EXPECT_NEAR(renyi_asymptotic(kFig, 2.0).value, vn_asymptotic(kFig).value - (1 - std::log(2.0)), 1e-13);
  EXPECT_NEAR(renyi_asymptotic(kFig, 2.0).value, 7.0246, 1e-4);
  EXPECT_EQ(renyi_asymptotic(kFig, 1.0).value, vn_asymptotic(kFig).value);
  EXPECT_NEAR(renyi_asymptotic(kFig, 1.0 + 1e-7).value, vn_asymptotic(kFig).value, 1e-7);
  EXPECT_THROW(renyi_asymptotic(kFig, 0.0), std::invalid_argument);
  for (double q : {0.3, 0.5, 2.0, 7.0}) {
    const double d1 = renyi_asymptotic(input({0.4, 0.4, 0.2}, 10, 0.5), q).value -
                      renyi_asymptotic(input({0.4, 0.4, 0.2}, 10, 0.5), 2.0).value;
    const double d2 = renyi_asymptotic(input({0.4, 0.4, 0.2}, 1e6, 0.5), q).value -
                      renyi_asymptotic(input({0.4, 0.4, 0.2}, 1e6, 0.5), 2.0).value;
    EXPECT_NEAR(d1, d2, 1e-12);
    const double offset = renyi_asymptotic(kFig, q).value - vn_asymptotic(kFig).value;
    EXPECT_NEAR(offset, (std::log(q) / (q - 1) - 1), 1e-12);
  }
}

TEST(TsallisAsymptotic, Consistency) {
  for (double q : {0.5, 2.0, 3.0}) {
    for (const auto& a : {kFig, input({0.5, 0.5}, 200, 0.5), input({0.25, 0.25, 0.25, 0.25}, 50, 0.1)}) {
      const double T = tsallis_asymptotic(a, q).value;
      const double R = renyi_asymptotic(a, q).value;
      EXPECT_NEAR(T, std::expm1((1 - q) * R) / (1 - q), 1e-12 * std::abs(T));
    }
  }
  EXPECT_EQ(tsallis_asymptotic(kFig, 1.0).value, vn_asymptotic(kFig).value);
}

TEST(TsallisAsymptotic, LinearAtCriticalQ) {
  const auto at = [](double L) { return tsallis_asymptotic(input({0.25, 0.25, 0.25, 0.25}, L, 0.0), 1.0 / 3).value; };
  const double slope = (at(2e6) - at(1e6)) / 1e6;
  EXPECT_NEAR(slope, at(1e6) / 1e6, 1e-5);
  EXPECT_NEAR(at(1e6) / 1e6, 7.7128, 1e-3);
}

TEST(TsallisExtensiveLimit, Examples) {
  const auto u = input({0.25, 0.25, 0.25, 0.25}, 1e3, 0.0);
  EXPECT_NEAR(tsallis_extensive_limit(u), kPi * 3 * std::pow(0.25, 4.0 / 3) * std::pow(3.0, 1.5), 1e-13);
  EXPECT_NEAR(tsallis_extensive_limit(u), 7.7127, 1e-4);
  EXPECT_NEAR(tsallis_extensive_limit(input({0.25, 0.25, 0.25, 0.25}, 1e3, 1 - 1e-12)), 0.0, 1e-10);
  try {
    tsallis_extensive_limit(kFig);
    FAIL() << "expected refusal";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("Tsallis not extensive for any q"), std::string::npos);
  }
  EXPECT_THROW(tsallis_extensive_limit(input({0.5, 0.5}, 1e3, 0.0)), std::domain_error);
}

TEST(UpperBound, Examples) {
  EXPECT_NEAR(entropy_upper_bound(3, 2), std::log(10.0), 1e-14);
  for (int L = 0; L < 50; ++L) EXPECT_NEAR(entropy_upper_bound(L, 1), std::log(L + 1.0), 1e-13);
}

TEST(Convergence, HalfFillingRelativeError) {
  std::vector<double> err;
  for (int L : {50, 100, 200, 400, 800}) {
    const double exact = exact_entropies({2 * L, L, {L, L}}, {}, 1).von_neumann;
    const double asym = vn_asymptotic(input({0.5, 0.5}, L, 0.5)).value;
    err.push_back(std::abs(asym - exact) / exact);
    EXPECT_LE(err.back() * L, 2.0) << L;
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_LT(err[i], err[i - 1]);
}

TEST(AsymptoticSlope, QIndependent) {
  for (const auto& n : {std::vector<double>{0.5, 0.5}, std::vector<double>{0.4, 0.4, 0.2},
                        std::vector<double>{0.1, 0.2, 0.3, 0.4}}) {
    const double m = n.size() - 1.0;
    for (double q : {0.5, 1.0, 2.0, 5.0}) {
      const double slope =
          (renyi_asymptotic(input(n, 1e6, 0.3), q).value - renyi_asymptotic(input(n, 1e3, 0.3), q).value) /
          std::log(1e3);
      EXPECT_NEAR(slope, m / 2, 1e-12);
    }
  }
}

TEST(ReduceDensities, DropsZeros) {
  const auto r = reduce_densities({0.5, 0.0, 0.5}, 100, 0.0);
  EXPECT_EQ(r.m_eff, 1);
  EXPECT_EQ(r.densities.size(), 2u);
  const auto v = reduce_densities({0.0, 1.0, 0.0}, 100, 0.0);
  EXPECT_EQ(v.m_eff, 0);
  EXPECT_EQ(vn_asymptotic(v).value, 0.0);
  EXPECT_THROW(reduce_densities({0.5, 0.5}, 100, 1.0), std::invalid_argument);
  EXPECT_THROW(reduce_densities({0.5, 0.6}, 100, 0.0), std::invalid_argument);
}

TEST(ZeroEntropyDistance, Examples) {
  const FaceDescriptor last{2, {1.0, 0.0}};
  const double r = zero_entropy_distance(last, 100, 0.0, EntropyKind::von_neumann);
  EXPECT_NEAR(r, 2 / (2 * kPi * kE * 100), 1e-18);
  EXPECT_NEAR(r, 1.1710e-3, 1e-7);
  // Root-find along the inward normal.
  EXPECT_NEAR(oracle::zero_entropy_root({1.0}, 2, 100, 0.0) / r, 1.0, 0.05);

  const FaceDescriptor f{1, {0.0, 0.5, 0.5}};
  const double r1 = zero_entropy_distance(f, 1000, 0.2, EntropyKind::von_neumann);
  const double r2 = zero_entropy_distance(f, 2000, 0.2, EntropyKind::von_neumann);
  EXPECT_NEAR(r2 / r1, 0.25, 1e-12);

  const double ren_hi = zero_entropy_distance(f, 1000, 0.2, EntropyKind::renyi, 3.0);
  const double ren_lo = zero_entropy_distance(f, 1000, 0.2, EntropyKind::renyi, 0.5);
  EXPECT_GT(ren_hi, r1);
  EXPECT_LT(ren_lo, r1);
}

TEST(ZeroEntropyDistance, RejectsLowerFaces) {
  EXPECT_THROW(zero_entropy_distance({1, {0.0, 0.0, 1.0}}, 1000, 0.0, EntropyKind::von_neumann), std::invalid_argument);
  EXPECT_THROW(zero_entropy_distance({1, {0.2, 0.4, 0.4}}, 1000, 0.0, EntropyKind::von_neumann), std::invalid_argument);
}

TEST(ZeroEntropyDistance, LowerFaceScaling) {
  // At a vertex of the su(3) simplex (k = 2) the zero-entropy distance scales as L^{-m/k} = L^{-1}.
  for (int a : {1, 2, 3}) {
    std::vector<double> vertex = {0.0, 0.0};
    if (a <= 2) vertex[a - 1] = 1.0;
    else vertex = {-1.0, -1.0};
    // Move toward the centroid from the vertex.
    auto root = [&](double L) {
      std::vector<double> dir = {-vertex[0], -vertex[1]};
      const double norm = std::hypot(dir[0], dir[1]);
      double lo = -60, hi = std::log(0.1);
      auto S = [&](double r) {
        const auto n = oracle::field_densities({vertex[0] + r * dir[0] / norm, vertex[1] + r * dir[1] / norm});
        return 1.0 + std::log(2 * kPi * L) + 0.5 * (std::log(n[0]) + std::log(n[1]) + std::log(n[2]));
      };
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (S(std::exp(mid)) < 0 ? lo : hi) = mid;
      }
      return std::exp(lo);
    };
    EXPECT_NEAR(root(2e4) / root(1e4), 0.5, 1e-3);
  }
}
