#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "glmg/compensated_sum.hpp"
#include "glmg/errors.hpp"
#include "glmg/rdm.hpp"
#include "oracles.hpp"

using namespace glmg::rdm;

namespace {

double lambda_at(const BlockSpec& b, std::vector<int> idx) { return rdm_eigenvalue(b, idx); }

}  // namespace

TEST(LogBinomial, Examples) {
  EXPECT_NEAR(log_binomial(4, 2), std::log(6.0), 1e-15);
  EXPECT_EQ(log_binomial(7, 0), 0.0);
  EXPECT_EQ(log_binomial(2, 3), -std::numeric_limits<double>::infinity());
  EXPECT_EQ(log_binomial(2, -1), -std::numeric_limits<double>::infinity());
}

TEST(LogBinomial, AgreesWithExactIntegers) {
  for (int n = 0; n <= 60; ++n) {
    for (int k = 0; k <= n; ++k) {
      const double exact = std::log(static_cast<long double>(oracle::binomial(n, k)));
      const double got = log_binomial(n, k);
      EXPECT_NEAR(got, exact, 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(exact)))
          << n << " " << k;
    }
  }
}

TEST(RdmEigenvalue, Examples) {
  const BlockSpec b1{4, 2, {2, 2}};
  EXPECT_NEAR(lambda_at(b1, {1}), 4.0 / 6.0, 1e-15);
  const BlockSpec b2{6, 3, {2, 2, 2}};
  EXPECT_NEAR(lambda_at(b2, {1, 1}), 0.4, 1e-15);
  const BlockSpec whole{6, 6, {1, 2, 3}};
  EXPECT_NEAR(lambda_at(whole, {1, 2}), 1.0, 1e-15);
  EXPECT_EQ(lambda_at(b2, {3, 0}), 0.0);
  EXPECT_EQ(lambda_at(b2, {0, 0}), 0.0);  // L_3 = 3 > N_3
}

TEST(RdmEigenvalue, LogSpaceMatchesExactRationals) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 3000; ++trial) {
    const int N = std::uniform_int_distribution<int>(1, 60)(rng);
    const int m = std::uniform_int_distribution<int>(1, 3)(rng);
    std::vector<int> magnons(static_cast<std::size_t>(m) + 1, 0);
    for (int i = 0; i < N; ++i) ++magnons[std::uniform_int_distribution<int>(0, m)(rng)];
    const int L = std::uniform_int_distribution<int>(0, N)(rng);
    const BlockSpec b{N, L, magnons};
    const auto pts = oracle::support(N, L, magnons);
    const auto& idx = pts[std::uniform_int_distribution<std::size_t>(0, pts.size() - 1)(rng)];
    const long double exact = oracle::exact_lambda(N, L, magnons, idx);
    const double got = rdm_eigenvalue(b, idx);
    EXPECT_LE(std::abs(got - exact) / exact, 1e-12) << N << " " << L;
  }
}

TEST(RdmSpectrum, Examples) {
  const auto s = rdm_spectrum({6, 3, {2, 2, 2}});
  ASSERT_EQ(s.size(), 7u);
  int tenths = 0, big = 0;
  for (double v : s.values) {
    if (std::abs(v - 0.1) < 1e-15) ++tenths;
    if (std::abs(v - 0.4) < 1e-15) ++big;
  }
  EXPECT_EQ(tenths, 6);
  EXPECT_EQ(big, 1);

  const auto s2 = rdm_spectrum({4, 2, {2, 2}});
  ASSERT_EQ(s2.size(), 3u);
  EXPECT_NEAR(s2.values[0], 1.0 / 6, 1e-15);
  EXPECT_NEAR(s2.values[1], 4.0 / 6, 1e-15);
  EXPECT_NEAR(s2.values[2], 1.0 / 6, 1e-15);

  const auto s0 = rdm_spectrum({5, 0, {2, 3}});
  ASSERT_EQ(s0.size(), 1u);
  EXPECT_EQ(s0.values[0], 1.0);
  EXPECT_EQ(s0.index(0)[0], 0);
}

TEST(RdmSpectrum, SupportMatchesOracleAndIsLexicographic) {
  for (int N = 1; N <= 14; ++N) {
    oracle::compositions(N, 3, [&](const std::vector<int>& mag) {
      for (int L = 0; L <= N; ++L) {
        const BlockSpec b{N, L, mag};
        const auto s = rdm_spectrum(b);
        const auto pts = oracle::support(N, L, mag);
        ASSERT_EQ(s.size(), pts.size());
        ASSERT_EQ(support_size(b), pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const auto idx = s.index(i);
          ASSERT_TRUE(std::equal(idx.begin(), idx.end(), pts[i].begin()));
          ASSERT_GT(s.values[i], 0.0);
        }
      }
    });
  }
}

TEST(RdmSpectrum, SupportSizeAcrossComponentCounts) {
  for (int parts : {2, 4, 5, 6}) {
    for (int N = 1; N <= 9; ++N) {
      oracle::compositions(N, parts, [&](const std::vector<int>& mag) {
        for (int L = 0; L <= N; ++L) ASSERT_EQ(support_size({N, L, mag}), oracle::support(N, L, mag).size());
      });
    }
  }
  // Large L takes the recursive count.
  const BlockSpec big{90, 70, {30, 25, 35}};
  EXPECT_EQ(support_size(big), oracle::support(90, 70, {30, 25, 35}).size());
}

TEST(RdmSpectrum, WideBlocksKeepOrderAndValues) {
  // m = 4 and N > 66 go through the general fill.
  for (const BlockSpec& b : {BlockSpec{11, 6, {2, 3, 1, 4, 1}}, BlockSpec{80, 33, {30, 20, 30}}}) {
    const auto s = rdm_spectrum(b);
    const auto pts = oracle::support(b.N, b.L, b.magnons);
    ASSERT_EQ(s.size(), pts.size());
    glmg::CompensatedSum<long double> total;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto idx = s.index(i);
      ASSERT_TRUE(std::equal(idx.begin(), idx.end(), pts[i].begin()));
      EXPECT_NEAR(s.values[i], lambda_at(b, pts[i]), 4e-16 * lambda_at(b, pts[i]) + 1e-300);
      total += s.values[i];
    }
    EXPECT_NEAR(static_cast<double>(total.value()), 1.0, 1e-14);
  }
}

TEST(RdmSpectrum, SupportCap) {
  EXPECT_THROW(rdm_spectrum({40, 20, {10, 10, 10, 10}}, 100), glmg::ResourceLimitError);
}

TEST(RdmSpectrum, RejectsInvalidBlocks) {
  EXPECT_THROW(rdm_spectrum({4, 5, {2, 2}}), std::invalid_argument);
  EXPECT_THROW(rdm_spectrum({4, 2, {2, 1}}), std::invalid_argument);
  EXPECT_THROW(rdm_spectrum({4, 2, {4}}), std::invalid_argument);
  EXPECT_THROW(rdm_spectrum({4, 2, {5, -1}}), std::invalid_argument);
}

TEST(SchmidtCoefficients, Examples) {
  const auto b = schmidt_coefficients({4, 2, {2, 2}});
  EXPECT_NEAR(b.values[0], std::sqrt(1.0 / 6), 1e-15);
  EXPECT_NEAR(b.values[1], std::sqrt(2.0 / 3), 1e-15);
  EXPECT_NEAR(b.values[2], std::sqrt(1.0 / 6), 1e-15);
  EXPECT_EQ(schmidt_coefficients({3, 0, {1, 2}}).values, std::vector<double>{1.0});
  const auto c = schmidt_coefficients({20, 9, {5, 7, 8}});
  double s = 0.0;
  for (double v : c.values) s += v * v;
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Moments, Examples) {
  const auto a = moments_closed_form({10, 5, {4, 6}});
  EXPECT_NEAR(a.means[0], 2.0, 1e-14);
  EXPECT_NEAR(a.cov(0, 0), 2.0 / 3.0, 1e-14);
  const auto b = moments_closed_form({6, 3, {2, 2, 2}});
  EXPECT_NEAR(b.cov(0, 1), -0.2, 1e-14);
  const auto bf = moments_brute_force(rdm_spectrum({6, 3, {2, 2, 2}}));
  EXPECT_NEAR(bf.cov(0, 1), -0.2, 1e-14);
  const auto full = moments_closed_form({7, 7, {3, 4}});
  EXPECT_EQ(full.cov(0, 0), 0.0);
  const auto empty = moments_brute_force(rdm_spectrum({7, 0, {3, 4}}));
  EXPECT_EQ(empty.means[0], 0.0);
  EXPECT_EQ(empty.cov(0, 0), 0.0);
  EXPECT_THROW(moments_closed_form({1, 1, {1, 0}}), std::invalid_argument);
}

TEST(Moments, ClosedFormMatchesBruteForce) {
  for (int N = 2; N <= 16; ++N) {
    oracle::compositions(N, 3, [&](const std::vector<int>& mag) {
      for (int L = 0; L <= N; ++L) {
        const BlockSpec b{N, L, mag};
        const auto cf = moments_closed_form(b);
        const auto bf = moments_brute_force(rdm_spectrum(b));
        for (int i = 0; i < 2; ++i) {
          ASSERT_NEAR(cf.means[i], bf.means[i], 1e-12);
          for (int j = 0; j < 2; ++j) ASSERT_NEAR(cf.cov(i, j), bf.cov(i, j), 1e-12);
        }
        EXPECT_EQ(cf.cov(0, 1), cf.cov(1, 0));
        EXPECT_GE(cf.cov(0, 0), 0.0);
      }
    });
  }
}

TEST(Moments, ClosedFormMatchesBruteForceWideBlocks) {
  for (const BlockSpec& b : {BlockSpec{12, 5, {2, 3, 1, 4, 2}}, BlockSpec{9, 4, {1, 2, 3, 3}}, BlockSpec{14, 9, {14, 0}},
                             BlockSpec{70, 31, {20, 25, 25}}}) {
    const auto cf = moments_closed_form(b);
    const auto bf = moments_brute_force(rdm_spectrum(b));
    for (int i = 0; i < b.m(); ++i) {
      EXPECT_NEAR(cf.means[i], bf.means[i], 1e-12);
      for (int j = 0; j < b.m(); ++j) EXPECT_NEAR(cf.cov(i, j), bf.cov(i, j), 1e-12);
    }
  }
}

TEST(Moments, AsymptoticCovariance) {
  const int N = 10000;
  const int L = 3000;
  const double alpha = static_cast<double>(L) / N;
  const std::vector<int> mag = {2000, 3000, 5000};
  const auto mo = moments_closed_form({N, L, mag});
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double ni = mag[i] / static_cast<double>(N);
      const double nj = mag[j] / static_cast<double>(N);
      const double asym = L * (1 - alpha) * ni * ((i == j) - nj);
      EXPECT_LE(std::abs(mo.cov(i, j) - asym) / std::abs(mo.cov(i, j)), 2.0 / N);
    }
  }
}

TEST(Normalization, TraceAndDualityFromStreaming) {
  for (int N = 1; N <= 20; ++N) {
    oracle::compositions(N, 3, [&](const std::vector<int>& mag) {
      std::vector<long double> tr2(static_cast<std::size_t>(N) + 1);
      for (int L = 0; L <= N; ++L) {
        glmg::CompensatedSum<long double> s, s2;
        for_each_eigenvalue({N, L, mag}, [&](std::span<const int>, long double lg) {
          s += std::exp(lg);
          s2 += std::exp(2 * lg);
        });
        ASSERT_NEAR(static_cast<double>(s.value()), 1.0, 1e-12);
        tr2[L] = s2.value();
      }
      for (int L = 0; L <= N; ++L) ASSERT_NEAR(static_cast<double>(tr2[L] - tr2[N - L]), 0.0, 1e-12);
    });
  }
}

TEST(Export, SpectrumCsv) {
  std::ostringstream os;
  write_spectrum_csv(os, rdm_spectrum({6, 3, {2, 2, 2}}));
  const std::string text = os.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "L1,L2,lambda");
  EXPECT_NE(text.find("1,1,0.40000000000000002"), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 8);
}
