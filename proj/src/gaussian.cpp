#include "glmg/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "glmg/rdm.hpp"

namespace glmg::gaussian {

namespace {

void require_nondegenerate(const model::MagnonDensities& densities, double L, double alpha) {
  densities.validate();
  for (double n : densities.values) {
    if (!(n > 0.0 && n < 1.0))
      throw std::domain_error("gaussian: every density must lie in (0,1); drop vanishing components first");
  }
  if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("gaussian: alpha must lie in [0,1)");
  if (!(L > 0.0)) throw std::invalid_argument("gaussian: L must be > 0");
}

}  // namespace

double gaussian_eigenvalue_approx(const model::MagnonDensities& densities, double L, double alpha,
                                  std::span<const double> index) {
  require_nondegenerate(densities, L, alpha);
  const int m = densities.m();
  if (static_cast<int>(index.size()) != m) throw std::invalid_argument("gaussian: index must have m components");
  const auto& n = densities.values;
  const double width = L * (1.0 - alpha);
  double energy = 0.0;
  double sum_x = 0.0;
  double log_norm = -0.5 * m * std::log(2.0 * std::numbers::pi * width);
  for (int b = 0; b < m; ++b) {
    const double x = index[b] - L * n[b];
    energy += x * x / n[b];
    sum_x += x;
  }
  energy += sum_x * sum_x / n[m];
  for (double v : n) log_norm -= 0.5 * std::log(v);
  return std::exp(log_norm - energy / (2.0 * width));
}

Eigen::MatrixXd closed_form_covariance(const model::MagnonDensities& densities, double L, double alpha) {
  require_nondegenerate(densities, L, alpha);
  const int m = densities.m();
  const auto& n = densities.values;
  const double width = L * (1.0 - alpha);
  Eigen::MatrixXd cov(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) cov(i, j) = width * n[i] * ((i == j ? 1.0 : 0.0) - n[j]);
  return cov;
}

GaussianModel covariance_matrix(const model::MagnonDensities& densities, double L, double alpha) {
  require_nondegenerate(densities, L, alpha);
  const int m = densities.m();
  const auto& n = densities.values;
  const double width = L * (1.0 - alpha);

  GaussianModel g;
  g.means.resize(m);
  g.coefficient_matrix.resize(m, m);
  for (int i = 0; i < m; ++i) {
    g.means(i) = L * n[i];
    for (int j = 0; j < m; ++j) g.coefficient_matrix(i, j) = ((i == j ? 1.0 / n[i] : 0.0) + 1.0 / n[m]) / width;
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(g.coefficient_matrix);
  if (llt.info() != Eigen::Success) throw std::domain_error("gaussian: coefficient matrix is not positive definite");
  g.covariance = llt.solve(Eigen::MatrixXd::Identity(m, m));
  const Eigen::MatrixXd chol = llt.matrixL();
  double log_det = 0.0;
  for (int i = 0; i < m; ++i) log_det += 2.0 * std::log(chol(i, i));
  g.normalizer = std::exp(0.5 * log_det - 0.5 * m * std::log(2.0 * std::numbers::pi));

  const Eigen::MatrixXd expected = closed_form_covariance(densities, L, alpha);
  const double scale = expected.cwiseAbs().maxCoeff();
  if ((g.covariance - expected).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw std::logic_error("gaussian: inverse coefficient matrix disagrees with the closed-form covariance");
  }
  return g;
}

double hypergeometric_gaussian_approx(int total, int drawn, int successes, double l) {
  if (total < 1 || drawn < 0 || drawn > total || successes < 0 || successes > total)
    throw std::invalid_argument("hypergeometric_gaussian_approx: needs 0 <= n, L_t <= N_t");
  const double a = static_cast<double>(drawn) / total;
  const double nu = static_cast<double>(successes) / total;
  if (a <= 0.0 || a >= 1.0 || nu <= 0.0 || nu >= 1.0)
    throw std::domain_error("hypergeometric_gaussian_approx: zero variance (block fraction or density is 0 or 1)");
  const double mu = total * a * nu;
  const double var = total * a * (1.0 - a) * nu * (1.0 - nu);
  const double d = l - mu;
  return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

double hypergeometric_pmf(int total, int drawn, int successes, int l) {
  const double lp = rdm::log_binomial(drawn, l) + rdm::log_binomial(total - drawn, successes - l) -
                    rdm::log_binomial(total, successes);
  return std::isinf(lp) ? 0.0 : std::exp(lp);
}

}  // namespace glmg::gaussian
