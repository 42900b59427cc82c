#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "glmg/model.hpp"

namespace glmg::gaussian {

/// Normal approximation of the block spectrum: lambda ~ normalizer * exp(-x^T A x / 2).
struct GaussianModel {
  Eigen::VectorXd means;               // L n_i
  Eigen::MatrixXd coefficient_matrix;  // a_ij
  Eigen::MatrixXd covariance;          // A^{-1}, from the Cholesky factor
  double normalizer = 0.0;             // sqrt(det A) / (2 pi)^{m/2}
};

/// [2 pi L(1-alpha)]^{-m/2} prod n_a^{-1/2} exp(-E(x) / (2 L (1-alpha))),
/// E(x) = sum_b x_b^2 / n_b + (sum_b x_b)^2 / n_{m+1}, x_b = L_b - L n_b.
/// The index may be fractional (continuous extension).
double gaussian_eigenvalue_approx(const model::MagnonDensities& densities, double L, double alpha,
                                  std::span<const double> index);

/// Builds a_ij = [L(1-alpha)]^{-1} (delta_ij / n_i + 1 / n_{m+1}) and inverts it by
/// Cholesky. Throws std::logic_error if the inverse misses L(1-alpha) n_i (delta_ij - n_j)
/// by more than 1e-10 (relative to the largest entry).
GaussianModel covariance_matrix(const model::MagnonDensities& densities, double L, double alpha);

/// Closed-form covariance L(1-alpha) n_i (delta_ij - n_j).
Eigen::MatrixXd closed_form_covariance(const model::MagnonDensities& densities, double L, double alpha);

/// Laplace-de Moivre approximation g(l; mu, sigma) of the hypergeometric law
/// C(L_t, l) C(N_t - L_t, n - l) / C(N_t, n).
double hypergeometric_gaussian_approx(int total, int drawn, int successes, double l);

/// Exact hypergeometric probability, evaluated in log space.
double hypergeometric_pmf(int total, int drawn, int successes, int l);

}  // namespace glmg::gaussian
