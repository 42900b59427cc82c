#pragma once

#include <string>
#include <vector>

#include "glmg/entropy.hpp"
#include "glmg/model.hpp"

namespace glmg::phase {

inline constexpr int kMaxM = 20;
inline constexpr double kFeasibilityTolerance = 1e-12;
inline constexpr double kBoundaryProximity = 1e-8;

struct PhaseResult {
  model::MagnonDensities densities;
  std::vector<int> vanishing;    // 1-based indices with n_a = 0
  int k = 0;                     // |vanishing|
  std::vector<int> active_face;  // 1-based vertex indices carrying the minimizer
  double distance = 0.0;         // sqrt(sum_a c_a (x_a - h_a)^2)
  bool near_boundary = false;    // within 1e-8 of a change of active face
};

/// Minimizes sum_a c_a (x_a(n) - h_a)^2 over the density simplex, x(n) = sum_s n_s mu_s.
/// Every nonempty vertex subset is solved on its affine hull; the feasible
/// candidate with the smallest distance wins, lower-dimensional faces first on ties.
PhaseResult project_to_simplex(int m, const std::vector<double>& c, const std::vector<double>& h);

enum class Su3Label { interior, R12, R13, R23, W1, W2, W3, boundary };

struct Su3Region {
  Su3Label label = Su3Label::interior;
  /// For boundary points: "L12"/"L13"/"L23" for triangle sides, "P<a><b>" for the
  /// perpendicular through mu_a bounding strip R_ab (these belong to wedge W_a).
  std::string boundary_id;
};

std::string to_string(Su3Label label);

/// Closed-form su(3) phase diagram. Only defined for c_1 = c_2.
Su3Region su3_region(const std::vector<double>& h, const std::vector<double>& c = {1.0, 1.0});

/// Phase index k implied by a region label (interior 0, strips 1, wedges 2).
int su3_region_k(const Su3Region& region);

/// Five-branch von Neumann entropy with S0 = ln[2 pi e L (1 - alpha)].
entropy::EntropyValue su3_entropy_piecewise(const std::vector<double>& h, double L, double alpha,
                                            const std::vector<double>& c = {1.0, 1.0});

/// Large-L von Neumann entropy for the projected densities (0 when k = m).
entropy::EntropyValue phase_entropy(const PhaseResult& phase, double L, double alpha);

struct GridAxis {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;
  std::vector<double> points() const;
};

/// Parses "min:max:step"; a single number is a one-point axis.
GridAxis parse_grid_axis(const std::string& text);

struct ScanRow {
  std::vector<double> h;
  PhaseResult phase;
  entropy::EntropyValue entropy;
};

/// Row-major scan (last axis fastest). Rows are computed in parallel blocks
/// and assembled in grid order.
std::vector<ScanRow> phase_scan(const std::vector<GridAxis>& grid, double L, double alpha,
                                const std::vector<double>& c, int threads = 0);

}  // namespace glmg::phase
