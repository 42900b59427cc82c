#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace glmg::model {

/// Densities within this distance of 0 or 1 put a field on the simplex boundary.
inline constexpr double kBoundaryTolerance = 1e-10;

// Two-body coupling schemes for h_ij.
struct ConstantCoupling {
  double value = 1.0;
};

/// Bonds i <-> i+1. Open chains take N-1 values; periodic chains take N values,
/// the last one coupling site N back to site 1.
struct NearestNeighborCoupling {
  std::vector<double> values;
  bool periodic = false;
};

/// h_ij = (pi^2/N^2) / sin^2(pi (i-j) / N).
struct HaldaneShastryCoupling {};

/// Full symmetric N x N matrix, row-major. Diagonal entries are ignored.
struct ExplicitCoupling {
  std::vector<std::vector<double>> matrix;
};

using CouplingScheme =
    std::variant<ConstantCoupling, NearestNeighborCoupling, HaldaneShastryCoupling, ExplicitCoupling>;

/// Full definition of an su(m+1) model: H = sum_{i<j} h_ij (1 - S_ij) + sum_a c_a (J^a - N h_a)^2.
struct ModelSpec {
  int m = 1;
  std::vector<double> cartan_couplings;  // c_a, length m
  std::vector<double> field;             // h_a, length m
  CouplingScheme coupling = ConstantCoupling{};
  std::optional<int> n_sites;

  /// Throws std::invalid_argument when the spec is inconsistent. When a site
  /// count is known (argument or n_sites) the coupling graph is checked too.
  void validate(std::optional<int> sites = std::nullopt) const;
};

/// Dense symmetric N x N matrix of h_ij (row-major, zero diagonal).
std::vector<double> coupling_matrix(const ModelSpec& spec, int n_sites);

/// True when the graph with an edge for every h_ij > 0 is connected, i.e. the
/// corresponding transpositions generate the full symmetric group.
bool couplings_connected(const std::vector<double>& matrix, int n_sites);

struct MagnonDensities {
  std::vector<double> values;  // n_1 .. n_{m+1}

  int m() const { return static_cast<int>(values.size()) - 1; }
  void validate() const;
};

/// Weights mu_1..mu_{m+1} of the fundamental representation, each in R^m.
struct WeightSet {
  std::vector<std::vector<double>> vectors;
};

enum class FieldClass { interior, boundary, exterior };

struct FieldLocation {
  FieldClass classification = FieldClass::interior;
  std::vector<int> face;  // 1-based indices a with n_a = 0 (boundary only)
};

WeightSet weight_vectors(int m);

/// Densities solving n_a - n_{m+1} = h_a with sum n = 1. Rejects exterior fields.
MagnonDensities densities_from_field(int m, const std::vector<double>& h);

/// Unconstrained solution of the linear system, no range check.
std::vector<double> raw_densities(int m, const std::vector<double>& h);

FieldLocation locate_field(int m, const std::vector<double>& h);

/// x(n) = sum_a n_a mu_a, the field whose unconstrained densities are n.
std::vector<double> field_from_densities(const MagnonDensities& n);

struct FiniteMagnons {
  std::vector<int> counts;
  bool rounding_tie = false;  // the lowest-index rule had to break a tie
};

/// Largest-remainder rounding of n*N to integers summing to N.
FiniteMagnons finite_magnon_numbers(const MagnonDensities& n, int n_sites);

// Configuration file schema: {"m", "c", "h", "coupling": {"scheme", "params"}, "N"}.
ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const ModelSpec& spec);
ModelSpec load_model(const std::string& path);

std::string scheme_name(const CouplingScheme& scheme);

}  // namespace glmg::model
