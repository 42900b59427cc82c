#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "glmg/model.hpp"

namespace glmg::diag {

inline constexpr std::size_t kDenseDimensionCap = 4096;
inline constexpr std::size_t kSectorDimensionCap = 20000;
inline constexpr double kDegeneracyTolerance = 1e-10;

using SectorLabel = std::vector<int>;  // (N_1, ..., N_{m+1})

struct SectorSpectrum {
  std::map<SectorLabel, std::vector<double>> sectors;  // sorted energies per sector
  double ground_energy = 0.0;
  int ground_degeneracy = 0;
  SectorLabel ground_sector;
};

struct GroundStateReport {
  bool is_dicke = false;
  double overlap = 0.0;  // |<Dicke|GS>|
  double gap = 0.0;      // E_1 - E_0
  int degeneracy = 1;
  double ground_energy = 0.0;
  SectorLabel predicted_magnons;
  SectorLabel ground_sector;  // magnon content of the computed ground state
};

/// (m+1)^N, or throws ResourceLimitError above the dense cap.
std::size_t dense_dimension(int m, int n_sites);

/// Canonical product basis, site 1 as the most significant base-(m+1) digit.
/// Internal state s in {0..m} is level s+1; level m+1 is the reference state of J^a.
Eigen::MatrixXd build_hamiltonian(const model::ModelSpec& spec, int n_sites);

/// Diagonal of the total Cartan generator J^a (a is 1-based).
Eigen::VectorXd cartan_diagonal(int m, int n_sites, int a);

/// Diagonalizes H_0 on each fixed-magnon-number subspace and adds the field term.
SectorSpectrum sector_spectrum(const model::ModelSpec& spec, int n_sites);

/// All eigenvalues of the dense matrix, ascending.
std::vector<double> dense_spectrum(const model::ModelSpec& spec, int n_sites);

/// Normalized Dicke state with the given magnon numbers in the product basis.
Eigen::VectorXd dicke_state(int m, int n_sites, const SectorLabel& magnons);

/// Predicted magnon numbers: field densities (projected if exterior), rounded to N.
SectorLabel predicted_magnons(const model::ModelSpec& spec, int n_sites);

GroundStateReport ground_state_verify(const model::ModelSpec& spec, int n_sites);

/// Isotropic su(2) LMG level E(S, M) = -(2/N)(S(S+1) - M^2 - N/2) - 2 h M.
/// S and M are passed doubled (2S, 2M) so half-integers stay exact.
double lmg_su2_energy(int n_sites, double h, int two_s, int two_m);

/// Degeneracy of E(S, M): C(N, N/2+S) - C(N, N/2+S+1).
std::uint64_t lmg_su2_degeneracy(int n_sites, int two_s);

/// Full closed-form spectrum, ascending, with multiplicities expanded.
std::vector<double> lmg_su2_spectrum(int n_sites, double h);

/// Sector labels, sorted energies and, when available, the ground-state report.
nlohmann::json spectrum_to_json(const SectorSpectrum& spectrum, const std::optional<GroundStateReport>& report);

}  // namespace glmg::diag
