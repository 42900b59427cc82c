#include "glmg/diag.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "glmg/errors.hpp"
#include "glmg/phase.hpp"
#include "glmg/rdm.hpp"

namespace glmg::diag {

namespace {

double field_term(const model::ModelSpec& spec, int n_sites, const SectorLabel& magnons) {
  const int m = spec.m;
  double e = 0.0;
  for (int a = 0; a < m; ++a) {
    const double d = magnons[a] - magnons[m] - n_sites * spec.field[a];
    e += spec.cartan_couplings[a] * d * d;
  }
  return e;
}

std::vector<std::size_t> place_values(int base, int n_sites) {
  std::vector<std::size_t> p(static_cast<std::size_t>(n_sites));
  std::size_t v = 1;
  for (int i = n_sites - 1; i >= 0; --i) {
    p[i] = v;
    v *= static_cast<std::size_t>(base);
  }
  return p;
}

std::vector<int> digits_of(std::size_t idx, int base, int n_sites) {
  std::vector<int> d(static_cast<std::size_t>(n_sites));
  for (int i = n_sites - 1; i >= 0; --i) {
    d[i] = static_cast<int>(idx % static_cast<std::size_t>(base));
    idx /= static_cast<std::size_t>(base);
  }
  return d;
}

SectorLabel magnon_content(const std::vector<int>& digits, int m) {
  SectorLabel counts(static_cast<std::size_t>(m) + 1, 0);
  for (int d : digits) ++counts[d];
  return counts;
}

void for_each_composition(int total, int parts, const std::function<void(const SectorLabel&)>& visit) {
  SectorLabel c(static_cast<std::size_t>(parts), 0);
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == parts - 1) {
      c[i] = left;
      visit(c);
      return;
    }
    for (int v = left; v >= 0; --v) {
      c[i] = v;
      self(self, i + 1, left - v);
    }
  };
  rec(rec, 0, total);
}

// Multinomial N! / prod N_a!, saturating above the cap.
std::size_t sector_dimension(const SectorLabel& magnons) {
  int n = 0;
  double log_dim = 0.0;
  for (int k : magnons) {
    n += k;
    log_dim -= std::lgamma(k + 1.0);
  }
  log_dim += std::lgamma(n + 1.0);
  if (log_dim > std::log(1e15)) return static_cast<std::size_t>(1e15);
  return static_cast<std::size_t>(std::llround(std::exp(log_dim)));
}

}  // namespace

std::size_t dense_dimension(int m, int n_sites) {
  if (m < 1 || n_sites < 1) throw std::invalid_argument("diag: needs m >= 1 and N >= 1");
  std::size_t dim = 1;
  for (int i = 0; i < n_sites; ++i) {
    dim *= static_cast<std::size_t>(m) + 1;
    if (dim > kDenseDimensionCap) {
      throw ResourceLimitError("diag: dense dimension (m+1)^N = " + std::to_string(m + 1) + "^" +
                               std::to_string(n_sites) + " exceeds " + std::to_string(kDenseDimensionCap) +
                               "; use the sector method");
    }
  }
  return dim;
}

Eigen::VectorXd cartan_diagonal(int m, int n_sites, int a) {
  if (a < 1 || a > m) throw std::invalid_argument("cartan_diagonal: index a must lie in [1, m]");
  const std::size_t dim = dense_dimension(m, n_sites);
  Eigen::VectorXd diag(static_cast<Eigen::Index>(dim));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const auto counts = magnon_content(digits_of(idx, m + 1, n_sites), m);
    diag(static_cast<Eigen::Index>(idx)) = counts[a - 1] - counts[m];
  }
  return diag;
}

Eigen::MatrixXd build_hamiltonian(const model::ModelSpec& spec, int n_sites) {
  spec.validate(n_sites);
  const int m = spec.m;
  const std::size_t dim = dense_dimension(m, n_sites);
  const auto hij = model::coupling_matrix(spec, n_sites);
  const auto place = place_values(m + 1, n_sites);
  const auto ns = static_cast<std::size_t>(n_sites);

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    const auto d = digits_of(idx, m + 1, n_sites);
    const auto col = static_cast<Eigen::Index>(idx);
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t j = i + 1; j < ns; ++j) {
        const double h = hij[i * ns + j];
        if (h == 0.0 || d[i] == d[j]) continue;
        // S_ij swaps the internal states of sites i and j.
        const std::size_t swapped = idx + static_cast<std::size_t>(d[j]) * place[i] +
                                    static_cast<std::size_t>(d[i]) * place[j] -
                                    static_cast<std::size_t>(d[i]) * place[i] -
                                    static_cast<std::size_t>(d[j]) * place[j];
        H(col, col) += h;
        H(static_cast<Eigen::Index>(swapped), col) -= h;
      }
    }
    H(col, col) += field_term(spec, n_sites, magnon_content(d, m));
  }
  return H;
}

std::vector<double> dense_spectrum(const model::ModelSpec& spec, int n_sites) {
  const Eigen::MatrixXd H = build_hamiltonian(spec, n_sites);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("diag: eigensolver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

SectorSpectrum sector_spectrum(const model::ModelSpec& spec, int n_sites) {
  spec.validate(n_sites);
  const int m = spec.m;
  const auto hij = model::coupling_matrix(spec, n_sites);
  const auto ns = static_cast<std::size_t>(n_sites);

  // Reject before doing any work if some sector is too large.
  for_each_composition(n_sites, m + 1, [&](const SectorLabel& magnons) {
    if (sector_dimension(magnons) > kSectorDimensionCap) {
      throw ResourceLimitError("diag: sector dimension exceeds " + std::to_string(kSectorDimensionCap));
    }
  });

  SectorSpectrum out;
  for_each_composition(n_sites, m + 1, [&](const SectorLabel& magnons) {
    std::string state;
    for (int a = 0; a <= m; ++a) state.append(static_cast<std::size_t>(magnons[a]), static_cast<char>(a));
    std::vector<std::string> basis;
    do {
      basis.push_back(state);
    } while (std::next_permutation(state.begin(), state.end()));
    std::unordered_map<std::string, Eigen::Index> lookup;
    for (std::size_t i = 0; i < basis.size(); ++i) lookup.emplace(basis[i], static_cast<Eigen::Index>(i));

    const auto dim = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd H0 = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
      const std::string& s = basis[static_cast<std::size_t>(col)];
      for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = i + 1; j < ns; ++j) {
          const double h = hij[i * ns + j];
          if (h == 0.0 || s[i] == s[j]) continue;
          std::string t = s;
          std::swap(t[i], t[j]);
          H0(col, col) += h;
          H0(lookup.at(t), col) -= h;
        }
      }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H0, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("diag: sector eigensolver failed");
    const double shift = field_term(spec, n_sites, magnons);
    std::vector<double> energies(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) energies[static_cast<std::size_t>(i)] = solver.eigenvalues()(i) + shift;
    std::sort(energies.begin(), energies.end());
    out.sectors.emplace(magnons, std::move(energies));
  });

  bool first = true;
  for (const auto& [label, energies] : out.sectors) {
    if (first || energies.front() < out.ground_energy) {
      out.ground_energy = energies.front();
      out.ground_sector = label;
      first = false;
    }
  }
  const double tol = kDegeneracyTolerance * std::max(1.0, std::abs(out.ground_energy));
  for (const auto& [label, energies] : out.sectors)
    for (double e : energies)
      if (e - out.ground_energy <= tol) ++out.ground_degeneracy;
  return out;
}

Eigen::VectorXd dicke_state(int m, int n_sites, const SectorLabel& magnons) {
  if (magnons.size() != static_cast<std::size_t>(m) + 1 ||
      std::accumulate(magnons.begin(), magnons.end(), 0) != n_sites)
    throw std::invalid_argument("dicke_state: magnon numbers must have m+1 entries summing to N");
  const std::size_t dim = dense_dimension(m, n_sites);
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t idx = 0; idx < dim; ++idx) {
    if (magnon_content(digits_of(idx, m + 1, n_sites), m) == magnons) psi(static_cast<Eigen::Index>(idx)) = 1.0;
  }
  return psi.normalized();
}

SectorLabel predicted_magnons(const model::ModelSpec& spec, int n_sites) {
  spec.validate(n_sites);
  const auto loc = model::locate_field(spec.m, spec.field);
  model::MagnonDensities n;
  if (loc.classification == model::FieldClass::exterior) {
    n = phase::project_to_simplex(spec.m, spec.cartan_couplings, spec.field).densities;
  } else {
    n = model::densities_from_field(spec.m, spec.field);
  }
  return model::finite_magnon_numbers(n, n_sites).counts;
}

GroundStateReport ground_state_verify(const model::ModelSpec& spec, int n_sites) {
  const int m = spec.m;
  const Eigen::MatrixXd H = build_hamiltonian(spec, n_sites);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success) throw std::runtime_error("diag: eigensolver failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();

  GroundStateReport report;
  report.ground_energy = ev(0);
  report.gap = ev.size() > 1 ? ev(1) - ev(0) : 0.0;
  const double tol = kDegeneracyTolerance * std::max(1.0, std::abs(ev(0)));
  report.degeneracy = 0;
  for (Eigen::Index i = 0; i < ev.size() && ev(i) - ev(0) <= tol; ++i) ++report.degeneracy;

  report.predicted_magnons = predicted_magnons(spec, n_sites);
  const Eigen::VectorXd dicke = dicke_state(m, n_sites, report.predicted_magnons);
  const Eigen::MatrixXd ground = solver.eigenvectors().leftCols(report.degeneracy);
  report.overlap = std::min(1.0, (ground.transpose() * dicke).norm());

  // Magnon content of the lowest eigenvector from <J^a>.
  const Eigen::VectorXd psi = solver.eigenvectors().col(0);
  std::vector<double> j(static_cast<std::size_t>(m));
  double j_total = 0.0;
  for (int a = 1; a <= m; ++a) {
    j[a - 1] = psi.cwiseAbs2().dot(cartan_diagonal(m, n_sites, a));
    j_total += j[a - 1];
  }
  const double last = (n_sites - j_total) / (m + 1.0);
  report.ground_sector.resize(static_cast<std::size_t>(m) + 1);
  for (int a = 0; a < m; ++a) report.ground_sector[a] = static_cast<int>(std::lround(j[a] + last));
  report.ground_sector[m] = static_cast<int>(std::lround(last));

  report.is_dicke = report.degeneracy == 1 && report.overlap >= 1.0 - 1e-9;
  return report;
}

double lmg_su2_energy(int n_sites, double h, int two_s, int two_m) {
  if (n_sites < 1) throw std::invalid_argument("lmg_su2_energy: N must be >= 1");
  if (two_s < 0 || two_s > n_sites || (two_s - n_sites) % 2 != 0)
    throw std::invalid_argument("lmg_su2_energy: S must lie in {pi(N)/2, ..., N/2}");
  if (std::abs(two_m) > two_s || (two_m - two_s) % 2 != 0)
    throw std::invalid_argument("lmg_su2_energy: M must lie in {-S, ..., S}");
  const double s = two_s / 2.0;
  const double mm = two_m / 2.0;
  const double n = n_sites;
  return -(2.0 / n) * (s * (s + 1.0) - mm * mm - n / 2.0) - 2.0 * h * mm;
}

std::uint64_t lmg_su2_degeneracy(int n_sites, int two_s) {
  const int up = (n_sites + two_s) / 2;
  const auto c = [](int n, int k) -> std::uint64_t {
    if (k < 0 || k > n) return 0;
    return static_cast<std::uint64_t>(std::llround(std::exp(rdm::log_binomial(n, k))));
  };
  return c(n_sites, up) - c(n_sites, up + 1);
}

std::vector<double> lmg_su2_spectrum(int n_sites, double h) {
  std::vector<double> out;
  for (int two_s = n_sites % 2; two_s <= n_sites; two_s += 2) {
    const auto deg = lmg_su2_degeneracy(n_sites, two_s);
    for (int two_m = -two_s; two_m <= two_s; two_m += 2) {
      out.insert(out.end(), deg, lmg_su2_energy(n_sites, h, two_s, two_m));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json spectrum_to_json(const SectorSpectrum& spectrum, const std::optional<GroundStateReport>& report) {
  nlohmann::json sectors = nlohmann::json::array();
  for (const auto& [label, energies] : spectrum.sectors) {
    sectors.push_back({{"magnons", label}, {"energies", energies}});
  }
  nlohmann::json out = {{"sectors", sectors},
                        {"ground_energy", spectrum.ground_energy},
                        {"ground_degeneracy", spectrum.ground_degeneracy},
                        {"ground_sector", spectrum.ground_sector}};
  if (report) {
    out["report"] = {{"is_dicke", report->is_dicke},
                     {"overlap", report->overlap},
                     {"gap", report->gap},
                     {"degeneracy", report->degeneracy},
                     {"ground_energy", report->ground_energy},
                     {"predicted_magnons", report->predicted_magnons},
                     {"ground_sector", report->ground_sector}};
  }
  return out;
}

}  // namespace glmg::diag
