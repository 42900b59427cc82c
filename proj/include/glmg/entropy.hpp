#pragma once

#include <vector>

#include "glmg/rdm.hpp"

namespace glmg::entropy {

/// |q - 1| below this falls back to the von Neumann entropy.
inline constexpr double kUnitQThreshold = 1e-8;

enum class EntropyFlag { ok, negative_asymptotic };

struct EntropyValue {
  double value = 0.0;
  EntropyFlag flag = EntropyFlag::ok;
};

/// Input of the large-L formulas, restricted to the nonvanishing densities.
struct AsymptoticInput {
  int m_eff = 1;                  // number of nonvanishing densities minus one
  std::vector<double> densities;  // m_eff + 1 values in (0,1), summing to 1
  double L = 1.0;
  double alpha = 0.0;

  void validate() const;
  /// ln(L (1 - alpha) prod n_a^{1/m_eff}), evaluated without forming the product.
  double log_scale() const;
};

/// Drops zero densities. Returns m_eff = 0 (unentangled) when a single density remains.
AsymptoticInput reduce_densities(const std::vector<double>& densities, double L, double alpha);

// Exact entropies of an enumerated spectrum (natural log units).
double entropy_exact(const rdm::RdmSpectrum& spectrum);
double renyi_exact(const rdm::RdmSpectrum& spectrum, double q);
double tsallis_exact(const rdm::RdmSpectrum& spectrum, double q);
/// sum lambda^q with compensated summation.
double trace_power_exact(const rdm::RdmSpectrum& spectrum, double q);

/// Streaming reduction over a block's spectrum; never stores the support.
struct ExactEntropies {
  double trace = 0.0;  // sum lambda
  double von_neumann = 0.0;
  std::vector<double> q;
  std::vector<double> trace_power;  // sum lambda^q
  std::vector<double> renyi;
  std::vector<double> tsallis;
};

/// Splits the L_1 range into fixed chunks shared by `threads` workers; chunk sums
/// are combined in order, so output does not depend on the thread count.
ExactEntropies exact_entropies(const rdm::BlockSpec& block, const std::vector<double>& qs, int threads = 0);

// Large-L closed forms.
double trace_power_asymptotic(const AsymptoticInput& inp, double q);
EntropyValue vn_asymptotic(const AsymptoticInput& inp);
EntropyValue renyi_asymptotic(const AsymptoticInput& inp, double q);
EntropyValue tsallis_asymptotic(const AsymptoticInput& inp, double q);

/// lim T_q / L at q = 1 - 2/m_eff. Only defined for m_eff >= 3.
double tsallis_extensive_limit(const AsymptoticInput& inp);

/// ln C(L + m, m): the dimension bound on the block's symmetric subspace.
double entropy_upper_bound(int L, int m);

struct FaceDescriptor {
  int vanishing = 1;                 // 1-based index a with n_a = 0
  std::vector<double> face_densities;  // all m+1 densities at the face point; entry a must be 0
};

enum class EntropyKind { von_neumann, renyi };

/// Distance from a point inside an (m-1)-face of the weight simplex to the
/// zero-entropy hypersurface of the large-L formula.
double zero_entropy_distance(const FaceDescriptor& face, double L, double alpha, EntropyKind kind,
                             double q = 2.0);

/// Worker count from GLMG_THREADS, else hardware concurrency (at least 1).
int default_thread_count();

}  // namespace glmg::entropy
