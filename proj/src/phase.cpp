#include "glmg/phase.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <Eigen/Dense>

namespace glmg::phase {

namespace {

struct Candidate {
  unsigned mask = 0;
  int vertices = 0;
  std::vector<double> bary;  // indexed by vertex 0..m
  double distance = 0.0;
};

// Weighted least squares of h on the affine hull of the vertices in `mask`.
Candidate solve_face(const model::WeightSet& w, const std::vector<double>& c, const std::vector<double>& h,
                     unsigned mask) {
  const int m = static_cast<int>(h.size());
  std::vector<int> verts;
  for (int v = 0; v <= m; ++v)
    if (mask & (1u << v)) verts.push_back(v);

  Candidate cand;
  cand.mask = mask;
  cand.vertices = static_cast<int>(verts.size());
  cand.bary.assign(static_cast<std::size_t>(m) + 1, 0.0);

  const auto& base = w.vectors[verts[0]];
  const int p = cand.vertices - 1;
  if (p == 0) {
    cand.bary[verts[0]] = 1.0;
  } else {
    Eigen::MatrixXd D(m, p);
    Eigen::VectorXd rhs(m);
    Eigen::VectorXd weights(m);
    for (int a = 0; a < m; ++a) {
      weights(a) = c[a];
      rhs(a) = h[a] - base[a];
      for (int j = 0; j < p; ++j) D(a, j) = w.vectors[verts[j + 1]][a] - base[a];
    }
    const Eigen::MatrixXd normal = D.transpose() * weights.asDiagonal() * D;
    const Eigen::VectorXd t = normal.ldlt().solve(D.transpose() * weights.asDiagonal() * rhs);
    double rest = 1.0;
    for (int j = 0; j < p; ++j) {
      cand.bary[verts[j + 1]] = t(j);
      rest -= t(j);
    }
    cand.bary[verts[0]] = rest;
  }

  double d2 = 0.0;
  for (int a = 0; a < m; ++a) {
    double x = 0.0;
    for (int v = 0; v <= m; ++v) x += cand.bary[v] * w.vectors[v][a];
    d2 += c[a] * (x - h[a]) * (x - h[a]);
  }
  cand.distance = std::sqrt(d2);
  return cand;
}

}  // namespace

PhaseResult project_to_simplex(int m, const std::vector<double>& c, const std::vector<double>& h) {
  if (m < 1 || m > kMaxM) throw std::invalid_argument("project_to_simplex: m must lie in [1, 20]");
  if (c.size() != static_cast<std::size_t>(m) || h.size() != static_cast<std::size_t>(m))
    throw std::invalid_argument("project_to_simplex: c and h must have m components");
  for (double v : c)
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("project_to_simplex: couplings c_a must be > 0");
  for (double v : h)
    if (!std::isfinite(v)) throw std::invalid_argument("project_to_simplex: field must be finite");

  const auto w = model::weight_vectors(m);
  const unsigned full = (1u << (m + 1)) - 1u;
  std::optional<Candidate> best;
  for (unsigned mask = 1; mask <= full; ++mask) {
    Candidate cand = solve_face(w, c, h, mask);
    const bool feasible =
        std::all_of(cand.bary.begin(), cand.bary.end(), [](double b) { return b >= -kFeasibilityTolerance; });
    if (!feasible) continue;
    if (!best) {
      best = std::move(cand);
      continue;
    }
    const double tie = kFeasibilityTolerance * std::max(1.0, best->distance);
    if (cand.distance < best->distance - tie ||
        (std::abs(cand.distance - best->distance) <= tie && cand.vertices < best->vertices)) {
      best = std::move(cand);
    }
  }
  if (!best) throw std::logic_error("project_to_simplex: no feasible face (vertices are always feasible)");

  PhaseResult out;
  auto& n = out.densities.values;
  n = best->bary;
  double total = 0.0;
  for (double& v : n) {
    v = std::max(v, 0.0);
    total += v;
  }
  for (double& v : n) v /= total;
  for (int a = 0; a <= m; ++a) {
    if (n[a] > 0.0) {
      out.active_face.push_back(a + 1);
    } else {
      out.vanishing.push_back(a + 1);
    }
  }
  out.k = static_cast<int>(out.vanishing.size());
  out.distance = best->distance;

  // Optimality: <h - x, mu_v - x>_c <= 0 for every vertex, = 0 on the active face.
  std::vector<double> x(static_cast<std::size_t>(m), 0.0);
  for (int a = 0; a < m; ++a)
    for (int v = 0; v <= m; ++v) x[a] += n[v] * w.vectors[v][a];
  double scale = 1.0;
  for (int a = 0; a < m; ++a) scale = std::max(scale, std::abs(h[a]) * c[a]);
  const double kkt_tol = 1e-9 * scale;
  for (int v = 0; v <= m; ++v) {
    double g = 0.0;
    for (int a = 0; a < m; ++a) g += c[a] * (h[a] - x[a]) * (w.vectors[v][a] - x[a]);
    const bool active = n[v] > 0.0;
    if (g > kkt_tol || (active && std::abs(g) > kkt_tol))
      throw std::logic_error("project_to_simplex: KKT conditions violated");
    if (!active && g > -kBoundaryProximity) out.near_boundary = true;
    if (active && n[v] < kBoundaryProximity) out.near_boundary = true;
  }
  return out;
}

std::string to_string(Su3Label label) {
  switch (label) {
    case Su3Label::interior: return "interior";
    case Su3Label::R12: return "R12";
    case Su3Label::R13: return "R13";
    case Su3Label::R23: return "R23";
    case Su3Label::W1: return "W1";
    case Su3Label::W2: return "W2";
    case Su3Label::W3: return "W3";
    case Su3Label::boundary: return "boundary";
  }
  return "unknown";
}

namespace {

constexpr double kGeomTolerance = 1e-12;

void require_symmetric(const std::vector<double>& h, const std::vector<double>& c) {
  if (h.size() != 2 || c.size() != 2) throw std::invalid_argument("su3: field and couplings must have 2 components");
  if (c[0] != c[1] || !(c[0] > 0.0)) {
    throw std::invalid_argument(
        "su3: closed-form phase diagram needs c_1 = c_2 > 0; use project_to_simplex for general couplings");
  }
}

// Parameter t of the orthogonal projection of h onto the line mu_a + t (mu_b - mu_a).
double edge_parameter(const model::WeightSet& w, const std::vector<double>& h, int a, int b) {
  const auto& pa = w.vectors[a];
  const auto& pb = w.vectors[b];
  const double dx = pb[0] - pa[0];
  const double dy = pb[1] - pa[1];
  return ((h[0] - pa[0]) * dx + (h[1] - pa[1]) * dy) / (dx * dx + dy * dy);
}

}  // namespace

Su3Region su3_region(const std::vector<double>& h, const std::vector<double>& c) {
  require_symmetric(h, c);
  const auto w = model::weight_vectors(2);
  const auto n = model::raw_densities(2, h);
  const char digit[] = {'1', '2', '3'};

  // Closed wedges W_a at each vertex; their edges and apex are boundary points.
  constexpr Su3Label wedges[] = {Su3Label::W1, Su3Label::W2, Su3Label::W3};
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3;
    const int d = (a + 2) % 3;
    const double tb = edge_parameter(w, h, a, b);
    const double td = edge_parameter(w, h, a, d);
    if (tb < -kGeomTolerance && td < -kGeomTolerance) return {wedges[a], {}};
    if (tb <= kGeomTolerance && td <= kGeomTolerance) {
      if (std::abs(tb) <= kGeomTolerance && std::abs(td) <= kGeomTolerance)
        return {Su3Label::boundary, std::string("V") + digit[a]};
      const int other = std::abs(tb) <= kGeomTolerance ? b : d;
      return {Su3Label::boundary, std::string("P") + digit[a] + digit[other]};
    }
  }

  if (std::all_of(n.begin(), n.end(), [](double v) { return v > kGeomTolerance; })) return {Su3Label::interior, {}};

  // Side L_bc is opposite vertex a (the one whose density vanishes there).
  struct Side {
    int a, b, c;
    Su3Label strip;
    const char* name;
  };
  constexpr Side sides[] = {{2, 0, 1, Su3Label::R12, "L12"}, {1, 0, 2, Su3Label::R13, "L13"}, {0, 1, 2, Su3Label::R23, "L23"}};
  for (const auto& s : sides) {
    const double t = edge_parameter(w, h, s.b, s.c);
    if (t <= kGeomTolerance || t >= 1.0 - kGeomTolerance) continue;
    if (n[s.a] < -kGeomTolerance) return {s.strip, {}};
    if (std::abs(n[s.a]) <= kGeomTolerance) return {Su3Label::boundary, s.name};
  }
  throw std::logic_error("su3_region: point not classified");
}

int su3_region_k(const Su3Region& region) {
  switch (region.label) {
    case Su3Label::interior: return 0;
    case Su3Label::R12:
    case Su3Label::R13:
    case Su3Label::R23: return 1;
    case Su3Label::W1:
    case Su3Label::W2:
    case Su3Label::W3: return 2;
    case Su3Label::boundary:
      if (!region.boundary_id.empty() && region.boundary_id[0] == 'L') return 1;
      return 2;
  }
  return -1;
}

entropy::EntropyValue su3_entropy_piecewise(const std::vector<double>& h, double L, double alpha,
                                            const std::vector<double>& c) {
  require_symmetric(h, c);
  if (!(L > 0.0) || !(alpha >= 0.0 && alpha < 1.0))
    throw std::invalid_argument("su3_entropy_piecewise: needs L > 0 and alpha in [0,1)");
  const Su3Region region = su3_region(h, c);
  const double s0 = std::log(2.0 * std::numbers::pi * std::numbers::e * L) + std::log1p(-alpha);
  const double h1 = h[0];
  const double h2 = h[1];

  Su3Label branch = region.label;
  if (branch == Su3Label::boundary) {
    const auto& id = region.boundary_id;
    if (id == "L12") branch = Su3Label::R12;
    else if (id == "L13") branch = Su3Label::R13;
    else if (id == "L23") branch = Su3Label::R23;
    else branch = Su3Label::W1;
  }

  double s = 0.0;
  switch (branch) {
    case Su3Label::interior:
      s = s0 - 1.5 * std::log(3.0) +
          0.5 * (std::log(1.0 + 2.0 * h1 - h2) + std::log(1.0 - h1 + 2.0 * h2) + std::log(1.0 - h1 - h2));
      break;
    case Su3Label::R12:
      s = 0.5 * (s0 + std::log(1.0 - (h1 - h2) * (h1 - h2)) - 2.0 * std::log(2.0));
      break;
    case Su3Label::R13:
      s = 0.5 * (s0 - 2.0 * std::log(5.0) + std::log(3.0 + 2.0 * h1 + h2) + std::log(2.0 - 2.0 * h1 - h2));
      break;
    case Su3Label::R23:
      s = 0.5 * (s0 - 2.0 * std::log(5.0) + std::log(3.0 + h1 + 2.0 * h2) + std::log(2.0 - h1 - 2.0 * h2));
      break;
    default:
      return {0.0, entropy::EntropyFlag::ok};
  }
  return {s, s < 0.0 ? entropy::EntropyFlag::negative_asymptotic : entropy::EntropyFlag::ok};
}

entropy::EntropyValue phase_entropy(const PhaseResult& phase, double L, double alpha) {
  return entropy::vn_asymptotic(entropy::reduce_densities(phase.densities.values, L, alpha));
}

std::vector<double> GridAxis::points() const {
  if (!(step > 0.0) || !(max >= min) || !std::isfinite(min) || !std::isfinite(max))
    throw std::invalid_argument("grid: needs step > 0 and max >= min");
  const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  if (count > 100'000'000) throw std::invalid_argument("grid: too many points per axis");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = min + static_cast<double>(i) * step;
  return out;
}

GridAxis parse_grid_axis(const std::string& text) {
  std::vector<double> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(':', start);
    const std::string piece = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(piece, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("grid: cannot parse '" + text + "' (expected min:max:step)");
    }
    if (used != piece.size()) throw std::invalid_argument("grid: cannot parse '" + text + "' (expected min:max:step)");
    parts.push_back(v);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() == 1) return {parts[0], parts[0], 1.0};
  if (parts.size() != 3) throw std::invalid_argument("grid: expected min:max:step, got '" + text + "'");
  GridAxis axis{parts[0], parts[1], parts[2]};
  axis.points();
  return axis;
}

std::vector<ScanRow> phase_scan(const std::vector<GridAxis>& grid, double L, double alpha,
                                const std::vector<double>& c, int threads) {
  const int m = static_cast<int>(c.size());
  if (m < 1 || grid.size() != c.size()) throw std::invalid_argument("phase_scan: need one grid axis per field component");
  std::vector<std::vector<double>> axes;
  std::size_t total = 1;
  for (const auto& g : grid) {
    axes.push_back(g.points());
    total *= axes.back().size();
  }
  if (threads <= 0) threads = entropy::default_thread_count();

  std::vector<ScanRow> rows(total);
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> h(static_cast<std::size_t>(m));
    for (std::size_t r = begin; r < end; ++r) {
      std::size_t rem = r;
      for (int a = m - 1; a >= 0; --a) {
        const auto& ax = axes[static_cast<std::size_t>(a)];
        h[a] = ax[rem % ax.size()];
        rem /= ax.size();
      }
      auto phase = project_to_simplex(m, c, h);
      auto s = phase_entropy(phase, L, alpha);
      rows[r] = {h, std::move(phase), s};
    }
  };
  const auto blocks = static_cast<std::size_t>(std::clamp<long>(threads, 1, static_cast<long>(std::max<std::size_t>(total, 1))));
  if (blocks <= 1) {
    work(0, total);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t b = 0; b < blocks; ++b) pool.emplace_back(work, total * b / blocks, total * (b + 1) / blocks);
    for (auto& t : pool) t.join();
  }
  return rows;
}

}  // namespace glmg::phase
