#include "glmg/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace glmg::model {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void ModelSpec::validate(std::optional<int> sites) const {
  require(m >= 1, "model: m must be >= 1");
  require(cartan_couplings.size() == static_cast<std::size_t>(m),
          "model: expected " + std::to_string(m) + " Cartan couplings c_a");
  require(field.size() == static_cast<std::size_t>(m),
          "model: expected " + std::to_string(m) + " field components h_a");
  for (double c : cartan_couplings) require(std::isfinite(c) && c > 0.0, "model: Cartan couplings must be > 0");
  for (double h : field) require(std::isfinite(h), "model: field components must be finite");
  if (n_sites) require(*n_sites >= 1, "model: N must be >= 1");
  if (std::holds_alternative<HaldaneShastryCoupling>(coupling)) {
    require(n_sites.has_value() || sites.has_value(), "model: haldane_shastry couplings need N");
  }
  const auto n = sites ? sites : n_sites;
  if (!n) return;
  const auto matrix = coupling_matrix(*this, *n);
  for (double v : matrix) require(std::isfinite(v) && v >= 0.0, "model: couplings h_ij must be >= 0");
  require(couplings_connected(matrix, *n),
          "model: positive couplings do not connect all sites (transpositions do not generate S_N)");
}

std::vector<double> coupling_matrix(const ModelSpec& spec, int n_sites) {
  require(n_sites >= 1, "coupling_matrix: N must be >= 1");
  const auto n = static_cast<std::size_t>(n_sites);
  std::vector<double> h(n * n, 0.0);
  auto set = [&](std::size_t i, std::size_t j, double v) {
    if (i == j) return;
    h[i * n + j] = v;
    h[j * n + i] = v;
  };
  std::visit(
      [&](const auto& scheme) {
        using T = std::decay_t<decltype(scheme)>;
        if constexpr (std::is_same_v<T, ConstantCoupling>) {
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) set(i, j, scheme.value);
        } else if constexpr (std::is_same_v<T, NearestNeighborCoupling>) {
          const std::size_t bonds = scheme.periodic ? n : n - 1;
          require(scheme.values.size() == bonds,
                  "coupling_matrix: nearest_neighbor needs " + std::to_string(bonds) + " values for N=" +
                      std::to_string(n_sites));
          for (std::size_t i = 0; i < bonds; ++i) {
            const std::size_t j = (i + 1) % n;
            if (i != j) h[i * n + j] = h[j * n + i] = h[i * n + j] + scheme.values[i];
          }
        } else if constexpr (std::is_same_v<T, HaldaneShastryCoupling>) {
          const double pi = std::numbers::pi;
          const double scale = pi * pi / (static_cast<double>(n) * static_cast<double>(n));
          for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
              const double s = std::sin(pi * static_cast<double>(j - i) / static_cast<double>(n));
              set(i, j, scale / (s * s));
            }
          }
        } else {
          require(scheme.matrix.size() == n, "coupling_matrix: explicit matrix must be N x N");
          for (std::size_t i = 0; i < n; ++i) {
            require(scheme.matrix[i].size() == n, "coupling_matrix: explicit matrix must be N x N");
            for (std::size_t j = 0; j < n; ++j) {
              if (i == j) continue;
              require(scheme.matrix[i][j] == scheme.matrix[j][i], "coupling_matrix: explicit matrix must be symmetric");
              h[i * n + j] = scheme.matrix[i][j];
            }
          }
        }
      },
      spec.coupling);
  return h;
}

bool couplings_connected(const std::vector<double>& matrix, int n_sites) {
  const auto n = static_cast<std::size_t>(n_sites);
  if (n <= 1) return true;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j = 0; j < n; ++j) {
      if (!seen[j] && matrix[i * n + j] > 0.0) {
        seen[j] = true;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  return reached == n;
}

void MagnonDensities::validate() const {
  require(values.size() >= 2, "densities: need at least two components");
  double total = 0.0;
  for (double v : values) {
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0 + 1e-12, "densities: each n_a must lie in [0,1]");
    total += v;
  }
  require(std::abs(total - 1.0) <= 1e-12, "densities: components must sum to 1");
}

WeightSet weight_vectors(int m) {
  require(m >= 1, "weight_vectors: m must be >= 1");
  WeightSet w;
  w.vectors.assign(static_cast<std::size_t>(m) + 1, std::vector<double>(static_cast<std::size_t>(m), 0.0));
  for (int a = 0; a < m; ++a) {
    w.vectors[a][a] = 1.0;
    w.vectors[m][a] = -1.0;
  }
  return w;
}

std::vector<double> raw_densities(int m, const std::vector<double>& h) {
  require(m >= 1, "densities: m must be >= 1");
  require(h.size() == static_cast<std::size_t>(m), "densities: field must have m components");
  const double total = std::accumulate(h.begin(), h.end(), 0.0);
  const double last = (1.0 - total) / (1.0 + m);
  std::vector<double> n(static_cast<std::size_t>(m) + 1);
  for (int a = 0; a < m; ++a) n[a] = h[a] + last;
  n[m] = last;
  return n;
}

FieldLocation locate_field(int m, const std::vector<double>& h) {
  for (double v : h) require(std::isfinite(v), "locate_field: field must be finite");
  const auto n = raw_densities(m, h);
  FieldLocation loc;
  for (std::size_t a = 0; a < n.size(); ++a) {
    if (n[a] < -kBoundaryTolerance || n[a] > 1.0 + kBoundaryTolerance) {
      loc.classification = FieldClass::exterior;
      loc.face.clear();
      return loc;
    }
    if (std::abs(n[a]) <= kBoundaryTolerance) loc.face.push_back(static_cast<int>(a) + 1);
  }
  // n_a = 1 forces every other density to 0, so the face set is already nonempty.
  loc.classification = loc.face.empty() ? FieldClass::interior : FieldClass::boundary;
  return loc;
}

MagnonDensities densities_from_field(int m, const std::vector<double>& h) {
  if (locate_field(m, h).classification == FieldClass::exterior) {
    throw std::domain_error("densities_from_field: field lies outside the weight simplex; use the phase projection");
  }
  MagnonDensities out{raw_densities(m, h)};
  for (double& v : out.values) v = std::clamp(v, 0.0, 1.0);
  return out;
}

std::vector<double> field_from_densities(const MagnonDensities& n) {
  const int m = n.m();
  require(m >= 1, "field_from_densities: need at least two densities");
  std::vector<double> x(static_cast<std::size_t>(m));
  for (int a = 0; a < m; ++a) x[a] = n.values[a] - n.values[m];
  return x;
}

FiniteMagnons finite_magnon_numbers(const MagnonDensities& n, int n_sites) {
  require(n_sites >= 1, "finite_magnon_numbers: N must be >= 1");
  n.validate();
  const std::size_t k = n.values.size();
  FiniteMagnons out;
  out.counts.resize(k);
  std::vector<double> remainder(k);
  long assigned = 0;
  for (std::size_t a = 0; a < k; ++a) {
    const double target = n.values[a] * n_sites;
    // Absorb representation error so 0.4*10 floors to 4, not 3.
    double fl = std::floor(target + 1e-9);
    fl = std::clamp(fl, 0.0, static_cast<double>(n_sites));
    out.counts[a] = static_cast<int>(fl);
    remainder[a] = std::max(0.0, target - fl);
    assigned += out.counts[a];
  }
  long left = n_sites - assigned;
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return remainder[x] > remainder[y] + 1e-12; });
  while (left < 0) {
    // Only reachable through the floor fudge; take back from the smallest remainders.
    for (auto it = order.rbegin(); it != order.rend() && left < 0; ++it) {
      if (out.counts[*it] > 0) {
        --out.counts[*it];
        ++left;
      }
    }
  }
  const auto give = static_cast<std::size_t>(left);
  for (std::size_t i = 0; i < give && i < k; ++i) ++out.counts[order[i]];
  if (give > 0 && give < k) {
    const double cut = remainder[order[give - 1]];
    const double next = remainder[order[give]];
    out.rounding_tie = std::abs(cut - next) <= 1e-12;
  }
  return out;
}

namespace {

std::vector<double> as_vector(const nlohmann::json& j, const char* key) {
  require(j.contains(key) && j.at(key).is_array(), std::string("model config: '") + key + "' must be an array");
  return j.at(key).get<std::vector<double>>();
}

}  // namespace

ModelSpec model_from_json(const nlohmann::json& j) {
  require(j.is_object(), "model config: expected a JSON object");
  ModelSpec spec;
  require(j.contains("m") && j.at("m").is_number_integer(), "model config: 'm' must be an integer");
  spec.m = j.at("m").get<int>();
  spec.cartan_couplings = as_vector(j, "c");
  spec.field = as_vector(j, "h");
  if (j.contains("N") && !j.at("N").is_null()) {
    require(j.at("N").is_number_integer(), "model config: 'N' must be an integer");
    spec.n_sites = j.at("N").get<int>();
  }
  if (j.contains("coupling")) {
    const auto& c = j.at("coupling");
    require(c.is_object() && c.contains("scheme"), "model config: 'coupling' needs a 'scheme'");
    const auto scheme = c.at("scheme").get<std::string>();
    const nlohmann::json params = c.value("params", nlohmann::json::object());
    if (scheme == "constant") {
      spec.coupling = ConstantCoupling{params.value("value", 1.0)};
    } else if (scheme == "nearest_neighbor") {
      NearestNeighborCoupling nn;
      nn.values = as_vector(params, "values");
      nn.periodic = params.value("periodic", false);
      spec.coupling = nn;
    } else if (scheme == "haldane_shastry") {
      spec.coupling = HaldaneShastryCoupling{};
    } else if (scheme == "explicit") {
      require(params.contains("matrix"), "model config: explicit coupling needs 'matrix'");
      spec.coupling = ExplicitCoupling{params.at("matrix").get<std::vector<std::vector<double>>>()};
    } else {
      throw std::invalid_argument("model config: unknown coupling scheme '" + scheme + "'");
    }
  }
  spec.validate();
  return spec;
}

std::string scheme_name(const CouplingScheme& scheme) {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantCoupling>) return "constant";
        if constexpr (std::is_same_v<T, NearestNeighborCoupling>) return "nearest_neighbor";
        if constexpr (std::is_same_v<T, HaldaneShastryCoupling>) return "haldane_shastry";
        return "explicit";
      },
      scheme);
}

nlohmann::json model_to_json(const ModelSpec& spec) {
  nlohmann::json params = nlohmann::json::object();
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantCoupling>) {
          params["value"] = s.value;
        } else if constexpr (std::is_same_v<T, NearestNeighborCoupling>) {
          params["values"] = s.values;
          params["periodic"] = s.periodic;
        } else if constexpr (std::is_same_v<T, ExplicitCoupling>) {
          params["matrix"] = s.matrix;
        }
      },
      spec.coupling);
  nlohmann::json j = {{"m", spec.m},
                      {"c", spec.cartan_couplings},
                      {"h", spec.field},
                      {"coupling", {{"scheme", scheme_name(spec.coupling)}, {"params", params}}}};
  if (spec.n_sites) j["N"] = *spec.n_sites;
  return j;
}

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("model config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("model config: " + std::string(e.what()));
  }
  return model_from_json(j);
}

}  // namespace glmg::model
