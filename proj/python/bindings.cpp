#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "glmg/cli.hpp"
#include "glmg/diag.hpp"
#include "glmg/entropy.hpp"
#include "glmg/errors.hpp"
#include "glmg/gaussian.hpp"
#include "glmg/model.hpp"
#include "glmg/phase.hpp"
#include "glmg/rdm.hpp"

namespace py = pybind11;
using namespace glmg;

namespace {

const char* flag_name(entropy::EntropyFlag f) { return f == entropy::EntropyFlag::ok ? "ok" : "negative_asymptotic"; }

py::tuple entropy_value(const entropy::EntropyValue& v) { return py::make_tuple(v.value, flag_name(v.flag)); }

const char* field_class_name(model::FieldClass c) {
  switch (c) {
    case model::FieldClass::interior: return "interior";
    case model::FieldClass::boundary: return "boundary";
    default: return "exterior";
  }
}

py::dict phase_dict(const phase::PhaseResult& r) {
  py::dict d;
  d["densities"] = r.densities.values;
  d["vanishing"] = r.vanishing;
  d["k"] = r.k;
  d["active_face"] = r.active_face;
  d["distance"] = r.distance;
  d["near_boundary"] = r.near_boundary;
  return d;
}

model::ModelSpec parse_model(const std::string& text) { return model::model_from_json(nlohmann::json::parse(text)); }

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Native core of the glmg package";
  py::register_exception<ResourceLimitError>(mod, "ResourceLimitError");

  mod.def("weight_vectors", [](int m) { return model::weight_vectors(m).vectors; }, py::arg("m"));
  mod.def("densities_from_field", [](int m, const std::vector<double>& h) { return model::densities_from_field(m, h).values; },
          py::arg("m"), py::arg("h"));
  mod.def("field_from_densities", [](const std::vector<double>& n) { return model::field_from_densities({n}); }, py::arg("n"));
  mod.def(
      "locate_field",
      [](int m, const std::vector<double>& h) {
        const auto loc = model::locate_field(m, h);
        return py::make_tuple(field_class_name(loc.classification), loc.face);
      },
      py::arg("m"), py::arg("h"));
  mod.def(
      "finite_magnon_numbers",
      [](const std::vector<double>& n, int N) {
        const auto f = model::finite_magnon_numbers({n}, N);
        return py::make_tuple(f.counts, f.rounding_tie);
      },
      py::arg("n"), py::arg("N"));
  mod.def("validate_model", [](const std::string& text) { return model::model_to_json(parse_model(text)).dump(); },
          py::arg("model_json"));

  mod.def("support_size", [](int N, int L, const std::vector<int>& mag) { return rdm::support_size({N, L, mag}); },
          py::arg("N"), py::arg("L"), py::arg("magnons"));
  mod.def(
      "rdm_spectrum",
      [](int N, int L, const std::vector<int>& mag) {
        const auto s = rdm::rdm_spectrum({N, L, mag});
        std::vector<std::vector<int>> idx;
        idx.reserve(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) idx.emplace_back(s.index(i).begin(), s.index(i).end());
        return py::make_tuple(idx, s.values);
      },
      py::arg("N"), py::arg("L"), py::arg("magnons"));
  mod.def(
      "moments",
      [](int N, int L, const std::vector<int>& mag) {
        const auto mo = rdm::moments_closed_form({N, L, mag});
        Eigen::MatrixXd cov(mo.m, mo.m);
        for (int i = 0; i < mo.m; ++i)
          for (int j = 0; j < mo.m; ++j) cov(i, j) = mo.cov(i, j);
        return py::make_tuple(mo.means, cov);
      },
      py::arg("N"), py::arg("L"), py::arg("magnons"));

  mod.def(
      "exact_entropies",
      [](int N, int L, const std::vector<int>& mag, const std::vector<double>& qs, int threads) {
        const auto ex = entropy::exact_entropies({N, L, mag}, qs, threads);
        py::dict d;
        d["trace"] = ex.trace;
        d["von_neumann"] = ex.von_neumann;
        d["q"] = ex.q;
        d["trace_power"] = ex.trace_power;
        d["renyi"] = ex.renyi;
        d["tsallis"] = ex.tsallis;
        return d;
      },
      py::arg("N"), py::arg("L"), py::arg("magnons"), py::arg("qs") = std::vector<double>{2.0}, py::arg("threads") = 0);
  mod.def(
      "vn_asymptotic",
      [](const std::vector<double>& n, double L, double alpha) {
        return entropy_value(entropy::vn_asymptotic(entropy::reduce_densities(n, L, alpha)));
      },
      py::arg("densities"), py::arg("L"), py::arg("alpha") = 0.0);
  mod.def(
      "renyi_asymptotic",
      [](const std::vector<double>& n, double L, double alpha, double q) {
        return entropy_value(entropy::renyi_asymptotic(entropy::reduce_densities(n, L, alpha), q));
      },
      py::arg("densities"), py::arg("L"), py::arg("alpha"), py::arg("q"));
  mod.def(
      "tsallis_asymptotic",
      [](const std::vector<double>& n, double L, double alpha, double q) {
        return entropy_value(entropy::tsallis_asymptotic(entropy::reduce_densities(n, L, alpha), q));
      },
      py::arg("densities"), py::arg("L"), py::arg("alpha"), py::arg("q"));
  mod.def(
      "trace_power_asymptotic",
      [](const std::vector<double>& n, double L, double alpha, double q) {
        return entropy::trace_power_asymptotic(entropy::reduce_densities(n, L, alpha), q);
      },
      py::arg("densities"), py::arg("L"), py::arg("alpha"), py::arg("q"));
  mod.def(
      "tsallis_extensive_limit",
      [](const std::vector<double>& n, double alpha) {
        return entropy::tsallis_extensive_limit(entropy::reduce_densities(n, 1.0, alpha));
      },
      py::arg("densities"), py::arg("alpha") = 0.0);
  mod.def("entropy_upper_bound", &entropy::entropy_upper_bound, py::arg("L"), py::arg("m"));
  mod.def(
      "zero_entropy_distance",
      [](int vanishing, const std::vector<double>& face_densities, double L, double alpha, std::optional<double> q) {
        const entropy::FaceDescriptor face{vanishing, face_densities};
        return q ? entropy::zero_entropy_distance(face, L, alpha, entropy::EntropyKind::renyi, *q)
                 : entropy::zero_entropy_distance(face, L, alpha, entropy::EntropyKind::von_neumann);
      },
      py::arg("vanishing"), py::arg("face_densities"), py::arg("L"), py::arg("alpha") = 0.0, py::arg("q") = py::none());

  mod.def(
      "covariance_matrix",
      [](const std::vector<double>& n, double L, double alpha) {
        const auto g = gaussian::covariance_matrix({n}, L, alpha);
        return py::make_tuple(g.coefficient_matrix, g.covariance);
      },
      py::arg("densities"), py::arg("L"), py::arg("alpha") = 0.0);
  mod.def(
      "gaussian_eigenvalue_approx",
      [](const std::vector<double>& n, double L, double alpha, const std::vector<double>& x) {
        return gaussian::gaussian_eigenvalue_approx({n}, L, alpha, x);
      },
      py::arg("densities"), py::arg("L"), py::arg("alpha"), py::arg("x"));
  mod.def("hypergeometric_pmf", &gaussian::hypergeometric_pmf, py::arg("total"), py::arg("drawn"), py::arg("successes"),
          py::arg("l"));
  mod.def("hypergeometric_gaussian_approx", &gaussian::hypergeometric_gaussian_approx, py::arg("total"), py::arg("drawn"),
          py::arg("successes"), py::arg("l"));

  mod.def(
      "project_to_simplex",
      [](int m, const std::vector<double>& c, const std::vector<double>& h) { return phase_dict(phase::project_to_simplex(m, c, h)); },
      py::arg("m"), py::arg("c"), py::arg("h"));
  mod.def(
      "phase_entropy",
      [](int m, const std::vector<double>& c, const std::vector<double>& h, double L, double alpha) {
        return entropy_value(phase::phase_entropy(phase::project_to_simplex(m, c, h), L, alpha));
      },
      py::arg("m"), py::arg("c"), py::arg("h"), py::arg("L"), py::arg("alpha") = 0.0);
  mod.def(
      "su3_region",
      [](const std::vector<double>& h, const std::vector<double>& c) {
        const auto r = phase::su3_region(h, c);
        return py::make_tuple(phase::to_string(r.label), r.boundary_id, phase::su3_region_k(r));
      },
      py::arg("h"), py::arg("c") = std::vector<double>{1.0, 1.0});
  mod.def(
      "phase_scan",
      [](const std::vector<std::string>& axes, double L, double alpha, const std::vector<double>& c, int threads) {
        std::vector<phase::GridAxis> grid;
        for (const auto& a : axes) grid.push_back(phase::parse_grid_axis(a));
        py::list rows;
        for (const auto& r : phase::phase_scan(grid, L, alpha, c, threads)) {
          auto d = phase_dict(r.phase);
          d["h"] = r.h;
          d["entropy"] = r.entropy.value;
          d["flag"] = flag_name(r.entropy.flag);
          rows.append(d);
        }
        return rows;
      },
      py::arg("axes"), py::arg("L"), py::arg("alpha"), py::arg("c"), py::arg("threads") = 0);

  mod.def(
      "diagonalize",
      [](const std::string& model_json, int N) {
        const auto spec = parse_model(model_json);
        const auto s = diag::sector_spectrum(spec, N);
        std::optional<diag::GroundStateReport> report;
        if (diag::dense_dimension(spec.m, N) <= diag::kDenseDimensionCap) report = diag::ground_state_verify(spec, N);
        return diag::spectrum_to_json(s, report).dump();
      },
      py::arg("model_json"), py::arg("N"));
  mod.def("dense_spectrum", [](const std::string& model_json, int N) { return diag::dense_spectrum(parse_model(model_json), N); },
          py::arg("model_json"), py::arg("N"));
  mod.def("lmg_su2_spectrum", &diag::lmg_su2_spectrum, py::arg("N"), py::arg("h"));

  mod.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
