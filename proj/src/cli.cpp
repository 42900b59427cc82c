#include "glmg/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <utility>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "glmg/diag.hpp"
#include "glmg/entropy.hpp"
#include "glmg/errors.hpp"
#include "glmg/model.hpp"
#include "glmg/phase.hpp"
#include "glmg/rdm.hpp"

namespace glmg::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::string format_double(double v, int digits) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

namespace {

std::string cell_text(const Cell& c, int digits) {
  if (const auto* d = std::get_if<double>(&c)) return digits > 0 ? format_double(*d, digits) : format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

nlohmann::json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return *d;
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

void Table::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i], digits);
    out << '\n';
  }
}

void Table::write_json(std::ostream& out) const {
  nlohmann::json j;
  j["command"] = command;
  j["columns"] = columns;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[columns[i]] = cell_json(row[i]);
    j["rows"].push_back(std::move(r));
  }
  out << j.dump(2) << '\n';
}

namespace {

struct Options {
  std::string model_file;
  std::optional<int> m;
  std::vector<double> c;
  std::vector<double> h;
  std::optional<int> n_sites;
  std::vector<int> magnons;
  std::optional<double> L;
  std::optional<double> alpha;
  std::vector<double> q;
  std::string grid;
  std::string out_file;
  std::string format = "csv";
  std::string method;
};

void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::string entropy_flag_name(entropy::EntropyFlag f) {
  return f == entropy::EntropyFlag::ok ? "ok" : "negative_asymptotic";
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

// Model assembled from --model and inline flags (flags win).
model::ModelSpec resolve_model(const Options& o) {
  model::ModelSpec spec;
  bool have_file = false;
  if (!o.model_file.empty()) {
    spec = model::load_model(o.model_file);
    have_file = true;
  }
  if (o.m) {
    spec.m = *o.m;
  } else if (!have_file) {
    if (!o.c.empty()) spec.m = static_cast<int>(o.c.size());
    else if (!o.h.empty()) spec.m = static_cast<int>(o.h.size());
    else if (!o.magnons.empty()) spec.m = static_cast<int>(o.magnons.size()) - 1;
  }
  if (spec.m < 1) fail("m must be >= 1");
  if (!o.c.empty()) spec.cartan_couplings = o.c;
  if (!o.h.empty()) spec.field = o.h;
  if (spec.cartan_couplings.empty()) spec.cartan_couplings.assign(static_cast<std::size_t>(spec.m), 1.0);
  if (o.n_sites) spec.n_sites = *o.n_sites;
  if (spec.cartan_couplings.size() != static_cast<std::size_t>(spec.m)) fail("--c must have m entries");
  if (!spec.field.empty() && spec.field.size() != static_cast<std::size_t>(spec.m)) fail("--h must have m entries");
  return spec;
}

bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

// Densities of the ground state: explicit magnon numbers, else the projected field.
model::MagnonDensities resolve_densities(const model::ModelSpec& spec, const std::vector<int>& magnons) {
  if (!magnons.empty()) {
    const int total = std::accumulate(magnons.begin(), magnons.end(), 0);
    if (total <= 0) fail("--Na must sum to a positive N");
    model::MagnonDensities n;
    for (int k : magnons) n.values.push_back(static_cast<double>(k) / total);
    return n;
  }
  if (spec.field.empty()) fail("need --h (or --Na) to fix the magnon densities");
  return phase::project_to_simplex(spec.m, spec.cartan_couplings, spec.field).densities;
}

std::optional<rdm::BlockSpec> resolve_block(const model::ModelSpec& spec, const Options& o, bool required) {
  std::vector<int> magnons = o.magnons;
  std::optional<int> n_sites = spec.n_sites;
  if (!magnons.empty()) {
    if (magnons.size() != static_cast<std::size_t>(spec.m) + 1) fail("--Na must have m+1 entries");
    const int total = std::accumulate(magnons.begin(), magnons.end(), 0);
    if (n_sites && *n_sites != total) fail("--Na must sum to N");
    n_sites = total;
  }
  if (!n_sites || !o.L || !is_integer(*o.L)) {
    if (required) fail("exact evaluation needs --N (or --Na) and an integer --L");
    return std::nullopt;
  }
  if (magnons.empty()) magnons = model::finite_magnon_numbers(resolve_densities(spec, {}), *n_sites).counts;
  rdm::BlockSpec block{*n_sites, static_cast<int>(*o.L), magnons};
  block.validate();
  return block;
}

void check_support(const rdm::BlockSpec& block) {
  if (rdm::support_size(block) > rdm::kDefaultSupportCap) {
    throw ResourceLimitError("support size exceeds " + std::to_string(rdm::kDefaultSupportCap));
  }
}

std::vector<double> q_list(const Options& o) {
  std::vector<double> qs = o.q.empty() ? std::vector<double>{2.0} : o.q;
  for (double q : qs)
    if (!(q > 0.0) || !std::isfinite(q)) fail("q must be > 0");
  return qs;
}

void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) fail("alpha must lie in [0,1)");
}

struct Output {
  Table table;
  std::optional<nlohmann::json> json;  // replaces the table for JSON output
  std::function<void(std::ostream&)> csv;  // replaces the table for CSV output
};

Output cmd_entropy(const Options& o) {
  const auto spec = resolve_model(o);
  if (!o.L) fail("entropy needs --L");
  const double L = *o.L;
  if (!(L >= 0.0) || !std::isfinite(L)) fail("L must be >= 0");
  const auto qs = q_list(o);
  const std::string method = o.method.empty() ? "both" : o.method;
  if (method != "exact" && method != "asymptotic" && method != "both") fail("--method must be exact, asymptotic or both");

  Table t;
  t.command = "entropy";
  t.columns = {"method", "measure", "q", "value", "flag"};

  if (method != "asymptotic") {
    const auto block = resolve_block(spec, o, method == "exact");
    if (block) {
      check_support(*block);
      const auto ex = entropy::exact_entropies(*block, qs);
      t.rows.push_back({"exact", "von_neumann", 1.0, ex.von_neumann, "ok"});
      for (std::size_t k = 0; k < qs.size(); ++k) t.rows.push_back({"exact", "renyi", qs[k], ex.renyi[k], "ok"});
      for (std::size_t k = 0; k < qs.size(); ++k) t.rows.push_back({"exact", "tsallis", qs[k], ex.tsallis[k], "ok"});
    }
  }
  if (method != "exact") {
    std::optional<int> n_sites = spec.n_sites;
    if (!o.magnons.empty()) n_sites = std::accumulate(o.magnons.begin(), o.magnons.end(), 0);
    double alpha = 0.0;
    if (o.alpha) alpha = *o.alpha;
    else if (n_sites) alpha = L / *n_sites;
    require_alpha(alpha);
    const auto n = resolve_densities(spec, o.magnons);
    if (L == 0.0) {
      t.rows.push_back({"asymptotic", "von_neumann", 1.0, 0.0, "ok"});
      for (double q : qs) t.rows.push_back({"asymptotic", "renyi", q, 0.0, "ok"});
      for (double q : qs) t.rows.push_back({"asymptotic", "tsallis", q, 0.0, "ok"});
    } else {
      const auto inp = entropy::reduce_densities(n.values, L, alpha);
      const auto s = entropy::vn_asymptotic(inp);
      t.rows.push_back({"asymptotic", "von_neumann", 1.0, s.value, entropy_flag_name(s.flag)});
      for (double q : qs) {
        const auto r = entropy::renyi_asymptotic(inp, q);
        t.rows.push_back({"asymptotic", "renyi", q, r.value, entropy_flag_name(r.flag)});
      }
      for (double q : qs) {
        const auto r = entropy::tsallis_asymptotic(inp, q);
        t.rows.push_back({"asymptotic", "tsallis", q, r.value, entropy_flag_name(r.flag)});
      }
    }
  }
  return {t, std::nullopt, nullptr};
}

Output cmd_spectrum(const Options& o) {
  const auto spec = resolve_model(o);
  const auto block = *resolve_block(spec, o, true);
  check_support(block);
  const auto spectrum = rdm::rdm_spectrum(block);
  Output out;
  out.csv = [spectrum](std::ostream& s) { rdm::write_spectrum_csv(s, spectrum); };
  nlohmann::json j;
  j["command"] = "spectrum";
  j["N"] = block.N;
  j["L"] = block.L;
  j["magnons"] = block.magnons;
  j["entries"] = nlohmann::json::array();
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const auto idx = spectrum.index(i);
    j["entries"].push_back({{"index", std::vector<int>(idx.begin(), idx.end())}, {"lambda", spectrum.values[i]}});
  }
  out.json = std::move(j);
  return out;
}

std::vector<std::string> scan_columns(int m) {
  std::vector<std::string> cols;
  for (int a = 1; a <= m; ++a) cols.push_back("h" + std::to_string(a));
  cols.push_back("k");
  for (int a = 1; a <= m + 1; ++a) cols.push_back("n" + std::to_string(a));
  cols.push_back("S");
  return cols;
}

std::vector<Cell> scan_cells(const std::vector<double>& h, const phase::PhaseResult& p, double s) {
  std::vector<Cell> row;
  for (double x : h) row.emplace_back(x);
  row.emplace_back(static_cast<long long>(p.k));
  for (double n : p.densities.values) row.emplace_back(n);
  row.emplace_back(s);
  return row;
}

Output cmd_phase(const Options& o) {
  const auto spec = resolve_model(o);
  if (spec.field.empty()) fail("phase needs --h");
  const double L = o.L.value_or(1000.0);
  const double alpha = o.alpha.value_or(0.0);
  require_alpha(alpha);
  if (!(L > 0.0)) fail("L must be > 0");
  const auto p = phase::project_to_simplex(spec.m, spec.cartan_couplings, spec.field);
  const auto s = phase::phase_entropy(p, L, alpha);

  Table t;
  t.command = "phase";
  t.columns = scan_columns(spec.m);
  t.columns.insert(t.columns.end(), {"flag", "distance", "near_boundary"});
  t.rows.push_back(scan_cells(spec.field, p, s.value));
  t.rows.back().insert(t.rows.back().end(),
                       {entropy_flag_name(s.flag), p.distance, std::string(p.near_boundary ? "true" : "false")});
  if (spec.m == 2 && spec.cartan_couplings[0] == spec.cartan_couplings[1]) {
    const auto region = phase::su3_region(spec.field, spec.cartan_couplings);
    t.columns.push_back("region");
    t.rows.back().emplace_back(region.label == phase::Su3Label::boundary ? region.boundary_id
                                                                          : phase::to_string(region.label));
  }
  return {t, std::nullopt, nullptr};
}

std::vector<phase::GridAxis> resolve_grid(const std::string& text, int m) {
  const auto parts = split(text, ',');
  if (parts.size() != 1 && parts.size() != static_cast<std::size_t>(m)) fail("--grid needs one axis or m axes");
  std::vector<phase::GridAxis> grid;
  for (int a = 0; a < m; ++a) grid.push_back(phase::parse_grid_axis(parts.size() == 1 ? parts[0] : parts[a]));
  return grid;
}

Table scan_table(const std::string& command, int m, const std::vector<phase::ScanRow>& rows) {
  Table t;
  t.command = command;
  t.columns = scan_columns(m);
  t.digits = 12;
  for (const auto& r : rows) t.rows.push_back(scan_cells(r.h, r.phase, r.entropy.value));
  return t;
}

Output cmd_scan(const Options& o, const std::string& command, const std::string& default_grid, int default_m) {
  Options opt = o;
  if (opt.model_file.empty() && !opt.m && opt.c.empty()) opt.m = default_m;
  if (opt.model_file.empty() && opt.h.empty()) opt.h.assign(static_cast<std::size_t>(opt.m.value_or(opt.c.size())), 0.0);
  const auto spec = resolve_model(opt);
  const auto grid = resolve_grid(opt.grid.empty() ? default_grid : opt.grid, spec.m);
  const double L = opt.L.value_or(1000.0);
  const double alpha = opt.alpha.value_or(0.0);
  require_alpha(alpha);
  if (!(L > 0.0)) fail("L must be > 0");
  const auto rows = phase::phase_scan(grid, L, alpha, spec.cartan_couplings, entropy::default_thread_count());
  return {scan_table(command, spec.m, rows), std::nullopt, nullptr};
}

Output cmd_diag(const Options& o) {
  const auto spec = resolve_model(o);
  if (spec.field.empty()) fail("diag needs --h");
  if (!spec.n_sites) fail("diag needs --N");
  const int n_sites = *spec.n_sites;
  const std::string method = o.method.empty() ? "sector" : o.method;
  if (method != "sector" && method != "dense") fail("--method must be sector or dense");

  diag::SectorSpectrum spectrum;
  std::optional<diag::GroundStateReport> report;
  if (method == "sector") {
    spectrum = diag::sector_spectrum(spec, n_sites);
  }
  bool dense_ok = true;
  try {
    diag::dense_dimension(spec.m, n_sites);
  } catch (const ResourceLimitError&) {
    if (method == "dense") throw;
    dense_ok = false;
  }
  if (dense_ok) report = diag::ground_state_verify(spec, n_sites);
  if (method == "dense") {
    // Dense eigenvalues are not resolved by sector; report them under an empty label.
    const auto ev = diag::dense_spectrum(spec, n_sites);
    spectrum.sectors.emplace(diag::SectorLabel{}, ev);
    spectrum.ground_energy = ev.front();
    spectrum.ground_degeneracy = report->degeneracy;
    spectrum.ground_sector = report->ground_sector;
  }

  Output out;
  nlohmann::json j = diag::spectrum_to_json(spectrum, report);
  j["command"] = "diag";
  j["method"] = method;
  j["N"] = n_sites;
  j["model"] = model::model_to_json(spec);
  out.json = j;
  Table t;
  t.command = "diag";
  for (int a = 1; a <= spec.m + 1; ++a) t.columns.push_back("N" + std::to_string(a));
  t.columns.push_back("energy");
  if (method == "dense") t.columns = {"energy"};
  for (const auto& [label, energies] : spectrum.sectors) {
    for (double e : energies) {
      std::vector<Cell> row;
      for (int k : label) row.emplace_back(static_cast<long long>(k));
      row.emplace_back(e);
      t.rows.push_back(std::move(row));
    }
  }
  out.table = std::move(t);
  return out;
}

Output cmd_fig_relerr(const Options& o) {
  Options opt = o;
  if (opt.model_file.empty() && opt.h.empty()) {
    opt.h = {0.2, 0.2};
    if (!opt.m) opt.m = 2;
  }
  const auto spec = resolve_model(opt);
  if (spec.field.empty()) fail("fig-relerr needs --h");
  const double alpha = opt.alpha.value_or(0.5);
  if (!(alpha > 0.0 && alpha < 1.0)) fail("fig-relerr needs alpha in (0,1)");
  std::vector<double> Ls;
  if (opt.L) Ls = {*opt.L};
  else Ls = phase::parse_grid_axis(opt.grid.empty() ? "50:1000:10" : opt.grid).points();

  const auto n = phase::project_to_simplex(spec.m, spec.cartan_couplings, spec.field).densities;
  Table t;
  t.command = "fig-relerr";
  t.columns = {"L", "S_exact", "S_asym", "rel_error"};
  const int threads = entropy::default_thread_count();
  for (double Lval : Ls) {
    if (!is_integer(Lval) || Lval < 1) fail("L must be a positive integer");
    const int L = static_cast<int>(Lval);
    const double n_real = L / alpha;
    const int n_sites = static_cast<int>(std::lround(n_real));
    if (std::abs(n_real - n_sites) > 1e-9) fail("L/alpha must be an integer");
    const rdm::BlockSpec block{n_sites, L, model::finite_magnon_numbers(n, n_sites).counts};
    block.validate();
    check_support(block);
    const double exact = entropy::exact_entropies(block, {}, threads).von_neumann;
    const double asym = entropy::vn_asymptotic(entropy::reduce_densities(n.values, L, alpha)).value;
    t.rows.push_back({static_cast<long long>(L), exact, asym, (exact - asym) / exact});
  }
  return {t, std::nullopt, nullptr};
}

Output dispatch(const std::string& command, const Options& o) {
  if (command == "entropy") return cmd_entropy(o);
  if (command == "spectrum") return cmd_spectrum(o);
  if (command == "phase") return cmd_phase(o);
  if (command == "scan") return cmd_scan(o, "scan", "-2:2:0.05", 2);
  if (command == "diag") return cmd_diag(o);
  if (command == "fig-relerr") return cmd_fig_relerr(o);
  if (command == "fig-surface") {
    Options opt = o;
    if (opt.m && *opt.m != 2) fail("fig-surface is the su(3) surface (m = 2)");
    opt.m = 2;
    return cmd_scan(opt, "fig-surface", "-2:2:0.05", 2);
  }
  fail("unknown command " + command);
  return {};
}

void write_output(const Output& result, const Options& o, std::ostream& out) {
  auto emit = [&](std::ostream& s) {
    if (o.format == "json") {
      if (result.json) s << result.json->dump(2) << '\n';
      else result.table.write_json(s);
    } else {
      if (result.csv) result.csv(s);
      else result.table.write_csv(s);
    }
  };
  if (o.out_file.empty()) {
    emit(out);
    return;
  }
  std::ofstream f(o.out_file, std::ios::binary);
  if (!f) fail("cannot open output file " + o.out_file);
  emit(f);
  if (!f) throw std::runtime_error("failed writing " + o.out_file);
}

std::string one_line(std::string msg) {
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return msg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement entropies and phases of generalized LMG models", "glmg"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Options o;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"entropy", "exact and/or asymptotic block entropies"},
      {"spectrum", "reduced density matrix eigenvalues"},
      {"phase", "ground-state phase and densities at one field"},
      {"scan", "phase and entropy over a field grid"},
      {"diag", "ground state by exact diagonalization"},
      {"fig-relerr", "exact vs asymptotic entropy over L"},
      {"fig-surface", "su(3) entropy surface over (h1,h2)"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--model", o.model_file, "JSON model file")->check(CLI::ExistingFile);
    sub->add_option("--m", o.m, "rank m of su(m+1)");
    sub->add_option("--c", o.c, "Cartan couplings c_1..c_m")->delimiter(',');
    sub->add_option("--h", o.h, "field h_1..h_m")->delimiter(',');
    sub->add_option("--N", o.n_sites, "number of sites");
    sub->add_option("--Na", o.magnons, "magnon numbers N_1..N_{m+1}")->delimiter(',');
    sub->add_option("--L", o.L, "block size");
    sub->add_option("--alpha", o.alpha, "block fraction L/N");
    sub->add_option("--q", o.q, "Renyi/Tsallis indices")->delimiter(',');
    sub->add_option("--grid", o.grid, "min:max:step (comma-separated per axis)");
    sub->add_option("--method", o.method, "entropy: exact|asymptotic|both; diag: sector|dense");
    sub->add_option("--out", o.out_file, "output file (default stdout)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitValidation;
  }

  std::string command;
  for (auto* sub : app.get_subcommands()) command = sub->get_name();

  try {
    write_output(dispatch(command, o), o, out);
    return kExitOk;
  } catch (const ResourceLimitError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitResourceLimit;
  } catch (const std::invalid_argument& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitFailure;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace glmg::cli
