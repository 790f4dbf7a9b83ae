#pragma once

// `tlsq` command-line front end: fit, simulate, field, derive.
// run() takes explicit streams so the commands can be driven in-process.

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <cstdint>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "tlsq/tlsq.hpp"

namespace tlsq::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kFormatVersion = "1";

using ordered_json = nlohmann::ordered_json;

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

// What every emitted file starts with. No timestamps: reruns are byte-identical.
struct Provenance {
  std::string command;
  std::uint64_t seed = kDefaultSeed;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256

  void add_input(const std::string& path) { inputs.emplace_back(path, sha256_hex(csv::read_file(path))); }

  std::vector<std::string> lines() const {
    std::vector<std::string> out = {fmt::format("tool=tlsq {}", kVersion),
                                    fmt::format("format_version={}", kFormatVersion),
                                    "command=" + command, fmt::format("seed={}", seed)};
    for (const auto& [path, digest] : inputs) out.push_back("input_sha256 " + path + " = " + digest);
    return out;
  }

  std::string comment_block() const {
    std::string text;
    for (const auto& line : lines()) text += "# " + line + "\n";
    return text;
  }

  ordered_json json() const {
    ordered_json j;
    j["tool"] = "tlsq";
    j["version"] = kVersion;
    j["format_version"] = kFormatVersion;
    j["command"] = command;
    j["seed"] = seed;
    j["inputs"] = ordered_json::array();
    for (const auto& [path, digest] : inputs) j["inputs"].push_back({{"path", path}, {"sha256", digest}});
    return j;
  }
};

inline std::string command_line(int argc, const char* const* argv) {
  std::string text = "tlsq";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    const bool quote = arg.empty() || arg.find_first_of(" \t\"'") != std::string::npos;
    text += quote ? " \"" + arg + "\"" : " " + arg;
  }
  return text;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  file << text;
  if (!file) throw std::runtime_error("error while writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Field-map source shared by fit and simulate: a CSV file or the pillbox.

struct FieldOptions {
  std::string path;
  double radius = PillboxGeometry{}.radius;
  double length = PillboxGeometry{}.length;
  std::size_t n_radial = PillboxGeometry{}.n_radial;
};

inline void add_field_options(CLI::App& cmd, FieldOptions& opt, bool with_file) {
  if (with_file)
    cmd.add_option("--field-map", opt.path, "field-map CSV (default: analytic pillbox)");
  cmd.add_option("--radius", opt.radius, "pillbox radius (m)")->capture_default_str();
  cmd.add_option("--length", opt.length, "pillbox length (m)")->capture_default_str();
  cmd.add_option("--n-radial", opt.n_radial, "Gauss-Legendre radii per end cap (>= 8)")->capture_default_str();
}

inline PillboxGeometry checked_geometry(const FieldOptions& opt) {
  if (!(opt.radius > 0.0)) throw UsageError("--radius must be positive");
  if (!(opt.length > 0.0)) throw UsageError("--length must be positive");
  if (opt.n_radial < 8) throw UsageError("--n-radial must be at least 8");
  return {opt.radius, opt.length, opt.n_radial};
}

inline FieldMap load_field(const FieldOptions& opt, Provenance& prov) {
  if (!opt.path.empty()) {
    prov.add_input(opt.path);
    return load_field_map(opt.path);
  }
  return pillbox_surface_map(checked_geometry(opt));
}

inline std::vector<ModelId> parse_model_list(const std::string& list) {
  std::vector<ModelId> ids;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    name = std::string(csv::trim(name));
    if (!name.empty()) ids.push_back(parse_model_id(name));
  }
  if (ids.empty()) throw UsageError("--models lists no models");
  return ids;
}

// ---------------------------------------------------------------------------
// fit

struct FitOptions {
  std::string dataset;
  FieldOptions field;
  std::string models = "interacting,nonint1,nonint2,beta";
  double emax = kDefaultEaccMax;
  double sigma = 0.0;
  double plateau_cutoff = 0.0;
  bool has_sigma = false;
  bool has_plateau = false;
  std::size_t starts = 8;
  double tol = 1e-6;
  std::uint64_t seed = kDefaultSeed;
  std::string out = "tlsq_fit";
  std::size_t curve_points = 200;
};

inline ordered_json result_json(const FitResult& r) {
  ordered_json j;
  j["model"] = r.name();
  j["description"] = r.model.id.description();
  j["status"] = "ok";
  j["chi2"] = r.chi2;
  j["n_points"] = r.n_points;
  j["dof"] = r.dof;
  j["chi2_per_dof"] = r.chi2_per_dof;
  j["n_starts_converged"] = r.n_starts_converged;
  ordered_json params = ordered_json::array();
  for (std::size_t k = 0; k < r.layout.size(); ++k) {
    ordered_json p;
    p["name"] = r.layout[k].name;
    p["unit"] = r.layout[k].unit;
    p["value"] = r.params()[k];
    const ProfileBound bound = k < r.param_errors.size() ? r.param_errors[k] : ProfileBound{};
    p["error_lower"] = bound.lower ? ordered_json(*bound.lower) : ordered_json(nullptr);
    p["error_upper"] = bound.upper ? ordered_json(*bound.upper) : ordered_json(nullptr);
    p["near_bound"] = k < r.near_bound.size() && r.near_bound[k];
    params.push_back(p);
  }
  j["parameters"] = params;
  j["warnings"] = r.warnings;
  return j;
}

inline std::string curve_csv(const FitResult& r, const Dataset& data, const FieldMap& map,
                             const Provenance& prov, std::size_t n_points) {
  double lo = 0.0, hi = 0.0;
  for (const auto& p : data.points) {
    if (p.e_acc > 0.0 && (lo == 0.0 || p.e_acc < lo)) lo = p.e_acc;
    hi = std::max(hi, p.e_acc);
  }
  std::vector<double> grid;
  if (lo > 0.0 && lo < hi && n_points >= 2)
    grid = log_grid({lo, hi, n_points});
  else
    grid = {hi};
  std::string text = prov.comment_block();
  text += "# model=" + r.name() + "\n";
  text += fmt::format("# e_acc_max_included={}\n", data.e_acc_max_included);
  text += "e_acc_V_per_m,q_model\n";
  for (double e : grid) text += fmt::format("{},{}\n", e, model_q(r.model, map, e));
  return text;
}

inline int cmd_fit(const FitOptions& opt, Provenance prov, std::ostream& out, std::ostream& err) {
  const auto ids = parse_model_list(opt.models);
  if (opt.starts == 0) throw UsageError("--starts must be at least 1");
  if (!(opt.tol > 0.0)) throw UsageError("--tol must be positive");
  if (!(opt.emax > 0.0)) throw UsageError("--emax must be positive");
  if (opt.has_sigma && !(opt.sigma > 0.0)) throw UsageError("--sigma must be positive");

  prov.add_input(opt.dataset);
  Dataset data = load_dataset(opt.dataset);
  data.e_acc_max_included = opt.emax;
  if (data.label.empty()) data.label = std::filesystem::path(opt.dataset).stem().string();
  const FieldMap map = load_field(opt.field, prov);

  FitConfig cfg;
  cfg.n_starts = opt.starts;
  cfg.tol = opt.tol;
  cfg.seed = opt.seed;
  if (opt.has_sigma) cfg.sigma = opt.sigma;
  if (opt.has_plateau) cfg.plateau_cutoff = opt.plateau_cutoff;

  std::vector<FitResult> results;
  std::vector<std::pair<std::string, std::string>> failures;
  for (const auto& id : ids) {
    try {
      results.push_back(fit(id, data, map, cfg));
      for (const auto& w : results.back().warnings) err << "warning: " << id.name() << ": " << w << '\n';
    } catch (const std::exception& e) {
      failures.emplace_back(id.name(), e.what());
      err << "error: " << id.name() << ": " << e.what() << '\n';
    }
  }
  const auto ranked = compare_models(results);

  std::string table = fmt::format("dataset: {} ({} points, {} with e_acc <= {} V/m)\n", data.label,
                                  data.points.size(), data.included().size(), opt.emax);
  if (!ranked.empty()) table += fmt::format("sigma_exp: {:.4g}\n", ranked.front().sigma_exp);
  table += format_comparison_table(ranked);
  for (const auto& [name, message] : failures) table += fmt::format("failed {}: {}\n", name, message);
  for (const auto& r : ranked)
    if (r.model.id.kind == ModelKind::dist_gaussian_dipole || r.model.id.kind == ModelKind::dist_exponential_dipole)
      table += fmt::format("note: {} couples c ~ p^2 and E_c ~ 1/p around the mean dipole; c is the ensemble "
                           "zero-field coefficient\n",
                           r.name());

  std::filesystem::create_directories(opt.out);
  const std::filesystem::path dir(opt.out);
  write_text((dir / "comparison.txt").string(), prov.comment_block() + table);
  for (const auto& r : ranked)
    write_text((dir / ("curve_" + r.name() + ".csv")).string(),
               curve_csv(r, data, map, prov, opt.curve_points));

  ordered_json j;
  j["provenance"] = prov.json();
  j["dataset"] = {{"label", data.label},
                  {"path", opt.dataset},
                  {"temperature_K", data.temperature},
                  {"frequency_Hz", data.frequency},
                  {"n_points", data.points.size()},
                  {"e_acc_max_included", data.e_acc_max_included}};
  j["field_map"] = map.label;
  j["config"] = {{"starts", opt.starts},
                 {"tol", opt.tol},
                 {"sigma", opt.has_sigma ? ordered_json(opt.sigma) : ordered_json(nullptr)},
                 {"plateau_cutoff", opt.has_plateau ? ordered_json(opt.plateau_cutoff) : ordered_json(nullptr)}};
  j["sigma_exp"] = ranked.empty() ? ordered_json(nullptr) : ordered_json(ranked.front().sigma_exp);
  j["errors_are"] = "conditional 1-sigma: one parameter moved, others frozen at the best fit";
  ordered_json ranking = ordered_json::array();
  for (const auto& r : ranked) ranking.push_back(r.name());
  j["ranking"] = ranking;
  ordered_json models = ordered_json::array();
  for (const auto& r : ranked) models.push_back(result_json(r));
  for (const auto& [name, message] : failures)
    models.push_back({{"model", name}, {"status", "error"}, {"error", message}});
  j["models"] = models;
  write_text((dir / "results.json").string(), j.dump(2) + "\n");

  out << table;
  return failures.empty() ? 0 : 1;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string scenario = "electropolished";
  std::string model = "interacting";
  std::vector<std::string> params;
  FieldOptions field;
  double emin = 1e3;
  double emax = 1e6;
  std::size_t points = 30;
  double sigma = 0.0;
  bool has_sigma = false;
  std::uint64_t seed = kDefaultSeed;
  double temperature = 1.5;
  double frequency = 1.3e9;
  std::string label;
  std::string out;
};

inline int cmd_simulate(const SimulateOptions& opt, Provenance prov, std::ostream& out, std::ostream& err) {
  ModelSpec truth;
  double noise = 0.0;
  if (opt.scenario == "electropolished") {
    truth = electropolished_truth();
    noise = kElectropolishedSigma;
  } else if (opt.scenario == "anodized") {
    truth = anodized_truth();
    noise = kAnodizedSigma;
  } else {
    throw UsageError("--scenario must be electropolished or anodized");
  }
  const ModelId id = parse_model_id(opt.model);
  const auto layout = parameter_layout(id);
  std::vector<bool> given(layout.size(), id == truth.id);
  if (id != truth.id) truth = ModelSpec{id, std::vector<double>(layout.size(), 0.0)};
  for (const auto& assignment : opt.params) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw UsageError("--param expects NAME=VALUE, got '" + assignment + "'");
    const std::string name = assignment.substr(0, eq);
    std::size_t k = 0;
    while (k < layout.size() && layout[k].name != name) ++k;
    if (k == layout.size()) throw UsageError("--param: " + id.name() + " has no parameter '" + name + "'");
    try {
      truth.params[k] = csv::parse_double(assignment.substr(eq + 1), 0, 0);
    } catch (const ParseError&) {
      throw UsageError("--param: cannot parse value in '" + assignment + "'");
    }
    given[k] = true;
  }
  for (std::size_t k = 0; k < layout.size(); ++k)
    if (!given[k]) throw UsageError("--param " + layout[k].name + "=VALUE is required for model " + id.name());
  if (opt.has_sigma) noise = opt.sigma;
  if (!(noise >= 0.0)) throw UsageError("--sigma must be non-negative");
  if (!(opt.temperature > 0.0)) throw UsageError("--temperature must be positive");
  if (!(opt.frequency > 0.0)) throw UsageError("--frequency must be positive");
  const SimulationGrid grid{opt.emin, opt.emax, opt.points};
  log_grid(grid);  // flag validation before any work

  const FieldMap map = load_field(opt.field, prov);
  truth.ctx = ThermalContext::from_frequency(opt.temperature, opt.frequency);
  Dataset data = simulate_dataset(truth, map, grid, noise, opt.seed, opt.temperature, opt.frequency);
  data.label = opt.label.empty() ? fmt::format("synthetic {} {}", opt.scenario, id.name()) : opt.label;
  for (const auto& line : prov.lines()) data.comments.push_back(" " + line);
  data.comments.push_back(" model=" + id.name());
  for (std::size_t k = 0; k < layout.size(); ++k)
    data.comments.push_back(fmt::format(" truth_{}={}", layout[k].name, truth.params[k]));
  data.comments.push_back(fmt::format(" noise_sigma={}", noise));
  data.comments.push_back(" field_map=" + map.label);

  std::ostringstream text;
  write_dataset(text, data);
  if (opt.out.empty()) {
    out << text.str();
  } else {
    write_text(opt.out, text.str());
    err << fmt::format("wrote {} points to {}\n", data.points.size(), opt.out);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// field

struct FieldCommandOptions {
  FieldOptions field;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

inline int cmd_field(const FieldCommandOptions& opt, Provenance prov, std::ostream& out, std::ostream& err) {
  const auto geom = checked_geometry(opt.field);
  const FieldMap map = pillbox_surface_map(geom);
  const double f0 = pillbox_resonance_frequency(geom.radius);
  std::vector<std::string> preamble = prov.lines();
  preamble.push_back(fmt::format("f0_Hz={}", f0));
  preamble.push_back(fmt::format("samples={}", map.samples.size()));
  preamble.push_back(fmt::format("total_area_m2={}", map.total_area()));
  std::ostringstream text;
  write_field_map(text, map, preamble);
  const std::string summary = fmt::format("f0 = {:.6g} Hz, W_total_ref = {:.6g} J at E_acc = {} V/m, {} samples\n",
                                          f0, map.w_total_ref, map.e_acc_ref, map.samples.size());
  if (opt.out.empty()) {
    out << text.str();
    err << summary;
  } else {
    write_text(opt.out, text.str());
    out << summary;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// derive

struct DeriveOptions {
  std::string results;
  std::string model;
  double e_c = 0.0, c = 0.0, thickness = 0.0;
  bool has_e_c = false, has_c = false, has_thickness = false;
  double eps_r = kDefaultOxideEpsR;
  double delta_spread = kDefaultDeltaSpreadK;
  double dipole = kDefaultDipole;
  double temperature = 1.5, frequency = 1.3e9;
  bool has_temperature = false, has_frequency = false;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

inline std::string derive_table(const MicroscopicEstimate& est, const ThermalContext& ctx) {
  const auto& in = est.inputs_echo;
  std::string t = fmt::format("{:<34} {:>24}  {}\n", "quantity", "value", "unit");
  auto row = [&](const char* name, const std::string& value, const char* unit) {
    t += fmt::format("{:<34} {:>24}  {}\n", name, value, unit);
  };
  row("assumed dipole p", fmt::format("{}", est.dipole_assumed), "C m");
  row("critical field E_c", fmt::format("{}", in.e_c), "V/m");
  row("coefficient c", fmt::format("{}", in.c), "C^2/J");
  row("temperature", fmt::format("{}", ctx.temperature), "K");
  row("frequency", fmt::format("{}", ctx.frequency()), "Hz");
  row("oxide thickness", fmt::format("{}", in.thickness), "m");
  row("oxide eps_r", fmt::format("{}", in.eps_r), "");
  row("asymmetry spread Delta/k_B", fmt::format("{}", in.delta_spread_k), "K");
  row("sqrt(T1 T2)", fmt::format("{:.4g}", est.sqrt_t1t2), "s");
  row("TLS area density sigma_TLS", fmt::format("{:.4g}", est.sigma_tls_area * 1e-4), "1/cm^2");
  row("zero-field loss tangent tan_delta", fmt::format("{:.4g}", est.tan_delta_zero_field), "");
  return t;
}

inline int cmd_derive(const DeriveOptions& opt, Provenance prov, std::ostream& out, std::ostream& err) {
  if (!opt.has_thickness) throw UsageError("missing required flag --thickness (oxide thickness in m)");
  double e_c = opt.e_c, c = opt.c;
  double temperature = opt.temperature, frequency = opt.frequency;
  if (!opt.results.empty()) {
    prov.add_input(opt.results);
    ordered_json j;
    try {
      j = ordered_json::parse(csv::read_file(opt.results));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("results file is not valid JSON: ") + e.what(), 0, 0);
    }
    const ordered_json* chosen = nullptr;
    for (const auto& m : j.at("models")) {
      if (m.value("status", "") != "ok") continue;
      if (!opt.model.empty() && m.at("model") != opt.model) continue;
      bool has_e_c = false, has_c = false;
      for (const auto& p : m.at("parameters")) {
        has_e_c = has_e_c || p.at("name") == "e_c";
        has_c = has_c || p.at("name") == "c";
      }
      if (has_e_c && has_c) {
        chosen = &m;
        break;
      }
    }
    if (!chosen)
      throw UsageError(opt.model.empty() ? "results file has no fitted model with e_c and c"
                                         : "results file has no successful fit of model '" + opt.model + "'");
    for (const auto& p : chosen->at("parameters")) {
      if (p.at("name") == "e_c" && !opt.has_e_c) e_c = p.at("value").get<double>();
      if (p.at("name") == "c" && !opt.has_c) c = p.at("value").get<double>();
    }
    if (!opt.has_temperature) temperature = j.at("dataset").at("temperature_K").get<double>();
    if (!opt.has_frequency) frequency = j.at("dataset").at("frequency_Hz").get<double>();
    err << "using " << chosen->at("model").get<std::string>() << " fit from " << opt.results << '\n';
  } else if (!opt.has_e_c || !opt.has_c) {
    throw UsageError("give a fit results file or both --e-c and --c");
  }

  const auto ctx = ThermalContext::from_frequency(temperature, frequency);
  const auto est = derive_microscopic({e_c, c, opt.thickness, opt.eps_r, opt.delta_spread, opt.dipole}, ctx);
  const std::string table = derive_table(est, ctx);
  if (!opt.out.empty()) write_text(opt.out, prov.comment_block() + table);
  out << table;
  return 0;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit TLS loss models to SRF cavity Q(E_acc) data"};
  app.set_version_flag("--version", std::string("tlsq ") + kVersion);
  app.require_subcommand(1);

  FitOptions fit_opt;
  auto* fit_cmd = app.add_subcommand("fit", "fit loss models to a Q(E_acc) dataset");
  fit_cmd->add_option("dataset", fit_opt.dataset, "dataset CSV")->required();
  add_field_options(*fit_cmd, fit_opt.field, true);
  fit_cmd->add_option("--models", fit_opt.models, "comma-separated model names")->capture_default_str();
  fit_cmd->add_option("--emax", fit_opt.emax, "exclude points above this E_acc (V/m)")->capture_default_str();
  auto* fit_sigma = fit_cmd->add_option("--sigma", fit_opt.sigma, "Q noise level (default: plateau estimate)");
  auto* fit_plateau = fit_cmd->add_option("--plateau-cutoff", fit_opt.plateau_cutoff,
                                          "upper E_acc of the plateau used for sigma (V/m)");
  fit_cmd->add_option("--starts", fit_opt.starts, "optimizer starts per model")->capture_default_str();
  fit_cmd->add_option("--tol", fit_opt.tol, "relative simplex tolerance")->capture_default_str();
  fit_cmd->add_option("--seed", fit_opt.seed, "seed for optimizer starts")->capture_default_str();
  fit_cmd->add_option("--out", fit_opt.out, "output directory")->capture_default_str();
  fit_cmd->add_option("--curve-points", fit_opt.curve_points, "points per model curve")->capture_default_str();

  SimulateOptions sim_opt;
  auto* sim_cmd = app.add_subcommand("simulate", "generate a synthetic Q(E_acc) dataset");
  sim_cmd->add_option("--scenario", sim_opt.scenario, "electropolished or anodized truth")->capture_default_str();
  sim_cmd->add_option("--model", sim_opt.model, "model used to generate the data")->capture_default_str();
  sim_cmd->add_option("--param", sim_opt.params, "NAME=VALUE truth override (repeatable)");
  add_field_options(*sim_cmd, sim_opt.field, true);
  sim_cmd->add_option("--emin", sim_opt.emin, "lowest E_acc (V/m)")->capture_default_str();
  sim_cmd->add_option("--emax", sim_opt.emax, "highest E_acc (V/m)")->capture_default_str();
  sim_cmd->add_option("--points", sim_opt.points, "number of log-spaced points")->capture_default_str();
  auto* sim_sigma = sim_cmd->add_option("--sigma", sim_opt.sigma, "Gaussian noise on Q (default per scenario)");
  sim_cmd->add_option("--seed", sim_opt.seed, "noise seed")->capture_default_str();
  sim_cmd->add_option("--temperature", sim_opt.temperature, "K")->capture_default_str();
  sim_cmd->add_option("--frequency", sim_opt.frequency, "Hz")->capture_default_str();
  sim_cmd->add_option("--label", sim_opt.label, "dataset label");
  sim_cmd->add_option("--out", sim_opt.out, "output CSV (default: stdout)");

  FieldCommandOptions field_opt;
  auto* field_cmd = app.add_subcommand("field", "write the pillbox TM010 surface field map");
  add_field_options(*field_cmd, field_opt.field, false);
  field_cmd->add_option("--seed", field_opt.seed, "recorded in the header (the map is deterministic)");
  field_cmd->add_option("--out", field_opt.out, "output CSV (default: stdout)");

  DeriveOptions der_opt;
  auto* der_cmd = app.add_subcommand("derive", "microscopic TLS quantities from E_c and c");
  der_cmd->add_option("results", der_opt.results, "results.json written by fit");
  der_cmd->add_option("--model", der_opt.model, "model entry to use from the results file");
  auto* der_ec = der_cmd->add_option("--e-c", der_opt.e_c, "critical field (V/m)");
  auto* der_c = der_cmd->add_option("--c", der_opt.c, "species coefficient (C^2/J)");
  auto* der_thick = der_cmd->add_option("--thickness", der_opt.thickness, "oxide thickness (m)");
  der_cmd->add_option("--eps-r", der_opt.eps_r, "oxide relative permittivity")->capture_default_str();
  der_cmd->add_option("--delta-spread", der_opt.delta_spread, "TLS asymmetry spread Delta/k_B (K)")
      ->capture_default_str();
  der_cmd->add_option("--dipole", der_opt.dipole, "assumed TLS dipole (C m)")->capture_default_str();
  auto* der_temp = der_cmd->add_option("--temperature", der_opt.temperature, "K (default 1.5 or from results)");
  auto* der_freq = der_cmd->add_option("--frequency", der_opt.frequency, "Hz (default 1.3e9 or from results)");
  der_cmd->add_option("--seed", der_opt.seed, "recorded in the header");
  der_cmd->add_option("--out", der_opt.out, "also write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  Provenance prov;
  prov.command = command_line(argc, argv);
  try {
    if (fit_cmd->parsed()) {
      fit_opt.has_sigma = fit_sigma->count() > 0;
      fit_opt.has_plateau = fit_plateau->count() > 0;
      prov.seed = fit_opt.seed;
      return cmd_fit(fit_opt, prov, out, err);
    }
    if (sim_cmd->parsed()) {
      sim_opt.has_sigma = sim_sigma->count() > 0;
      prov.seed = sim_opt.seed;
      return cmd_simulate(sim_opt, prov, out, err);
    }
    if (field_cmd->parsed()) {
      prov.seed = field_opt.seed;
      return cmd_field(field_opt, prov, out, err);
    }
    der_opt.has_e_c = der_ec->count() > 0;
    der_opt.has_c = der_c->count() > 0;
    der_opt.has_thickness = der_thick->count() > 0;
    der_opt.has_temperature = der_temp->count() > 0;
    der_opt.has_frequency = der_freq->count() > 0;
    prov.seed = der_opt.seed;
    return cmd_derive(der_opt, prov, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace tlsq::cli
