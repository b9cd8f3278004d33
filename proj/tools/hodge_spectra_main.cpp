// Command-line front end. Everything below talks to the shared library
// exclusively through the C interface in hodge_spectra.h.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hodge_spectra.h"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

[[noreturn]] void die(const std::string& context) {
  std::cerr << "error: " << context << ": " << hs_last_error() << "\n";
  std::exit(1);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open config file " << path << "\n";
    std::exit(1);
  }
  try {
    return json::parse(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << path << " is not valid JSON: " << e.what()
              << "\n";
    std::exit(1);
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path.string() << "\n";
    std::exit(1);
  }
  out << text;
}

std::vector<double> parse_center(const std::string& spec) {
  std::vector<double> out;
  std::stringstream stream(spec);
  std::string item;
  while (std::getline(stream, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      std::cerr << "error: --center expects comma-separated reals, got '"
                << spec << "'\n";
      std::exit(1);
    }
  }
  if (out.empty()) {
    std::cerr << "error: --center expects comma-separated reals\n";
    std::exit(1);
  }
  return out;
}

/// Builds (and optionally grades) the complex described by a mesh config
/// object. The caller owns the returned handle.
hs_complex* build_mesh(const json& mesh) {
  if (!mesh.contains("type")) {
    std::cerr << "error: mesh config needs a 'type' (torus | sphere)\n";
    std::exit(1);
  }
  const std::string type = mesh.at("type").get<std::string>();
  hs_complex* complex = nullptr;
  if (type == "torus") {
    const int n = mesh.value("dimension", 2);
    const int cells = mesh.value("cells_per_axis", 8);
    const double side = mesh.value("side_length", 1.0);
    if (hs_complex_build_torus(n, cells, side / cells, &complex) != HS_OK)
      die("building torus");
  } else if (type == "sphere") {
    const int m = mesh.value("dimension", 2);
    const int refinement = mesh.value("refinement", 2);
    if (hs_complex_build_sphere(m, refinement, &complex) != HS_OK)
      die("building sphere");
  } else {
    std::cerr << "error: unknown mesh type '" << type << "'\n";
    std::exit(1);
  }

  if (mesh.contains("grading")) {
    const json& grading = mesh.at("grading");
    const double rate = grading.value("rate", 0.0);
    std::vector<double> center;
    if (grading.contains("center"))
      center = grading.at("center").get<std::vector<double>>();
    else {
      // Default: the chart middle of a torus of the configured side.
      const int n = mesh.value("dimension", 2);
      const double side = mesh.value("side_length", 1.0);
      center.assign(static_cast<std::size_t>(n), 0.5 * side);
    }
    hs_complex* graded = nullptr;
    if (hs_complex_grade_radial(complex, center.data(),
                                static_cast<int>(center.size()), rate,
                                &graded) != HS_OK) {
      hs_complex_free(complex);
      die("applying radial grading");
    }
    hs_complex_free(complex);
    complex = graded;
  }
  return complex;
}

int cmd_mesh(const std::string& config_path, const std::string& out_dir) {
  const json cfg = load_json(config_path);
  hs_complex* complex = build_mesh(cfg);

  int dim = 0;
  if (hs_complex_dimension(complex, &dim) != HS_OK) die("querying dimension");
  std::cout << "mesh: dimension " << dim << "\n";
  long long euler = 0;
  for (int q = 0; q <= dim; ++q) {
    int64_t count = 0, betti = 0;
    if (hs_complex_simplex_count(complex, q, &count) != HS_OK)
      die("querying simplex count");
    if (hs_complex_betti(complex, q, &betti) != HS_OK) die("querying betti");
    euler += (q % 2 == 0 ? count : -count);
    std::cout << "  degree " << q << ": " << count << " simplices, b_" << q
              << " = " << betti << "\n";
  }
  std::cout << "  euler characteristic " << euler << "\n";

  char* text = nullptr;
  if (hs_complex_to_json(complex, &text) != HS_OK) die("serializing mesh");
  fs::create_directories(out_dir);
  write_file(fs::path(out_dir) / "mesh.json", text);
  hs_string_free(text);
  hs_complex_free(complex);
  std::cout << "wrote " << (fs::path(out_dir) / "mesh.json").string() << "\n";
  return 0;
}

int cmd_spectrum(const std::string& config_path, const std::string& out_dir,
                 double cigar_L_flag, bool has_cigar_L,
                 const std::string& center_flag) {
  const json cfg = load_json(config_path);
  if (!cfg.contains("mesh")) {
    std::cerr << "error: spectrum config needs a 'mesh' object\n";
    std::exit(1);
  }
  hs_complex* complex = build_mesh(cfg.at("mesh"));
  hs_metric* metric = nullptr;
  if (hs_metric_flat(complex, &metric) != HS_OK) die("building flat metric");

  // Conformal profile: config block, overridable from the command line.
  double cigar_L = 0.0;
  bool has_profile = false;
  std::vector<double> center;
  if (cfg.contains("metric")) {
    const json& m = cfg.at("metric");
    if (m.contains("cigar_length")) {
      cigar_L = m.at("cigar_length").get<double>();
      has_profile = true;
    }
    if (m.contains("center"))
      center = m.at("center").get<std::vector<double>>();
  }
  if (has_cigar_L) {
    cigar_L = cigar_L_flag;
    has_profile = true;
  }
  if (!center_flag.empty()) center = parse_center(center_flag);

  if (has_profile) {
    hs_metric* deformed = nullptr;
    if (hs_metric_apply_cigar(metric, cigar_L,
                              center.empty() ? nullptr : center.data(),
                              static_cast<int>(center.size()),
                              &deformed) != HS_OK)
      die("applying cigar profile");
    hs_metric_free(metric);
    metric = deformed;
  }
  if (cfg.contains("metric") &&
      cfg.at("metric").value("normalize_volume", false)) {
    hs_metric* normalized = nullptr;
    if (hs_metric_normalize_volume(metric, &normalized, nullptr) != HS_OK)
      die("normalizing volume");
    hs_metric_free(metric);
    metric = normalized;
  }

  double vol = 0.0;
  if (hs_metric_volume(metric, &vol) != HS_OK) die("computing volume");
  std::cout << "volume " << vol << "\n";

  std::vector<int> degrees = cfg.value("degrees", std::vector<int>{0});
  const int count = cfg.value("count", 6);
  const uint64_t seed = cfg.value("seed", static_cast<uint64_t>(0));
  fs::create_directories(out_dir);
  for (int p : degrees) {
    hs_spectrum* spectrum = nullptr;
    if (hs_spectrum_full(metric, p, count, seed, &spectrum) != HS_OK)
      die("solving degree " + std::to_string(p));
    char* csv = nullptr;
    char* js = nullptr;
    if (hs_spectrum_to_csv(spectrum, &csv) != HS_OK ||
        hs_spectrum_to_json(spectrum, &js) != HS_OK)
      die("serializing spectrum");
    const std::string stem = "spectrum_p" + std::to_string(p);
    write_file(fs::path(out_dir) / (stem + ".csv"), csv);
    write_file(fs::path(out_dir) / (stem + ".json"), js);
    hs_string_free(csv);
    hs_string_free(js);

    int64_t size = 0;
    hs_spectrum_size(spectrum, &size);
    std::cout << "degree " << p << ":";
    for (int64_t i = 0; i < size; ++i) {
      double value = 0.0;
      int multiplicity = 0;
      const char* cls = nullptr;
      hs_spectrum_entry(spectrum, i, &value, &multiplicity, &cls);
      std::cout << " " << value << "(" << cls << " x" << multiplicity << ")";
    }
    std::cout << "\n";
    hs_spectrum_free(spectrum);
  }

  hs_metric_free(metric);
  hs_complex_free(complex);
  std::cout << "wrote spectra under " << out_dir << "\n";
  return 0;
}

int cmd_experiment(const std::string& name, const std::string& config_path,
                   const std::string& out_dir, double cigar_L_flag,
                   bool has_cigar_L, const std::string& center_flag) {
  json cfg = load_json(config_path);
  cfg["experiment"] = name;
  if (has_cigar_L) cfg["schedule"] = json::array({cigar_L_flag});
  if (!center_flag.empty()) cfg["center"] = parse_center(center_flag);

  int exit_code = 0;
  const std::string doc = cfg.dump();
  if (hs_experiment_run(doc.c_str(), out_dir.c_str(), &exit_code) != HS_OK)
    die("running experiment " + name);
  const char* verdict = exit_code == 0   ? "pass"
                        : exit_code == 2 ? "inconclusive"
                                         : "fail";
  std::cout << "experiment " << name << ": " << verdict << " (outputs in "
            << out_dir << ")\n";
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "hodge-spectra: Hodge-Laplacian spectra of simplicial tori and spheres "
      "under conformal deformation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  double cigar_L = 0.0;
  std::string center_flag;

  CLI::App* mesh =
      app.add_subcommand("mesh", "Build a mesh and write its JSON form");
  mesh->add_option("--config", config_path, "mesh config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  mesh->add_option("--out", out_dir, "output directory");

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "Solve full form spectra for one metric");
  spectrum->add_option("--config", config_path, "spectrum config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  spectrum->add_option("--out", out_dir, "output directory");
  CLI::Option* l_opt = spectrum->add_option(
      "--cigar-L", cigar_L, "override the conformal profile length");
  spectrum->add_option("--center", center_flag,
                       "override the profile center (comma-separated)");

  CLI::App* experiment = app.add_subcommand(
      "experiment",
      "Run identity | cigar_growth | negative_control | gap_closing");
  std::string experiment_name;
  experiment->add_option("name", experiment_name, "experiment name")
      ->required();
  experiment->add_option("--config", config_path, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  experiment->add_option("--out", out_dir, "output directory");
  CLI::Option* el_opt = experiment->add_option(
      "--cigar-L", cigar_L, "replace the schedule with a single length");
  experiment->add_option("--center", center_flag,
                         "override the profile center (comma-separated)");

  CLI11_PARSE(app, argc, argv);

  if (mesh->parsed()) return cmd_mesh(config_path, out_dir);
  if (spectrum->parsed())
    return cmd_spectrum(config_path, out_dir, cigar_L, l_opt->count() > 0,
                        center_flag);
  return cmd_experiment(experiment_name, config_path, out_dir, cigar_L,
                        el_opt->count() > 0, center_flag);
}
